//! Text syntax for elements: `c * g1^e1*g2^e2 * e[2*lam0 - lam1]`.
//!
//! The parser accepts arbitrary sums, products, powers and parentheses and
//! expands them with the graded product. The printer emits the canonical
//! expanded form, so `parse(print(x)) == x`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::{Element, GradedAlgebra, Monomial};
use crate::error::{Error, Result};
use crate::format_rational;
use crate::module::ModuleElement;
use crate::novikov::{ExponentDisplay, NovikovExponent};
use crate::Q;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    ClassOpen,
    RBracket,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Location of the expression inside its file, for diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct Origin {
    pub line: usize,
    pub column: usize,
}

impl Origin {
    pub fn start() -> Self {
        Origin { line: 1, column: 1 }
    }

    fn err(&self, col: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column + col,
            message: message.into(),
        }
    }
}

fn tokenize(src: &str, origin: Origin) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ']' => Tok::RBracket,
            d if d.is_ascii_digit() => {
                let start = i;
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..=i].iter().collect();
                Tok::Num(s.parse().map_err(|_| origin.err(col, "bad number"))?)
            }
            a if is_ident_start(a) => {
                let start = i;
                while i + 1 < chars.len() && is_ident_char(chars[i + 1]) {
                    i += 1;
                }
                let s: String = chars[start..=i].iter().collect();
                if s == "e" {
                    let mut j = i + 1;
                    while j < chars.len() && chars[j].is_whitespace() {
                        j += 1;
                    }
                    if j < chars.len() && chars[j] == '[' {
                        i = j;
                        Tok::ClassOpen
                    } else {
                        return Err(origin.err(col, "`e` is reserved for class factors `e[...]`"));
                    }
                } else {
                    Tok::Ident(s)
                }
            }
            other => return Err(origin.err(col, format!("unexpected character `{other}`"))),
        };
        out.push(Spanned { tok, col });
        i += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum Expr {
    Num(Q),
    Name(String, usize),
    Class(Vec<(i64, String, usize)>),
    Sum(Vec<(bool, Expr)>),
    Product(Vec<Expr>),
    Power(Box<Expr>, u32),
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    origin: Origin,
    end_col: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|s| s.col)
            .unwrap_or(self.end_col)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let col = self.col();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(self
                .origin
                .err(col, format!("expected {what}, found {t:?}"))),
            None => Err(self
                .origin
                .err(col, format!("expected {what}, found end of input"))),
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        let mut negative = false;
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                negative = true;
            }
            Some(Tok::Plus) => {
                self.bump();
            }
            _ => {}
        }
        terms.push((negative, self.product()?));
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    terms.push((false, self.product()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    terms.push((true, self.product()?));
                }
                _ => break,
            }
        }
        Ok(Expr::Sum(terms))
    }

    fn product(&mut self) -> Result<Expr> {
        let mut factors = vec![self.power()?];
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            factors.push(self.power()?);
        }
        Ok(Expr::Product(factors))
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let col = self.col();
            match self.bump() {
                Some(Tok::Num(n)) => {
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| self.origin.err(col, "exponent too large"))?;
                    return Ok(Expr::Power(Box::new(base), e));
                }
                _ => {
                    return Err(self
                        .origin
                        .err(col, "expected a non-negative integer exponent"))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Num(n)) => {
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    let dcol = self.col();
                    match self.bump() {
                        Some(Tok::Num(d)) if !d.is_zero() => Ok(Expr::Num(Q::new(n, d))),
                        Some(Tok::Num(_)) => Err(self.origin.err(dcol, "zero denominator")),
                        _ => Err(self.origin.err(dcol, "expected a denominator")),
                    }
                } else {
                    Ok(Expr::Num(Q::from_integer(n)))
                }
            }
            Some(Tok::Ident(s)) => Ok(Expr::Name(s, col)),
            Some(Tok::LParen) => {
                let inner = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::ClassOpen) => {
                let parts = self.class_body()?;
                self.expect(Tok::RBracket, "`]`")?;
                Ok(Expr::Class(parts))
            }
            Some(t) => Err(self.origin.err(col, format!("unexpected {t:?}"))),
            None => Err(self.origin.err(col, "unexpected end of input")),
        }
    }

    fn class_body(&mut self) -> Result<Vec<(i64, String, usize)>> {
        let mut parts = Vec::new();
        let mut sign = 1i64;
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            sign = -1;
        }
        if let Some(Tok::Num(n)) = self.peek() {
            if n.is_zero() && parts.is_empty() && sign == 1 {
                self.bump();
                return Ok(parts);
            }
        }
        loop {
            let col = self.col();
            let coeff = match self.peek() {
                Some(Tok::Num(n)) => {
                    let n: i64 = n
                        .try_into()
                        .map_err(|_| self.origin.err(col, "class coefficient too large"))?;
                    self.bump();
                    self.expect(Tok::Star, "`*` after class coefficient")?;
                    n
                }
                _ => 1,
            };
            let ncol = self.col();
            match self.bump() {
                Some(Tok::Ident(name)) => parts.push((sign * coeff, name, ncol)),
                _ => return Err(self.origin.err(ncol, "expected a class name")),
            }
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    sign = 1;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    sign = -1;
                }
                _ => break,
            }
        }
        Ok(parts)
    }
}

fn parse_expr(src: &str, origin: Origin) -> Result<Expr> {
    let toks = tokenize(src, origin)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        origin,
        end_col: src.chars().count(),
    };
    if toks.is_empty() {
        return Err(origin.err(0, "empty expression"));
    }
    let e = p.sum()?;
    if p.pos < toks.len() {
        return Err(origin.err(p.col(), "trailing input"));
    }
    Ok(e)
}

/// Value of a subexpression: a ring part plus (for module expressions) a
/// part carrying exactly one marker.
#[derive(Debug, Clone)]
struct Value {
    ring: Element,
    module: ModuleElement,
}

struct Evaluator<'a> {
    alg: &'a GradedAlgebra,
    markers: &'a [String],
    origin: Origin,
}

impl Evaluator<'_> {
    fn ring(e: Element) -> Value {
        Value {
            ring: e,
            module: ModuleElement::zero(),
        }
    }

    fn eval(&self, e: &Expr) -> Result<Value> {
        match e {
            Expr::Num(q) => Ok(Self::ring(Element::monomial(
                Monomial::unit(self.alg.classes()),
                q.clone(),
            ))),
            Expr::Name(name, col) => {
                if let Ok(id) = self.alg.gen_id(name) {
                    return Ok(Self::ring(self.alg.gen(id)));
                }
                if let Some(k) = self.markers.iter().position(|m| m == name) {
                    let mut module = ModuleElement::zero();
                    module.add_term(Monomial::unit(self.alg.classes()), k, Q::one());
                    return Ok(Value {
                        ring: Element::zero(),
                        module,
                    });
                }
                Err(self.origin.err(*col, format!("unknown generator `{name}`")))
            }
            Expr::Class(parts) => {
                let mut v = vec![0i64; self.alg.classes()];
                for (c, name, col) in parts {
                    let i =
                        self.alg.basis.index_of(name).ok_or_else(|| {
                            self.origin.err(*col, format!("unknown class `{name}`"))
                        })?;
                    v[i] += c;
                }
                Ok(Self::ring(self.alg.class_element(NovikovExponent(v))))
            }
            Expr::Sum(terms) => {
                let mut acc = Self::ring(Element::zero());
                for (neg, t) in terms {
                    let v = self.eval(t)?;
                    let c = if *neg { -Q::one() } else { Q::one() };
                    acc.ring.add_scaled_in_place(&c, &v.ring);
                    acc.module.add_scaled_in_place(&c, &v.module);
                }
                Ok(acc)
            }
            Expr::Product(fs) => {
                let mut acc = Self::ring(self.alg.one());
                for f in fs {
                    let v = self.eval(f)?;
                    acc = self.mul(acc, v)?;
                }
                Ok(acc)
            }
            Expr::Power(b, n) => {
                let base = self.eval(b)?;
                let mut acc = Self::ring(self.alg.one());
                for _ in 0..*n {
                    acc = self.mul(acc, base.clone())?;
                }
                Ok(acc)
            }
        }
    }

    fn mul(&self, a: Value, b: Value) -> Result<Value> {
        if !a.module.is_zero() && !b.module.is_zero() {
            return Err(self
                .origin
                .err(0, "a term contains two intersection generators"));
        }
        let mut module = ModuleElement::zero();
        if !b.module.is_zero() {
            module = b.module.left_mul(self.alg, &a.ring);
        }
        if !a.module.is_zero() {
            // only central factors (scalars and classes) may follow a marker
            if b.ring.terms().any(|(m, _)| m.word_len() > 0) {
                return Err(self
                    .origin
                    .err(0, "an intersection generator must be the rightmost factor"));
            }
            module = a.module.left_mul(self.alg, &b.ring);
        }
        Ok(Value {
            ring: self.alg.mul_exact(&a.ring, &b.ring),
            module,
        })
    }
}

/// Parses an element of the algebra.
pub fn parse_element(alg: &GradedAlgebra, src: &str, origin: Origin) -> Result<Element> {
    let expr = parse_expr(src, origin)?;
    let v = Evaluator {
        alg,
        markers: &[],
        origin,
    }
    .eval(&expr)?;
    Ok(v.ring)
}

/// Parses an element of the free module on `markers`; every term must carry
/// exactly one marker.
pub fn parse_module_element(
    alg: &GradedAlgebra,
    markers: &[String],
    src: &str,
    origin: Origin,
) -> Result<ModuleElement> {
    let expr = parse_expr(src, origin)?;
    let v = Evaluator {
        alg,
        markers,
        origin,
    }
    .eval(&expr)?;
    if !v.ring.is_zero() {
        return Err(origin.err(0, "term without an intersection generator"));
    }
    Ok(v.module)
}

/// Parses a class expression such as `2*lam0 - lam1` or `0`.
pub fn parse_exponent(
    basis: &crate::novikov::ClassBasis,
    src: &str,
    origin: Origin,
) -> Result<NovikovExponent> {
    let toks = tokenize(src, origin)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        origin,
        end_col: src.chars().count(),
    };
    let parts = p.class_body()?;
    if p.pos < toks.len() {
        return Err(origin.err(p.col(), "trailing input"));
    }
    let mut v = vec![0i64; basis.len()];
    for (c, name, col) in parts {
        let i = basis
            .index_of(&name)
            .ok_or_else(|| origin.err(col, format!("unknown class `{name}`")))?;
        v[i] += c;
    }
    Ok(NovikovExponent(v))
}

fn monomial_parts(alg: &GradedAlgebra, m: &Monomial) -> Vec<String> {
    let mut parts = Vec::new();
    if !m.powers().is_empty() {
        let word: Vec<String> = m
            .powers()
            .iter()
            .map(|&(g, e)| {
                let name = &alg.generators[g].name;
                if e == 1 {
                    name.clone()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        parts.push(word.join("*"));
    }
    if !m.exponent().is_zero() {
        parts.push(format!(
            "e[{}]",
            ExponentDisplay {
                exponent: m.exponent(),
                basis: &alg.basis
            }
        ));
    }
    parts
}

fn write_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (Vec<String>, &'a Q)>,
) -> fmt::Result {
    let mut first = true;
    for (parts, c) in terms {
        let neg = c.is_negative();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { " - " } else { " + " })?;
        }
        first = false;
        let mag = c.abs();
        if parts.is_empty() {
            write!(f, "{}", format_rational(&mag))?;
        } else if mag.is_one() {
            write!(f, "{}", parts.join(" * "))?;
        } else {
            write!(f, "{} * {}", format_rational(&mag), parts.join(" * "))?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Canonical printed form of an [`Element`].
pub struct ElementDisplay<'a> {
    pub alg: &'a GradedAlgebra,
    pub element: &'a Element,
}

impl fmt::Display for ElementDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            self.element
                .terms()
                .map(|(m, c)| (monomial_parts(self.alg, m), c)),
        )
    }
}

/// Printed form of a [`ModuleElement`]; the marker is printed last.
pub struct ModuleDisplay<'a> {
    pub alg: &'a GradedAlgebra,
    pub element: &'a ModuleElement,
    pub markers: &'a [String],
}

impl fmt::Display for ModuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            self.element.terms().map(|((m, k), c)| {
                let mut parts = monomial_parts(self.alg, m);
                parts.push(self.markers[*k].clone());
                (parts, c)
            }),
        )
    }
}

pub fn show(alg: &GradedAlgebra, e: &Element) -> String {
    ElementDisplay { alg, element: e }.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Generator;
    use crate::novikov::{ClassBasis, ClassEntry};

    fn alg() -> GradedAlgebra {
        GradedAlgebra::new(
            ClassBasis::new(
                vec![
                    ClassEntry {
                        name: "lam0".into(),
                        maslov: 2,
                        area: Q::one(),
                    },
                    ClassEntry {
                        name: "lam1".into(),
                        maslov: 0,
                        area: Q::one(),
                    },
                ],
                Q::one(),
            )
            .unwrap(),
            vec![
                Generator::new("m", 0),
                Generator::new("M", 1),
                Generator::new("x'", 2),
            ],
        )
        .unwrap()
    }

    fn p(s: &str) -> Result<Element> {
        parse_element(&alg(), s, Origin::start())
    }

    #[test]
    fn parses_geometric_series() {
        let a = alg();
        let e = p("(1 + M + M^2) * e[lam0]").unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(show(&a, &e), "e[lam0] + M * e[lam0] + M^2 * e[lam0]");
    }

    #[test]
    fn parses_monomial_syntax() {
        let a = alg();
        let e = p("3/2 * m*M^2 * e[2*lam0 - 1*lam1]").unwrap();
        assert_eq!(show(&a, &e), "3/2 * m*M^2 * e[2*lam0 - lam1]");
        assert_eq!(p("M * e[0]").unwrap(), p("M").unwrap());
    }

    #[test]
    fn odd_products_anticommute() {
        assert_eq!(p("x' * m").unwrap(), p("-m * x'").unwrap());
        assert!(p("m * m").unwrap().is_zero());
    }

    #[test]
    fn zero_prints_as_zero() {
        assert_eq!(show(&alg(), &Element::zero()), "0");
        assert!(p("0").unwrap().is_zero());
    }

    #[test]
    fn malformed_coefficient_is_located() {
        match p("1//2 * M") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 1);
                assert_eq!(column, 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(p("Q").is_err());
        assert!(p("e[lam9]").is_err());
        assert!(p("e").is_err());
        assert!(p("1/0").is_err());
        assert!(p("(M").is_err());
        assert!(p("M M").is_err());
    }

    #[test]
    fn module_markers_go_last() {
        let a = alg();
        let markers = vec!["a".to_string(), "b".to_string()];
        let v = parse_module_element(&a, &markers, "m*a + b * e[lam0]", Origin::start()).unwrap();
        let s = ModuleDisplay {
            alg: &a,
            element: &v,
            markers: &markers,
        }
        .to_string();
        assert_eq!(
            parse_module_element(&a, &markers, &s, Origin::start()).unwrap(),
            v
        );
        assert!(parse_module_element(&a, &markers, "a*m", Origin::start()).is_err());
        assert!(parse_module_element(&a, &markers, "a*b", Origin::start()).is_err());
        assert!(parse_module_element(&a, &markers, "m + a", Origin::start()).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn element() -> impl Strategy<Value = Element> {
            proptest::collection::vec(
                (
                    -5i64..6,
                    1i64..4,
                    0u32..2,
                    0u32..3,
                    0u32..2,
                    -2i64..3,
                    -1i64..2,
                ),
                0..5,
            )
            .prop_map(|terms| {
                let a = alg();
                let mut e = Element::zero();
                for (n, d, em, e_big, ex, l0, l1) in terms {
                    let mut raw = vec![0; em as usize];
                    raw.extend(std::iter::repeat_n(1, e_big as usize));
                    raw.extend(std::iter::repeat_n(2, ex as usize));
                    if let Some((s, m)) = a.normalize(&raw, NovikovExponent(vec![l0, l1])).unwrap()
                    {
                        e.add_term(m, Q::new((n * i64::from(s)).into(), d.into()));
                    }
                }
                e
            })
        }

        proptest! {
            #[test]
            fn print_parse_round_trip(e in element()) {
                let a = alg();
                let s = show(&a, &e);
                prop_assert_eq!(parse_element(&a, &s, Origin::start()).unwrap(), e);
            }
        }
    }
}
