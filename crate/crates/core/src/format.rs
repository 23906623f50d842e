//! The text format for complex and fine specs, with a canonical printer.
//!
//! ```text
//! [config]
//! epsilon_D = 1/1
//! window.weight_cutoff = 8/1
//! window.max_word_len = 6
//! window.box.lam0 = -2..4
//! window.degrees = -6..6
//! [classes]
//! lam0 maslov=2 area=1/1
//! [generators]
//! m index=0
//! M index=1
//! [differential]
//! d m = e[lam0] + M * e[lam0]
//! d M = 0
//! ```
//!
//! Fine specs use `[cl0.classes]`, `[cl0.generators]`, `[cl0.differential]`,
//! the same for `cl1`, then `[bar_classes]` with `embed cl0.lam0 = lam`
//! lines, `[intersections]` and `[fine_differential]`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::algebra::{Element, Generator, GradedAlgebra, Window};
use crate::complex::ComplexSpec;
use crate::error::{Error, Result};
use crate::fine::{FineSpec, Intersection};
use crate::module::ModuleElement;
use crate::novikov::{ClassBasis, ClassEntry, NovikovExponent};
use crate::text::{parse_element, parse_exponent, parse_module_element, show, Origin};
use crate::trees::{ClusterTree, TreeEdge, TreeVertex, VertexKind};
use crate::{format_rational, parse_rational, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexFile {
    pub spec: ComplexSpec,
    pub window: Option<Window>,
    /// Whether an `[order]` section was given.
    pub explicit_order: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FineFile {
    pub spec: FineSpec,
    pub window: Option<Window>,
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecFile {
    Complex(ComplexFile),
    Fine(FineFile),
}

/// A non-blank line with its 1-based line number and the column where its
/// content starts.
#[derive(Debug, Clone)]
struct Line<'a> {
    no: usize,
    col: usize,
    text: &'a str,
}

impl Line<'_> {
    fn err(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.no,
            column: self.col + offset,
            message: message.into(),
        }
    }

    fn origin(&self, offset: usize) -> Origin {
        Origin {
            line: self.no,
            column: self.col + offset,
        }
    }
}

struct Section<'a> {
    header: Line<'a>,
    lines: Vec<Line<'a>>,
}

fn strip_comment(s: &str) -> &str {
    s.find('#').map_or(s, |i| &s[..i])
}

fn split_sections(text: &str) -> Result<Vec<Section<'_>>> {
    let mut sections: Vec<Section<'_>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = strip_comment(raw);
        let trimmed = body.trim_start();
        let col = body.len() - trimmed.len() + 1;
        let trimmed = trimmed.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        let line = Line {
            no: i + 1,
            col,
            text: trimmed,
        };
        if trimmed.starts_with('[') {
            let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) else {
                return Err(line.err(0, "malformed section header"));
            };
            if sections.iter().any(|s| s.header.text == trimmed) {
                return Err(line.err(0, format!("duplicate section [{name}]")));
            }
            sections.push(Section {
                header: line,
                lines: Vec::new(),
            });
        } else {
            match sections.last_mut() {
                Some(s) => s.lines.push(line),
                None => return Err(line.err(0, "declaration outside of a section")),
            }
        }
    }
    Ok(sections)
}

fn section_name<'a>(s: &Section<'a>) -> &'a str {
    &s.header.text[1..s.header.text.len() - 1]
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Splits `name key=value ...` into the name and its attributes, with the
/// column offset of each value.
type Attributes<'a> = BTreeMap<&'a str, (&'a str, usize)>;

fn attributes<'a>(line: &Line<'a>, keys: &[&str]) -> Result<(&'a str, Attributes<'a>)> {
    let text = line.text;
    let mut words = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                words.push((s, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        words.push((s, &text[s..]));
    }
    let (_, name) = words[0];
    if !is_ident(name) {
        return Err(line.err(0, format!("invalid name `{name}`")));
    }
    let mut attrs = BTreeMap::new();
    for &(at, w) in &words[1..] {
        let Some((k, v)) = w.split_once('=') else {
            return Err(line.err(at, format!("expected key=value, found `{w}`")));
        };
        if !keys.contains(&k) {
            return Err(line.err(at, format!("unknown attribute `{k}`")));
        }
        if attrs.insert(k, (v, at + k.len() + 1)).is_some() {
            return Err(line.err(at, format!("attribute `{k}` given twice")));
        }
    }
    for k in keys {
        if !attrs.contains_key(k) {
            return Err(line.err(0, format!("missing attribute `{k}`")));
        }
    }
    Ok((name, attrs))
}

fn rational_at(line: &Line<'_>, v: &str, at: usize) -> Result<Q> {
    parse_rational(v).ok_or_else(|| line.err(at, format!("malformed rational `{v}`")))
}

fn integer_at(line: &Line<'_>, v: &str, at: usize) -> Result<i64> {
    v.trim()
        .parse()
        .map_err(|_| line.err(at, format!("malformed integer `{v}`")))
}

fn parse_classes(lines: &[Line<'_>], epsilon: &Q) -> Result<ClassBasis> {
    let mut entries: Vec<ClassEntry> = Vec::new();
    for l in lines {
        let (name, a) = attributes(l, &["maslov", "area"])?;
        if entries.iter().any(|e| e.name == name) {
            return Err(l.err(0, format!("duplicate class `{name}`")));
        }
        let (mv, mat) = a["maslov"];
        let (av, aat) = a["area"];
        let area = rational_at(l, av, aat)?;
        if area < Q::from_integer(0.into()) {
            return Err(l.err(aat, "area must be non-negative"));
        }
        entries.push(ClassEntry {
            name: name.into(),
            maslov: integer_at(l, mv, mat)?,
            area,
        });
    }
    ClassBasis::new(entries, epsilon.clone())
}

fn parse_generators(lines: &[Line<'_>], taken: &[String]) -> Result<Vec<Generator>> {
    let mut gens: Vec<Generator> = Vec::new();
    for l in lines {
        let (name, a) = attributes(l, &["index"])?;
        if name == "d" || name == "e" {
            return Err(l.err(0, format!("`{name}` is reserved")));
        }
        if gens.iter().any(|g| g.name == name) || taken.iter().any(|t| t == name) {
            return Err(l.err(0, format!("duplicate generator `{name}`")));
        }
        let (v, at) = a["index"];
        let index = integer_at(l, v, at)?;
        if index < 0 {
            return Err(l.err(at, "index must be non-negative"));
        }
        gens.push(Generator::new(name, index));
    }
    Ok(gens)
}

/// Splits `d name = expr`, returning the name and the column of `expr`.
fn differential_line<'a>(l: &Line<'a>) -> Result<(&'a str, &'a str, usize)> {
    let Some(rest) = l.text.strip_prefix("d ") else {
        return Err(l.err(0, "expected `d <name> = <expression>`"));
    };
    let Some((name, expr)) = rest.split_once('=') else {
        return Err(l.err(2, "missing `=`"));
    };
    let name = name.trim();
    if !is_ident(name) {
        return Err(l.err(2, format!("invalid name `{name}`")));
    }
    let at = 2 + rest.find('=').unwrap_or(0) + 1;
    let lead = expr.len() - expr.trim_start().len();
    let expr = expr.trim();
    if expr.is_empty() {
        return Err(l.err(at, "empty expression"));
    }
    Ok((name, expr, at + lead))
}

fn parse_differential(lines: &[Line<'_>], alg: &GradedAlgebra) -> Result<Vec<Element>> {
    let mut diff: Vec<Option<Element>> = vec![None; alg.generators.len()];
    for l in lines {
        let (name, expr, at) = differential_line(l)?;
        let g = alg
            .gen_id(name)
            .map_err(|_| l.err(2, format!("unknown generator `{name}`")))?;
        if diff[g].is_some() {
            return Err(l.err(0, format!("differential of `{name}` given twice")));
        }
        diff[g] = Some(parse_element(alg, expr, l.origin(at))?);
    }
    Ok(diff.into_iter().map(Option::unwrap_or_default).collect())
}

#[derive(Default)]
struct Config {
    label: Option<String>,
    epsilon: Option<Q>,
    dim: Option<i64>,
    cutoff: Option<Q>,
    word_len: Option<u32>,
    boxes: BTreeMap<String, ((i64, i64), usize)>,
    degrees: Option<(Q, Q)>,
    line: usize,
}

fn range<T>(l: &Line<'_>, v: &str, at: usize, parse: impl Fn(&str) -> Option<T>) -> Result<(T, T)> {
    let Some((a, b)) = v.split_once("..") else {
        return Err(l.err(at, format!("expected `lo..hi`, found `{v}`")));
    };
    let bad = || l.err(at, format!("malformed range `{v}`"));
    Ok((
        parse(a.trim()).ok_or_else(bad)?,
        parse(b.trim()).ok_or_else(bad)?,
    ))
}

fn parse_config(section: Option<&Section<'_>>) -> Result<Config> {
    let mut c = Config::default();
    let Some(section) = section else {
        return Ok(c);
    };
    c.line = section.header.no;
    let mut seen = Vec::new();
    for l in &section.lines {
        let Some((key, value)) = l.text.split_once('=') else {
            return Err(l.err(0, "expected `key = value`"));
        };
        let key = key.trim();
        let at = l.text.find('=').unwrap_or(0) + 1;
        let at = at + (value.len() - value.trim_start().len());
        let value = value.trim();
        if seen.contains(&key) {
            return Err(l.err(0, format!("`{key}` given twice")));
        }
        seen.push(key);
        match key {
            "label" => c.label = Some(value.to_string()),
            "epsilon_D" => {
                let e = rational_at(l, value, at)?;
                if e <= Q::from_integer(0.into()) {
                    return Err(l.err(at, "epsilon_D must be positive"));
                }
                c.epsilon = Some(e);
            }
            "dim" => c.dim = Some(integer_at(l, value, at)?),
            "window.weight_cutoff" => c.cutoff = Some(rational_at(l, value, at)?),
            "window.max_word_len" => {
                c.word_len = Some(
                    value
                        .parse()
                        .map_err(|_| l.err(at, format!("malformed length `{value}`")))?,
                )
            }
            "window.degrees" => {
                let r = range(l, value, at, parse_rational)?;
                if r.0 > r.1 {
                    return Err(l.err(at, "empty degree interval"));
                }
                c.degrees = Some(r);
            }
            _ => match key.strip_prefix("window.box.") {
                Some(class) if is_ident(class) => {
                    let r = range(l, value, at, |s| s.parse::<i64>().ok())?;
                    if r.0 > r.1 {
                        return Err(l.err(at, "empty box interval"));
                    }
                    c.boxes.insert(class.to_string(), (r, l.no));
                }
                _ => return Err(l.err(0, format!("unknown key `{key}`"))),
            },
        }
    }
    Ok(c)
}

impl Config {
    fn epsilon(&self) -> Q {
        self.epsilon
            .clone()
            .unwrap_or_else(|| Q::from_integer(1.into()))
    }

    fn window(&self, basis: &ClassBasis) -> Result<Option<Window>> {
        let any = self.cutoff.is_some()
            || self.word_len.is_some()
            || self.degrees.is_some()
            || !self.boxes.is_empty();
        if !any {
            return Ok(None);
        }
        let missing = |what: &str| Error::Parse {
            line: self.line,
            column: 1,
            message: format!("window is missing `{what}`"),
        };
        for (name, (_, line)) in &self.boxes {
            if basis.index_of(name).is_none() {
                return Err(Error::Parse {
                    line: *line,
                    column: 1,
                    message: format!("box for unknown class `{name}`"),
                });
            }
        }
        let mut bx = Vec::new();
        for e in &basis.entries {
            let (r, _) = self
                .boxes
                .get(&e.name)
                .ok_or_else(|| missing(&format!("window.box.{}", e.name)))?;
            bx.push(*r);
        }
        Ok(Some(Window::new(
            self.cutoff
                .clone()
                .ok_or_else(|| missing("window.weight_cutoff"))?,
            self.word_len
                .ok_or_else(|| missing("window.max_word_len"))?,
            bx,
            self.degrees
                .clone()
                .ok_or_else(|| missing("window.degrees"))?,
        )?))
    }
}

fn at_header(s: &Section<'_>, e: Error) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => s.header.err(0, other.to_string()),
    }
}

fn check_sections(sections: &[Section<'_>], allowed: &[&str]) -> Result<()> {
    for s in sections {
        if !allowed.contains(&section_name(s)) {
            return Err(s
                .header
                .err(0, format!("unknown section [{}]", section_name(s))));
        }
    }
    Ok(())
}

fn find<'s, 'a>(sections: &'s [Section<'a>], name: &str) -> Option<&'s Section<'a>> {
    sections.iter().find(|s| section_name(s) == name)
}

fn lines_of<'s, 'a>(sections: &'s [Section<'a>], name: &str) -> &'s [Line<'a>] {
    find(sections, name).map_or(&[], |s| &s.lines)
}

/// Parses either kind of file, deciding by its sections.
pub fn parse_file(text: &str) -> Result<SpecFile> {
    let sections = split_sections(text)?;
    if sections
        .iter()
        .any(|s| section_name(s) == "intersections" || section_name(s).starts_with("cl0."))
    {
        parse_fine_sections(&sections).map(SpecFile::Fine)
    } else {
        parse_complex_sections(&sections).map(SpecFile::Complex)
    }
}

pub fn parse_complex(text: &str) -> Result<ComplexFile> {
    parse_complex_sections(&split_sections(text)?)
}

pub fn parse_fine(text: &str) -> Result<FineFile> {
    parse_fine_sections(&split_sections(text)?)
}

fn build_complex(
    label: &str,
    sections: &[Section<'_>],
    prefix: &str,
    epsilon: &Q,
    dim: Option<i64>,
    taken: &[String],
) -> Result<ComplexSpec> {
    let classes =
        parse_classes(lines_of(sections, &format!("{prefix}classes")), epsilon).map_err(|e| {
            find(sections, &format!("{prefix}classes")).map_or(e.clone(), |s| at_header(s, e))
        })?;
    let gens = parse_generators(lines_of(sections, &format!("{prefix}generators")), taken)?;
    let alg = GradedAlgebra::new(classes, gens)?;
    let diff = parse_differential(lines_of(sections, &format!("{prefix}differential")), &alg)?;
    let mut spec = ComplexSpec::new(label, alg, diff)?;
    spec.dim = dim;
    Ok(spec)
}

fn parse_complex_sections(sections: &[Section<'_>]) -> Result<ComplexFile> {
    check_sections(
        sections,
        &["config", "classes", "generators", "order", "differential"],
    )?;
    if find(sections, "generators").is_none() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "missing section [generators]".into(),
        });
    }
    let config = parse_config(find(sections, "config"))?;
    let label = config.label.clone().unwrap_or_else(|| "complex".into());
    let mut spec = build_complex(&label, sections, "", &config.epsilon(), config.dim, &[])?;
    let explicit_order = match find(sections, "order") {
        None => false,
        Some(s) => {
            let mut order = Vec::new();
            for l in &s.lines {
                for name in l.text.split_whitespace() {
                    let col = l.text.find(name).unwrap_or(0);
                    let g = spec
                        .alg
                        .gen_id(name)
                        .map_err(|_| l.err(col, format!("unknown generator `{name}`")))?;
                    if order.contains(&g) {
                        return Err(l.err(col, format!("`{name}` appears twice in the order")));
                    }
                    order.push(g);
                }
            }
            if order.len() != spec.generators().len() {
                return Err(s.header.err(0, "the order must list every generator once"));
            }
            spec = spec.reorder(&order)?;
            true
        }
    };
    let window = config.window(spec.basis())?;
    Ok(ComplexFile {
        spec,
        window,
        explicit_order,
    })
}

fn parse_fine_sections(sections: &[Section<'_>]) -> Result<FineFile> {
    check_sections(
        sections,
        &[
            "config",
            "cl0.classes",
            "cl0.generators",
            "cl0.differential",
            "cl1.classes",
            "cl1.generators",
            "cl1.differential",
            "bar_classes",
            "intersections",
            "fine_differential",
        ],
    )?;
    let config = parse_config(find(sections, "config"))?;
    let eps = config.epsilon();
    let cl0 = build_complex("cl0", sections, "cl0.", &eps, None, &[])?;
    let names0: Vec<String> = cl0.generators().iter().map(|g| g.name.clone()).collect();
    let cl1 = build_complex("cl1", sections, "cl1.", &eps, None, &names0)?;

    // bar classes, then embeddings
    let bar_lines = lines_of(sections, "bar_classes");
    let (embeds, classes): (Vec<&Line<'_>>, Vec<Line<'_>>) = {
        let mut e = Vec::new();
        let mut c = Vec::new();
        for l in bar_lines {
            if l.text.starts_with("embed ") {
                e.push(l);
            } else {
                c.push(l.clone());
            }
        }
        (e, c)
    };
    let bar = parse_classes(&classes, &eps)?;
    let mut embed0: Vec<Option<NovikovExponent>> = vec![None; cl0.basis().len()];
    let mut embed1: Vec<Option<NovikovExponent>> = vec![None; cl1.basis().len()];
    for l in embeds {
        let rest = &l.text["embed ".len()..];
        let Some((lhs, rhs)) = rest.split_once('=') else {
            return Err(l.err(6, "expected `embed clN.<class> = <class expression>`"));
        };
        let lhs = lhs.trim();
        let (side, class) = match lhs.split_once('.') {
            Some(("cl0", c)) => (0, c),
            Some(("cl1", c)) => (1, c),
            _ => {
                return Err(l.err(
                    6,
                    format!("expected cl0.<class> or cl1.<class>, found `{lhs}`"),
                ))
            }
        };
        let (basis, slot) = if side == 0 {
            (cl0.basis(), &mut embed0)
        } else {
            (cl1.basis(), &mut embed1)
        };
        let i = basis
            .index_of(class)
            .ok_or_else(|| l.err(6, format!("unknown class `{lhs}`")))?;
        if slot[i].is_some() {
            return Err(l.err(6, format!("`{lhs}` embedded twice")));
        }
        let at = 6 + rest.find('=').unwrap_or(0) + 1;
        let lead = rhs.len() - rhs.trim_start().len();
        slot[i] = Some(parse_exponent(&bar, rhs.trim(), l.origin(at + lead))?);
    }
    let header = find(sections, "bar_classes").map_or(1, |s| s.header.no);
    let complete = |v: Vec<Option<NovikovExponent>>,
                    side: &str,
                    basis: &ClassBasis|
     -> Result<Vec<NovikovExponent>> {
        v.into_iter()
            .zip(&basis.entries)
            .map(|(e, entry)| {
                e.ok_or_else(|| Error::Parse {
                    line: header,
                    column: 1,
                    message: format!("class {side}.{} has no embedding", entry.name),
                })
            })
            .collect()
    };
    let embed0 = complete(embed0, "cl0", cl0.basis())?;
    let embed1 = complete(embed1, "cl1", cl1.basis())?;

    let mut intersections: Vec<Intersection> = Vec::new();
    for l in lines_of(sections, "intersections") {
        let (name, a) = attributes(l, &["degree"])?;
        let (v, at) = a["degree"];
        let degree = rational_at(l, v, at)?;
        if intersections.iter().any(|p| p.name == name) {
            return Err(l.err(0, format!("duplicate intersection `{name}`")));
        }
        intersections.push(Intersection {
            name: name.into(),
            degree,
        });
    }
    let label = config.label.clone().unwrap_or_else(|| "fine".into());
    let mut spec = FineSpec::new(label, cl0, cl1, bar, embed0, embed1, intersections)?;
    let names = spec.names();
    let mut df: Vec<Option<ModuleElement>> = vec![None; names.len()];
    for l in lines_of(sections, "fine_differential") {
        let (name, expr, at) = differential_line(l)?;
        let a = spec
            .intersection_id(name)
            .map_err(|_| l.err(2, format!("unknown intersection `{name}`")))?;
        if df[a].is_some() {
            return Err(l.err(0, format!("differential of `{name}` given twice")));
        }
        df[a] = Some(parse_module_element(
            spec.alg(),
            &names,
            expr,
            l.origin(at),
        )?);
    }
    spec.df = df
        .into_iter()
        .map(|d| d.unwrap_or_else(ModuleElement::zero))
        .collect();
    let window = config.window(&spec.alg().basis)?;
    Ok(FineFile { spec, window })
}

/// `p/q` with the denominator always written.
fn fraction(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn print_config(
    out: &mut String,
    label: &str,
    epsilon: &Q,
    dim: Option<i64>,
    window: Option<&Window>,
    basis: &ClassBasis,
) {
    out.push_str("[config]\n");
    let _ = writeln!(out, "label = {label}");
    let _ = writeln!(out, "epsilon_D = {}", fraction(epsilon));
    if let Some(d) = dim {
        let _ = writeln!(out, "dim = {d}");
    }
    if let Some(w) = window {
        let _ = writeln!(out, "window.weight_cutoff = {}", fraction(&w.weight_cutoff));
        let _ = writeln!(out, "window.max_word_len = {}", w.max_word_len);
        for (e, (lo, hi)) in basis.entries.iter().zip(&w.exponent_box) {
            let _ = writeln!(out, "window.box.{} = {lo}..{hi}", e.name);
        }
        let _ = writeln!(
            out,
            "window.degrees = {}..{}",
            format_rational(&w.degrees.0),
            format_rational(&w.degrees.1)
        );
    }
}

fn print_classes(out: &mut String, header: &str, basis: &ClassBasis) {
    let _ = writeln!(out, "[{header}]");
    for e in &basis.entries {
        let _ = writeln!(
            out,
            "{} maslov={} area={}",
            e.name,
            e.maslov,
            fraction(&e.area)
        );
    }
}

fn print_ring(out: &mut String, prefix: &str, spec: &ComplexSpec) {
    print_classes(out, &format!("{prefix}classes"), spec.basis());
    let _ = writeln!(out, "[{prefix}generators]");
    for g in spec.generators() {
        let _ = writeln!(out, "{} index={}", g.name, g.index);
    }
    if prefix.is_empty() {
        return;
    }
    print_differential(out, &format!("{prefix}differential"), spec);
}

fn print_differential(out: &mut String, header: &str, spec: &ComplexSpec) {
    let _ = writeln!(out, "[{header}]");
    for (g, dx) in spec.generators().iter().zip(&spec.diff) {
        let _ = writeln!(out, "d {} = {}", g.name, show(&spec.alg, dx));
    }
}

pub fn print_complex(f: &ComplexFile) -> String {
    let s = &f.spec;
    let mut out = String::new();
    print_config(
        &mut out,
        &s.label,
        &s.basis().epsilon_d,
        s.dim,
        f.window.as_ref(),
        s.basis(),
    );
    print_ring(&mut out, "", s);
    if f.explicit_order {
        out.push_str("[order]\n");
        let names: Vec<&str> = s.generators().iter().map(|g| g.name.as_str()).collect();
        let _ = writeln!(out, "{}", names.join(" "));
    }
    print_differential(&mut out, "differential", s);
    out
}

pub fn print_fine(f: &FineFile) -> String {
    let s = &f.spec;
    let bar = &s.alg().basis;
    let mut out = String::new();
    print_config(
        &mut out,
        &s.label,
        &bar.epsilon_d,
        None,
        f.window.as_ref(),
        bar,
    );
    print_ring(&mut out, "cl0.", &s.cl0);
    print_ring(&mut out, "cl1.", &s.cl1);
    print_classes(&mut out, "bar_classes", bar);
    for (side, spec, embed) in [("cl0", &s.cl0, &s.embed0), ("cl1", &s.cl1, &s.embed1)] {
        for (e, img) in spec.basis().entries.iter().zip(embed) {
            let _ = writeln!(
                out,
                "embed {side}.{} = {}",
                e.name,
                class_expression(bar, img)
            );
        }
    }
    out.push_str("[intersections]\n");
    for p in &s.intersections {
        let _ = writeln!(out, "{} degree={}", p.name, fraction(&p.degree));
    }
    out.push_str("[fine_differential]\n");
    for (p, d) in s.intersections.iter().zip(&s.df) {
        let _ = writeln!(out, "d {} = {}", p.name, s.show(d));
    }
    out
}

/// `2*lam - mu`, or `0`.
fn class_expression(basis: &ClassBasis, e: &NovikovExponent) -> String {
    let mut out = String::new();
    for (entry, &c) in basis.entries.iter().zip(&e.0) {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { "-" } else { "+" };
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        if c.abs() != 1 {
            let _ = write!(out, "{}*", c.abs());
        }
        out.push_str(&entry.name);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// A tree file: classes for the vertex labels and the tree itself.
///
/// ```text
/// [classes]
/// lam0 maslov=2 area=1/1
/// [vertices]
/// v0 kind=disk class=lam0 constant=false
/// v1 kind=sphere class=0 constant=false
/// [edges]
/// v0 -> v1 length=0
/// [markers]
/// v0 v1
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeFile {
    pub basis: ClassBasis,
    pub names: Vec<String>,
    pub tree: ClusterTree,
}

pub fn parse_tree(text: &str) -> Result<TreeFile> {
    let sections = split_sections(text)?;
    check_sections(
        &sections,
        &["config", "classes", "vertices", "edges", "markers"],
    )?;
    let config = parse_config(find(&sections, "config"))?;
    let basis = parse_classes(lines_of(&sections, "classes"), &config.epsilon())?;
    let mut names: Vec<String> = Vec::new();
    let mut vertices = Vec::new();
    for l in lines_of(&sections, "vertices") {
        let (name, a) = attributes(l, &["kind", "class", "constant"])?;
        if names.iter().any(|n| n == name) {
            return Err(l.err(0, format!("duplicate vertex `{name}`")));
        }
        let (k, kat) = a["kind"];
        let kind = match k {
            "disk" => VertexKind::Disk,
            "sphere" => VertexKind::Sphere,
            _ => return Err(l.err(kat, format!("kind must be disk or sphere, found `{k}`"))),
        };
        let (c, cat) = a["class"];
        let class = parse_exponent(&basis, c, l.origin(cat))?;
        let (f, fat) = a["constant"];
        let constant = f
            .parse::<bool>()
            .map_err(|_| l.err(fat, format!("expected true or false, found `{f}`")))?;
        names.push(name.to_string());
        vertices.push(TreeVertex {
            kind,
            class,
            constant,
        });
    }
    let vertex = |l: &Line<'_>, name: &str, at: usize| -> Result<usize> {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| l.err(at, format!("unknown vertex `{name}`")))
    };
    let mut edges = Vec::new();
    for l in lines_of(&sections, "edges") {
        let words: Vec<&str> = l.text.split_whitespace().collect();
        let [from, "->", to, length] = words[..] else {
            return Err(l.err(0, "expected `<from> -> <to> length=<rational>`"));
        };
        let Some(v) = length.strip_prefix("length=") else {
            return Err(l.err(0, "missing `length=`"));
        };
        let at = l.text.find(length).unwrap_or(0);
        edges.push(TreeEdge {
            from: vertex(l, from, 0)?,
            to: vertex(l, to, l.text.find(to).unwrap_or(0))?,
            length: rational_at(l, v, at + "length=".len())?,
        });
    }
    let mut markers = Vec::new();
    for l in lines_of(&sections, "markers") {
        for name in l.text.split_whitespace() {
            markers.push(vertex(l, name, l.text.find(name).unwrap_or(0))?);
        }
    }
    Ok(TreeFile {
        basis,
        names,
        tree: ClusterTree {
            vertices,
            edges,
            markers,
        },
    })
}

pub fn print_tree(f: &TreeFile) -> String {
    let mut out = String::new();
    out.push_str("[config]\n");
    let _ = writeln!(out, "epsilon_D = {}", fraction(&f.basis.epsilon_d));
    print_classes(&mut out, "classes", &f.basis);
    out.push_str("[vertices]\n");
    for (name, v) in f.names.iter().zip(&f.tree.vertices) {
        let kind = match v.kind {
            VertexKind::Disk => "disk",
            VertexKind::Sphere => "sphere",
        };
        let class = class_expression(&f.basis, &v.class).replace(' ', "");
        let _ = writeln!(
            out,
            "{name} kind={kind} class={class} constant={}",
            v.constant
        );
    }
    out.push_str("[edges]\n");
    for e in &f.tree.edges {
        let _ = writeln!(
            out,
            "{} -> {} length={}",
            f.names[e.from],
            f.names[e.to],
            fraction(&e.length)
        );
    }
    out.push_str("[markers]\n");
    let markers: Vec<&str> = f
        .tree
        .markers
        .iter()
        .map(|&v| f.names[v].as_str())
        .collect();
    let _ = writeln!(out, "{}", markers.join(" "));
    out
}

pub fn print_file(f: &SpecFile) -> String {
    match f {
        SpecFile::Complex(c) => print_complex(c),
        SpecFile::Fine(c) => print_fine(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fine::builtin_circle_line;
    use crate::scenarios::{s1_spec, s1_window};

    const S1: &str = "\
[config]
epsilon_D = 1/1
window.weight_cutoff = 8/1
window.max_word_len = 6
window.box.lam0 = -2..4
window.degrees = -6..6
[classes]
lam0 maslov=2 area=1/1
[generators]
m index=0
M index=1
[differential]
d m = (1 + M + M^2 + M^3 + M^4) * e[lam0]
d M = 0
";

    #[test]
    fn parses_the_circle() {
        let f = parse_complex(S1).unwrap();
        let mut expected = s1_spec(4, Q::from_integer(1.into()));
        expected.label = "complex".into();
        assert_eq!(f.spec, expected);
        assert_eq!(f.window, Some(s1_window()));
    }

    #[test]
    fn canonical_round_trip() {
        let f = parse_complex(S1).unwrap();
        let printed = print_complex(&f);
        assert_eq!(parse_complex(&printed).unwrap(), f);
        assert_eq!(print_complex(&parse_complex(&printed).unwrap()), printed);
        assert!(printed.contains("d m = e[lam0] + M * e[lam0]"));
    }

    #[test]
    fn empty_generators() {
        let f = parse_complex("[classes]\nlam maslov=2 area=1\n[generators]\n[differential]\n")
            .unwrap();
        assert!(f.spec.generators().is_empty());
        assert_eq!(f.spec.basis().len(), 1);
        assert_eq!(f.window, None);
    }

    #[test]
    fn malformed_coefficient_is_located() {
        let text = S1.replace("d M = 0", "d M = 1//2 * M");
        match parse_complex(&text) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 14);
                assert!(column >= 7, "column {column}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn order_section_reorders() {
        let text = S1.replace("[differential]", "[order]\nM m\n[differential]");
        let f = parse_complex(&text).unwrap();
        assert!(f.explicit_order);
        assert_eq!(f.spec.generators()[0].name, "M");
        let printed = print_complex(&f);
        assert_eq!(print_complex(&parse_complex(&printed).unwrap()), printed);
    }

    #[test]
    fn errors_carry_lines() {
        for (text, line) in [
            ("[generators]\nm index=x\n", 2),
            ("[generators]\nm index=0\n[differential]\nd q = 0\n", 4),
            ("m index=0\n", 1),
            ("[generators]\n[wat]\n", 2),
            ("[config]\nepsilon_D = 0\n[generators]\n", 2),
        ] {
            match parse_complex(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn tree_round_trip() {
        let text = "[config]\nepsilon_D = 1/1\n[classes]\nlam0 maslov=2 area=1/1\n[vertices]\nv0 kind=disk class=lam0 constant=false\nv1 kind=disk class=0 constant=true\n[edges]\nv0 -> v1 length=1/2\n[markers]\nv0 v1 v1\n";
        let t = parse_tree(text).unwrap();
        assert_eq!(t.tree.edges[0].length, Q::new(1.into(), 2.into()));
        assert_eq!(print_tree(&t), text);
        assert!(parse_tree("[vertices]\nv0 kind=blob class=0 constant=false\n").is_err());
    }

    #[test]
    fn fine_round_trip() {
        let spec = builtin_circle_line(4, false);
        let f = FineFile { spec, window: None };
        let printed = print_fine(&f);
        let back = parse_fine(&printed).unwrap();
        assert_eq!(print_fine(&back), printed);
        assert_eq!(back.spec.df, f.spec.df);
        assert!(matches!(parse_file(&printed), Ok(SpecFile::Fine(_))));
    }
}
