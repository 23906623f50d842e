//! Differentials given as data on generators, their Leibniz extension,
//! validation, `d^2 = 0` and chain-map checks.

use std::fmt;

use num_traits::One;

use crate::algebra::{AlgebraMap, Element, GenId, Generator, GradedAlgebra, Monomial, Window};
use crate::error::{Error, Result};
use crate::novikov::{ClassBasis, ExponentDisplay};
use crate::text::show;
use crate::Q;

/// Generators, classes and the value of `d` on every generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexSpec {
    pub label: String,
    pub alg: GradedAlgebra,
    /// `diff[g]` is `d` of generator `g`.
    pub diff: Vec<Element>,
    /// Dimension of the underlying manifold, i.e. the top Morse index.
    /// Defaults to the largest declared index.
    pub dim: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Degree,
    IndexZeroInNonMorse,
    ZeroClassNonLinear,
    FreeTermAtTop,
    NotNormal,
    Filtration,
    OddMaslov,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Degree => "wrong differential degree",
            ViolationKind::IndexZeroInNonMorse => "index-0 generator in a non-Morse term",
            ViolationKind::ZeroClassNonLinear => "zero class on a term of word length other than 1",
            ViolationKind::FreeTermAtTop => "free term at top index",
            ViolationKind::NotNormal => "monomial not in normal form",
            ViolationKind::Filtration => "term does not raise the filtration",
            ViolationKind::OddMaslov => "class of odd Maslov index",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub generator: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d {}: {} ({})", self.generator, self.kind, self.detail)
    }
}

/// Outcome of a `d^2` check: the first generator with a nonzero residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct D2Failure {
    pub generator: String,
    pub residual: Element,
}

impl ComplexSpec {
    pub fn new(label: impl Into<String>, alg: GradedAlgebra, diff: Vec<Element>) -> Result<Self> {
        if diff.len() != alg.generators.len() {
            return Err(Error::Invalid(format!(
                "{} differential values for {} generators",
                diff.len(),
                alg.generators.len()
            )));
        }
        Ok(ComplexSpec {
            label: label.into(),
            alg,
            diff,
            dim: None,
        })
    }

    /// A spec with `d = 0`.
    pub fn zero(
        label: impl Into<String>,
        basis: ClassBasis,
        generators: Vec<Generator>,
    ) -> Result<Self> {
        let n = generators.len();
        ComplexSpec::new(
            label,
            GradedAlgebra::new(basis, generators)?,
            vec![Element::zero(); n],
        )
    }

    pub fn generators(&self) -> &[Generator] {
        &self.alg.generators
    }

    pub fn basis(&self) -> &ClassBasis {
        &self.alg.basis
    }

    pub fn top_index(&self) -> i64 {
        self.dim
            .unwrap_or_else(|| self.generators().iter().map(|g| g.index).max().unwrap_or(0))
    }

    /// Morse terms: zero class and word length one. These are exactly the
    /// weight-preserving terms.
    pub fn is_morse_term(m: &Monomial) -> bool {
        m.exponent().is_zero() && m.word_len() == 1
    }

    pub fn validate(&self) -> Vec<Violation> {
        let alg = &self.alg;
        let top = self.top_index();
        let mut out = Vec::new();
        for (g, dx) in self.diff.iter().enumerate() {
            let gen = &alg.generators[g];
            let mut push = |kind, detail: String| {
                out.push(Violation {
                    kind,
                    generator: gen.name.clone(),
                    detail,
                })
            };
            for (m, _) in dx.terms() {
                let term = show(alg, &Element::monomial(m.clone(), Q::one()));
                if let Some(why) = alg.check_normal(m) {
                    push(ViolationKind::NotNormal, format!("{term}: {why}"));
                    continue;
                }
                let deg = alg.degree(m);
                if deg != gen.degree() - 1 {
                    push(
                        ViolationKind::Degree,
                        format!("{term} has degree {deg}, expected {}", gen.degree() - 1),
                    );
                }
                let morse = Self::is_morse_term(m);
                // classes are central without sign, which is only consistent for even mu
                if alg.basis.maslov_unchecked(m.exponent()).rem_euclid(2) == 1 {
                    push(ViolationKind::OddMaslov, term.clone());
                }
                if m.exponent().is_zero() && m.word_len() != 1 {
                    push(ViolationKind::ZeroClassNonLinear, term.clone());
                }
                if !morse
                    && m.powers()
                        .iter()
                        .any(|&(h, _)| alg.generators[h].index == 0)
                {
                    push(ViolationKind::IndexZeroInNonMorse, term.clone());
                }
                if m.word_len() == 0 && gen.index == top {
                    push(
                        ViolationKind::FreeTermAtTop,
                        format!("{term} on index {}", gen.index),
                    );
                }
                if !morse && alg.weight(m) < Q::from_integer(2.into()) {
                    push(
                        ViolationKind::Filtration,
                        format!(
                            "{term} has weight {}",
                            crate::format_rational(&alg.weight(m))
                        ),
                    );
                }
            }
        }
        out
    }

    /// `d` of a single monomial, exact.
    pub fn d_monomial(&self, m: &Monomial) -> Element {
        let alg = &self.alg;
        let classes = alg.classes();
        let powers = m.powers();
        let mut out = Element::zero();
        let mut prefix_deg = 0i64;
        for (i, &(g, e)) in powers.iter().enumerate() {
            let dx = &self.diff[g];
            if !dx.is_zero() {
                let mut left = powers[..i].to_vec();
                if e > 1 {
                    left.push((g, e - 1));
                }
                let left =
                    Monomial::from_raw_unchecked(left, crate::NovikovExponent::zero(classes));
                let right =
                    Monomial::from_raw_unchecked(powers[i + 1..].to_vec(), m.exponent().clone());
                let mut scale = Q::from_integer(e.into());
                if prefix_deg.rem_euclid(2) == 1 {
                    scale = -scale;
                }
                for (t, c) in dx.terms() {
                    let Some((s1, lt)) = alg.mul_monomials(&left, t) else {
                        continue;
                    };
                    let Some((s2, full)) = alg.mul_monomials(&lt, &right) else {
                        continue;
                    };
                    let v = c * &scale;
                    out.add_term(full, if s1 * s2 < 0 { -v } else { v });
                }
            }
            prefix_deg += i64::from(e) * alg.gen_degree(g);
        }
        out
    }

    /// Leibniz extension of `d`, exact.
    pub fn apply_d(&self, a: &Element) -> Element {
        let mut out = Element::zero();
        for (m, c) in a.terms() {
            out.add_scaled_in_place(c, &self.d_monomial(m));
        }
        out
    }

    /// Leibniz extension of `d`, truncated to the window.
    pub fn apply_d_window(&self, a: &Element, w: &Window) -> Element {
        self.alg.truncate(&self.apply_d(a), w)
    }

    /// Checks `d(d(x)) = 0` in the window for every generator.
    pub fn check_d_squared(&self, w: &Window) -> std::result::Result<(), D2Failure> {
        for (g, dx) in self.diff.iter().enumerate() {
            let r = self.apply_d_window(dx, w);
            if !r.is_zero() {
                return Err(D2Failure {
                    generator: self.alg.generators[g].name.clone(),
                    residual: r,
                });
            }
        }
        Ok(())
    }

    /// The Morse part `d0` (weight preserving) and the rest of `d x`.
    pub fn split_d0(&self) -> (Vec<Element>, Vec<Element>) {
        self.diff
            .iter()
            .map(|dx| {
                (
                    dx.filter(Self::is_morse_term),
                    dx.filter(|m| !Self::is_morse_term(m)),
                )
            })
            .unzip()
    }

    pub fn has_d0(&self) -> bool {
        self.diff
            .iter()
            .any(|dx| dx.terms().any(|(m, _)| Self::is_morse_term(m)))
    }

    /// Re-declares the generator order: `order[k]` is the old id of the new
    /// `k`-th generator. Differential data are re-signed accordingly.
    pub fn reorder(&self, order: &[GenId]) -> Result<ComplexSpec> {
        let n = self.generators().len();
        let mut seen = vec![false; n];
        for &o in order {
            if o >= n || seen[o] {
                return Err(Error::Invalid("reorder needs a permutation".into()));
            }
            seen[o] = true;
        }
        if order.len() != n {
            return Err(Error::Invalid("reorder needs a permutation".into()));
        }
        let mut new_id = vec![0; n];
        for (k, &o) in order.iter().enumerate() {
            new_id[o] = k;
        }
        let alg = GradedAlgebra::new(
            self.basis().clone(),
            order
                .iter()
                .map(|&o| self.generators()[o].clone())
                .collect(),
        )?;
        let relabel = |e: &Element| -> Result<Element> {
            let mut out = Element::zero();
            for (m, c) in e.terms() {
                let raw: Vec<GenId> = m.factors().iter().map(|&g| new_id[g]).collect();
                if let Some((s, nm)) = alg.normalize(&raw, m.exponent().clone())? {
                    out.add_term(nm, if s < 0 { -c.clone() } else { c.clone() });
                }
            }
            Ok(out)
        };
        let diff = order
            .iter()
            .map(|&o| relabel(&self.diff[o]))
            .collect::<Result<Vec<_>>>()?;
        Ok(ComplexSpec {
            label: self.label.clone(),
            alg,
            diff,
            dim: self.dim,
        })
    }

    /// The spec whose differential keeps only word-length-one terms.
    pub fn linear_part(&self) -> ComplexSpec {
        ComplexSpec {
            label: format!("{} (linear part)", self.label),
            alg: self.alg.clone(),
            diff: self
                .diff
                .iter()
                .map(|dx| dx.filter(|m| m.word_len() == 1))
                .collect(),
            dim: self.dim,
        }
    }

    pub fn describe_exponent(&self, e: &crate::NovikovExponent) -> String {
        ExponentDisplay {
            exponent: e,
            basis: self.basis(),
        }
        .to_string()
    }
}

/// A candidate chain map between two specs.
#[derive(Debug, Clone)]
pub enum ChainMap {
    /// Multiplicative map given on generators and classes, raising degree
    /// by `shift`.
    Algebra { map: AlgebraMap, shift: i64 },
    /// Projection to word length one, into the linear part of the source.
    LinearPart,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainMapFailure {
    Degree(String),
    Commutation { at: String, residual: String },
}

impl fmt::Display for ChainMapFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainMapFailure::Degree(s) => write!(f, "degree mismatch: {s}"),
            ChainMapFailure::Commutation { at, residual } => {
                write!(f, "phi d - d phi at {at}: {residual}")
            }
        }
    }
}

/// Checks `d_tgt phi = (-1)^shift phi d_src` modulo the window.
pub fn check_chain_map(
    phi: &ChainMap,
    src: &ComplexSpec,
    tgt: &ComplexSpec,
    w: &Window,
    cap: usize,
) -> Result<std::result::Result<(), ChainMapFailure>> {
    match phi {
        ChainMap::Algebra { map, shift } => {
            if map.images.len() != src.generators().len()
                || map.class_images.len() != src.basis().len()
            {
                return Err(Error::Invalid("map does not cover the source".into()));
            }
            for (i, img) in map.class_images.iter().enumerate() {
                let mu_src = src.basis().entries[i].maslov;
                let mu_tgt = tgt.basis().maslov_area(img)?.0;
                if mu_src != mu_tgt {
                    return Ok(Err(ChainMapFailure::Degree(format!(
                        "class `{}` has Maslov {mu_src} but its image has {mu_tgt}",
                        src.basis().entries[i].name
                    ))));
                }
            }
            for (g, img) in map.images.iter().enumerate() {
                let want = src.generators()[g].degree() + shift;
                if img.terms().any(|(m, _)| tgt.alg.degree(m) != want) {
                    return Ok(Err(ChainMapFailure::Degree(format!(
                        "image of `{}` is not of degree {want}",
                        src.generators()[g].name
                    ))));
                }
            }
            let cut = w.filtration();
            for (g, dx) in src.diff.iter().enumerate() {
                let lhs = tgt.apply_d(&map.images[g]);
                let mut rhs = map.apply(&tgt.alg, dx, Some(&cut));
                if shift.rem_euclid(2) == 1 {
                    rhs = rhs.neg();
                }
                let r = tgt.alg.truncate(&lhs.sub(&rhs), w);
                if !r.is_zero() {
                    return Ok(Err(ChainMapFailure::Commutation {
                        at: src.generators()[g].name.clone(),
                        residual: show(&tgt.alg, &r),
                    }));
                }
            }
            Ok(Ok(()))
        }
        ChainMap::LinearPart => {
            let lin = src.linear_part();
            for m in src.alg.enumerate_window(w, cap)? {
                let one = Element::monomial(m.clone(), Q::one());
                let lhs = src.apply_d(&one).filter(|t| t.word_len() == 1);
                let rhs = if m.word_len() == 1 {
                    lin.apply_d(&one)
                } else {
                    Element::zero()
                };
                let r = src.alg.truncate(&lhs.sub(&rhs), w);
                if !r.is_zero() {
                    return Ok(Err(ChainMapFailure::Commutation {
                        at: show(&src.alg, &one),
                        residual: show(&src.alg, &r),
                    }));
                }
            }
            Ok(Ok(()))
        }
    }
}

/// Smallest weight among the terms of `a`, `None` for zero.
pub fn min_weight(alg: &GradedAlgebra, a: &Element) -> Option<Q> {
    a.terms().map(|(m, _)| alg.weight(m)).min()
}

/// True when every generator image has filtration level at least that of
/// the generator (weight one).
pub fn preserves_filtration(map: &AlgebraMap, tgt: &GradedAlgebra) -> bool {
    map.images
        .iter()
        .all(|img| min_weight(tgt, img).is_none_or(|w| w >= Q::one()))
}

/// Convenience: zero check of `d^2` on an arbitrary element.
pub fn d_squared_of(spec: &ComplexSpec, a: &Element, w: &Window) -> Element {
    spec.alg.truncate(&spec.apply_d(&spec.apply_d(a)), w)
}
