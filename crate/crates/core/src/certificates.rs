//! Free terms and the constructive acyclicity certificate.
//!
//! If `d x` has a free term `a0 e^{lam0}`, then `tau = x e^{-lam0} / a0`
//! satisfies `d tau = 1 + b`, and `c = sum (-1)^i b^i` is a cycle with
//! `d(c tau) = 1`, so the unit is a boundary and the complex is acyclic.

use num_traits::{One, Signed, Zero};

use crate::algebra::{Cutoff, Element, GenId, Monomial, Window};
use crate::complex::ComplexSpec;
use crate::error::{Error, Result};
use crate::novikov::NovikovExponent;
use crate::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeTerm {
    pub generator: GenId,
    pub name: String,
    pub index: i64,
    pub exponent: NovikovExponent,
    pub coefficient: Q,
}

/// A parity diagnostic for a high free term: the generator must have even
/// index different from `0` and the top index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheck {
    pub name: String,
    pub index: i64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreeTermReport {
    pub witnesses: Vec<FreeTerm>,
    pub high: Vec<FreeTerm>,
    pub parity: Vec<ParityCheck>,
}

impl FreeTermReport {
    pub fn has_high(&self) -> bool {
        !self.high.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// Scans every `d x` for word-length-zero terms.
pub fn find_free_terms(spec: &ComplexSpec) -> FreeTermReport {
    let top = spec.top_index();
    let mut report = FreeTermReport::default();
    for (g, dx) in spec.diff.iter().enumerate() {
        let gen = &spec.generators()[g];
        for (m, c) in dx.terms() {
            if m.word_len() != 0 {
                continue;
            }
            let ft = FreeTerm {
                generator: g,
                name: gen.name.clone(),
                index: gen.index,
                exponent: m.exponent().clone(),
                coefficient: c.clone(),
            };
            if gen.index >= 1 {
                report.parity.push(ParityCheck {
                    name: gen.name.clone(),
                    index: gen.index,
                    passed: gen.index % 2 == 0 && gen.index != top,
                });
                report.high.push(ft.clone());
            }
            report.witnesses.push(ft);
        }
    }
    report
}

/// Ordering key for choosing `lam0`: area, then Maslov index, then the
/// exponent vector, then generator order.
fn choice_key(spec: &ComplexSpec, ft: &FreeTerm) -> (Q, i64, NovikovExponent, GenId) {
    let (mu, area) = spec
        .basis()
        .maslov_area(&ft.exponent)
        .expect("exponent from the spec's own basis");
    (area, mu, ft.exponent.clone(), ft.generator)
}

/// The free term used by the certificate.
pub fn choose_witness(spec: &ComplexSpec, report: &FreeTermReport) -> Result<FreeTerm> {
    report
        .witnesses
        .iter()
        .min_by_key(|ft| choice_key(spec, ft))
        .cloned()
        .ok_or(Error::NoFreeTerm)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub witness: FreeTerm,
    pub tau: Element,
    /// `d tau - 1`, truncated to the window.
    pub b: Element,
    /// The Neumann series, truncated to the window.
    pub c: Element,
    /// `d(c tau) - 1` truncates to zero.
    pub unit_is_boundary: bool,
    /// `d c` truncates to zero.
    pub c_is_cycle: bool,
}

impl Certificate {
    pub fn verified(&self) -> bool {
        self.unit_is_boundary && self.c_is_cycle
    }
}

/// Builds and verifies the certificate in the window.
pub fn acyclicity_certificate(spec: &ComplexSpec, w: &Window, margin: u32) -> Result<Certificate> {
    let alg = &spec.alg;
    let report = find_free_terms(spec);
    let witness = choose_witness(spec, &report)?;
    let neg = witness.exponent.negate();
    if !w.in_box(&neg) {
        return Err(Error::WindowExcludes(spec.describe_exponent(&neg)));
    }
    assert!(
        !witness.coefficient.is_zero(),
        "stored coefficients are nonzero"
    );
    let inv = Q::one() / &witness.coefficient;
    let tau = Element::monomial(
        Monomial::from_raw_unchecked(vec![(witness.generator, 1)], neg),
        inv,
    );
    let dtau = spec.apply_d(&tau);
    let b = dtau.sub(&alg.one());

    let two = Q::from_integer(2.into());
    let shift = spec.basis().area_unchecked(&witness.exponent) * &two / &spec.basis().epsilon_d;
    for (m, _) in b.terms() {
        let wt = alg.weight(m);
        if m.word_len() == 0 && !wt.is_positive() {
            return Err(Error::NonConvergent(format!(
                "free term {} does not raise the weight",
                crate::text::show(alg, &Element::monomial(m.clone(), Q::one()))
            )));
        }
        if wt.is_negative() {
            return Err(Error::NonConvergent(format!(
                "term {} of d(tau) - 1 has negative weight",
                crate::text::show(alg, &Element::monomial(m.clone(), Q::one()))
            )));
        }
    }
    // every factor of b raises the weight or the word length, so the series
    // stops once a power of b leaves this cutoff
    let cut = Cutoff {
        weight: &w.weight_cutoff + &shift + Q::from_integer(margin.into()),
        max_word_len: w.max_word_len + margin,
    };
    let b_cut = alg.truncate_cutoff(&b, &cut);
    let mut c = alg.one();
    let mut power = alg.one();
    let minus_one = -Q::one();
    loop {
        power = alg.mul_cutoff(&power, &b_cut, &cut).scale(&minus_one);
        if power.is_zero() {
            break;
        }
        c.add_scaled_in_place(&Q::one(), &power);
    }

    let ctau = alg.mul_exact(&c, &tau);
    let residual = alg.truncate(&spec.apply_d(&ctau).sub(&alg.one()), w);
    let dc = alg.truncate(&spec.apply_d(&c), w);
    Ok(Certificate {
        witness,
        tau,
        b: alg.truncate(&b, w),
        c: alg.truncate(&c, w),
        unit_is_boundary: residual.is_zero(),
        c_is_cycle: dc.is_zero(),
    })
}
