//! Free modules over the algebra with one marked factor per term: the tilde
//! module (marker = a generator) and fine Floer complexes (marker = an
//! intersection point).

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::{Element, GradedAlgebra, Monomial};
use crate::Q;

pub type Marker = usize;

/// Finite combination of `m * marker` terms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModuleElement {
    terms: BTreeMap<(Monomial, Marker), Q>,
}

impl ModuleElement {
    pub fn zero() -> Self {
        ModuleElement::default()
    }

    pub fn basis(m: Monomial, k: Marker) -> Self {
        let mut e = ModuleElement::zero();
        e.add_term(m, k, Q::one());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Marker), &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial, k: Marker) -> Q {
        self.terms
            .get(&(m.clone(), k))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, m: Monomial, k: Marker, c: Q) {
        if c.is_zero() {
            return;
        }
        let key = (m, k);
        let entry = self.terms.entry(key.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled_in_place(&mut self, c: &Q, other: &ModuleElement) {
        if c.is_zero() {
            return;
        }
        for ((m, k), v) in &other.terms {
            self.add_term(m.clone(), *k, v * c);
        }
    }

    pub fn sub(&self, other: &ModuleElement) -> ModuleElement {
        let mut out = self.clone();
        out.add_scaled_in_place(&-Q::one(), other);
        out
    }

    pub fn scale(&self, c: &Q) -> ModuleElement {
        let mut out = ModuleElement::zero();
        out.add_scaled_in_place(c, self);
        out
    }

    /// `r * self`, with `r` acting on the ring factor from the left.
    pub fn left_mul(&self, alg: &GradedAlgebra, r: &Element) -> ModuleElement {
        let mut out = ModuleElement::zero();
        for ((m, k), c) in &self.terms {
            for (rm, rc) in r.terms() {
                if let Some((s, prod)) = alg.mul_monomials(rm, m) {
                    let v = c * rc;
                    out.add_term(prod, *k, if s < 0 { -v } else { v });
                }
            }
        }
        out
    }

    /// `r * marker`.
    pub fn from_ring(r: &Element, k: Marker) -> ModuleElement {
        let mut out = ModuleElement::zero();
        for (m, c) in r.terms() {
            out.add_term(m.clone(), k, c.clone());
        }
        out
    }

    /// The ring coefficient of one marker.
    pub fn component(&self, k: Marker) -> Element {
        self.terms
            .iter()
            .filter(|((_, kk), _)| *kk == k)
            .map(|((m, _), c)| (m.clone(), c.clone()))
            .collect()
    }

    pub fn filter(&self, keep: impl Fn(&Monomial, Marker) -> bool) -> ModuleElement {
        ModuleElement {
            terms: self
                .terms
                .iter()
                .filter(|((m, k), _)| keep(m, *k))
                .map(|(key, c)| (key.clone(), c.clone()))
                .collect(),
        }
    }
}

impl FromIterator<((Monomial, Marker), Q)> for ModuleElement {
    fn from_iter<T: IntoIterator<Item = ((Monomial, Marker), Q)>>(iter: T) -> Self {
        let mut e = ModuleElement::zero();
        for ((m, k), c) in iter {
            e.add_term(m, k, c);
        }
        e
    }
}
