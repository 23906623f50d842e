//! The free graded-commutative algebra on degree-shifted generators,
//! tensored with the group ring of the class basis.
//!
//! Monomials are kept in normal form: factors sorted by generator position,
//! odd generators appear at most once, and the class factor `e^lambda` is
//! central (it carries no Koszul sign). Elements are finite sums; the
//! completion is handled by truncating against a [`Window`].

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::novikov::{ClassBasis, NovikovExponent};
use crate::Q;

pub type GenId = usize;

/// A generator of the algebra. Its degree is `index - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub index: i64,
}

impl Generator {
    pub fn new(name: impl Into<String>, index: i64) -> Self {
        Generator {
            name: name.into(),
            index,
        }
    }

    pub fn degree(&self) -> i64 {
        self.index - 1
    }

    pub fn is_odd(&self) -> bool {
        self.degree().rem_euclid(2) == 1
    }
}

/// `g1^e1 ... gk^ek e^lambda` with the `g_i` strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    powers: Vec<(GenId, u32)>,
    exponent: NovikovExponent,
}

impl Monomial {
    /// The unit monomial times `e^lambda`.
    pub fn class(exponent: NovikovExponent) -> Self {
        Monomial {
            powers: Vec::new(),
            exponent,
        }
    }

    pub fn unit(classes: usize) -> Self {
        Monomial::class(NovikovExponent::zero(classes))
    }

    pub fn generator(id: GenId, classes: usize) -> Self {
        Monomial {
            powers: vec![(id, 1)],
            exponent: NovikovExponent::zero(classes),
        }
    }

    /// Builds a monomial from already-sorted powers without checking the
    /// normal form. [`GradedAlgebra::check_normal`] reports violations.
    pub fn from_raw_unchecked(powers: Vec<(GenId, u32)>, exponent: NovikovExponent) -> Self {
        Monomial { powers, exponent }
    }

    pub fn powers(&self) -> &[(GenId, u32)] {
        &self.powers
    }

    pub fn exponent(&self) -> &NovikovExponent {
        &self.exponent
    }

    pub fn word_len(&self) -> u32 {
        self.powers.iter().map(|(_, e)| e).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.powers.is_empty() && self.exponent.is_zero()
    }

    pub fn power_of(&self, id: GenId) -> u32 {
        self.powers
            .iter()
            .find(|(g, _)| *g == id)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn with_exponent(&self, exponent: NovikovExponent) -> Monomial {
        Monomial {
            powers: self.powers.clone(),
            exponent,
        }
    }

    /// The same word with one factor of `id` removed (no sign involved).
    pub(crate) fn without_one(&self, id: GenId) -> Monomial {
        let mut powers = Vec::with_capacity(self.powers.len());
        for &(g, e) in &self.powers {
            if g == id {
                if e > 1 {
                    powers.push((g, e - 1));
                }
            } else {
                powers.push((g, e));
            }
        }
        Monomial {
            powers,
            exponent: self.exponent.clone(),
        }
    }

    /// Expands the word into a flat factor list, e.g. `a^2 b` -> `[a, a, b]`.
    pub fn factors(&self) -> Vec<GenId> {
        self.powers
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n(g, e as usize))
            .collect()
    }
}

/// A finite exact-rational combination of monomials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Element {
    terms: BTreeMap<Monomial, Q>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn one(classes: usize) -> Self {
        Element::monomial(Monomial::unit(classes), Q::one())
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut e = Element::zero();
        e.add_term(m, c);
        e
    }

    pub fn generator(id: GenId, classes: usize) -> Self {
        Element::monomial(Monomial::generator(id, classes), Q::one())
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    /// Adds `c * m`, pruning a zero result.
    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self + c * other`.
    pub fn add_scale(&self, c: &Q, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled_in_place(c, other);
        out
    }

    pub fn add_scaled_in_place(&mut self, c: &Q, other: &Element) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Q) -> Element {
        Element::zero().add_scale(c, self)
    }

    pub fn neg(&self) -> Element {
        self.scale(&-Q::one())
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add_scale(&-Q::one(), other)
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&Monomial) -> bool) {
        self.terms.retain(|m, _| keep(m));
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Q> {
        self.terms
    }
}

impl FromIterator<(Monomial, Q)> for Element {
    fn from_iter<T: IntoIterator<Item = (Monomial, Q)>>(iter: T) -> Self {
        let mut e = Element::zero();
        for (m, c) in iter {
            e.add_term(m, c);
        }
        e
    }
}

/// Truncation parameters: the finite quotient in which computation happens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    /// Keep monomials of weight strictly below this value.
    pub weight_cutoff: Q,
    pub max_word_len: u32,
    /// Inclusive integer interval for each basis class.
    pub exponent_box: Vec<(i64, i64)>,
    /// Inclusive degree interval.
    pub degrees: (Q, Q),
}

impl Window {
    pub fn new(
        weight_cutoff: Q,
        max_word_len: u32,
        exponent_box: Vec<(i64, i64)>,
        degrees: (Q, Q),
    ) -> Result<Self> {
        if exponent_box.iter().any(|(lo, hi)| lo > hi) {
            return Err(Error::Invalid("empty exponent box".into()));
        }
        if degrees.0 > degrees.1 {
            return Err(Error::Invalid("empty degree interval".into()));
        }
        Ok(Window {
            weight_cutoff,
            max_word_len,
            exponent_box,
            degrees,
        })
    }

    /// The same window enlarged by `margin` in weight, word length and box
    /// (degrees unchanged).
    pub fn widened(&self, margin: u32) -> Window {
        let m = i64::from(margin);
        Window {
            weight_cutoff: &self.weight_cutoff + Q::from_integer(m.into()),
            max_word_len: self.max_word_len + margin,
            exponent_box: self
                .exponent_box
                .iter()
                .map(|(lo, hi)| (lo - m, hi + m))
                .collect(),
            degrees: self.degrees.clone(),
        }
    }

    /// The quotient by the filtration intersected with the box and degree
    /// bounds: the word-length cap is replaced by the largest length whose
    /// weight can still lie below the cutoff somewhere in the box. Free terms
    /// lower the word length, so an independent length cap would not give a
    /// complex.
    pub fn filtration_quotient(&self, basis: &ClassBasis) -> Window {
        let two = Q::from_integer(2.into());
        let min_area = self.exponent_box.iter().zip(&basis.entries).fold(
            Q::zero(),
            |acc, ((lo, hi), entry)| {
                let a = &entry.area * Q::from_integer((*lo).into());
                let b = &entry.area * Q::from_integer((*hi).into());
                acc + a.min(b)
            },
        );
        let room = &self.weight_cutoff - min_area * two / &basis.epsilon_d;
        // largest k with k < room
        let k = (room.ceil() - Q::one()).to_integer();
        let max_word_len = if k.is_negative() {
            0
        } else {
            u32::try_from(k).unwrap_or(u32::MAX)
        };
        Window {
            max_word_len,
            ..self.clone()
        }
    }

    pub fn filtration(&self) -> Cutoff {
        Cutoff {
            weight: self.weight_cutoff.clone(),
            max_word_len: self.max_word_len,
        }
    }

    pub fn in_box(&self, e: &NovikovExponent) -> bool {
        e.0.len() == self.exponent_box.len()
            && e.0
                .iter()
                .zip(&self.exponent_box)
                .all(|(c, (lo, hi))| lo <= c && c <= hi)
    }

    pub fn degree_in_range(&self, d: &Q) -> bool {
        &self.degrees.0 <= d && d <= &self.degrees.1
    }
}

/// The filtration part of a window: weight and word-length bounds only.
/// Truncating by it is compatible with products of non-negative weight terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cutoff {
    pub weight: Q,
    pub max_word_len: u32,
}

/// Generators plus class basis: everything needed to compute degrees,
/// weights and signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedAlgebra {
    pub basis: ClassBasis,
    pub generators: Vec<Generator>,
}

impl GradedAlgebra {
    pub fn new(basis: ClassBasis, generators: Vec<Generator>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if generators[..i].iter().any(|o| o.name == g.name) {
                return Err(Error::Invalid(format!("duplicate generator `{}`", g.name)));
            }
            if g.index < 0 {
                return Err(Error::Invalid(format!(
                    "generator `{}` has negative index",
                    g.name
                )));
            }
        }
        Ok(GradedAlgebra { basis, generators })
    }

    pub fn classes(&self) -> usize {
        self.basis.len()
    }

    pub fn gen_id(&self, name: &str) -> Result<GenId> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn gen_degree(&self, id: GenId) -> i64 {
        self.generators[id].degree()
    }

    pub fn is_odd(&self, id: GenId) -> bool {
        self.generators[id].is_odd()
    }

    pub fn one(&self) -> Element {
        Element::one(self.classes())
    }

    pub fn gen(&self, id: GenId) -> Element {
        Element::generator(id, self.classes())
    }

    pub fn class_element(&self, e: NovikovExponent) -> Element {
        Element::monomial(Monomial::class(e), Q::one())
    }

    /// `sum e_i |g_i| - mu(lambda)`.
    pub fn degree(&self, m: &Monomial) -> i64 {
        let word: i64 = m
            .powers
            .iter()
            .map(|&(g, e)| i64::from(e) * self.gen_degree(g))
            .sum();
        word - self.basis.maslov_unchecked(&m.exponent)
    }

    pub fn weight(&self, m: &Monomial) -> Q {
        self.basis.weight_unchecked(m.word_len(), &m.exponent)
    }

    /// Degree of a homogeneous element, `None` for zero or mixed degrees.
    pub fn homogeneous_degree(&self, a: &Element) -> Option<i64> {
        let mut it = a.terms().map(|(m, _)| self.degree(m));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Sort a raw factor list into normal form, accumulating the Koszul sign.
    /// Returns `Ok(None)` when an odd generator repeats.
    pub fn normalize(
        &self,
        raw: &[GenId],
        exponent: NovikovExponent,
    ) -> Result<Option<(i32, Monomial)>> {
        if exponent.len() != self.classes() {
            return Err(Error::BasisMismatch {
                expected: self.classes(),
                found: exponent.len(),
            });
        }
        if let Some(&bad) = raw.iter().find(|&&g| g >= self.generators.len()) {
            return Err(Error::UnknownGenerator(format!("#{bad}")));
        }
        let mut sign = 1;
        for i in 0..raw.len() {
            for j in i + 1..raw.len() {
                if raw[i] > raw[j] && self.is_odd(raw[i]) && self.is_odd(raw[j]) {
                    sign = -sign;
                }
            }
        }
        let mut sorted = raw.to_vec();
        sorted.sort_unstable();
        let mut powers: Vec<(GenId, u32)> = Vec::new();
        for g in sorted {
            match powers.last_mut() {
                Some((last, e)) if *last == g => {
                    if self.is_odd(g) {
                        return Ok(None);
                    }
                    *e += 1;
                }
                _ => powers.push((g, 1)),
            }
        }
        Ok(Some((sign, Monomial { powers, exponent })))
    }

    /// Normal-form product of two monomials with its Koszul sign, `None` if it vanishes.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(i32, Monomial)> {
        let mut sign = 1;
        // moving each odd factor of `b` left past the odd factors of `a` with a larger id
        for &(h, _) in &b.powers {
            if !self.is_odd(h) {
                continue;
            }
            let mut passes = 0;
            for &(g, _) in &a.powers {
                if g == h {
                    return None;
                }
                if g > h && self.is_odd(g) {
                    passes += 1;
                }
            }
            if passes % 2 == 1 {
                sign = -sign;
            }
        }
        let mut powers = Vec::with_capacity(a.powers.len() + b.powers.len());
        let (mut i, mut j) = (0, 0);
        while i < a.powers.len() || j < b.powers.len() {
            let next = match (a.powers.get(i), b.powers.get(j)) {
                (Some(&x), Some(&y)) if x.0 == y.0 => {
                    i += 1;
                    j += 1;
                    (x.0, x.1 + y.1)
                }
                (Some(&x), Some(&y)) if x.0 < y.0 => {
                    i += 1;
                    x
                }
                (Some(_), Some(&y)) => {
                    j += 1;
                    y
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (None, Some(&y)) => {
                    j += 1;
                    y
                }
                (None, None) => unreachable!(),
            };
            powers.push(next);
        }
        let exponent = a.exponent.add_unchecked(&b.exponent);
        Some((sign, Monomial { powers, exponent }))
    }

    /// Product without any truncation.
    pub fn mul_exact(&self, a: &Element, b: &Element) -> Element {
        self.mul_with(a, b, |_| true)
    }

    /// Product truncated to the window.
    pub fn multiply(&self, a: &Element, b: &Element, w: &Window) -> Element {
        self.mul_with(a, b, |m| self.in_window(m, w))
    }

    /// Product truncated by weight and word length only.
    pub fn mul_cutoff(&self, a: &Element, b: &Element, c: &Cutoff) -> Element {
        self.mul_with(a, b, |m| self.below_cutoff(m, c))
    }

    fn mul_with(&self, a: &Element, b: &Element, keep: impl Fn(&Monomial) -> bool) -> Element {
        let mut out = Element::zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                if let Some((sign, m)) = self.mul_monomials(ma, mb) {
                    if keep(&m) {
                        let c = ca * cb;
                        out.add_term(m, if sign < 0 { -c } else { c });
                    }
                }
            }
        }
        out
    }

    pub fn pow_cutoff(&self, a: &Element, n: u32, c: &Cutoff) -> Element {
        let mut out = self.one();
        for _ in 0..n {
            out = self.mul_cutoff(&out, a, c);
        }
        out
    }

    pub fn in_window(&self, m: &Monomial, w: &Window) -> bool {
        m.word_len() <= w.max_word_len
            && w.in_box(&m.exponent)
            && self.weight(m) < w.weight_cutoff
            && w.degree_in_range(&Q::from_integer(self.degree(m).into()))
    }

    pub fn below_cutoff(&self, m: &Monomial, c: &Cutoff) -> bool {
        m.word_len() <= c.max_word_len && self.weight(m) < c.weight
    }

    /// Drops every monomial outside the window.
    pub fn truncate(&self, a: &Element, w: &Window) -> Element {
        a.filter(|m| self.in_window(m, w))
    }

    pub fn truncate_cutoff(&self, a: &Element, c: &Cutoff) -> Element {
        a.filter(|m| self.below_cutoff(m, c))
    }

    /// Checks that a monomial is in normal form; returns a description of the
    /// first violation.
    pub fn check_normal(&self, m: &Monomial) -> Option<String> {
        if m.exponent.len() != self.classes() {
            return Some("class vector has the wrong length".into());
        }
        for (k, &(g, e)) in m.powers.iter().enumerate() {
            if g >= self.generators.len() {
                return Some(format!("unknown generator #{g}"));
            }
            if e == 0 {
                return Some("zero exponent stored".into());
            }
            if e > 1 && self.is_odd(g) {
                return Some(format!(
                    "odd generator `{}` repeated",
                    self.generators[g].name
                ));
            }
            if k > 0 && m.powers[k - 1].0 >= g {
                return Some("factors out of order".into());
            }
        }
        None
    }

    /// All window monomials, grouped by nothing in particular (sorted).
    /// Fails if more than `cap` monomials would be produced.
    pub fn enumerate_window(&self, w: &Window, cap: usize) -> Result<Vec<Monomial>> {
        let mut out = Vec::new();
        let mut exps = Vec::new();
        enumerate_box(&w.exponent_box, &mut vec![0; self.classes()], 0, &mut exps);
        let two = Q::from_integer(2.into());
        for e in exps {
            let e = NovikovExponent(e);
            let base_weight = self.basis.area_unchecked(&e) * &two / &self.basis.epsilon_d;
            if base_weight >= w.weight_cutoff {
                continue;
            }
            let mu = self.basis.maslov_unchecked(&e);
            let mut powers = Vec::new();
            self.enumerate_words(w, &e, &base_weight, mu, 0, 0, 0, &mut powers, &mut out, cap)?;
        }
        out.sort();
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate_words(
        &self,
        w: &Window,
        e: &NovikovExponent,
        base_weight: &Q,
        mu: i64,
        next: GenId,
        len: u32,
        word_degree: i64,
        powers: &mut Vec<(GenId, u32)>,
        out: &mut Vec<Monomial>,
        cap: usize,
    ) -> Result<()> {
        if next == self.generators.len() {
            let deg = Q::from_integer((word_degree - mu).into());
            if w.degree_in_range(&deg) {
                if out.len() >= cap {
                    return Err(Error::WindowTooLarge {
                        count: out.len() + 1,
                        cap,
                    });
                }
                out.push(Monomial {
                    powers: powers.clone(),
                    exponent: e.clone(),
                });
            }
            return Ok(());
        }
        let max_e = if self.is_odd(next) {
            1
        } else {
            w.max_word_len - len
        };
        for k in 0..=max_e.min(w.max_word_len - len) {
            let weight = base_weight + Q::from_integer((len + k).into());
            if weight >= w.weight_cutoff {
                break;
            }
            if k > 0 {
                powers.push((next, k));
            }
            self.enumerate_words(
                w,
                e,
                base_weight,
                mu,
                next + 1,
                len + k,
                word_degree + i64::from(k) * self.gen_degree(next),
                powers,
                out,
                cap,
            )?;
            if k > 0 {
                powers.pop();
            }
        }
        Ok(())
    }
}

fn enumerate_box(bx: &[(i64, i64)], cur: &mut Vec<i64>, i: usize, out: &mut Vec<Vec<i64>>) {
    if i == bx.len() {
        out.push(cur.clone());
        return;
    }
    for v in bx[i].0..=bx[i].1 {
        cur[i] = v;
        enumerate_box(bx, cur, i + 1, out);
    }
}

/// An algebra morphism given by generator images and a linear map on classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraMap {
    /// Image of each source generator, in the target algebra.
    pub images: Vec<Element>,
    /// Image of each source basis class, as a target exponent.
    pub class_images: Vec<NovikovExponent>,
}

impl AlgebraMap {
    pub fn identity(alg: &GradedAlgebra) -> Self {
        AlgebraMap {
            images: (0..alg.generators.len()).map(|g| alg.gen(g)).collect(),
            class_images: (0..alg.classes())
                .map(|i| {
                    let mut v = vec![0; alg.classes()];
                    v[i] = 1;
                    NovikovExponent(v)
                })
                .collect(),
        }
    }

    pub fn map_exponent(&self, e: &NovikovExponent, target_classes: usize) -> NovikovExponent {
        let mut out = NovikovExponent::zero(target_classes);
        for (c, img) in e.0.iter().zip(&self.class_images) {
            for (o, v) in out.0.iter_mut().zip(&img.0) {
                *o += c * v;
            }
        }
        out
    }

    /// Applies the map to an element, truncating by `cutoff` when given.
    pub fn apply(&self, target: &GradedAlgebra, a: &Element, cutoff: Option<&Cutoff>) -> Element {
        let mut out = Element::zero();
        let two = Q::from_integer(2.into());
        let images_nonneg = self.images.iter().all(|img| {
            img.terms()
                .all(|(m, _)| !target.basis.area_unchecked(m.exponent()).is_negative())
        });
        for (m, c) in a.terms() {
            let exp = self.map_exponent(m.exponent(), target.classes());
            let shift = target.basis.area_unchecked(&exp) * &two / &target.basis.epsilon_d;
            // intermediate products may be cut at `cutoff - shift` when all
            // image terms have non-negative weight
            let inner = cutoff.filter(|_| images_nonneg).map(|c| Cutoff {
                weight: &c.weight - &shift,
                max_word_len: c.max_word_len,
            });
            let mut acc = target.one();
            for (g, e) in m.powers() {
                for _ in 0..*e {
                    acc = match &inner {
                        Some(cut) => target.mul_cutoff(&acc, &self.images[*g], cut),
                        None => target.mul_exact(&acc, &self.images[*g]),
                    };
                }
            }
            let tail = Element::monomial(Monomial::class(exp), c.clone());
            let term = target.mul_exact(&acc, &tail);
            match cutoff {
                Some(cut) => {
                    out.add_scaled_in_place(&Q::one(), &target.truncate_cutoff(&term, cut))
                }
                None => out.add_scaled_in_place(&Q::one(), &term),
            }
        }
        out
    }
}
