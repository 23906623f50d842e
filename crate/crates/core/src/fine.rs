//! Fine Floer complexes: free modules over the tensor product of two cluster
//! algebras (base-changed to a common class group) on intersection points.
//!
//! `d_F(r a) = delta(r) a + (-1)^|r| r d_F(a)`, where `delta` is the cluster
//! differential of the coefficient ring.

use std::fmt;

use num_traits::One;

use crate::algebra::{AlgebraMap, Cutoff, Element, GenId, GradedAlgebra, Monomial, Window};
use crate::complex::ComplexSpec;
use crate::error::{Error, Result};
use crate::homology::{homology, HomologyOptions, HomologyReport, WindowedComplex};
use crate::linalg;
use crate::module::{Marker, ModuleElement};
use crate::novikov::{ClassBasis, ClassEntry, NovikovExponent};
use crate::text::{show, ModuleDisplay};
use crate::{format_rational, Q};

/// An intersection point with its (possibly half-integer) degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Intersection {
    pub name: String,
    pub degree: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FineSpec {
    pub label: String,
    pub cl0: ComplexSpec,
    pub cl1: ComplexSpec,
    /// Image of each class of `cl0` (resp. `cl1`) in the bar basis.
    pub embed0: Vec<NovikovExponent>,
    pub embed1: Vec<NovikovExponent>,
    /// The coefficient ring: generators of `cl0` followed by those of `cl1`,
    /// over the bar basis, with the induced differential.
    pub ring: ComplexSpec,
    pub intersections: Vec<Intersection>,
    /// `df[a]` is `d_F` of intersection point `a`.
    pub df: Vec<ModuleElement>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FineViolationKind {
    Degree,
    NotNormal,
    Denominator,
    OddMaslov,
}

impl fmt::Display for FineViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FineViolationKind::Degree => "wrong differential degree",
            FineViolationKind::NotNormal => "monomial not in normal form",
            FineViolationKind::Denominator => "degree denominator exceeds 2",
            FineViolationKind::OddMaslov => "class of odd Maslov index",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FineViolation {
    pub kind: FineViolationKind,
    pub intersection: String,
    pub detail: String,
}

impl fmt::Display for FineViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d_F {}: {} ({})",
            self.intersection, self.kind, self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FineD2Failure {
    pub intersection: String,
    pub residual: ModuleElement,
}

/// `d_F a = s(a) a + delta(a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaSplit {
    pub s: Element,
    pub delta: ModuleElement,
    /// `s` is zero or homogeneous of degree `-1`.
    pub degree_ok: bool,
}

fn embedding_map(
    from: &ComplexSpec,
    offset: usize,
    embed: &[NovikovExponent],
    ring: &GradedAlgebra,
) -> AlgebraMap {
    AlgebraMap {
        images: (0..from.generators().len())
            .map(|g| ring.gen(offset + g))
            .collect(),
        class_images: embed.to_vec(),
    }
}

fn check_embedding(
    name: &str,
    from: &ClassBasis,
    embed: &[NovikovExponent],
    bar: &ClassBasis,
) -> Result<()> {
    if embed.len() != from.len() {
        return Err(Error::Invalid(format!(
            "{name}: every class needs an embedding"
        )));
    }
    for (entry, img) in from.entries.iter().zip(embed) {
        let (mu, area) = bar.maslov_area(img)?;
        if mu != entry.maslov || area != entry.area {
            return Err(Error::Invalid(format!(
                "{name}.{}: embedding changes (maslov, area) from ({}, {}) to ({mu}, {})",
                entry.name,
                entry.maslov,
                format_rational(&entry.area),
                format_rational(&area)
            )));
        }
    }
    let rows: Vec<Vec<(usize, Q)>> = embed
        .iter()
        .map(|e| {
            e.0.iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(i, c)| (i, Q::from_integer((*c).into())))
                .collect()
        })
        .collect();
    if linalg::rank(&rows) != embed.len() {
        return Err(Error::Invalid(format!(
            "{name}: class embedding is not injective"
        )));
    }
    Ok(())
}

impl FineSpec {
    /// Builds the coefficient ring; the differential starts at zero.
    pub fn new(
        label: impl Into<String>,
        cl0: ComplexSpec,
        cl1: ComplexSpec,
        bar: ClassBasis,
        embed0: Vec<NovikovExponent>,
        embed1: Vec<NovikovExponent>,
        intersections: Vec<Intersection>,
    ) -> Result<FineSpec> {
        check_embedding("cl0", cl0.basis(), &embed0, &bar)?;
        check_embedding("cl1", cl1.basis(), &embed1, &bar)?;
        let gens: Vec<_> = cl0
            .generators()
            .iter()
            .chain(cl1.generators())
            .cloned()
            .collect();
        let alg = GradedAlgebra::new(bar, gens)?;
        for (i, p) in intersections.iter().enumerate() {
            if alg.gen_id(&p.name).is_ok() || intersections[..i].iter().any(|o| o.name == p.name) {
                return Err(Error::Invalid(format!("duplicate name `{}`", p.name)));
            }
        }
        let m0 = embedding_map(&cl0, 0, &embed0, &alg);
        let m1 = embedding_map(&cl1, cl0.generators().len(), &embed1, &alg);
        let diff = cl0
            .diff
            .iter()
            .map(|dx| m0.apply(&alg, dx, None))
            .chain(cl1.diff.iter().map(|dx| m1.apply(&alg, dx, None)))
            .collect();
        let ring = ComplexSpec::new(format!("{} coefficients", cl0.label), alg, diff)?;
        let df = vec![ModuleElement::zero(); intersections.len()];
        Ok(FineSpec {
            label: label.into(),
            cl0,
            cl1,
            embed0,
            embed1,
            ring,
            intersections,
            df,
        })
    }

    pub fn alg(&self) -> &GradedAlgebra {
        &self.ring.alg
    }

    pub fn names(&self) -> Vec<String> {
        self.intersections.iter().map(|p| p.name.clone()).collect()
    }

    pub fn intersection_id(&self, name: &str) -> Result<Marker> {
        self.intersections
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn show(&self, t: &ModuleElement) -> String {
        ModuleDisplay {
            alg: self.alg(),
            element: t,
            markers: &self.names(),
        }
        .to_string()
    }

    pub fn term_degree(&self, m: &Monomial, a: Marker) -> Q {
        Q::from_integer(self.alg().degree(m).into()) + &self.intersections[a].degree
    }

    pub fn validate(&self) -> Vec<FineViolation> {
        let alg = self.alg();
        let two = Q::from_integer(2.into());
        let mut out = Vec::new();
        for (a, p) in self.intersections.iter().enumerate() {
            let mut push = |kind, detail: String| {
                out.push(FineViolation {
                    kind,
                    intersection: p.name.clone(),
                    detail,
                })
            };
            if !(&p.degree * &two).is_integer() {
                push(FineViolationKind::Denominator, format_rational(&p.degree));
            }
            let want = &p.degree - Q::one();
            for ((m, b), _) in self.df[a].terms() {
                let term = self.show(&ModuleElement::basis(m.clone(), *b));
                if let Some(why) = alg.check_normal(m) {
                    push(FineViolationKind::NotNormal, format!("{term}: {why}"));
                    continue;
                }
                let deg = self.term_degree(m, *b);
                if deg != want {
                    push(
                        FineViolationKind::Degree,
                        format!(
                            "{term} has degree {}, expected {}",
                            format_rational(&deg),
                            format_rational(&want)
                        ),
                    );
                }
                if alg.basis.maslov_unchecked(m.exponent()).rem_euclid(2) == 1 {
                    push(FineViolationKind::OddMaslov, term);
                }
            }
        }
        out
    }

    /// `d_F` of a basis term `m a`.
    pub fn df_term(&self, m: &Monomial, a: Marker) -> ModuleElement {
        let alg = self.alg();
        let mut out = ModuleElement::from_ring(&self.ring.d_monomial(m), a);
        let r = Element::monomial(m.clone(), Q::one());
        let tail = self.df[a].left_mul(alg, &r);
        let sign = if alg.degree(m).rem_euclid(2) == 1 {
            -Q::one()
        } else {
            Q::one()
        };
        out.add_scaled_in_place(&sign, &tail);
        out
    }

    pub fn apply_df(&self, t: &ModuleElement) -> ModuleElement {
        let mut out = ModuleElement::zero();
        for ((m, a), c) in t.terms() {
            out.add_scaled_in_place(c, &self.df_term(m, *a));
        }
        out
    }

    pub fn in_window(&self, m: &Monomial, a: Marker, w: &Window) -> bool {
        let alg = self.alg();
        m.word_len() <= w.max_word_len
            && w.in_box(m.exponent())
            && alg.weight(m) < w.weight_cutoff
            && w.degree_in_range(&self.term_degree(m, a))
    }

    pub fn truncate(&self, t: &ModuleElement, w: &Window) -> ModuleElement {
        t.filter(|m, a| self.in_window(m, a, w))
    }

    pub fn split_sa(&self, a: Marker) -> SaSplit {
        let s = self.df[a].component(a);
        let delta = self.df[a].sub(&ModuleElement::from_ring(&s, a));
        let degree_ok = s.is_zero() || self.alg().homogeneous_degree(&s) == Some(-1);
        SaSplit {
            s,
            delta,
            degree_ok,
        }
    }

    /// `s(a)^2` modulo the filtration, for every intersection point.
    pub fn check_sa_squared(&self, cut: &Cutoff) -> std::result::Result<(), (String, Element)> {
        for (a, p) in self.intersections.iter().enumerate() {
            let s = self.split_sa(a).s;
            let sq = self.alg().mul_cutoff(&s, &s, cut);
            if !sq.is_zero() {
                return Err((p.name.clone(), sq));
            }
        }
        Ok(())
    }

    /// `d_F^2 a` in the window, for every intersection point.
    pub fn check_df_squared(&self, w: &Window) -> std::result::Result<(), FineD2Failure> {
        for (a, p) in self.intersections.iter().enumerate() {
            let r = self.truncate(&self.apply_df(&self.df[a]), w);
            if !r.is_zero() {
                return Err(FineD2Failure {
                    intersection: p.name.clone(),
                    residual: r,
                });
            }
        }
        Ok(())
    }

    /// Identifies generators of `cl1` with generators of `cl0` (pairs
    /// `(cl1 name, cl0 name)`) and rewrites `d_F` over the single ring.
    pub fn symmetrize(&self, identification: &[(String, String)]) -> Result<FineSpec> {
        let n0 = self.cl0.generators().len();
        let n1 = self.cl1.generators().len();
        if n1 == 0 && identification.is_empty() {
            // already over a single ring
            return Ok(self.clone());
        }
        if identification.len() != n1 || n0 != n1 {
            return Err(Error::Invalid(format!(
                "identification must be a bijection between {n1} and {n0} generators"
            )));
        }
        let mut target: Vec<Option<GenId>> = vec![None; n1];
        let mut hit = vec![false; n0];
        for (from, to) in identification {
            let i = self.cl1.alg.gen_id(from)?;
            let j = self.cl0.alg.gen_id(to)?;
            if target[i].is_some() || hit[j] {
                return Err(Error::Invalid(format!(
                    "`{from}` or `{to}` identified twice"
                )));
            }
            let (di, dj) = (
                self.cl1.generators()[i].index,
                self.cl0.generators()[j].index,
            );
            if di != dj {
                return Err(Error::DegreeMismatch(format!(
                    "`{from}` has index {di} but `{to}` has index {dj}"
                )));
            }
            target[i] = Some(j);
            hit[j] = true;
        }
        let empty =
            ComplexSpec::zero(self.cl1.label.clone(), self.cl1.basis().clone(), Vec::new())?;
        let mut out = FineSpec::new(
            self.label.clone(),
            self.cl0.clone(),
            empty,
            self.alg().basis.clone(),
            self.embed0.clone(),
            self.embed1.clone(),
            self.intersections.clone(),
        )?;
        let new_alg = out.alg().clone();
        let classes = new_alg.classes();
        let map = AlgebraMap {
            images: (0..n0)
                .map(|g| new_alg.gen(g))
                .chain(
                    target
                        .iter()
                        .map(|t| new_alg.gen(t.expect("checked bijection"))),
                )
                .collect(),
            class_images: (0..classes)
                .map(|i| {
                    let mut v = vec![0; classes];
                    v[i] = 1;
                    NovikovExponent(v)
                })
                .collect(),
        };
        // identified generators must carry the same differential
        for (i, t) in target.iter().enumerate() {
            let j = t.expect("checked bijection");
            let lhs = map.apply(&new_alg, &self.ring.diff[n0 + i], None);
            if lhs != out.ring.diff[j] {
                return Err(Error::Invalid(format!(
                    "`{}` and `{}` have different differentials",
                    self.cl1.generators()[i].name,
                    self.cl0.generators()[j].name
                )));
            }
        }
        out.df = self
            .df
            .iter()
            .map(|t| {
                let mut acc = ModuleElement::zero();
                for a in 0..self.intersections.len() {
                    let comp = map.apply(&new_alg, &t.component(a), None);
                    acc.add_scaled_in_place(&Q::one(), &ModuleElement::from_ring(&comp, a));
                }
                acc
            })
            .collect();
        Ok(out)
    }
}

/// A fine spec as a windowed complex; the intersection factor adds no
/// word length or weight.
pub struct FineComplex<'a> {
    pub spec: &'a FineSpec,
}

impl WindowedComplex for FineComplex<'_> {
    type Key = (Monomial, Marker);

    fn label(&self) -> String {
        self.spec.label.clone()
    }

    fn basis(&self) -> &ClassBasis {
        &self.spec.alg().basis
    }

    fn window_basis(&self, w: &Window, cap: usize) -> Result<Vec<(Monomial, Marker)>> {
        let mut out = Vec::new();
        for (a, p) in self.spec.intersections.iter().enumerate() {
            let ring_w = Window {
                degrees: (&w.degrees.0 - &p.degree, &w.degrees.1 - &p.degree),
                ..w.clone()
            };
            let left = cap.saturating_sub(out.len());
            let ms = self
                .spec
                .alg()
                .enumerate_window(&ring_w, left)
                .map_err(|e| match e {
                    Error::WindowTooLarge { .. } => Error::WindowTooLarge {
                        count: out.len() + left + 1,
                        cap,
                    },
                    other => other,
                })?;
            out.extend(ms.into_iter().map(|m| (m, a)));
        }
        out.sort();
        Ok(out)
    }

    fn degree(&self, k: &(Monomial, Marker)) -> Q {
        self.spec.term_degree(&k.0, k.1)
    }

    fn weight(&self, k: &(Monomial, Marker)) -> Q {
        self.spec.alg().weight(&k.0)
    }

    fn boundary(&self, k: &(Monomial, Marker)) -> Vec<((Monomial, Marker), Q)> {
        self.spec
            .df_term(&k.0, k.1)
            .terms()
            .map(|(key, c)| (key.clone(), c.clone()))
            .collect()
    }
}

pub fn fine_homology(f: &FineSpec, w: &Window, opts: HomologyOptions) -> Result<HomologyReport> {
    homology(&FineComplex { spec: f }, w, opts)
}

/// The circle/line example: `L0` a circle with a perfect Morse function
/// (`m`, `M`) and one disk class, `L1` a line with no critical points, two
/// intersection points `a` (degree 1/2) and `b` (degree -1/2), and
/// `d_F a = m a + b`, `d_F b = m b - (dm) a`. With `flipped_sign` the second
/// sign is `+`, which breaks `d_F^2 = 0`.
pub fn builtin_circle_line(series_len: u32, flipped_sign: bool) -> FineSpec {
    let one = Q::one();
    let cl0_basis = ClassBasis::new(
        vec![ClassEntry {
            name: "lam0".into(),
            maslov: 2,
            area: one.clone(),
        }],
        one.clone(),
    )
    .expect("valid basis");
    let cl0_alg = GradedAlgebra::new(
        cl0_basis,
        vec![crate::Generator::new("m", 0), crate::Generator::new("M", 1)],
    )
    .expect("valid algebra");
    let lam = NovikovExponent(vec![1]);
    let dm: Element = (0..=series_len)
        .map(|k| {
            let powers = if k == 0 { vec![] } else { vec![(1, k)] };
            (
                Monomial::from_raw_unchecked(powers, lam.clone()),
                one.clone(),
            )
        })
        .collect();
    let cl0 = ComplexSpec::new("circle", cl0_alg, vec![dm, Element::zero()]).expect("valid spec");
    let cl1 =
        ComplexSpec::zero("line", ClassBasis::empty(one.clone()), Vec::new()).expect("valid spec");
    let bar = ClassBasis::new(
        vec![ClassEntry {
            name: "lam".into(),
            maslov: 2,
            area: one.clone(),
        }],
        one.clone(),
    )
    .expect("valid basis");
    let half = Q::new(1.into(), 2.into());
    let mut f = FineSpec::new(
        if flipped_sign {
            "circle/line (flipped sign)"
        } else {
            "circle/line"
        },
        cl0,
        cl1,
        bar,
        vec![NovikovExponent(vec![1])],
        vec![],
        vec![
            Intersection {
                name: "a".into(),
                degree: half.clone(),
            },
            Intersection {
                name: "b".into(),
                degree: -half,
            },
        ],
    )
    .expect("valid fine spec");
    let classes = f.alg().classes();
    let m = f.alg().gen(0);
    let dm_ring = f.ring.diff[0].clone();
    let mut da = ModuleElement::from_ring(&m, 0);
    da.add_term(Monomial::unit(classes), 1, one.clone());
    let mut db = ModuleElement::from_ring(&m, 1);
    let sign = if flipped_sign { one } else { -one };
    db.add_scaled_in_place(&sign, &ModuleElement::from_ring(&dm_ring, 0));
    f.df = vec![da, db];
    f
}

/// Printable residual of a failed `d_F^2` check.
pub fn describe_failure(f: &FineSpec, e: &FineD2Failure) -> String {
    format!("d_F^2 {} = {}", e.intersection, f.show(&e.residual))
}

pub fn describe_ring(f: &FineSpec, e: &Element) -> String {
    show(f.alg(), e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Generator;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn window() -> Window {
        Window::new(q(8), 6, vec![(-2, 4)], (q(-6), q(6))).unwrap()
    }

    #[test]
    fn circle_line_squares_to_zero() {
        let f = builtin_circle_line(8, false);
        assert!(f.validate().is_empty(), "{:?}", f.validate());
        assert_eq!(f.check_df_squared(&window()), Ok(()));
        assert_eq!(f.check_sa_squared(&window().filtration()), Ok(()));
        let sa = f.split_sa(0);
        assert_eq!(show(f.alg(), &sa.s), "m");
        assert_eq!(f.show(&sa.delta), "b");
        assert!(sa.degree_ok);
        let sb = f.split_sa(1);
        assert_eq!(show(f.alg(), &sb.s), "m");
        let dm = f.ring.diff[0].clone();
        assert_eq!(sb.delta, ModuleElement::from_ring(&dm.neg(), 0));
    }

    #[test]
    fn flipped_sign_leaves_twice_dm() {
        let f = builtin_circle_line(8, true);
        let err = f.check_df_squared(&window()).unwrap_err();
        assert_eq!(err.intersection, "a");
        let dm = f.ring.diff[0].clone();
        let expected = f.truncate(&ModuleElement::from_ring(&dm.scale(&q(2)), 0), &window());
        assert_eq!(err.residual, expected);
    }

    #[test]
    fn circle_line_is_acyclic() {
        let f = builtin_circle_line(17, false);
        let r = fine_homology(&f, &window(), HomologyOptions::default()).unwrap();
        assert!(r.certified().count() >= 9, "{}", r.table());
        for d in r.certified() {
            assert_eq!(d.betti, 0, "{}", r.table());
        }
    }

    fn two_minima() -> FineSpec {
        let e = ClassBasis::empty(q(1));
        let cl0 = ComplexSpec::zero("L0", e.clone(), vec![Generator::new("m", 0)]).unwrap();
        let cl1 = ComplexSpec::zero("L1", e.clone(), vec![Generator::new("m'", 0)]).unwrap();
        let mut f = FineSpec::new(
            "pair",
            cl0,
            cl1,
            e,
            vec![],
            vec![],
            vec![Intersection {
                name: "x".into(),
                degree: q(0),
            }],
        )
        .unwrap();
        let s = f.alg().gen(0).sub(&f.alg().gen(1));
        f.df = vec![ModuleElement::from_ring(&s, 0)];
        f
    }

    #[test]
    fn difference_of_minima_is_acyclic() {
        let f = two_minima();
        let w = Window::new(q(8), 6, vec![], (q(-6), q(6))).unwrap();
        assert_eq!(f.check_df_squared(&w), Ok(()));
        let r = fine_homology(&f, &w, HomologyOptions::default()).unwrap();
        assert!(r.certified().count() > 0);
        assert!(r.certified().all(|d| d.betti == 0));
    }

    #[test]
    fn symmetrize_removes_difference() {
        let f = two_minima();
        let s = f.symmetrize(&[("m'".into(), "m".into())]).unwrap();
        assert!(s.df[0].is_zero());
        assert_eq!(s.alg().generators.len(), 1);
        // nothing left to identify: unchanged
        assert_eq!(s.symmetrize(&[]).unwrap(), s);
    }

    #[test]
    fn symmetrize_checks_degrees() {
        let e = ClassBasis::empty(q(1));
        let cl0 = ComplexSpec::zero("L0", e.clone(), vec![Generator::new("m", 0)]).unwrap();
        let cl1 = ComplexSpec::zero("L1", e.clone(), vec![Generator::new("p", 1)]).unwrap();
        let f = FineSpec::new("bad", cl0, cl1, e, vec![], vec![], vec![]).unwrap();
        assert!(matches!(
            f.symmetrize(&[("p".into(), "m".into())]),
            Err(Error::DegreeMismatch(_))
        ));
    }

    #[test]
    fn even_square_survives() {
        let e = ClassBasis::empty(q(1));
        let cl0 = ComplexSpec::zero("L0", e.clone(), vec![Generator::new("E", 1)]).unwrap();
        let cl1 = ComplexSpec::zero("L1", e.clone(), vec![]).unwrap();
        let mut f = FineSpec::new(
            "even",
            cl0,
            cl1,
            e,
            vec![],
            vec![],
            vec![Intersection {
                name: "x".into(),
                degree: q(0),
            }],
        )
        .unwrap();
        f.df = vec![ModuleElement::from_ring(&f.alg().gen(0), 0)];
        let cut = Cutoff {
            weight: q(8),
            max_word_len: 6,
        };
        assert!(f.check_sa_squared(&cut).is_err());
        assert!(!f.split_sa(0).degree_ok);
    }

    #[test]
    fn zero_differential_counts_free_module() {
        let mut f = builtin_circle_line(4, false);
        f.df = vec![ModuleElement::zero(), ModuleElement::zero()];
        let mut ring = f.ring.clone();
        ring.diff = vec![Element::zero(), Element::zero()];
        f.ring = ring;
        let w = Window::new(q(4), 3, vec![(0, 1)], (q(-3), q(3))).unwrap();
        let r = fine_homology(&f, &w, HomologyOptions::default()).unwrap();
        let wq = w.filtration_quotient(&f.alg().basis);
        for d in r.certified() {
            let mut count = 0;
            for p in &f.intersections {
                let shifted = Window {
                    degrees: (&d.degree - &p.degree, &d.degree - &p.degree),
                    ..wq.clone()
                };
                count += f.alg().enumerate_window(&shifted, 1000).unwrap().len();
            }
            assert_eq!(d.betti, count);
        }
    }

    #[test]
    fn embeddings_must_preserve_classes() {
        let one = Q::one();
        let cl0 = ComplexSpec::zero(
            "L0",
            ClassBasis::new(
                vec![ClassEntry {
                    name: "l".into(),
                    maslov: 2,
                    area: one.clone(),
                }],
                one.clone(),
            )
            .unwrap(),
            vec![],
        )
        .unwrap();
        let cl1 = ComplexSpec::zero("L1", ClassBasis::empty(one.clone()), vec![]).unwrap();
        let bar = ClassBasis::new(
            vec![ClassEntry {
                name: "k".into(),
                maslov: 2,
                area: q(2),
            }],
            one,
        )
        .unwrap();
        assert!(FineSpec::new(
            "x",
            cl0,
            cl1,
            bar,
            vec![NovikovExponent(vec![1])],
            vec![],
            vec![]
        )
        .is_err());
    }
}
