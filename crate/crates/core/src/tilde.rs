//! The module `SV (x) V`: terms `x1...xk v~` carry one marked generator.
//! `alpha` is the derivation `SV -> SV (x) V` with `alpha(v) = v~`, and the
//! differential is `d(m v~) = (dm) v~ + (-1)^|m| m alpha(dv)`.
//!
//! The marker counts as one unit of word length and weight.

use num_traits::One;

use crate::algebra::{Element, GenId, GradedAlgebra, Monomial, Window};
use crate::complex::ComplexSpec;
use crate::error::Result;
use crate::homology::{homology, HomologyOptions, HomologyReport, WindowedComplex};
use crate::module::ModuleElement;
use crate::text::ModuleDisplay;
use crate::Q;

fn parity_sign(c: &Q, odd: bool) -> Q {
    if odd {
        -c.clone()
    } else {
        c.clone()
    }
}

/// Explicit formula: `alpha(x1...xk) = sum_i (-1)^{s_i} x1..^xi..xk xi~` with
/// `s_i = |xi| * sum_{j>i} |xj|`. Powers are expanded into repeated factors,
/// so `alpha(x^e) = e x^{e-1} x~` falls out.
pub fn alpha(alg: &GradedAlgebra, a: &Element) -> ModuleElement {
    let mut out = ModuleElement::zero();
    for (m, c) in a.terms() {
        let flat = m.factors();
        let degs: Vec<i64> = flat.iter().map(|&g| alg.gen_degree(g)).collect();
        for (i, &g) in flat.iter().enumerate() {
            let after: i64 = degs[i + 1..].iter().sum();
            let odd = (degs[i] * after).rem_euclid(2) == 1;
            out.add_term(m.without_one(g), g, parity_sign(c, odd));
        }
    }
    out
}

/// `alpha` through the product rule `alpha(ab) = a alpha(b) + (-1)^{|a||b|} b alpha(a)`,
/// peeling one factor at a time. Used to cross-check [`alpha`].
pub fn alpha_recursive(alg: &GradedAlgebra, a: &Element) -> ModuleElement {
    let mut out = ModuleElement::zero();
    for (m, c) in a.terms() {
        let word = alpha_word(alg, &m.factors());
        let class = Element::monomial(Monomial::class(m.exponent().clone()), c.clone());
        out.add_scaled_in_place(&Q::one(), &word.left_mul(alg, &class));
    }
    out
}

fn alpha_word(alg: &GradedAlgebra, flat: &[GenId]) -> ModuleElement {
    let Some((&x, rest)) = flat.split_first() else {
        return ModuleElement::zero();
    };
    let mut out = alpha_word(alg, rest).left_mul(alg, &alg.gen(x));
    let rest_deg: i64 = rest.iter().map(|&g| alg.gen_degree(g)).sum();
    let (s, rest_m) = alg
        .normalize(rest, alg.basis.zero())
        .expect("factors of a normal monomial")
        .expect("factors of a normal monomial");
    let odd = (alg.gen_degree(x) * rest_deg + i64::from(s < 0)).rem_euclid(2) == 1;
    out.add_term(rest_m, x, parity_sign(&Q::one(), odd));
    out
}

/// The module differential, exact.
pub fn tilde_d(spec: &ComplexSpec, t: &ModuleElement) -> ModuleElement {
    let alg = &spec.alg;
    let mut out = ModuleElement::zero();
    for ((m, v), c) in t.terms() {
        out.add_scaled_in_place(c, &ModuleElement::from_ring(&spec.d_monomial(m), *v));
        let odd = alg.degree(m).rem_euclid(2) == 1;
        let tail =
            alpha(alg, &spec.diff[*v]).left_mul(alg, &Element::monomial(m.clone(), Q::one()));
        out.add_scaled_in_place(&parity_sign(c, odd), &tail);
    }
    out
}

/// Degree of a marked term: `deg(m) + deg(v)`.
pub fn tilde_degree(alg: &GradedAlgebra, m: &Monomial, v: GenId) -> Q {
    Q::from_integer((alg.degree(m) + alg.gen_degree(v)).into())
}

pub fn tilde_weight(alg: &GradedAlgebra, m: &Monomial) -> Q {
    alg.weight(m) + Q::one()
}

pub fn in_tilde_window(alg: &GradedAlgebra, m: &Monomial, v: GenId, w: &Window) -> bool {
    m.word_len() < w.max_word_len
        && w.in_box(m.exponent())
        && tilde_weight(alg, m) < w.weight_cutoff
        && w.degree_in_range(&tilde_degree(alg, m, v))
}

pub fn truncate_tilde(alg: &GradedAlgebra, t: &ModuleElement, w: &Window) -> ModuleElement {
    t.filter(|m, v| in_tilde_window(alg, m, v, w))
}

pub fn tilde_d_window(spec: &ComplexSpec, t: &ModuleElement, w: &Window) -> ModuleElement {
    truncate_tilde(&spec.alg, &tilde_d(spec, t), w)
}

/// Printing with `v~` for the marked generator.
pub fn show_tilde(alg: &GradedAlgebra, t: &ModuleElement) -> String {
    let markers: Vec<String> = alg
        .generators
        .iter()
        .map(|g| format!("{}~", g.name))
        .collect();
    ModuleDisplay {
        alg,
        element: t,
        markers: &markers,
    }
    .to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaFailure {
    pub sample: Monomial,
    /// `alpha(d m) - d(alpha(m))` in the window.
    pub residual: ModuleElement,
}

/// Checks `alpha(d m) = d(alpha(m))` in the window on each sample.
pub fn check_alpha_chain(
    spec: &ComplexSpec,
    w: &Window,
    samples: &[Monomial],
) -> std::result::Result<(), AlphaFailure> {
    let alg = &spec.alg;
    for s in samples {
        let m = Element::monomial(s.clone(), Q::one());
        let lhs = alpha(alg, &spec.d_monomial(s));
        let rhs = tilde_d(spec, &alpha(alg, &m));
        let residual = truncate_tilde(alg, &lhs.sub(&rhs), w);
        if !residual.is_zero() {
            return Err(AlphaFailure {
                sample: s.clone(),
                residual,
            });
        }
    }
    Ok(())
}

/// The tilde module of a spec, as a windowed complex.
pub struct TildeComplex<'a> {
    pub spec: &'a ComplexSpec,
}

impl WindowedComplex for TildeComplex<'_> {
    type Key = (Monomial, GenId);

    fn label(&self) -> String {
        format!(
            "suspended symmetric fine Floer homology (tilde module of {})",
            self.spec.label
        )
    }

    fn basis(&self) -> &crate::ClassBasis {
        self.spec.basis()
    }

    fn window_basis(&self, w: &Window, cap: usize) -> Result<Vec<(Monomial, GenId)>> {
        let alg = &self.spec.alg;
        let mut out = Vec::new();
        if w.max_word_len == 0 {
            return Ok(out);
        }
        let one = Q::one();
        for v in 0..alg.generators.len() {
            let shift = Q::from_integer(alg.gen_degree(v).into());
            let ring_w = Window {
                weight_cutoff: &w.weight_cutoff - &one,
                max_word_len: w.max_word_len - 1,
                exponent_box: w.exponent_box.clone(),
                degrees: (&w.degrees.0 - &shift, &w.degrees.1 - &shift),
            };
            let left = cap.saturating_sub(out.len());
            let ms = alg.enumerate_window(&ring_w, left).map_err(|e| match e {
                crate::Error::WindowTooLarge { .. } => crate::Error::WindowTooLarge {
                    count: out.len() + left + 1,
                    cap,
                },
                other => other,
            })?;
            out.extend(ms.into_iter().map(|m| (m, v)));
        }
        out.sort();
        Ok(out)
    }

    fn degree(&self, k: &(Monomial, GenId)) -> Q {
        tilde_degree(&self.spec.alg, &k.0, k.1)
    }

    fn weight(&self, k: &(Monomial, GenId)) -> Q {
        tilde_weight(&self.spec.alg, &k.0)
    }

    fn boundary(&self, k: &(Monomial, GenId)) -> Vec<((Monomial, GenId), Q)> {
        let t = ModuleElement::basis(k.0.clone(), k.1);
        tilde_d(self.spec, &t)
            .terms()
            .map(|(key, c)| (key.clone(), c.clone()))
            .collect()
    }
}

pub fn tilde_homology(
    spec: &ComplexSpec,
    w: &Window,
    opts: HomologyOptions,
) -> Result<HomologyReport> {
    homology(&TildeComplex { spec }, w, opts)
}

/// Checks `d^2 = 0` on every marked generator `v~`, in the window.
pub fn check_tilde_d_squared(
    spec: &ComplexSpec,
    w: &Window,
) -> std::result::Result<(), AlphaFailure> {
    let alg = &spec.alg;
    for v in 0..alg.generators.len() {
        let t = ModuleElement::basis(Monomial::unit(alg.classes()), v);
        let r = tilde_d_window(spec, &tilde_d(spec, &t), w);
        if !r.is_zero() {
            return Err(AlphaFailure {
                sample: Monomial::generator(v, alg.classes()),
                residual: r,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Generator;
    use crate::novikov::{ClassBasis, ClassEntry};
    use crate::text::{parse_element, Origin};

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn s1() -> ComplexSpec {
        let alg = GradedAlgebra::new(
            ClassBasis::new(
                vec![ClassEntry {
                    name: "lam0".into(),
                    maslov: 2,
                    area: q(1),
                }],
                q(1),
            )
            .unwrap(),
            vec![Generator::new("m", 0), Generator::new("M", 1)],
        )
        .unwrap();
        let dm = parse_element(
            &alg,
            "(1 + M + M^2 + M^3 + M^4 + M^5 + M^6 + M^7 + M^8) * e[lam0]",
            Origin::start(),
        )
        .unwrap();
        ComplexSpec::new("s1", alg, vec![dm, Element::zero()]).unwrap()
    }

    fn window() -> Window {
        Window::new(q(8), 6, vec![(-2, 4)], (q(-6), q(6))).unwrap()
    }

    fn odd_pair() -> GradedAlgebra {
        GradedAlgebra::new(
            ClassBasis::empty(q(1)),
            vec![
                Generator::new("x", 2),
                Generator::new("y", 2),
                Generator::new("z", 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn alpha_of_unit_and_generator() {
        let alg = odd_pair();
        assert!(alpha(&alg, &alg.one()).is_zero());
        assert_eq!(show_tilde(&alg, &alpha(&alg, &alg.gen(0))), "x~");
    }

    #[test]
    fn alpha_of_odd_product() {
        let alg = odd_pair();
        let xy = parse_element(&alg, "x*y", Origin::start()).unwrap();
        let a = alpha(&alg, &xy);
        assert_eq!(show_tilde(&alg, &a), "x * y~ - y * x~");
        assert_eq!(alpha_recursive(&alg, &xy), a);
    }

    #[test]
    fn alpha_of_power() {
        let alg = odd_pair();
        let z3 = parse_element(&alg, "z^3", Origin::start()).unwrap();
        assert_eq!(show_tilde(&alg, &alpha(&alg, &z3)), "3 * z^2 * z~");
    }

    #[test]
    fn tilde_d_on_s1() {
        let s = s1();
        let classes = s.alg.classes();
        let top = ModuleElement::basis(Monomial::unit(classes), 1);
        assert!(tilde_d(&s, &top).is_zero());
        let bottom = ModuleElement::basis(Monomial::unit(classes), 0);
        let d = tilde_d_window(&s, &bottom, &window());
        assert_eq!(
            show_tilde(&s.alg, &d),
            "e[lam0] * M~ + 2 * M * e[lam0] * M~ + 3 * M^2 * e[lam0] * M~ + 4 * M^3 * e[lam0] * M~ \
             + 5 * M^4 * e[lam0] * M~"
        );
    }

    #[test]
    fn alpha_is_a_chain_map_on_s1() {
        let s = s1();
        let c = s.alg.classes();
        let samples = vec![
            Monomial::unit(c),
            Monomial::generator(0, c),
            Monomial::generator(1, c),
            Monomial::from_raw_unchecked(vec![(0, 1), (1, 2)], crate::NovikovExponent(vec![1])),
        ];
        assert_eq!(check_alpha_chain(&s, &window(), &samples), Ok(()));
        assert_eq!(check_tilde_d_squared(&s, &window()), Ok(()));
    }

    #[test]
    fn zero_differential_counts() {
        let spec = ComplexSpec::zero(
            "pq",
            ClassBasis::empty(q(1)),
            vec![Generator::new("p", 0), Generator::new("q", 1)],
        )
        .unwrap();
        let w = Window::new(q(3), 2, vec![], (q(-2), q(1))).unwrap();
        let r = tilde_homology(&spec, &w, HomologyOptions::default()).unwrap();
        // p~ (-1), q~ (0), p p~ (-2), q p~ (-1), p q~ (-1), q q~ (0)
        assert_eq!(r.degree(&q(-1)).unwrap().betti, 3);
        assert_eq!(r.degree(&q(0)).unwrap().betti, 2);
    }

    #[test]
    fn s1_tilde_is_acyclic() {
        let r = tilde_homology(&s1(), &window(), HomologyOptions::default()).unwrap();
        assert!(r.certified().count() >= 9);
        for d in r.certified() {
            assert_eq!(d.betti, 0, "degree {}", d.degree);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn alg() -> GradedAlgebra {
            GradedAlgebra::new(
                ClassBasis::new(
                    vec![ClassEntry {
                        name: "l".into(),
                        maslov: 2,
                        area: q(1),
                    }],
                    q(1),
                )
                .unwrap(),
                vec![
                    Generator::new("a", 0),
                    Generator::new("b", 1),
                    Generator::new("c", 2),
                    Generator::new("f", 3),
                ],
            )
            .unwrap()
        }

        proptest! {
            #[test]
            fn explicit_matches_recursive(word in proptest::collection::vec(0usize..4, 0..6), e in -2i64..3) {
                let alg = alg();
                if let Some((s, m)) = alg.normalize(&word, crate::NovikovExponent(vec![e])).unwrap() {
                    let el = Element::monomial(m, q(i64::from(s)));
                    prop_assert_eq!(alpha(&alg, &el), alpha_recursive(&alg, &el));
                }
            }
        }
    }
}
