//! Pages `E0` and `E1` of the spectral sequence of the weight filtration.
//!
//! `E0` is the associated graded of the truncated complex, with `d0` the
//! weight-preserving part of `d`. `E1` is its homology, computed blockwise
//! per (level, degree).

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::algebra::{GradedAlgebra, Monomial, Window};
use crate::error::Result;
use crate::format_rational;
use crate::homology::{HomologyOptions, WindowedComplex};
use crate::linalg::{integral, Echelon};
use crate::Q;

/// Weight of a monomial: the largest `k` with the monomial in `F^k`.
pub fn filtration_level(alg: &GradedAlgebra, m: &Monomial) -> Q {
    alg.weight(m)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageEntry {
    pub level: Q,
    pub degree: Q,
    pub dim: usize,
    /// Rank of `d0` out of this block.
    pub d0_rank: usize,
    pub interior: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageReport {
    pub page: u8,
    pub entries: Vec<PageEntry>,
}

impl PageReport {
    pub fn dim(&self, level: &Q, degree: &Q) -> usize {
        self.entries
            .iter()
            .find(|e| &e.level == level && &e.degree == degree)
            .map_or(0, |e| e.dim)
    }

    /// Total dimension in one degree, summed over levels.
    pub fn degree_total(&self, degree: &Q) -> usize {
        self.entries
            .iter()
            .filter(|e| &e.degree == degree)
            .map(|e| e.dim)
            .sum()
    }

    pub fn d_is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.d0_rank == 0)
    }

    pub fn key_values(&self, prefix: &str) -> Vec<(String, String)> {
        let p = format!("{prefix}E{}.", self.page);
        let mut out = vec![(format!("{p}d_zero"), self.d_is_zero().to_string())];
        for e in &self.entries {
            let k = format!(
                "{p}level.{}.degree.{}",
                format_rational(&e.level),
                format_rational(&e.degree)
            );
            out.push((format!("{k}.dim"), e.dim.to_string()));
            out.push((format!("{k}.d_rank"), e.d0_rank.to_string()));
        }
        out
    }

    pub fn table(&self) -> String {
        let mut s = format!(
            "E{}\n{:>7} {:>7} {:>6} {:>7}\n",
            self.page, "level", "degree", "dim", "d_rank"
        );
        for e in &self.entries {
            s.push_str(&format!(
                "{:>7} {:>7} {:>6} {:>7}{}\n",
                format_rational(&e.level),
                format_rational(&e.degree),
                e.dim,
                e.d0_rank,
                if e.interior { "" } else { "  edge" }
            ));
        }
        s
    }
}

/// `E0` and `E1` of the truncated complex. Only `d0` is computed; `E1` has
/// no differential recorded (`d_rank` 0).
pub fn pages<C: WindowedComplex>(
    c: &C,
    w: &Window,
    opts: HomologyOptions,
) -> Result<(PageReport, PageReport)> {
    let wq = w.filtration_quotient(c.basis());
    let keys = c.window_basis(&wq, opts.cap)?;
    let index: BTreeMap<&C::Key, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let levels: Vec<Q> = keys.iter().map(|k| c.weight(k)).collect();
    let degrees: Vec<Q> = keys.iter().map(|k| c.degree(k)).collect();
    let mut blocks: BTreeMap<(Q, Q), Vec<usize>> = BTreeMap::new();
    for i in 0..keys.len() {
        blocks
            .entry((levels[i].clone(), degrees[i].clone()))
            .or_default()
            .push(i);
    }
    // d0 rows in global indices
    let rows: Vec<Vec<(usize, Q)>> = keys
        .par_iter()
        .enumerate()
        .map(|(i, k)| {
            let mut r: Vec<(usize, Q)> = c
                .boundary(k)
                .into_iter()
                .filter_map(|(t, v)| index.get(&t).map(|&j| (j, v)))
                .filter(|(j, _)| levels[*j] == levels[i])
                .collect();
            r.sort_by_key(|(j, _)| *j);
            r
        })
        .collect();

    let one = Q::from_integer(1.into());
    let block_list: Vec<(&(Q, Q), &Vec<usize>)> = blocks.iter().collect();
    let ranks: Vec<usize> = block_list
        .par_iter()
        .map(|(_, members)| {
            let mut e = Echelon::new();
            for &i in members.iter() {
                e.insert(integral(&rows[i]));
            }
            e.rank()
        })
        .collect();
    let rank_out: BTreeMap<&(Q, Q), usize> =
        block_list.iter().map(|(k, _)| *k).zip(ranks).collect();

    let mut e0 = Vec::new();
    let mut e1 = Vec::new();
    for ((level, degree), members) in &blocks {
        let out = rank_out[&(level.clone(), degree.clone())];
        let inc = rank_out
            .get(&(level.clone(), degree + &one))
            .copied()
            .unwrap_or(0);
        let interior = w.degree_in_range(&(degree - &one)) && w.degree_in_range(&(degree + &one));
        e0.push(PageEntry {
            level: level.clone(),
            degree: degree.clone(),
            dim: members.len(),
            d0_rank: out,
            interior,
        });
        e1.push(PageEntry {
            level: level.clone(),
            degree: degree.clone(),
            dim: members.len() - out - inc,
            d0_rank: 0,
            interior,
        });
    }
    Ok((
        PageReport {
            page: 0,
            entries: e0,
        },
        PageReport {
            page: 1,
            entries: e1,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Element, Generator};
    use crate::complex::ComplexSpec;
    use crate::novikov::{ClassBasis, ClassEntry, NovikovExponent};
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

    #[test]
    fn levels() {
        let s = s1();
        let c = s.alg.classes();
        assert_eq!(filtration_level(&s.alg, &Monomial::unit(c)), q(0));
        let m = Monomial::from_raw_unchecked(vec![(1, 1)], NovikovExponent(vec![1]));
        assert_eq!(filtration_level(&s.alg, &m), q(3));
        let two = Monomial::from_raw_unchecked(vec![(0, 1), (1, 1)], NovikovExponent(vec![0]));
        assert_eq!(filtration_level(&s.alg, &two), q(2));
    }

    #[test]
    fn s1_has_zero_d0() {
        let w = Window::new(q(8), 6, vec![(-2, 4)], (q(-6), q(6))).unwrap();
        let (e0, e1) = pages(&s1(), &w, HomologyOptions::default()).unwrap();
        assert!(e0.d_is_zero());
        assert_eq!(e0.entries.len(), e1.entries.len());
        for (a, b) in e0.entries.iter().zip(&e1.entries) {
            assert_eq!(a.dim, b.dim);
        }
    }

    #[test]
    fn pair_is_killed_at_its_level() {
        let alg = GradedAlgebra::new(
            ClassBasis::empty(q(1)),
            vec![Generator::new("y", 1), Generator::new("x", 2)],
        )
        .unwrap();
        let s = ComplexSpec::new("pair", alg.clone(), vec![Element::zero(), alg.gen(0)]).unwrap();
        let w = Window::new(q(4), 3, vec![], (q(-3), q(6))).unwrap();
        let (e0, e1) = pages(&s, &w, HomologyOptions::default()).unwrap();
        // level 1: x (deg 1) and y (deg 0) cancel
        assert_eq!(e0.dim(&q(1), &q(1)), 1);
        assert_eq!(e1.dim(&q(1), &q(1)), 0);
        assert_eq!(e1.dim(&q(1), &q(0)), 0);
        // only the unit survives
        let total: usize = e1.entries.iter().map(|e| e.dim).sum();
        assert_eq!(total, 1);
    }
}
