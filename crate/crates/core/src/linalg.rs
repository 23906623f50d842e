//! Exact sparse linear algebra.
//!
//! Vectors are scaled to primitive integer vectors and reduced fraction-free:
//! `v <- p_lead * v - v_lead * p`, then divided by the content. No rational
//! arithmetic happens inside the elimination loop.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Q;

/// Sorted, zero-free `(index, value)` pairs.
pub type SparseVec = Vec<(usize, BigInt)>;

/// Clears denominators of a rational sparse vector and makes it primitive.
pub fn integral(v: &[(usize, Q)]) -> SparseVec {
    let mut lcm = BigInt::one();
    for (_, q) in v {
        lcm = lcm.lcm(q.denom());
    }
    let mut out: SparseVec = v
        .iter()
        .filter(|(_, q)| !q.is_zero())
        .map(|(i, q)| (*i, q.numer() * (&lcm / q.denom())))
        .collect();
    out.sort_by_key(|(i, _)| *i);
    make_primitive(&mut out, &mut Vec::new());
    out
}

fn content(v: &SparseVec) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, (_, x)| g.gcd(x))
}

/// Divides `v` (and its tracking vector, jointly) by their common content.
fn make_primitive(v: &mut SparseVec, track: &mut SparseVec) {
    let g = content(v).gcd(&content(track));
    if g.is_zero() || g.is_one() {
        return;
    }
    for (_, x) in v.iter_mut().chain(track.iter_mut()) {
        *x = &*x / &g;
    }
}

/// `a * v - b * w`, dropping zeros.
fn combine(a: &BigInt, v: &SparseVec, b: &BigInt, w: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < w.len() {
        let (idx, val) = match (v.get(i), w.get(j)) {
            (Some((vi, vx)), Some((wi, wx))) if vi == wi => {
                i += 1;
                j += 1;
                (*vi, a * vx - b * wx)
            }
            (Some((vi, vx)), Some((wi, _))) if vi < wi => {
                i += 1;
                (*vi, a * vx)
            }
            (Some(_), Some((wi, wx))) | (None, Some((wi, wx))) => {
                j += 1;
                (*wi, -(b * wx))
            }
            (Some((vi, vx)), None) => {
                i += 1;
                (*vi, a * vx)
            }
            (None, None) => unreachable!(),
        };
        if !val.is_zero() {
            out.push((idx, val));
        }
    }
    out
}

/// Incremental row echelon form keyed by leading index, optionally tracking
/// the combination of inserted vectors that produced each row.
#[derive(Debug, Default, Clone)]
pub struct Echelon {
    rows: HashMap<usize, (SparseVec, SparseVec)>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` until its leading index has no pivot; returns the residual
    /// and the tracked combination.
    pub fn reduce(&self, mut v: SparseVec, mut track: SparseVec) -> (SparseVec, SparseVec) {
        while let Some((lead, lv)) = v.first().cloned() {
            let Some((row, row_track)) = self.rows.get(&lead) else {
                break;
            };
            let pl = &row[0].1;
            let g = pl.gcd(&lv);
            let (a, b) = (pl / &g, &lv / &g);
            v = combine(&a, &v, &b, row);
            track = combine(&a, &track, &b, row_track);
            make_primitive(&mut v, &mut track);
        }
        if let Some((_, lead)) = v.first() {
            if lead.is_negative() {
                for (_, x) in v.iter_mut().chain(track.iter_mut()) {
                    *x = -&*x;
                }
            }
        }
        (v, track)
    }

    /// Inserts `v`; returns `true` if it was independent of the rows so far.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        self.insert_tracked(v, Vec::new()).is_none()
    }

    /// Inserts `v` with a tracking vector. If `v` is dependent, returns the
    /// reduced tracking vector, i.e. a relation among the inserted vectors.
    pub fn insert_tracked(&mut self, v: SparseVec, track: SparseVec) -> Option<SparseVec> {
        let (r, t) = self.reduce(v, track);
        match r.first() {
            None => Some(t),
            Some((lead, _)) => {
                self.rows.insert(*lead, (r, t));
                None
            }
        }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone(), Vec::new()).0.is_empty()
    }
}

/// Rank of a list of rational sparse vectors.
pub fn rank(vectors: &[Vec<(usize, Q)>]) -> usize {
    let mut ech = Echelon::new();
    for v in vectors {
        ech.insert(integral(v));
    }
    ech.rank()
}

/// Basis of the kernel of the map sending the `j`-th source vector to
/// `columns[j]`, as integer combinations of source indices.
pub fn kernel(columns: &[SparseVec]) -> Vec<SparseVec> {
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for (j, c) in columns.iter().enumerate() {
        if let Some(rel) = ech.insert_tracked(c.clone(), vec![(j, BigInt::one())]) {
            out.push(rel);
        }
    }
    out
}

/// Dense rank of a small rational matrix by Bareiss elimination, used as an
/// independent check of the sparse routine.
pub fn bareiss_rank(rows: &[Vec<Q>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let lcm = r.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
            r.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
        })
        .collect();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            for c in col + 1..ncols {
                let v = (&m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Inverse of a square rational matrix by Gauss-Jordan, `None` if singular.
pub fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        let inv = Q::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot) {
                    *x -= p * &f;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}
