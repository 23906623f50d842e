//! Combinatorics of labeled metric trees: validation, isomorphism up to
//! reordering children, the expected dimension, enumeration of boundary
//! splittings with Koszul signs, and a re-derivation of `d^2` from them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::{Element, GenId, GradedAlgebra, Monomial, Window};
use crate::complex::{d_squared_of, ComplexSpec};
use crate::error::{Error, Result};
use crate::novikov::{ClassBasis, NovikovExponent};
use crate::text::show;
use crate::{format_rational, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VertexKind {
    Disk,
    Sphere,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeVertex {
    pub kind: VertexKind,
    pub class: NovikovExponent,
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeEdge {
    pub from: usize,
    pub to: usize,
    pub length: Q,
}

/// A rooted tree with edges oriented away from the root and markers
/// `0..=n` attached to vertices (`markers[i]` is the vertex of marker `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterTree {
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<TreeEdge>,
    pub markers: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeViolation {
    Empty,
    EdgeOutOfRange(usize),
    RootCount(usize),
    SeveralParents(usize),
    Unreachable(usize),
    MarkerOutOfRange(usize),
    RootMarker,
    RootNotDisk,
    DiskPartDisconnected(usize),
    NegativeLength(usize),
    SphereEdgeLength(usize),
    ClassLength(usize),
    ConstantWithClass(usize),
    Unstable { vertex: usize, special: usize },
    NoZeroChain(usize),
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::Empty => write!(f, "tree has no vertices"),
            TreeViolation::EdgeOutOfRange(e) => write!(f, "edge {e} refers to a missing vertex"),
            TreeViolation::RootCount(n) => {
                write!(f, "{n} vertices without an ingoing edge, expected 1")
            }
            TreeViolation::SeveralParents(v) => write!(f, "vertex {v} has several ingoing edges"),
            TreeViolation::Unreachable(v) => write!(f, "vertex {v} is not reachable from the root"),
            TreeViolation::MarkerOutOfRange(i) => {
                write!(f, "marker {i} refers to a missing vertex")
            }
            TreeViolation::RootMarker => write!(f, "marker 0 is not on the root"),
            TreeViolation::RootNotDisk => write!(f, "root is not a disk vertex"),
            TreeViolation::DiskPartDisconnected(v) => {
                write!(f, "disk vertex {v} hangs below a sphere vertex")
            }
            TreeViolation::NegativeLength(e) => write!(f, "edge {e} has negative length"),
            TreeViolation::SphereEdgeLength(e) => {
                write!(
                    f,
                    "edge {e} touches a sphere vertex but has positive length"
                )
            }
            TreeViolation::ClassLength(v) => {
                write!(f, "vertex {v} has a class of the wrong length")
            }
            TreeViolation::ConstantWithClass(v) => {
                write!(f, "constant vertex {v} carries a nonzero class")
            }
            TreeViolation::Unstable { vertex, special } => {
                write!(
                    f,
                    "constant vertex {vertex} has {special} special points, needs 3"
                )
            }
            TreeViolation::NoZeroChain(v) => {
                write!(
                    f,
                    "constant vertex {v} has no zero-length chain to a non-constant vertex"
                )
            }
        }
    }
}

impl ClusterTree {
    fn parents(&self) -> Vec<Vec<usize>> {
        let mut p = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if e.to < p.len() {
                p[e.to].push(i);
            }
        }
        p
    }

    /// The vertex without an ingoing edge, if unique.
    pub fn root(&self) -> Option<usize> {
        let p = self.parents();
        let roots: Vec<usize> = (0..self.vertices.len())
            .filter(|&v| p[v].is_empty())
            .collect();
        (roots.len() == 1).then(|| roots[0])
    }

    fn children(&self, v: usize) -> impl Iterator<Item = &TreeEdge> {
        self.edges.iter().filter(move |e| e.from == v)
    }

    /// Markers plus incident edges.
    pub fn special_points(&self, v: usize) -> usize {
        self.markers.iter().filter(|&&m| m == v).count()
            + self
                .edges
                .iter()
                .filter(|e| e.from == v || e.to == v)
                .count()
    }

    /// Canonical string of the subtree at `v`, independent of child order.
    fn canonical_at(&self, v: usize) -> String {
        let vx = &self.vertices[v];
        let markers: Vec<String> = self
            .markers
            .iter()
            .enumerate()
            .filter(|(_, &m)| m == v)
            .map(|(i, _)| i.to_string())
            .collect();
        let mut kids: Vec<String> = self
            .children(v)
            .map(|e| format!("{}:{}", format_rational(&e.length), self.canonical_at(e.to)))
            .collect();
        kids.sort();
        format!(
            "({:?},{},{:?},[{}],{{{}}})",
            vx.kind,
            vx.constant,
            vx.class.0,
            markers.join(","),
            kids.join(",")
        )
    }

    /// Canonical form for isomorphism of non-planar trees; `None` if the tree
    /// has no unique root or contains a cycle reachable from it.
    pub fn canonical_form(&self) -> Option<String> {
        if !validate_tree(self).iter().all(|v| {
            !matches!(
                v,
                TreeViolation::Empty
                    | TreeViolation::EdgeOutOfRange(_)
                    | TreeViolation::RootCount(_)
                    | TreeViolation::SeveralParents(_)
                    | TreeViolation::Unreachable(_)
            )
        }) {
            return None;
        }
        Some(self.canonical_at(self.root()?))
    }

    pub fn is_isomorphic(&self, other: &ClusterTree) -> bool {
        match (self.canonical_form(), other.canonical_form()) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }
}

/// Structural and stability checks; an empty list means the tree is valid.
pub fn validate_tree(t: &ClusterTree) -> Vec<TreeViolation> {
    let n = t.vertices.len();
    let mut out = Vec::new();
    if n == 0 {
        out.push(TreeViolation::Empty);
        return out;
    }
    let mut edges_ok = true;
    for (i, e) in t.edges.iter().enumerate() {
        if e.from >= n || e.to >= n {
            out.push(TreeViolation::EdgeOutOfRange(i));
            edges_ok = false;
        }
    }
    if !edges_ok {
        return out;
    }
    let parents = t.parents();
    let roots: Vec<usize> = (0..n).filter(|&v| parents[v].is_empty()).collect();
    if roots.len() != 1 {
        out.push(TreeViolation::RootCount(roots.len()));
    }
    for (v, p) in parents.iter().enumerate() {
        if p.len() > 1 {
            out.push(TreeViolation::SeveralParents(v));
        }
    }
    let root = roots.first().copied();
    if let Some(r) = root {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([r]);
        seen[r] = true;
        while let Some(v) = queue.pop_front() {
            for e in t.children(v) {
                if !seen[e.to] {
                    seen[e.to] = true;
                    queue.push_back(e.to);
                }
            }
        }
        out.extend((0..n).filter(|&v| !seen[v]).map(TreeViolation::Unreachable));
    }

    for (i, &m) in t.markers.iter().enumerate() {
        if m >= n {
            out.push(TreeViolation::MarkerOutOfRange(i));
        }
    }
    if let Some(r) = root {
        if t.markers.first() != Some(&r) {
            out.push(TreeViolation::RootMarker);
        }
        if t.vertices[r].kind != VertexKind::Disk {
            out.push(TreeViolation::RootNotDisk);
        }
    }
    // the disk vertices span a subtree containing the root
    for e in &t.edges {
        if t.vertices[e.to].kind == VertexKind::Disk
            && t.vertices[e.from].kind == VertexKind::Sphere
        {
            out.push(TreeViolation::DiskPartDisconnected(e.to));
        }
    }
    for (i, e) in t.edges.iter().enumerate() {
        if e.length.is_negative() {
            out.push(TreeViolation::NegativeLength(i));
        }
        let touches_sphere = t.vertices[e.from].kind == VertexKind::Sphere
            || t.vertices[e.to].kind == VertexKind::Sphere;
        if touches_sphere && !e.length.is_zero() {
            out.push(TreeViolation::SphereEdgeLength(i));
        }
    }
    let classes = t.vertices[0].class.len();
    for (v, vx) in t.vertices.iter().enumerate() {
        if vx.class.len() != classes {
            out.push(TreeViolation::ClassLength(v));
        }
        if !vx.constant {
            continue;
        }
        if !vx.class.is_zero() {
            out.push(TreeViolation::ConstantWithClass(v));
        }
        let special = t.special_points(v);
        if special < 3 {
            out.push(TreeViolation::Unstable { vertex: v, special });
        }
        if !zero_chain_to_nonconstant(t, v) {
            out.push(TreeViolation::NoZeroChain(v));
        }
    }
    out
}

fn zero_chain_to_nonconstant(t: &ClusterTree, start: usize) -> bool {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        if !t.vertices[v].constant {
            return true;
        }
        for e in t.edges.iter().filter(|e| e.length.is_zero()) {
            let next = if e.from == v {
                e.to
            } else if e.to == v {
                e.from
            } else {
                continue;
            };
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionMode {
    /// `|x| - sum |x_i| + mu(lambda) - 1`.
    Cluster,
    /// `|a| - sum |ends| - 1`, the first end being the outgoing point `b`.
    Fine,
}

/// Expected dimension of the moduli space with the given input and ends.
pub fn expected_dimension(
    mode: DimensionMode,
    source_degree: &Q,
    end_degrees: &[Q],
    lambda: &NovikovExponent,
    basis: &ClassBasis,
) -> Result<i64> {
    let ends = end_degrees.iter().fold(Q::zero(), |a, d| a + d);
    let mut dim = source_degree - ends - Q::one();
    if mode == DimensionMode::Cluster {
        dim += Q::from_integer(basis.maslov_area(lambda)?.0.into());
    }
    if !dim.is_integer() {
        return Err(Error::DegreeMismatch(format!(
            "dimension {} is not an integer",
            format_rational(&dim)
        )));
    }
    dim.to_integer()
        .try_into()
        .map_err(|_| Error::Invalid("dimension overflow".into()))
}

/// Sign of sorting a factor list into normal order: `-1` to the number of
/// transposed pairs of odd factors.
pub fn koszul_sign(alg: &GradedAlgebra, list: &[GenId]) -> i32 {
    let mut sign = 1;
    for i in 0..list.len() {
        for j in i + 1..list.len() {
            if list[i] > list[j] && alg.is_odd(list[i]) && alg.is_odd(list[j]) {
                sign = -sign;
            }
        }
    }
    sign
}

/// One way for a moduli space with ends `S` and class `lambda` to break
/// at an interior joint `y`: the upper part has ends `S' + {y}` and class
/// `lam_left`, the lower part ends `S''` and class `lam_right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    /// Positions in `S` of the ends kept in the upper part.
    pub left: Vec<usize>,
    pub joint: GenId,
    /// Positions in `S` of the ends moved to the lower part.
    pub right: Vec<usize>,
    pub lam_left: NovikovExponent,
    pub lam_right: NovikovExponent,
    /// `eps({y}, <S', y>) * eps(S'', S)`.
    pub sign: i32,
}

/// All exponents `l` in the box with `lambda - l` in the box.
fn class_splittings(
    lambda: &NovikovExponent,
    bx: &[(i64, i64)],
) -> Vec<(NovikovExponent, NovikovExponent)> {
    let mut out = vec![(Vec::new(), Vec::new())];
    for (i, &(lo, hi)) in bx.iter().enumerate() {
        let total = lambda.0[i];
        let mut next = Vec::new();
        for (l, r) in &out {
            for v in lo..=hi {
                let rest = total - v;
                if lo <= rest && rest <= hi {
                    let (mut l2, mut r2): (Vec<i64>, Vec<i64>) = (l.clone(), r.clone());
                    l2.push(v);
                    r2.push(rest);
                    next.push((l2, r2));
                }
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|(l, r)| (NovikovExponent(l), NovikovExponent(r)))
        .collect()
}

/// Every splitting of the ends `S` (a sorted factor list) over all joints
/// and class decompositions inside the box.
pub fn boundary_splittings(
    alg: &GradedAlgebra,
    ends: &[GenId],
    lambda: &NovikovExponent,
    bx: &[(i64, i64)],
) -> Vec<Splitting> {
    let k = ends.len();
    let classes = class_splittings(lambda, bx);
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << k) {
        let left: Vec<usize> = (0..k).filter(|i| mask & (1 << i) == 0).collect();
        let right: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        // eps(S'', S): sign of the shuffle S' S'' -> S
        let mut shuffle = 1;
        for &r in &right {
            for &l in &left {
                if l > r && alg.is_odd(ends[l]) && alg.is_odd(ends[r]) {
                    shuffle = -shuffle;
                }
            }
        }
        for y in 0..alg.generators.len() {
            let mut upper: Vec<GenId> = left.iter().map(|&i| ends[i]).collect();
            upper.push(y);
            let sign = koszul_sign(alg, &upper) * shuffle;
            for (l, r) in &classes {
                out.push(Splitting {
                    left: left.clone(),
                    joint: y,
                    right: right.clone(),
                    lam_left: l.clone(),
                    lam_right: r.clone(),
                    sign,
                });
            }
        }
    }
    out
}

/// How the Leibniz sign enters the pairing of splittings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignRule {
    /// `(-1)^{|S'|}` for moving `d` past the upper ends.
    Koszul,
    /// The Leibniz sign dropped: a deliberately wrong table.
    Flipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingMismatch {
    pub generator: String,
    pub monomial: String,
    pub from_splittings: Q,
    pub from_complex: Q,
}

impl fmt::Display for SplittingMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d^2 {} at {}: splittings give {}, the complex gives {}",
            self.generator,
            self.monomial,
            format_rational(&self.from_splittings),
            format_rational(&self.from_complex)
        )
    }
}

/// Smallest box containing every class exponent that appears in `d`.
fn data_box(spec: &ComplexSpec) -> Vec<(i64, i64)> {
    let n = spec.alg.classes();
    let mut bx = vec![(0i64, 0i64); n];
    for dx in &spec.diff {
        for (m, _) in dx.terms() {
            for (b, &c) in bx.iter_mut().zip(&m.exponent().0) {
                b.0 = b.0.min(c);
                b.1 = b.1.max(c);
            }
        }
    }
    bx
}

/// The coefficient of `d^2 x` at `target`, assembled from splittings.
fn pair_through_splittings(
    spec: &ComplexSpec,
    x: GenId,
    target: &Monomial,
    bx: &[(i64, i64)],
    rule: SignRule,
) -> Q {
    let alg = &spec.alg;
    let ends = target.factors();
    let mut seen = BTreeSet::new();
    let mut total = Q::zero();
    for sp in boundary_splittings(alg, &ends, target.exponent(), bx) {
        let upper: Vec<GenId> = sp.left.iter().map(|&i| ends[i]).collect();
        let lower: Vec<GenId> = sp.right.iter().map(|&i| ends[i]).collect();
        // identical multisets of ends are one splitting
        if !seen.insert((upper.clone(), sp.joint, lower.clone(), sp.lam_left.clone())) {
            continue;
        }
        let mut word = upper.clone();
        word.push(sp.joint);
        let Ok(Some((_, upper_m))) = alg.normalize(&word, sp.lam_left.clone()) else {
            continue;
        };
        let a_x = spec.diff[x].coefficient(&upper_m);
        if a_x.is_zero() {
            continue;
        }
        let Ok(Some((_, lower_m))) = alg.normalize(&lower, sp.lam_right.clone()) else {
            continue;
        };
        let a_y = spec.diff[sp.joint].coefficient(&lower_m);
        if a_y.is_zero() {
            continue;
        }
        let mut c = a_x * a_y * Q::from_integer((upper_m.power_of(sp.joint)).into());
        let upper_deg: i64 = upper.iter().map(|&g| alg.gen_degree(g)).sum();
        let leibniz_odd = rule == SignRule::Koszul && upper_deg.rem_euclid(2) == 1;
        if (sp.sign < 0) != leibniz_odd {
            c = -c;
        }
        total += c;
    }
    total
}

/// Re-derives `d^2 x` for every generator by pairing the coefficients of
/// `d x` and `d y` through the boundary splittings, and compares with `d^2`
/// computed by the Leibniz rule, on the window.
pub fn d_squared_consistency(
    spec: &ComplexSpec,
    w: &Window,
    rule: SignRule,
) -> std::result::Result<(), Box<SplittingMismatch>> {
    let alg = &spec.alg;
    let bx = data_box(spec);
    for (x, dx) in spec.diff.iter().enumerate() {
        let residual = d_squared_of(spec, dx, w);
        // candidate targets: every term reachable through one joint
        let mut targets: BTreeSet<Monomial> = residual.terms().map(|(m, _)| m.clone()).collect();
        for (n, _) in dx.terms() {
            for &(y, _) in n.powers() {
                let rest = n.without_one(y);
                for (t, _) in spec.diff[y].terms() {
                    if let Some((_, full)) = alg.mul_monomials(&rest, t) {
                        if alg.in_window(&full, w) {
                            targets.insert(full);
                        }
                    }
                }
            }
        }
        for t in targets {
            let from_splittings = pair_through_splittings(spec, x, &t, &bx, rule);
            let from_complex = residual.coefficient(&t);
            if from_splittings != from_complex {
                return Err(Box::new(SplittingMismatch {
                    generator: alg.generators[x].name.clone(),
                    monomial: show(alg, &Element::monomial(t, Q::one())),
                    from_splittings,
                    from_complex,
                }));
            }
        }
    }
    Ok(())
}

/// Brute-force count of splittings: ordered 2-partitions times joints
/// times class splittings.
pub fn splitting_count(
    k: usize,
    generators: usize,
    lambda: &NovikovExponent,
    bx: &[(i64, i64)],
) -> usize {
    (1usize << k) * generators * class_splittings(lambda, bx).len()
}

/// Summary used by the CLI.
pub fn splitting_table(
    alg: &GradedAlgebra,
    ends: &[GenId],
    lambda: &NovikovExponent,
    bx: &[(i64, i64)],
) -> Vec<String> {
    let name = |g: GenId| alg.generators[g].name.clone();
    boundary_splittings(alg, ends, lambda, bx)
        .iter()
        .map(|sp| {
            let l: Vec<String> = sp.left.iter().map(|&i| name(ends[i])).collect();
            let r: Vec<String> = sp.right.iter().map(|&i| name(ends[i])).collect();
            format!(
                "{} [{}] | {} | [{}] {} sign={}",
                if sp.sign < 0 { "-" } else { "+" },
                l.join(","),
                name(sp.joint),
                r.join(","),
                BTreeMap::from([
                    ("left", sp.lam_left.0.clone()),
                    ("right", sp.lam_right.0.clone())
                ])
                .iter()
                .map(|(k, v)| format!("{k}={v:?}"))
                .collect::<Vec<_>>()
                .join(" "),
                sp.sign
            )
        })
        .collect()
}
