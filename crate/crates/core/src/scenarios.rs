//! Built-in examples: the circle, Morse complexes without bubbling, and the
//! Maslov bookkeeping for `S^1 x S^{n-1}`.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::{Element, GenId, Generator, GradedAlgebra, Monomial, Window};
use crate::complex::ComplexSpec;
use crate::error::{Error, Result};
use crate::novikov::{ClassBasis, ClassEntry, NovikovExponent};
use crate::Q;

/// The window used throughout for the circle.
pub fn s1_window() -> Window {
    Window::new(
        Q::from_integer(8.into()),
        6,
        vec![(-2, 4)],
        (Q::from_integer((-6).into()), Q::from_integer(6.into())),
    )
    .expect("valid window")
}

/// The circle with `dm = (1 + M + ... + M^n) e^{lam0}` and `dM = 0`.
pub fn s1_spec(series_len: u32, area: Q) -> ComplexSpec {
    let basis = ClassBasis::new(
        vec![ClassEntry {
            name: "lam0".into(),
            maslov: 2,
            area,
        }],
        Q::one(),
    )
    .expect("valid basis");
    let alg = GradedAlgebra::new(basis, vec![Generator::new("m", 0), Generator::new("M", 1)])
        .expect("valid algebra");
    let lam = NovikovExponent(vec![1]);
    let dm: Element = (0..=series_len)
        .map(|k| {
            let powers = if k == 0 { vec![] } else { vec![(1, k)] };
            (Monomial::from_raw_unchecked(powers, lam.clone()), Q::one())
        })
        .collect();
    ComplexSpec::new("s1", alg, vec![dm, Element::zero()]).expect("valid spec")
}

/// The circle with the geometric series cut where the widened quotient
/// window stops seeing it, so every computation in `w` is exact.
pub fn example_s1(w: &Window, margin: u32) -> ComplexSpec {
    let probe = s1_spec(0, Q::one());
    let len = w
        .widened(margin)
        .filtration_quotient(probe.basis())
        .max_word_len;
    s1_spec(len, Q::one())
}

/// A Morse complex: generators with indices and `d0` as a matrix.
#[derive(Debug, Clone)]
pub struct MorsePattern {
    pub name: &'static str,
    pub generators: Vec<Generator>,
    /// `d0[g]` lists `(target, coefficient)`.
    pub d0: Vec<Vec<(GenId, Q)>>,
}

impl MorsePattern {
    /// Indices of a basis of Morse homology, by a rank count per index.
    pub fn homology_indices(&self) -> Vec<i64> {
        let n = self.generators.len();
        let mut out = Vec::new();
        let top = self.generators.iter().map(|g| g.index).max().unwrap_or(0);
        for i in 0..=top {
            let rows = |idx: i64| -> Vec<Vec<(usize, Q)>> {
                (0..n)
                    .filter(|&g| self.generators[g].index == idx)
                    .map(|g| self.d0[g].clone())
                    .collect()
            };
            let count = self.generators.iter().filter(|g| g.index == i).count();
            let out_rank = crate::linalg::rank(&rows(i));
            let in_rank = crate::linalg::rank(&rows(i + 1));
            out.extend(std::iter::repeat_n(i, count - out_rank - in_rank));
        }
        out
    }
}

pub fn circle_pattern() -> MorsePattern {
    MorsePattern {
        name: "circle",
        generators: vec![Generator::new("m", 0), Generator::new("M", 1)],
        d0: vec![vec![], vec![]],
    }
}

pub fn torus_pattern() -> MorsePattern {
    MorsePattern {
        name: "torus",
        generators: vec![
            Generator::new("m", 0),
            Generator::new("a", 1),
            Generator::new("b", 1),
            Generator::new("M", 2),
        ],
        d0: vec![vec![]; 4],
    }
}

/// The sphere with a cancelling pair `d0 c2 = c1`.
pub fn sphere_extra_pair_pattern() -> MorsePattern {
    MorsePattern {
        name: "sphere with extra pair",
        generators: vec![
            Generator::new("m", 0),
            Generator::new("c1", 1),
            Generator::new("c2", 2),
            Generator::new("M", 2),
        ],
        d0: vec![vec![], vec![], vec![(1, Q::one())], vec![]],
    }
}

/// The spec whose differential is exactly the Morse differential `d0`.
pub fn example_no_bubbling(
    label: &str,
    generators: Vec<Generator>,
    d0: &[Vec<(GenId, Q)>],
    basis: ClassBasis,
) -> Result<ComplexSpec> {
    let n = generators.len();
    if d0.len() != n {
        return Err(Error::Invalid(format!(
            "d0 has {} rows for {n} generators",
            d0.len()
        )));
    }
    for (g, row) in d0.iter().enumerate() {
        if let Some((t, _)) = row.iter().find(|(t, _)| *t >= n) {
            return Err(Error::Invalid(format!(
                "d0 of generator {g} refers to generator {t}"
            )));
        }
    }
    // d0 o d0 = 0
    for (g, row) in d0.iter().enumerate() {
        let mut sq = vec![Q::zero(); n];
        for (y, c) in row {
            for (z, c2) in &d0[*y] {
                sq[*z] += c * c2;
            }
        }
        if sq.iter().any(|c| !c.is_zero()) {
            return Err(Error::Invalid(format!(
                "d0 does not square to zero on {}",
                generators[g].name
            )));
        }
    }
    let classes = basis.len();
    let alg = GradedAlgebra::new(basis, generators)?;
    let diff = d0
        .iter()
        .map(|row| {
            row.iter()
                .map(|(t, c)| (Monomial::generator(*t, classes), c.clone()))
                .collect()
        })
        .collect();
    let spec = ComplexSpec::new(label, alg, diff)?;
    if let Some(v) = spec.validate().first() {
        return Err(Error::Invalid(v.to_string()));
    }
    Ok(spec)
}

/// One class with Maslov index 2 and area 1, the default for the examples.
pub fn single_class_basis() -> ClassBasis {
    ClassBasis::new(
        vec![ClassEntry {
            name: "lam0".into(),
            maslov: 2,
            area: Q::one(),
        }],
        Q::one(),
    )
    .expect("valid basis")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A leading term `d source = c * target * e^lam + ...` and the Maslov
/// index it forces through `|source| - |target| + mu = 1`. A free term has
/// no target (degree 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaslovStep {
    pub source: String,
    pub source_degree: i64,
    pub target: Option<String>,
    pub target_degree: i64,
    pub maslov: i64,
    pub note: String,
}

impl MaslovStep {
    fn new(
        source: &str,
        source_degree: i64,
        target: Option<&str>,
        target_degree: i64,
        note: &str,
    ) -> Self {
        MaslovStep {
            source: source.into(),
            source_degree,
            target: target.map(Into::into),
            target_degree,
            maslov: 1 - source_degree + target_degree,
            note: note.into(),
        }
    }

    /// Re-checks the degree equation.
    pub fn satisfies_degree_equation(&self) -> bool {
        self.source_degree - self.target_degree + self.maslov == 1
    }

    pub fn is_even(&self) -> bool {
        self.maslov.rem_euclid(2) == 0
    }
}

impl fmt::Display for MaslovStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let target = self.target.as_deref().unwrap_or("1");
        write!(
            f,
            "d {} = c {} e^lam + ...: {} - {} + mu = 1, mu = {}; {}",
            self.source, target, self.source_degree, self.target_degree, self.maslov, self.note
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaslovVerdict {
    pub n: i64,
    pub parity: Parity,
    /// `Im(mu)` meets this set.
    pub required_set: BTreeSet<i64>,
    /// Accepted steps; every Maslov index here is even.
    pub log: Vec<MaslovStep>,
    /// Candidates discarded, with the reason in the note.
    pub rejected: Vec<MaslovStep>,
}

/// Replays the degree bookkeeping for a perfect Morse function on
/// `S^1 x S^{n-1}` with critical points `m, a, b, M` of indices
/// `0, 1, n-1, n`, in the cluster complex and its tilde module.
pub fn maslov_scan(n: i64) -> Result<MaslovVerdict> {
    if n < 2 {
        return Err(Error::Invalid(format!("maslov-scan needs n >= 2, got {n}")));
    }
    let parity = if n % 2 == 0 {
        Parity::Even
    } else {
        Parity::Odd
    };
    let (m, a, b, top) = (-1, 0, n - 2, n - 1);
    let mut log = Vec::new();
    let mut rejected = Vec::new();
    let mut required = BTreeSet::new();
    let keep = |step: MaslovStep, log: &mut Vec<MaslovStep>, rejected: &mut Vec<MaslovStep>| {
        if step.is_even() {
            log.push(step);
            true
        } else {
            let mut s = step;
            s.note = format!("rejected: {} is odd", s.maslov);
            rejected.push(s);
            false
        }
    };

    // with free terms: d x = c e^lam + ..., x not the maximum
    for (name, deg) in [("m", m), ("a", a), ("b", b)] {
        let step = MaslovStep::new(name, deg, None, 0, "free term");
        let mu = step.maslov;
        if keep(step, &mut log, &mut rejected) {
            required.insert(mu);
        }
    }
    rejected.push(MaslovStep::new(
        "M",
        top,
        None,
        0,
        "rejected: no free term on the maximum",
    ));

    // without free terms: the tilde module is acyclic and d M~ = 0, so some
    // y~ has d y~ = c M~ e^lam + ...
    let mut through_m = None;
    for (name, deg) in [("b~", b), ("m~", m), ("a~", a), ("M~", top)] {
        let step = MaslovStep::new(name, deg, Some("M~"), top, "leading term onto M~");
        let mu = step.maslov;
        if !keep(step, &mut log, &mut rejected) {
            continue;
        }
        if parity == Parity::Odd && name == "m~" {
            // resolved below through the quotient module
            through_m = Some(mu);
        } else {
            required.insert(mu);
        }
    }

    if let Some(mu_m) = through_m {
        // q kills m~ and M~; the quotient on a~, b~ is acyclic, so
        // d' a~ hits b~ or d' b~ hits a~
        let onto_b = MaslovStep::new("a~", a, Some("b~"), b, "quotient module");
        let onto_a = MaslovStep::new("b~", b, Some("a~"), a, "quotient module");
        let diff = mu_m - onto_b.maslov;
        let mut s1 = onto_b;
        s1.note = format!("quotient module; with {mu_m} gives {diff} in Im(mu), hence 2");
        if keep(s1, &mut log, &mut rejected) {
            required.insert(2);
        }
        let mu_a = onto_a.maslov;
        if keep(onto_a, &mut log, &mut rejected) {
            required.insert(mu_a);
        }
    }

    Ok(MaslovVerdict {
        n,
        parity,
        required_set: required,
        log,
        rejected,
    })
}
