//! Shared helpers: independent counting oracles, spec loading and binary runs.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use clusterhom::format::{parse_file, ComplexFile, SpecFile};
use clusterhom::{ClassBasis, ComplexSpec, Window, Q};
use num_traits::Zero;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn specs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

pub fn read_spec(name: &str) -> ComplexFile {
    let text = std::fs::read_to_string(specs_dir().join(name)).expect("spec file");
    match parse_file(&text).expect("parse") {
        SpecFile::Complex(c) => c,
        SpecFile::Fine(_) => panic!("{name} is a fine spec"),
    }
}

/// The complex specs shipped in `specs/`.
pub fn shipped_complexes() -> Vec<(String, ComplexFile)> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(specs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cx") {
            let text = std::fs::read_to_string(&path).unwrap();
            if let SpecFile::Complex(c) = parse_file(&text).unwrap() {
                out.push((path.file_name().unwrap().to_string_lossy().into_owned(), c));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    /// Values of the machine-readable block.
    pub fn report(&self) -> BTreeMap<String, String> {
        let mut parts = self.stdout.split("---report---");
        parts.next();
        let block = parts.next().unwrap_or("");
        block
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect()
    }
}

pub fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_clusterhom"))
        .args(args)
        .current_dir(specs_dir())
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// `counts[k][s]`: monomials of word length `k` whose generator degrees
/// sum to `s`. Odd generators appear at most once.
pub fn word_counts(degrees: &[i64], max_len: usize) -> Vec<BTreeMap<i64, u64>> {
    let mut counts = vec![BTreeMap::new(); max_len + 1];
    counts[0].insert(0, 1);
    for &d in degrees {
        let mut next = vec![BTreeMap::new(); max_len + 1];
        for k in 0..=max_len {
            for (&s, &c) in &counts[k] {
                let top = if d.rem_euclid(2) == 1 { 1 } else { max_len - k };
                for e in 0..=top.min(max_len - k) {
                    *next[k + e].entry(s + e as i64 * d).or_insert(0) += c;
                }
            }
        }
        counts = next;
    }
    counts
}

fn box_points(bx: &[(i64, i64)]) -> Vec<Vec<i64>> {
    bx.iter().fold(vec![vec![]], |acc, &(lo, hi)| {
        acc.iter()
            .flat_map(|p| {
                (lo..=hi).map(move |v| {
                    let mut p = p.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

/// Largest word length that fits below the cutoff somewhere in the box.
pub fn quotient_len(w: &Window, basis: &ClassBasis) -> usize {
    let min_omega = box_points(&w.exponent_box)
        .iter()
        .map(|p| omega(basis, p))
        .min()
        .unwrap_or_else(Q::zero);
    let two = q(2);
    let mut k = 0usize;
    while Q::from_integer((k as i64 + 1).into()) + &two * &min_omega / &basis.epsilon_d
        < w.weight_cutoff
    {
        k += 1;
    }
    k
}

fn omega(basis: &ClassBasis, p: &[i64]) -> Q {
    p.iter()
        .zip(&basis.entries)
        .map(|(&v, e)| &e.area * q(v))
        .fold(Q::zero(), |a, b| a + b)
}

fn mu(basis: &ClassBasis, p: &[i64]) -> i64 {
    p.iter()
        .zip(&basis.entries)
        .map(|(&v, e)| v * e.maslov)
        .sum()
}

/// Dimensions per `(weight, degree)` of the monomials in `degrees` (times
/// Novikov classes) lying in the filtration quotient of `w`. With a marker
/// of degree `marker`, each monomial carries one extra letter of that
/// degree, adding one to its length and weight.
pub fn window_counts(
    degrees: &[i64],
    basis: &ClassBasis,
    w: &Window,
    marker: Option<i64>,
) -> BTreeMap<(Q, Q), u64> {
    let len = quotient_len(w, basis);
    let extra = usize::from(marker.is_some());
    let counts = word_counts(degrees, len);
    let mut out = BTreeMap::new();
    for p in box_points(&w.exponent_box) {
        let shift = q(2) * omega(basis, &p) / &basis.epsilon_d;
        let m = mu(basis, &p);
        for (k, by_sum) in counts.iter().enumerate() {
            if k + extra > len {
                continue;
            }
            let weight = q((k + extra) as i64) + &shift;
            if weight >= w.weight_cutoff {
                continue;
            }
            for (&s, &c) in by_sum {
                let deg = q(s - m + marker.unwrap_or(0));
                if deg < w.degrees.0 || deg > w.degrees.1 {
                    continue;
                }
                *out.entry((weight.clone(), deg)).or_insert(0) += c;
            }
        }
    }
    out
}

pub fn by_degree(counts: &BTreeMap<(Q, Q), u64>) -> BTreeMap<Q, u64> {
    let mut out = BTreeMap::new();
    for ((_, d), c) in counts {
        *out.entry(d.clone()).or_insert(0) += c;
    }
    out
}

pub fn gen_degrees(spec: &ComplexSpec) -> Vec<i64> {
    spec.generators().iter().map(|g| g.index - 1).collect()
}
