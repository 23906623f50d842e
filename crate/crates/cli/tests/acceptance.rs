//! The acceptance suite: one line per criterion, all must pass.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use clusterhom::algebra::AlgebraMap;
use clusterhom::certificates::{acyclicity_certificate, find_free_terms};
use clusterhom::complex::{check_chain_map, preserves_filtration, ChainMap};
use clusterhom::fine::fine_homology;
use clusterhom::format::{parse_file, parse_tree, print_file, print_tree, SpecFile};
use clusterhom::homology::{homology, HomologyOptions, HomologyReport};
use clusterhom::minimal::minimal_model;
use clusterhom::module::ModuleElement;
use clusterhom::scenarios::{
    circle_pattern, example_no_bubbling, example_s1, maslov_scan, s1_window, single_class_basis,
    sphere_extra_pair_pattern, torus_pattern,
};
use clusterhom::spectral::{filtration_level, pages};
use clusterhom::text::show;
use clusterhom::tilde::{alpha, alpha_recursive, tilde_d, tilde_homology};
use clusterhom::trees::{
    boundary_splittings, d_squared_consistency, expected_dimension, DimensionMode, SignRule,
};
use clusterhom::{ComplexSpec, Element, GradedAlgebra, Monomial, NovikovExponent, Window, Q};
use common::*;
use num_traits::One;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn opts() -> HomologyOptions {
    HomologyOptions::default()
}

fn all_certified_zero(r: &HomologyReport) -> Outcome {
    let n = r.certified().count();
    ensure!(n > 0, "no certified degree");
    for d in r.certified() {
        ensure!(d.betti == 0, "betti {} in degree {}", d.betti, d.degree);
    }
    Ok(())
}

fn s1_pipeline() -> Outcome {
    let start = Instant::now();
    let w = s1_window();
    let spec = example_s1(&w, 2);
    ensure!(
        spec.validate().is_empty(),
        "validation: {:?}",
        spec.validate()
    );
    ensure!(spec.check_d_squared(&w).is_ok(), "d^2 != 0");
    let free = find_free_terms(&spec);
    let lam0 = NovikovExponent(vec![1]);
    ensure!(
        free.witnesses
            .iter()
            .any(|t| t.name == "m" && t.exponent == lam0 && t.coefficient.is_one()),
        "free term (m, lam0, 1) missing"
    );
    let cert = acyclicity_certificate(&spec, &w, 2).map_err(|e| e.to_string())?;
    ensure!(
        show(&spec.alg, &cert.tau) == "m * e[-lam0]",
        "tau = {}",
        show(&spec.alg, &cert.tau)
    );
    let one_minus_m = spec.alg.one().sub(&spec.alg.gen(1));
    ensure!(cert.c == one_minus_m, "c = {}", show(&spec.alg, &cert.c));
    ensure!(cert.verified(), "certificate not verified");
    all_certified_zero(&homology(&spec, &w, opts()).map_err(|e| e.to_string())?)?;
    let lib_time = start.elapsed();

    let start = Instant::now();
    let r = run(&["example", "s1"]);
    let cli_time = start.elapsed();
    let kv = r.report();
    ensure!(r.code == 0, "exit {}: {}", r.code, r.stderr);
    for (k, v) in [
        ("validate", "true"),
        ("d2", "zero"),
        ("free_term.0", "(m, lam0, 1)"),
        ("certificate.tau", "m * e[-lam0]"),
        ("certificate.c", "1 - M"),
        ("certificate.verified", "true"),
        ("certified_all_zero", "true"),
        ("status", "ok"),
    ] {
        ensure!(
            kv.get(k).map(String::as_str) == Some(v),
            "{k} = {:?}",
            kv.get(k)
        );
    }
    let limit = Duration::from_secs(5);
    ensure!(
        lib_time < limit && cli_time < limit,
        "took {lib_time:?} / {cli_time:?}"
    );
    Ok(())
}

fn no_bubbling() -> Outcome {
    let w = s1_window();
    let cases = [
        (circle_pattern(), vec![-1, 0]),
        (torus_pattern(), vec![-1, 0, 0, 1]),
        (sphere_extra_pair_pattern(), vec![-1, 1]),
    ];
    for (p, h_degrees) in cases {
        let spec = example_no_bubbling(p.name, p.generators.clone(), &p.d0, single_class_basis())
            .map_err(|e| e.to_string())?;
        let report = homology(&spec, &w, opts()).map_err(|e| e.to_string())?;
        let expected = by_degree(&window_counts(&h_degrees, spec.basis(), &w, None));
        ensure!(
            report.certified().count() > 0,
            "{}: nothing certified",
            p.name
        );
        for d in report.certified() {
            let want = expected.get(&d.degree).copied().unwrap_or(0);
            ensure!(
                d.betti as u64 == want,
                "{} degree {}: betti {} vs count {want}",
                p.name,
                d.degree,
                d.betti
            );
        }
    }
    Ok(())
}

/// Builds a normal-form monomial from raw exponents, `None` if it vanishes.
fn monomial(alg: &GradedAlgebra, exps: &[u32], lam: &[i64]) -> Option<Monomial> {
    let mut word = Vec::new();
    for (g, &raw) in exps.iter().enumerate().take(alg.generators.len()) {
        let e = if alg.is_odd(g) { raw % 2 } else { raw };
        word.extend(std::iter::repeat_n(g, e as usize));
    }
    let lam = NovikovExponent(lam[..alg.classes()].to_vec());
    alg.normalize(&word, lam).unwrap().map(|(_, m)| m)
}

#[derive(Debug, Clone)]
struct Raw {
    exps: Vec<u32>,
    lam: Vec<i64>,
    coeff: i64,
}

fn raw() -> impl Strategy<Value = Raw> {
    (
        proptest::collection::vec(0u32..3, 4),
        proptest::collection::vec(-1i64..3, 1),
        -3i64..4,
    )
        .prop_map(|(exps, lam, coeff)| Raw { exps, lam, coeff })
}

fn element(alg: &GradedAlgebra, parts: &[Raw]) -> Element {
    let mut e = Element::zero();
    for r in parts {
        if let Some(m) = monomial(alg, &r.exps, &r.lam) {
            e.add_term(m, q(r.coeff));
        }
    }
    e
}

fn sign(odd: bool) -> Q {
    if odd {
        -Q::one()
    } else {
        Q::one()
    }
}

fn property_specs() -> Vec<(String, ComplexSpec, Window)> {
    shipped_complexes()
        .into_iter()
        .map(|(name, f)| {
            let w = f.window.clone().expect("shipped specs carry a window");
            (name, f.spec, w)
        })
        .collect()
}

fn run_property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Outcome {
    let config = Config {
        failure_persistence: None,
        ..Config::with_cases(1000)
    };
    let mut runner = TestRunner::new(config);
    runner
        .run(&strategy, test)
        .map_err(|e| format!("{name}: {e}"))
}

fn properties() -> Outcome {
    let specs = property_specs();
    let n = specs.len();
    let pick = 0..n;

    run_property(
        "koszul commutativity",
        (pick.clone(), raw(), raw()),
        |(i, a, b)| {
            let alg = &specs[i].1.alg;
            let (Some(ma), Some(mb)) = (
                monomial(alg, &a.exps, &a.lam),
                monomial(alg, &b.exps, &b.lam),
            ) else {
                return Ok(());
            };
            let (da, db) = (alg.degree(&ma), alg.degree(&mb));
            let ea = Element::monomial(ma, Q::one());
            let eb = Element::monomial(mb, Q::one());
            let ab = alg.mul_exact(&ea, &eb);
            let ba = alg
                .mul_exact(&eb, &ea)
                .scale(&sign((da * db).rem_euclid(2) == 1));
            prop_assert_eq!(ab, ba);
            Ok(())
        },
    )?;

    run_property(
        "associativity",
        (
            pick.clone(),
            proptest::collection::vec(raw(), 1..3),
            proptest::collection::vec(raw(), 1..3),
            proptest::collection::vec(raw(), 1..3),
        ),
        |(i, a, b, c)| {
            let alg = &specs[i].1.alg;
            let (a, b, c) = (element(alg, &a), element(alg, &b), element(alg, &c));
            let left = alg.mul_exact(&alg.mul_exact(&a, &b), &c);
            let right = alg.mul_exact(&a, &alg.mul_exact(&b, &c));
            prop_assert_eq!(left, right);
            Ok(())
        },
    )?;

    run_property("leibniz", (pick.clone(), raw(), raw()), |(i, a, b)| {
        let spec = &specs[i].1;
        let alg = &spec.alg;
        let (Some(ma), Some(mb)) = (
            monomial(alg, &a.exps, &a.lam),
            monomial(alg, &b.exps, &b.lam),
        ) else {
            return Ok(());
        };
        let odd = alg.degree(&ma).rem_euclid(2) == 1;
        let ea = Element::monomial(ma, Q::one());
        let eb = Element::monomial(mb, Q::one());
        let lhs = spec.apply_d(&alg.mul_exact(&ea, &eb));
        let rhs = alg
            .mul_exact(&spec.apply_d(&ea), &eb)
            .add_scale(&sign(odd), &alg.mul_exact(&ea, &spec.apply_d(&eb)));
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })?;

    run_property("d squared", (pick.clone(), raw()), |(i, a)| {
        let spec = &specs[i].1;
        let Some(m) = monomial(&spec.alg, &a.exps, &a.lam) else {
            return Ok(());
        };
        let dd = spec.apply_d(&spec.apply_d(&Element::monomial(m.clone(), Q::one())));
        prop_assert!(
            dd.is_zero(),
            "{}: d^2 {} = {}",
            specs[i].0,
            show(&spec.alg, &Element::monomial(m, Q::one())),
            show(&spec.alg, &dd)
        );
        Ok(())
    })?;

    run_property("alpha commutes with d", (pick.clone(), raw()), |(i, a)| {
        let spec = &specs[i].1;
        let alg = &spec.alg;
        let Some(m) = monomial(alg, &a.exps, &a.lam) else {
            return Ok(());
        };
        let lhs = alpha(alg, &spec.d_monomial(&m));
        let rhs = tilde_d(spec, &alpha(alg, &Element::monomial(m, Q::one())));
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })?;

    run_property(
        "explicit alpha = recursive alpha",
        (pick.clone(), proptest::collection::vec(raw(), 1..4)),
        |(i, parts)| {
            let alg = &specs[i].1.alg;
            let e = element(alg, &parts);
            prop_assert_eq!(alpha(alg, &e), alpha_recursive(alg, &e));
            Ok(())
        },
    )?;

    run_property("filtration monotonicity", (pick, raw()), |(i, a)| {
        let spec = &specs[i].1;
        let alg = &spec.alg;
        let Some(m) = monomial(alg, &a.exps, &a.lam) else {
            return Ok(());
        };
        let level = filtration_level(alg, &m);
        for (t, _) in spec.d_monomial(&m).terms() {
            prop_assert!(filtration_level(alg, t) >= level);
        }
        Ok(())
    })?;
    Ok(())
}

fn same_certified(a: &HomologyReport, b: &HomologyReport) -> Outcome {
    for d in a.certified() {
        let other = b
            .degree(&d.degree)
            .ok_or_else(|| format!("degree {} missing", d.degree))?;
        ensure!(
            other.certified,
            "degree {} not certified after reduction",
            d.degree
        );
        ensure!(
            d.betti == other.betti,
            "degree {}: {} vs {}",
            d.degree,
            d.betti,
            other.betti
        );
    }
    Ok(())
}

fn minimal_model_criterion() -> Outcome {
    let f = read_spec("sphere_pair.cx");
    let w = f.window.clone().unwrap();
    let (min, trace) = minimal_model(&f.spec, &w, 2).map_err(|e| e.to_string())?;
    let names: BTreeSet<&str> = min.generators().iter().map(|g| g.name.as_str()).collect();
    ensure!(names == BTreeSet::from(["m", "M"]), "generators {names:?}");
    ensure!(!min.has_d0(), "d0 of the model is nonzero");
    let phi = ChainMap::Algebra {
        map: trace.projection.clone(),
        shift: 0,
    };
    let check = check_chain_map(&phi, &f.spec, &min, &w, 200_000).map_err(|e| e.to_string())?;
    ensure!(check.is_ok(), "projection is not a chain map: {:?}", check);
    let before = homology(&f.spec, &w, opts()).map_err(|e| e.to_string())?;
    let after = homology(&min, &w, opts()).map_err(|e| e.to_string())?;
    same_certified(&before, &after)?;
    same_certified(&after, &before)
}

fn fine_criterion() -> Outcome {
    let fine =
        |name: &str| match parse_file(&std::fs::read_to_string(specs_dir().join(name)).unwrap()) {
            Ok(SpecFile::Fine(f)) => f,
            other => panic!("{name}: {other:?}"),
        };
    let good = fine("circle_line.cx");
    let w = good.window.clone().unwrap();
    ensure!(good.spec.check_df_squared(&w).is_ok(), "d_F^2 != 0");
    all_certified_zero(&fine_homology(&good.spec, &w, opts()).map_err(|e| e.to_string())?)?;

    let bad = fine("circle_line_flipped.cx");
    let w = bad.window.clone().unwrap();
    let failure = bad
        .spec
        .check_df_squared(&w)
        .err()
        .ok_or("flipped variant passed")?;
    let a = bad.spec.intersection_id("a").map_err(|e| e.to_string())?;
    let dm = &bad.spec.ring.diff[0];
    let expected = bad
        .spec
        .truncate(&ModuleElement::from_ring(dm, a).scale(&q(2)), &w);
    ensure!(
        failure.intersection == "a",
        "failure at {}",
        failure.intersection
    );
    ensure!(
        failure.residual == expected,
        "residual {} vs 2(dm)a = {}",
        bad.spec.show(&failure.residual),
        bad.spec.show(&expected)
    );
    Ok(())
}

fn tilde_criterion() -> Outcome {
    let w = s1_window();
    let spec = example_s1(&w, 2);
    all_certified_zero(&tilde_homology(&spec, &w, opts()).map_err(|e| e.to_string())?)?;

    let f = read_spec("torus.cx");
    let w = f.window.clone().unwrap();
    ensure!(
        f.spec.diff.iter().all(Element::is_zero),
        "torus.cx has d != 0"
    );
    let degs = gen_degrees(&f.spec);
    let mut expected = std::collections::BTreeMap::new();
    for &v in &degs {
        for (d, c) in by_degree(&window_counts(&degs, f.spec.basis(), &w, Some(v))) {
            *expected.entry(d).or_insert(0u64) += c;
        }
    }
    let report = tilde_homology(&f.spec, &w, opts()).map_err(|e| e.to_string())?;
    for d in &report.degrees {
        let want = expected.get(&d.degree).copied().unwrap_or(0);
        ensure!(
            d.dim as u64 == want,
            "degree {}: dim {} vs count {want}",
            d.degree,
            d.dim
        );
        if d.certified {
            ensure!(
                d.betti as u64 == want,
                "degree {}: betti {} vs {want}",
                d.degree,
                d.betti
            );
        }
    }
    ensure!(report.certified().count() > 0, "nothing certified");
    Ok(())
}

fn spectral_criterion() -> Outcome {
    let w = s1_window();
    let s1 = example_s1(&w, 2);
    ensure!(!s1.has_d0(), "S1 has d0");
    let (e0, e1) = pages(&s1, &w, opts()).map_err(|e| e.to_string())?;
    ensure!(e0.entries.iter().all(|e| e.d0_rank == 0), "d0 acts on S1");
    for e in &e0.entries {
        ensure!(
            e1.dim(&e.level, &e.degree) == e.dim,
            "E1 != E0 at {} {}",
            e.level,
            e.degree
        );
    }

    let f = read_spec("sphere_pair.cx");
    let w = f.window.clone().unwrap();
    let (e0, e1) = pages(&f.spec, &w, opts()).map_err(|e| e.to_string())?;
    let all = window_counts(&gen_degrees(&f.spec), f.spec.basis(), &w, None);
    let reduced = window_counts(&[-1, 1], f.spec.basis(), &w, None);
    let mut dropped = 0;
    for e in e0.entries.iter().filter(|e| e.interior) {
        let key = (e.level.clone(), e.degree.clone());
        let full = all.get(&key).copied().unwrap_or(0);
        let kept = reduced.get(&key).copied().unwrap_or(0);
        ensure!(e.dim as u64 == full, "E0 at {key:?}: {} vs {full}", e.dim);
        let got = e1.dim(&e.level, &e.degree) as u64;
        ensure!(got == kept, "E1 at {key:?}: {got} vs {kept}");
        dropped += full - kept;
    }
    ensure!(dropped > 0, "the pair never contributed");

    // shift-0 chain maps: identity and the minimal-model projection
    let (min, trace) = minimal_model(&f.spec, &w, 2).map_err(|e| e.to_string())?;
    let maps: Vec<(&ComplexSpec, &ComplexSpec, AlgebraMap)> = vec![
        (&s1, &s1, AlgebraMap::identity(&s1.alg)),
        (&f.spec, &f.spec, AlgebraMap::identity(&f.spec.alg)),
        (&f.spec, &min, trace.projection.clone()),
    ];
    for (src, tgt, map) in maps {
        let phi = ChainMap::Algebra {
            map: map.clone(),
            shift: 0,
        };
        let ok = check_chain_map(&phi, src, tgt, &w, 200_000).map_err(|e| e.to_string())?;
        ensure!(
            ok.is_ok(),
            "{} -> {}: not a chain map",
            src.label,
            tgt.label
        );
        ensure!(
            preserves_filtration(&map, &tgt.alg),
            "{} -> {} lowers filtration",
            src.label,
            tgt.label
        );
        for (g, img) in map.images.iter().enumerate() {
            let level = filtration_level(&src.alg, &Monomial::generator(g, src.alg.classes()));
            for (t, _) in img.terms() {
                ensure!(
                    filtration_level(&tgt.alg, t) >= level,
                    "image of generator {g} drops level"
                );
            }
        }
    }
    Ok(())
}

fn trees_criterion() -> Outcome {
    let koszul = read_spec("koszul.cx");
    let alg = &koszul.spec.alg;
    let gens = alg.generators.len();
    let bx = [(0i64, 3i64)];
    let mut ends_sets: Vec<Vec<usize>> = vec![vec![]];
    for k in 1..=3 {
        let mut next = Vec::new();
        for s in ends_sets.iter().filter(|s| s.len() == k - 1) {
            let from = s.last().copied().unwrap_or(0);
            for g in from..gens {
                let mut t = s.clone();
                t.push(g);
                next.push(t);
            }
        }
        ends_sets.extend(next);
    }
    for ends in &ends_sets {
        for lam in 0..=6 {
            let lam_e = NovikovExponent(vec![lam]);
            let splittings = boundary_splittings(alg, ends, &lam_e, &bx);
            // brute force: every subset, joint and class split
            let mut brute = BTreeSet::new();
            for mask in 0..(1u32 << ends.len()) {
                for y in 0..gens {
                    for l in bx[0].0..=bx[0].1 {
                        if (bx[0].0..=bx[0].1).contains(&(lam - l)) {
                            brute.insert((mask, y, l));
                        }
                    }
                }
            }
            let listed: BTreeSet<(u32, usize, i64)> = splittings
                .iter()
                .map(|s| {
                    (
                        s.right.iter().map(|&i| 1u32 << i).sum(),
                        s.joint,
                        s.lam_left.0[0],
                    )
                })
                .collect();
            ensure!(
                splittings.len() == brute.len() && listed == brute,
                "ends {ends:?} lam {lam}: {} splittings vs {}",
                splittings.len(),
                brute.len()
            );
        }
    }

    for (name, f) in shipped_complexes() {
        let w = f.window.clone().unwrap();
        if let Err(e) = d_squared_consistency(&f.spec, &w, SignRule::Koszul) {
            return Err(format!("{name}: {e}"));
        }
    }
    let w = koszul.window.clone().unwrap();
    ensure!(
        d_squared_consistency(&koszul.spec, &w, SignRule::Flipped).is_err(),
        "flipped control passed"
    );

    let basis = single_class_basis();
    let s1_dim = expected_dimension(
        DimensionMode::Cluster,
        &q(-1),
        &[],
        &NovikovExponent(vec![1]),
        &basis,
    )
    .map_err(|e| e.to_string())?;
    ensure!(s1_dim == 0, "S1 dimension {s1_dim}");
    let line = read_spec("morse_line.cx");
    let alg = &line.spec.alg;
    let (x, y) = (alg.gen_id("x").unwrap(), alg.gen_id("y").unwrap());
    let line_dim = expected_dimension(
        DimensionMode::Cluster,
        &q(alg.gen_degree(x)),
        &[q(alg.gen_degree(y))],
        &alg.basis.zero(),
        &alg.basis,
    )
    .map_err(|e| e.to_string())?;
    ensure!(line_dim == 0, "Morse line dimension {line_dim}");
    Ok(())
}

fn maslov_criterion() -> Outcome {
    for (n, want) in [(4, vec![2, 4]), (3, vec![0, 2]), (5, vec![-2, 2])] {
        let v = maslov_scan(n).map_err(|e| e.to_string())?;
        let want: BTreeSet<i64> = want.into_iter().collect();
        ensure!(v.required_set == want, "n = {n}: {:?}", v.required_set);
        for step in &v.log {
            ensure!(step.is_even(), "n = {n}: odd mu in {step}");
            ensure!(step.satisfies_degree_equation(), "n = {n}: {step}");
        }
        let r = run(&["maslov-scan", "--n", &n.to_string()]);
        ensure!(r.code == 0, "maslov-scan --n {n} exited {}", r.code);
    }
    Ok(())
}

fn cli_criterion() -> Outcome {
    let dir = specs_dir();
    let mut files = Vec::new();
    for sub in [dir.clone(), dir.join("trees")] {
        for entry in std::fs::read_dir(&sub).unwrap() {
            let p = entry.unwrap().path();
            if p.is_file() {
                files.push(p);
            }
        }
    }
    files.sort();
    ensure!(files.len() >= 10, "only {} shipped files", files.len());
    for p in &files {
        let text = std::fs::read_to_string(p).unwrap();
        let printed = if p.extension().is_some_and(|e| e == "tree") {
            let t = parse_tree(&text).map_err(|e| format!("{}: {e}", p.display()))?;
            let out = print_tree(&t);
            ensure!(
                parse_tree(&out).map_err(|e| e.to_string())? == t,
                "{}: reparse differs",
                p.display()
            );
            out
        } else {
            let f = parse_file(&text).map_err(|e| format!("{}: {e}", p.display()))?;
            let out = print_file(&f);
            ensure!(
                parse_file(&out).map_err(|e| e.to_string())? == f,
                "{}: reparse differs",
                p.display()
            );
            out
        };
        ensure!(printed == text, "{} is not in canonical form", p.display());
        let r = run(&["print", p.to_str().unwrap()]);
        ensure!(
            r.code == 0 && r.stdout.starts_with(&text),
            "print {} exited {}",
            p.display(),
            r.code
        );
        ensure!(
            r.report().get("canonical").map(String::as_str) == Some("true"),
            "{}",
            p.display()
        );
    }

    let mut malformed: Vec<_> = std::fs::read_dir(dir.join("malformed"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    malformed.sort();
    ensure!(
        malformed.len() >= 20,
        "only {} malformed files",
        malformed.len()
    );
    for p in &malformed {
        let r = run(&["homology", p.to_str().unwrap()]);
        ensure!(
            r.code == 2,
            "{} exited {}: {}",
            p.display(),
            r.code,
            r.stderr
        );
        ensure!(!r.stderr.is_empty(), "{}: no message", p.display());
    }
    let r = run(&["homology", "does-not-exist.cx"]);
    ensure!(r.code == 2, "missing file exited {}", r.code);
    let r = run(&["fine", "check-d2", "circle_line_flipped.cx"]);
    ensure!(r.code == 1, "mathematical failure exited {}", r.code);
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("S1 pipeline", s1_pipeline),
        ("no-bubbling homology", no_bubbling),
        ("algebraic properties", properties),
        ("minimal model", minimal_model_criterion),
        ("fine circle/line", fine_criterion),
        ("tilde module", tilde_criterion),
        ("spectral pages", spectral_criterion),
        ("trees and splittings", trees_criterion),
        ("Maslov scan", maslov_criterion),
        ("CLI round-trip and exit codes", cli_criterion),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(()) => println!("criterion {:>2} PASS  {name}", i + 1),
            Err(e) => {
                println!("criterion {:>2} FAIL  {name}: {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
