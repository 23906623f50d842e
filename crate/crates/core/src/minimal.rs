//! Reduction to the minimal model.
//!
//! The differential splits as `d = d0 + d'` with `d0` the Morse part. After a
//! rational change of generators every generator has `d0 x = 0` or
//! `d0 x = y'` for another generator `y'`. Each such pair spans an acyclic
//! differential ideal; dividing it out removes `x`, replaces `y'` by the
//! solution `u` of `y' = -(d'x)(y' := u, x := 0)`, and leaves a quasi-isomorphic
//! complex. When no pairs remain, `d` strictly raises the weight.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::algebra::{
    AlgebraMap, Cutoff, Element, GenId, Generator, GradedAlgebra, Monomial, Window,
};
use crate::complex::ComplexSpec;
use crate::error::{Error, Result};
use crate::linalg::{integral, invert, kernel, Echelon};
use crate::text::show;
use crate::Q;

const MAX_SUBSTITUTIONS: usize = 10_000;

/// `d0` as a linear map: `d0[g]` lists `(target generator, coefficient)`.
pub fn d0_matrix(spec: &ComplexSpec) -> Vec<Vec<(GenId, Q)>> {
    spec.diff
        .iter()
        .map(|dx| {
            dx.terms()
                .filter(|(m, _)| ComplexSpec::is_morse_term(m))
                .map(|(m, c)| (m.powers()[0].0, c.clone()))
                .collect()
        })
        .collect()
}

/// A spec whose `d0` is in pair/zero normal form.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub spec: ComplexSpec,
    /// Old generators expressed in the new ones.
    pub to_new: AlgebraMap,
    /// New generators as combinations of old ones.
    pub change: Vec<Vec<(GenId, Q)>>,
    /// `(x, y')` with `d0 x = y'`, in new ids.
    pub pairs: Vec<(GenId, GenId)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Role {
    Kernel,
    Target,
    Source,
}

type NewGenerator = (Vec<(GenId, Q)>, Role, Option<GenId>);

pub fn normalize_d0(spec: &ComplexSpec) -> Result<Normalized> {
    let gens = spec.generators();
    let d0 = d0_matrix(spec);
    let mut by_degree: BTreeMap<i64, Vec<GenId>> = BTreeMap::new();
    for (g, gen) in gens.iter().enumerate() {
        by_degree.entry(gen.degree()).or_default().push(g);
    }
    let to_vec = |v: &[(GenId, Q)]| -> Vec<(usize, Q)> { v.to_vec() };

    // sources: generators with independent d0 images, chosen greedily
    let mut sources: BTreeMap<i64, Vec<GenId>> = BTreeMap::new();
    for (k, vk) in &by_degree {
        let mut ech = Echelon::new();
        let mut xs = Vec::new();
        for &g in vk {
            if ech.insert(integral(&to_vec(&d0[g]))) {
                xs.push(g);
            }
        }
        sources.insert(*k, xs);
    }

    // (vector over old generators, role, source generator for targets)
    let mut new_gens: Vec<NewGenerator> = Vec::new();
    for (k, vk) in &by_degree {
        let mut span = Echelon::new();
        for &x in sources.get(&(k + 1)).map(|v| v.as_slice()).unwrap_or(&[]) {
            let mut y = d0[x].clone();
            y.sort_by_key(|(g, _)| *g);
            span.insert(integral(&to_vec(&y)));
            new_gens.push((y, Role::Target, Some(x)));
        }
        let cols: Vec<_> = vk.iter().map(|&g| integral(&to_vec(&d0[g]))).collect();
        for rel in kernel(&cols) {
            let v: Vec<(GenId, Q)> = rel
                .iter()
                .map(|(j, c)| (vk[*j], Q::from_integer(c.clone())))
                .collect();
            let mut v = v;
            v.sort_by_key(|(g, _)| *g);
            if span.insert(integral(&to_vec(&v))) {
                new_gens.push((v, Role::Kernel, None));
            }
        }
        for &x in &sources[k] {
            new_gens.push((vec![(x, Q::one())], Role::Source, None));
        }
        let here = new_gens
            .iter()
            .filter(|(v, _, _)| gens[v[0].0].degree() == *k)
            .count();
        if here != vk.len() {
            return Err(Error::Invalid(format!(
                "d0 does not square to zero in degree {k}"
            )));
        }
    }
    new_gens.sort_by_key(|(v, role, _)| (v[0].0, *role));

    // names: exact copies of old generators keep their name
    let mut names: Vec<Option<String>> = vec![None; new_gens.len()];
    let mut taken: BTreeSet<String> = BTreeSet::new();
    for (i, (v, _, _)) in new_gens.iter().enumerate() {
        if v.len() == 1 && v[0].1.is_one() {
            names[i] = Some(gens[v[0].0].name.clone());
            taken.insert(gens[v[0].0].name.clone());
        }
    }
    for (i, (v, _, _)) in new_gens.iter().enumerate() {
        if names[i].is_none() {
            let mut name = format!("{}'", gens[v[0].0].name);
            while taken.contains(&name) || gens.iter().any(|g| g.name == name) {
                name.push('\'');
            }
            taken.insert(name.clone());
            names[i] = Some(name);
        }
    }
    let new_generators: Vec<Generator> = new_gens
        .iter()
        .zip(&names)
        .map(|((v, _, _), n)| Generator::new(n.clone().unwrap(), gens[v[0].0].index))
        .collect();
    let alg = GradedAlgebra::new(spec.basis().clone(), new_generators)?;

    // invert the change of basis degree by degree
    let mut images: Vec<Element> = vec![Element::zero(); gens.len()];
    for (k, vk) in &by_degree {
        let cols: Vec<usize> = (0..new_gens.len())
            .filter(|&i| gens[new_gens[i].0[0].0].degree() == *k)
            .collect();
        let pos: BTreeMap<GenId, usize> = vk.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        let mut b = vec![vec![Q::zero(); vk.len()]; vk.len()];
        for (j, &ni) in cols.iter().enumerate() {
            for (g, c) in &new_gens[ni].0 {
                b[pos[g]][j] = c.clone();
            }
        }
        let inv = invert(&b).ok_or_else(|| Error::Invalid("singular change of basis".into()))?;
        for (i, &g) in vk.iter().enumerate() {
            let mut img = Element::zero();
            for (j, &ni) in cols.iter().enumerate() {
                img.add_scaled_in_place(&inv[j][i], &alg.gen(ni));
            }
            images[g] = img;
        }
    }
    let to_new = AlgebraMap {
        images,
        class_images: AlgebraMap::identity(&spec.alg).class_images,
    };
    let diff = new_gens
        .iter()
        .map(|(v, _, _)| {
            let mut old = Element::zero();
            for (g, c) in v {
                old.add_scaled_in_place(c, &spec.diff[*g]);
            }
            to_new.apply(&alg, &old, None)
        })
        .collect();
    let new_id_of_source: BTreeMap<GenId, usize> = new_gens
        .iter()
        .enumerate()
        .filter(|(_, (_, r, _))| *r == Role::Source)
        .map(|(i, (v, _, _))| (v[0].0, i))
        .collect();
    let pairs = new_gens
        .iter()
        .enumerate()
        .filter(|(_, (_, r, _))| *r == Role::Target)
        .map(|(i, (_, _, src))| (new_id_of_source[&src.unwrap()], i))
        .collect();
    let mut out = ComplexSpec::new(spec.label.clone(), alg, diff)?;
    out.dim = spec.dim;
    Ok(Normalized {
        spec: out,
        to_new,
        change: new_gens.into_iter().map(|(v, _, _)| v).collect(),
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub x: String,
    pub y: String,
    /// The element that replaces `y`, printed in the reduced spec.
    pub y_image: String,
    pub substitutions: usize,
}

#[derive(Debug, Clone)]
pub struct ReductionTrace {
    /// New generators as printed combinations of the original ones.
    pub basis_change: Vec<(String, String)>,
    pub steps: Vec<ReductionStep>,
    /// The projection from the original spec to the reduced one.
    pub projection: AlgebraMap,
}

/// Divides out the pair `(x, y)` where `d0 x = c y`.
pub fn eliminate_pair(
    spec: &ComplexSpec,
    x: GenId,
    cut: &Cutoff,
) -> Result<(ComplexSpec, AlgebraMap, ReductionStep)> {
    let alg = &spec.alg;
    let dx = &spec.diff[x];
    let morse: Vec<(GenId, Q)> = d0_matrix(spec)[x].clone();
    let (y, c) = match morse.as_slice() {
        [] => return Err(Error::NoPair),
        [(y, c)] => (*y, c.clone()),
        _ => {
            return Err(Error::Invalid(format!(
                "d0 {} is not a single generator",
                alg.generators[x].name
            )))
        }
    };
    let r = dx.sub(&alg.gen(y).scale(&c));
    let scale = -Q::one() / &c;
    let mut map = AlgebraMap::identity(alg);
    map.images[x] = Element::zero();
    let mut u = Element::zero();
    let mut substitutions = 0;
    loop {
        map.images[y] = u.clone();
        let next = map.apply(alg, &r, Some(cut)).scale(&scale);
        substitutions += 1;
        if next == u {
            break;
        }
        if substitutions > MAX_SUBSTITUTIONS {
            return Err(Error::NonConvergent(format!(
                "substitution for {} does not raise the filtration",
                alg.generators[y].name
            )));
        }
        u = next;
    }
    if u.terms()
        .any(|(m, _)| m.power_of(x) > 0 || m.power_of(y) > 0)
    {
        return Err(Error::NonConvergent("eliminated generator survives".into()));
    }

    let survivors: Vec<GenId> = (0..alg.generators.len())
        .filter(|&g| g != x && g != y)
        .collect();
    let mut new_id = vec![usize::MAX; alg.generators.len()];
    for (k, &g) in survivors.iter().enumerate() {
        new_id[g] = k;
    }
    let new_alg = GradedAlgebra::new(
        spec.basis().clone(),
        survivors
            .iter()
            .map(|&g| alg.generators[g].clone())
            .collect(),
    )?;
    // relabelling is order preserving, so normal forms carry over
    let relabel = |e: &Element| -> Element {
        e.terms()
            .map(|(m, c)| {
                let powers = m.powers().iter().map(|&(g, k)| (new_id[g], k)).collect();
                (
                    Monomial::from_raw_unchecked(powers, m.exponent().clone()),
                    c.clone(),
                )
            })
            .collect()
    };
    let proj = AlgebraMap {
        images: (0..alg.generators.len())
            .map(|g| {
                if g == x {
                    Element::zero()
                } else if g == y {
                    relabel(&u)
                } else {
                    new_alg.gen(new_id[g])
                }
            })
            .collect(),
        class_images: map.class_images.clone(),
    };
    let diff = survivors
        .iter()
        .map(|&g| proj.apply(&new_alg, &spec.diff[g], Some(cut)))
        .collect();
    let mut out = ComplexSpec::new(spec.label.clone(), new_alg, diff)?;
    out.dim = spec.dim;
    let step = ReductionStep {
        x: alg.generators[x].name.clone(),
        y: alg.generators[y].name.clone(),
        y_image: show(&out.alg, &relabel(&u)),
        substitutions,
    };
    Ok((out, proj, step))
}

fn compose(first: &AlgebraMap, then: &AlgebraMap, tgt: &GradedAlgebra, cut: &Cutoff) -> AlgebraMap {
    AlgebraMap {
        images: first
            .images
            .iter()
            .map(|img| then.apply(tgt, img, Some(cut)))
            .collect(),
        class_images: first
            .class_images
            .iter()
            .map(|e| then.map_exponent(e, tgt.classes()))
            .collect(),
    }
}

/// Eliminates all `d0`-pairs, sources in increasing degree.
pub fn minimal_model(
    spec: &ComplexSpec,
    w: &Window,
    margin: u32,
) -> Result<(ComplexSpec, ReductionTrace)> {
    let cut = w.widened(margin).filtration();
    let norm = normalize_d0(spec)?;
    let basis_change = norm
        .change
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let combo: Element = v
                .iter()
                .map(|(g, c)| (Monomial::generator(*g, spec.basis().len()), c.clone()))
                .collect();
            (
                norm.spec.generators()[i].name.clone(),
                show(&spec.alg, &combo),
            )
        })
        .collect();
    let mut cur = norm.spec;
    let mut proj = norm.to_new;
    let mut steps = Vec::new();
    loop {
        let d0 = d0_matrix(&cur);
        let next = (0..cur.generators().len())
            .filter(|&g| !d0[g].is_empty())
            .min_by_key(|&g| (cur.generators()[g].degree(), g));
        let Some(x) = next else { break };
        if d0[x].len() > 1 {
            let again = normalize_d0(&cur)?;
            proj = compose(&proj, &again.to_new, &again.spec.alg, &cut);
            cur = again.spec;
            continue;
        }
        let (reduced, phi, step) = eliminate_pair(&cur, x, &cut)?;
        proj = compose(&proj, &phi, &reduced.alg, &cut);
        cur = reduced;
        steps.push(step);
    }
    if cur.has_d0() {
        return Err(Error::Invalid(
            "weight-preserving terms survive the reduction".into(),
        ));
    }
    cur.label = format!("{} (minimal)", spec.label);
    Ok((
        cur,
        ReductionTrace {
            basis_change,
            steps,
            projection: proj,
        },
    ))
}
