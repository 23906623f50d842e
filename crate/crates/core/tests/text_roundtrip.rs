use clusterhom::algebra::{Element, Generator, GradedAlgebra, Monomial, Window};
use clusterhom::format::{parse_complex, print_complex, ComplexFile};
use clusterhom::text::{parse_element, show, Origin};
use clusterhom::{ClassBasis, ClassEntry, ComplexSpec, NovikovExponent, Q};
use proptest::prelude::*;

fn algebra(indices: &[i64], areas: &[(i64, i64)]) -> GradedAlgebra {
    let entries = areas
        .iter()
        .enumerate()
        .map(|(i, &(p, q))| ClassEntry {
            name: format!("c{i}"),
            maslov: 2 * (i as i64 % 3) - 2,
            area: Q::new(p.into(), q.into()),
        })
        .collect();
    let basis = ClassBasis::new(entries, Q::new(1.into(), 2.into())).unwrap();
    let gens = indices
        .iter()
        .enumerate()
        .map(|(i, &k)| Generator::new(format!("g{i}"), k))
        .collect();
    GradedAlgebra::new(basis, gens).unwrap()
}

fn element(alg: &GradedAlgebra, terms: &[(Vec<u32>, Vec<i64>, i64, i64)]) -> Element {
    let mut e = Element::zero();
    for (exps, lam, p, q) in terms {
        let mut word = Vec::new();
        for (g, &k) in exps.iter().enumerate().take(alg.generators.len()) {
            word.extend(std::iter::repeat_n(g, k as usize));
        }
        let lam = NovikovExponent(lam[..alg.classes()].to_vec());
        if let Some((s, m)) = alg.normalize(&word, lam).unwrap() {
            e.add_term(m, Q::new((*p * i64::from(s)).into(), (*q).into()));
        }
    }
    e
}

fn terms() -> impl Strategy<Value = Vec<(Vec<u32>, Vec<i64>, i64, i64)>> {
    proptest::collection::vec(
        (
            proptest::collection::vec(0u32..3, 3),
            proptest::collection::vec(-3i64..4, 2),
            -9i64..10,
            1i64..5,
        ),
        0..5,
    )
}

proptest! {
    #[test]
    fn printed_elements_parse_back(
        indices in proptest::collection::vec(0i64..4, 1..4),
        areas in proptest::collection::vec((1i64..5, 1i64..4), 0..3),
        t in terms(),
    ) {
        let alg = algebra(&indices, &areas);
        let e = element(&alg, &t);
        let printed = show(&alg, &e);
        let back = parse_element(&alg, &printed, Origin::start()).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn printed_files_are_canonical(
        indices in proptest::collection::vec(0i64..4, 1..4),
        areas in proptest::collection::vec((1i64..5, 1i64..4), 1..3),
        cutoff in (1i64..20, 1i64..3),
        len in 0u32..6,
    ) {
        let alg = algebra(&indices, &areas);
        let spec = ComplexSpec::new("random", alg.clone(), vec![Element::zero(); indices.len()]).unwrap();
        let window = Window::new(
            Q::new(cutoff.0.into(), cutoff.1.into()),
            len,
            vec![(-1, 2); areas.len()],
            (Q::from_integer((-4).into()), Q::from_integer(4.into())),
        )
        .unwrap();
        let file = ComplexFile { spec, window: Some(window), explicit_order: false };
        let text = print_complex(&file);
        let back = parse_complex(&text).unwrap();
        prop_assert_eq!(print_complex(&back), text);
        prop_assert_eq!(back, file);
    }
}

#[test]
fn unit_and_class_terms_print_plainly() {
    let alg = algebra(&[0, 1], &[(1, 1)]);
    let mut e = alg.one();
    e.add_term(
        Monomial::class(NovikovExponent(vec![-1])),
        Q::from_integer(3.into()),
    );
    assert_eq!(show(&alg, &e), "3 * e[-c0] + 1");
}
