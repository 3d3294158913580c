use anharmonic::eig::{eigenvalues_complex, eigenvalues_selfadjoint};
use anharmonic::oscbasis::build_hamiltonian;
use anharmonic::symmetry::{conjugate_group, default_candidates, detect_group, separating_rotation};
use anharmonic::{make_quartic, BasisSpec, ExactCoeff, OperatorMatrix, OrthogonalMap2, PolynomialPotential};
use faer::Mat;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

mod common;
use common::{orthogonal_conjugate, random_hermitian, random_orthogonal};

fn coeff() -> impl Strategy<Value = ExactCoeff> {
    (-6i64..=6, 1i64..=4, -3i64..=3, 1i64..=3).prop_map(|(p, dp, q, dq)| {
        &ExactCoeff::rational(p, dp) + &(&ExactCoeff::rational(q, dq) * &ExactCoeff::sqrt2())
    })
}

/// Polynomials of degree ≤ 4 with up to eight random terms.
fn polynomial() -> impl Strategy<Value = PolynomialPotential> {
    prop::collection::vec(((0u32..=4), (0u32..=4), coeff()), 0..8).prop_map(|terms| {
        PolynomialPotential::from_terms(terms.into_iter().filter(|(i, j, _)| i + j <= 4))
    })
}

/// The sixteen dihedral maps plus a rotation with rational entries.
fn exact_map() -> impl Strategy<Value = OrthogonalMap2> {
    (0usize..17).prop_map(|k| {
        let mut maps = OrthogonalMap2::dihedral16();
        let r = |n, d| ExactCoeff::rational(n, d);
        maps.push(OrthogonalMap2::new([[r(3, 5), r(-4, 5)], [r(4, 5), r(3, 5)]], "pythagorean").unwrap());
        maps.swap_remove(k)
    })
}

/// Members of the quartic family with parameters in {−1, 0, 1}.
fn family_member() -> impl Strategy<Value = PolynomialPotential> {
    (prop::array::uniform5(-1i64..=1), 1i64..=3).prop_map(|(p, l)| {
        let c = ExactCoeff::from_int;
        make_quartic(&c(p[0]), &c(p[1]), &c(p[2]), &c(p[3]), &c(p[4]), &ExactCoeff::rational(l, 2))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn map_then_transpose_is_identity(v in polynomial(), m in exact_map()) {
        prop_assert_eq!(v.apply_linear_map(&m).apply_linear_map(&m.transpose()), v);
    }

    #[test]
    fn substitution_matches_pointwise_evaluation(v in polynomial(), m in exact_map(), pts in prop::collection::vec((-1.5f64..1.5, -1.5f64..1.5), 100)) {
        let w = v.apply_linear_map(&m);
        for (x, y) in pts {
            let (mx, my) = m.apply_f64(x, y);
            let want = v.evaluate(mx, my);
            prop_assert!((w.evaluate(x, y) - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn harmonic_part_is_fixed(m in exact_map()) {
        let h = PolynomialPotential::harmonic();
        prop_assert_eq!(h.apply_linear_map(&m), h);
    }

    #[test]
    fn quartic_minimum_is_map_invariant(v in family_member(), m in exact_map()) {
        let a = v.quartic_form_min();
        let b = v.apply_linear_map(&m).quartic_form_min();
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert!((a.min_value - b.min_value).abs() < 1e-10, "{} vs {}", a.min_value, b.min_value),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn json_round_trip_is_exact(v in family_member(), extra in polynomial()) {
        for p in [v.clone(), v.add(&extra)] {
            let s = p.to_json();
            let back = PolynomialPotential::from_json(&s).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(back.to_json(), s);
        }
    }

    #[test]
    fn detected_groups_are_subgroups_of_invariances(v in family_member()) {
        let candidates = default_candidates();
        let g = detect_group(&v, &candidates).unwrap();
        prop_assert!(g.elements().iter().any(OrthogonalMap2::is_identity));
        prop_assert_eq!(candidates.len() % g.order(), 0);
        for u in g.elements() {
            prop_assert_eq!(&v.apply_linear_map(u), &v);
        }
    }

    #[test]
    fn conjugation_carries_table_and_invariance(v in family_member(), m in exact_map()) {
        let g = detect_group(&v, &default_candidates()).unwrap();
        let carried = conjugate_group(&g, &m.transpose());
        prop_assert_eq!(carried.table(), g.table());
        let w = v.apply_linear_map(&m);
        for u in carried.elements() {
            prop_assert_eq!(&w.apply_linear_map(u), &w);
        }
    }

    #[test]
    fn separating_maps_separate(v in family_member()) {
        if let Some(sep) = separating_rotation(&v) {
            if let Some(m) = sep.map {
                prop_assert!(v.apply_linear_map(&m).is_separable());
            }
        }
    }

    #[test]
    fn variational_ground_state_decreases_with_basis(v in family_member()) {
        let mut last = f64::INFINITY;
        for n in [4usize, 6, 8, 10, 12] {
            let h = build_hamiltonian(&v, &BasisSpec::new(n, 1.0, 0.0)).unwrap();
            let e0 = eigenvalues_selfadjoint(&h).unwrap()[0];
            prop_assert!(e0 <= last + 1e-12, "n={n}: {e0} > {last}");
            last = e0;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn eigenvalue_sum_matches_trace(seed in any::<u64>(), n in 2usize..40) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = OperatorMatrix::from_complex(random_hermitian(&mut rng, n));
        let sum: f64 = eigenvalues_selfadjoint(&a).unwrap().iter().sum();
        prop_assert!((sum - a.trace().re).abs() <= 1e-8 * a.trace().norm().max(1.0));

        let g = OperatorMatrix::from_complex(Mat::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
        let csum: Complex64 = eigenvalues_complex(&g).unwrap().iter().sum();
        prop_assert!((csum - g.trace()).norm() <= 1e-8 * g.trace().norm().max(1.0));
    }

    #[test]
    fn orthogonal_conjugation_is_isospectral(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = 50;
        let a = random_hermitian(&mut rng, n);
        let q = random_orthogonal(&mut rng, n);
        let b = orthogonal_conjugate(&a, &q);
        let ea = eigenvalues_selfadjoint(&OperatorMatrix::from_complex(a)).unwrap();
        let eb = eigenvalues_selfadjoint(&OperatorMatrix::from_complex(b)).unwrap();
        for (x, y) in ea.iter().zip(&eb) {
            prop_assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }
}
