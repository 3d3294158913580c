use anharmonic::oscbasis::quartic_levels_1d;
use anharmonic::rpm::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

mod common;
use common::series_oracle;

const BITS: usize = 340;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn solve(g: BigRational, parity: Parity, seed: f64, digits: u32) -> RpmSolution {
    let mut p = RpmProblem::quartic(g, parity, seed);
    p.precision_digits = digits;
    rpm_eigenvalue(&p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn recursion_matches_wavefunction_series(e in 0.0f64..3.0, g_tenth in prop::bool::ANY, odd in prop::bool::ANY) {
        let g = if g_tenth { hp_from_decimal("0.1", BITS).unwrap() } else { hp_from_int(1, BITS) };
        let v = [hp_from_int(0, BITS), hp_from_int(1, BITS), g];
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let energy = hp_from_f64(e, BITS);
        let series = riccati_coeffs(&v, parity, &energy, 49, BITS);
        let oracle = series_oracle(&v, parity.index() as u64, &energy, 50, BITS);
        for (j, (got, want)) in series.coeffs.iter().zip(&oracle).enumerate() {
            let diff = hp_to_f64(&(got - want)).abs();
            let scale = hp_to_f64(want).abs();
            prop_assert!(diff <= 1e-80 * scale, "j={j}: {diff:e} vs {scale:e}");
        }
    }
}

#[test]
fn ground_state_g4_reproduces_reference_digits() {
    let sol = solve(rat(4, 1), Parity::Even, 1.9, 80);
    let reference = hp_from_decimal("1.903136945459000022293850722201023931817", BITS).unwrap();
    assert!(agreeing_digits(&reference, &sol.energy, 80) >= 38);
    assert!(sol.stabilized_digits >= 40);
    assert!(!sol.non_monotone_trail);
    assert_eq!(sol.trail.len(), 24);
    assert_eq!(sol.trail[0].dim, 2);
}

#[test]
fn strong_coupling_ground_state() {
    let sol = solve(rat(2_000_000, 1), Parity::Even, 133.6, 80);
    let reference = hp_from_decimal("133.6001251895680712309208345767460232564", BITS).unwrap();
    assert!(agreeing_digits(&reference, &sol.energy, 80) >= 38);
}

#[test]
fn trail_error_decreases_monotonically_from_d5() {
    let sol = solve(rat(4, 1), Parity::Even, 1.9, 80);
    let limit = solve(rat(4, 1), Parity::Even, 1.9, 160).energy;
    let errors: Vec<f64> = sol
        .trail
        .iter()
        .filter(|t| t.dim >= 5 && t.dim < 25)
        .map(|t| hp_to_f64(&(&t.energy - &limit)).abs())
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    let diffs = sol.trail_differences();
    assert!(diffs[3..].windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn doubling_precision_only_moves_unstabilized_digits() {
    let low = solve(rat(4, 1), Parity::Even, 1.9, 80);
    let high = solve(rat(4, 1), Parity::Even, 1.9, 160);
    assert!(agreeing_digits(&high.energy, &low.energy, 200) >= low.stabilized_digits);
}

#[test]
fn even_and_odd_roots_interleave_variational_levels() {
    let levels = quartic_levels_1d(1.0, 80, 4).unwrap();
    let cases = [(Parity::Even, 0), (Parity::Odd, 1), (Parity::Even, 2), (Parity::Odd, 3)];
    for (parity, k) in cases {
        let mut p = RpmProblem::quartic(rat(1, 1), parity, levels[k]);
        p.precision_digits = 40;
        let sol = rpm_eigenvalue(&p).unwrap();
        let e = hp_to_f64(&sol.energy);
        assert!((e - levels[k]).abs() < 1e-10 * levels[k], "level {k}: {e} vs {}", levels[k]);
    }
}

#[test]
fn trail_report_layout() {
    let mut p = RpmProblem::quartic(rat(4, 1), Parity::Even, 1.9);
    p.d_max = 4;
    p.precision_digits = 30;
    let sol = rpm_eigenvalue(&p).unwrap();
    let json = serde_json::to_value(sol.report(&p)).unwrap();
    assert_eq!(json["g"], "4");
    assert_eq!(json["s"], 0);
    assert_eq!(json["d"], 0);
    assert_eq!(json["roots"].as_array().unwrap().len(), 3);
    assert_eq!(json["roots"][0]["D"], 2);
    assert!(json["roots"][0]["E"].as_str().unwrap().starts_with("1.892647944860"));
    assert_eq!(json["stabilized_digits"], sol.stabilized_digits);
}
