use std::f64::consts::PI;

use anharmonic::eig::{eigenvalues_complex, eigenvalues_selfadjoint};
use anharmonic::oscbasis::{axis_omegas, build_hamiltonian};
use anharmonic::resonance::*;
use anharmonic::{BasisSpec, CasePreset, ExactCoeff};
use num_complex::Complex64;

fn case(id: u8, lambda: &str) -> CasePreset {
    CasePreset::new(id, ExactCoeff::from_decimal_str(lambda).unwrap()).unwrap()
}

fn closest(spectrum: &[Complex64], target: Complex64) -> Complex64 {
    *spectrum
        .iter()
        .min_by(|a, b| (*a - target).norm().total_cmp(&(*b - target).norm()))
        .unwrap()
}

#[test]
fn resonance_stalls_while_continuum_rotates() {
    let thetas: Vec<f64> = [0.04, 0.05, 0.06, 0.07, 0.08].iter().map(|t| t * PI).collect();
    let sweep = theta_trajectory(&case(3, "0.10").potential, &BasisSpec::new(30, 1.0, 0.0), &thetas).unwrap();
    let (t, _, stability) = select_lowest(&sweep, 1e-2).unwrap();
    assert!(stability < 1e-4, "{stability:e}");
    let e = sweep.trajectories[t].points[2];
    assert!((e.re - 2.07335064).abs() < 5e-6, "{e}");

    // Most of the discretized continuum swings with θ.
    let rotating = sweep
        .trajectories
        .iter()
        .filter(|tr| tr.most_stationary(&thetas).unwrap().1 > 1.0)
        .count();
    assert!(2 * rotating > sweep.trajectories.len(), "{rotating} of {}", sweep.trajectories.len());
}

#[test]
fn bound_case_ground_state_does_not_move() {
    // Truncation error of a bound state grows with θ; this window stays
    // inside what 25 functions per mode resolve.
    let thetas = theta_grid(0.01 * PI, 0.04 * PI, 7).unwrap();
    let p = case(2, "1");
    let (wx, wy) = axis_omegas(&p.potential);
    let basis = BasisSpec::anisotropic(25, 25, wx, wy, 0.0);
    let ground = eigenvalues_selfadjoint(&build_hamiltonian(&p.potential, &basis).unwrap()).unwrap()[0];
    let sweep = theta_trajectory(&p.potential, &basis, &thetas).unwrap();
    let traj = sweep
        .trajectories
        .iter()
        .min_by(|a, b| (a.points[0] - ground).norm().total_cmp(&(b.points[0] - ground).norm()))
        .unwrap();
    for e in &traj.points {
        assert!(e.im.abs() < 1e-6 && (e.re - ground).abs() < 1e-6, "{e} vs {ground}");
    }
}

#[test]
fn zero_coupling_gives_oscillator_levels() {
    let h = build_hamiltonian(&case(3, "0").potential, &BasisSpec::new(10, 1.0, 0.0)).unwrap();
    let levels = eigenvalues_selfadjoint(&h).unwrap();
    let mut expected: Vec<f64> = (0..10)
        .flat_map(|a| (0..10).map(move |b| 2.0 * (a + b) as f64 + 2.0))
        .collect();
    expected.sort_by(f64::total_cmp);
    for (e, want) in levels.iter().zip(&expected) {
        assert!((e - want).abs() < 1e-10, "{e} vs {want}");
    }
}

#[test]
fn energy_is_flat_across_plateau() {
    let thetas = theta_grid(0.05 * PI, 0.07 * PI, 5).unwrap();
    let sweep = theta_trajectory(&case(3, "0.10").potential, &BasisSpec::new(30, 1.0, 0.0), &thetas).unwrap();
    let (t, _, _) = select_lowest(&sweep, 1e-2).unwrap();
    let pts = &sweep.trajectories[t].points;
    let spread = pts
        .iter()
        .flat_map(|a| pts.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max);
    assert!(spread < 1e-5, "{spread:e}");
}

#[test]
fn table_rows_converge_and_widen_with_coupling() {
    let config = ResonanceConfig::default();
    let mut widths = Vec::new();
    for lambda in ["0.10", "0.12", "0.13", "0.14"] {
        let r = case3_resonance(&ExactCoeff::from_decimal_str(lambda).unwrap(), 30, DEFAULT_WINDOW, &config).unwrap();
        assert!(r.converged, "lambda {lambda}");
        let small = BasisSpec::new(25, 1.0, r.theta_star);
        let e25 = closest(&eigenvalues_complex(&build_hamiltonian(&case(3, lambda).potential, &small).unwrap()).unwrap(), r.energy);
        assert!((e25 - r.energy).norm() < 1e-4, "lambda {lambda}: {e25} vs {}", r.energy);
        widths.push(-r.energy.im);
    }
    assert!(widths.windows(2).all(|w| w[1] > w[0]), "{widths:?}");
}
