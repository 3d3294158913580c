//! Resonances by complex coordinate rotation.
//!
//! Under `x → x e^{iθ}` bound states and resonances stay put while the
//! discretized continuum swings into the lower half plane, so a resonance is
//! an eigenvalue whose θ-trajectory is stationary.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::eig::eigenvalues_complex;
use crate::error::ResonanceError;
use crate::oscbasis::{build_hamiltonian, BasisSpec};
use crate::poly2d::{CasePreset, PolynomialPotential};
use crate::ExactCoeff;

pub const DEFAULT_WINDOW: (f64, f64) = (0.03 * PI, 0.10 * PI);
pub const DEFAULT_STEPS: usize = 15;

/// Links whose runner-up candidate is closer than this multiple of the chosen
/// distance are counted as ambiguous.
const AMBIGUITY_RATIO: f64 = 2.0;

/// Imaginary parts above this count as positive (round-off allowance).
const IM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResonanceConfig {
    pub steps: usize,
    /// Maximum `|dE/dθ|` for a trajectory to count as stationary.
    pub stability_threshold: f64,
    /// Maximum `|E(n_max + increment) − E(n_max)|` for `converged`.
    pub drift_threshold: f64,
    pub basis_increment: usize,
}

impl Default for ResonanceConfig {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            stability_threshold: 1e-2,
            drift_threshold: 1e-4,
            basis_increment: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resonance {
    pub lambda: Option<f64>,
    #[serde(serialize_with = "serialize_complex")]
    pub energy: Complex64,
    pub theta_star: f64,
    /// `|dE/dθ|` at `theta_star`, the minimum along the selected trajectory.
    pub stability: f64,
    pub basis_used: BasisSpec,
    /// Energy from the enlarged basis at `theta_star`.
    #[serde(serialize_with = "serialize_complex")]
    pub enlarged_energy: Complex64,
    pub converged: bool,
}

impl Resonance {
    pub fn basis_drift(&self) -> f64 {
        (self.enlarged_energy - self.energy).norm()
    }
}

fn serialize_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// One eigenvalue followed across the θ grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub points: Vec<Complex64>,
}

impl Trajectory {
    /// Central-difference `|dE/dθ|` at every interior grid point.
    pub fn stability(&self, thetas: &[f64]) -> Vec<f64> {
        (1..self.points.len().saturating_sub(1))
            .map(|k| (self.points[k + 1] - self.points[k - 1]).norm() / (thetas[k + 1] - thetas[k - 1]))
            .collect()
    }

    /// Interior index and value of the smallest `|dE/dθ|`.
    pub fn most_stationary(&self, thetas: &[f64]) -> Option<(usize, f64)> {
        self.stability(thetas)
            .into_iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, s)| (k + 1, s))
    }
}

#[derive(Clone, Debug)]
pub struct ThetaSweep {
    pub thetas: Vec<f64>,
    /// Full spectrum per θ, ordered by real part.
    pub spectra: Vec<Vec<Complex64>>,
    pub trajectories: Vec<Trajectory>,
    pub ambiguous_links: usize,
}

/// `steps` equally spaced angles from `min` to `max` inclusive.
pub fn theta_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, ResonanceError> {
    if steps < 3 {
        return Err(ResonanceError::InvalidThetaGrid("need at least 3 angles".into()));
    }
    if !(min < max) || min < 0.0 || max >= PI / 4.0 {
        return Err(ResonanceError::InvalidThetaGrid(format!(
            "window ({min}, {max}) must satisfy 0 <= min < max < pi/4"
        )));
    }
    let step = (max - min) / (steps - 1) as f64;
    Ok((0..steps).map(|k| min + step * k as f64).collect())
}

/// Greedy minimal-distance matching of `from` onto `to`; returns, for each
/// entry of `from`, its partner index in `to` and the number of ambiguous links.
fn link(from: &[Complex64], to: &[Complex64]) -> (Vec<usize>, usize) {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(from.len() * to.len());
    for (i, a) in from.iter().enumerate() {
        for (j, b) in to.iter().enumerate() {
            pairs.push(((a - b).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut partner = vec![usize::MAX; from.len()];
    let mut taken = vec![false; to.len()];
    let mut assigned = 0;
    for &(_, i, j) in &pairs {
        if partner[i] == usize::MAX && !taken[j] {
            partner[i] = j;
            taken[j] = true;
            assigned += 1;
            if assigned == from.len().min(to.len()) {
                break;
            }
        }
    }
    let mut ambiguous = 0;
    for (i, a) in from.iter().enumerate() {
        let chosen = (a - to[partner[i]]).norm();
        let runner_up = to
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != partner[i])
            .map(|(_, b)| (a - b).norm())
            .fold(f64::INFINITY, f64::min);
        if runner_up < AMBIGUITY_RATIO * chosen {
            ambiguous += 1;
        }
    }
    (partner, ambiguous)
}

/// Sets the rotation angle on the shared basis.
fn rotated_spectrum(poly: &PolynomialPotential, basis: &BasisSpec, theta: f64) -> Result<Vec<Complex64>, ResonanceError> {
    let h = build_hamiltonian(poly, &basis.with_theta(theta))?;
    Ok(eigenvalues_complex(&h)?)
}

/// Spectra of the rotated Hamiltonian over `thetas`, linked into trajectories.
pub fn theta_trajectory(poly: &PolynomialPotential, basis: &BasisSpec, thetas: &[f64]) -> Result<ThetaSweep, ResonanceError> {
    if thetas.is_empty() {
        return Err(ResonanceError::InvalidThetaGrid("empty".into()));
    }
    if thetas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(ResonanceError::InvalidThetaGrid("angles must be strictly ascending".into()));
    }
    if thetas.iter().any(|t| !(t.abs() < PI / 4.0)) {
        return Err(ResonanceError::InvalidThetaGrid("angles must satisfy |theta| < pi/4".into()));
    }
    let spectra = thetas
        .par_iter()
        .map(|&t| rotated_spectrum(poly, basis, t))
        .collect::<Result<Vec<_>, _>>()?;

    let n = spectra[0].len();
    let mut current: Vec<usize> = (0..n).collect();
    let mut trajectories: Vec<Trajectory> = (0..n)
        .map(|i| Trajectory {
            points: vec![spectra[0][i]],
        })
        .collect();
    let mut ambiguous_links = 0;
    for k in 1..spectra.len() {
        let prev: Vec<Complex64> = current.iter().map(|&i| spectra[k - 1][i]).collect();
        let (partner, ambiguous) = link(&prev, &spectra[k]);
        ambiguous_links += ambiguous;
        for (t, &j) in trajectories.iter_mut().zip(&partner) {
            t.points.push(spectra[k][j]);
        }
        current = partner;
    }
    Ok(ThetaSweep {
        thetas: thetas.to_vec(),
        spectra,
        trajectories,
        ambiguous_links,
    })
}

/// Among θ-stationary trajectories (stability below the threshold, Im E ≤ 0)
/// picks the one with the smallest Re E at its most stationary point.
pub fn select_lowest(sweep: &ThetaSweep, threshold: f64) -> Result<(usize, usize, f64), ResonanceError> {
    let mut best_stability = f64::INFINITY;
    let mut chosen: Option<(usize, usize, f64)> = None;
    for (t, traj) in sweep.trajectories.iter().enumerate() {
        let Some((k, s)) = traj.most_stationary(&sweep.thetas) else {
            continue;
        };
        best_stability = best_stability.min(s);
        let e = traj.points[k];
        if s >= threshold || e.im > IM_TOLERANCE {
            continue;
        }
        if chosen.is_none_or(|(ct, ck, _)| e.re < sweep.trajectories[ct].points[ck].re) {
            chosen = Some((t, k, s));
        }
    }
    chosen.ok_or(ResonanceError::NoStationaryPoint { best: best_stability })
}

/// Lowest θ-stationary complex eigenvalue over `window`, with a basis
/// convergence check at `n_max + config.basis_increment`.
pub fn find_lowest_resonance(
    poly: &PolynomialPotential,
    basis: &BasisSpec,
    window: (f64, f64),
    config: &ResonanceConfig,
) -> Result<Resonance, ResonanceError> {
    basis.validate()?;
    let thetas = theta_grid(window.0, window.1, config.steps)?;
    let sweep = theta_trajectory(poly, basis, &thetas)?;
    let (t, k, stability) = select_lowest(&sweep, config.stability_threshold)?;
    let energy = sweep.trajectories[t].points[k];
    let theta_star = thetas[k];

    let enlarged = rotated_spectrum(poly, &basis.enlarged(config.basis_increment), theta_star)?;
    let enlarged_energy = enlarged
        .into_iter()
        .min_by(|a, b| (a - energy).norm().total_cmp(&(b - energy).norm()))
        .expect("non-empty spectrum");
    let drift = (enlarged_energy - energy).norm();
    Ok(Resonance {
        lambda: None,
        energy,
        theta_star,
        stability,
        basis_used: basis.with_theta(theta_star),
        enlarged_energy,
        converged: stability < config.stability_threshold && drift < config.drift_threshold,
    })
}

/// Lowest resonance of case 3 at coupling `lambda` in an `n_max`-per-mode
/// basis with unit frequency.
pub fn case3_resonance(lambda: &ExactCoeff, n_max: usize, window: (f64, f64), config: &ResonanceConfig) -> Result<Resonance, ResonanceError> {
    let preset = CasePreset::new(3, lambda.clone()).expect("case 3 exists");
    let basis = BasisSpec::new(n_max, 1.0, 0.0);
    let mut res = find_lowest_resonance(&preset.potential, &basis, window, config)?;
    res.lambda = Some(lambda.to_f64());
    Ok(res)
}

pub const TABLE1_HEADER: &str = "lambda,re_e,im_e,theta_star,nmax";

pub fn table1_csv(rows: &[Resonance]) -> String {
    let mut out = String::from(TABLE1_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{:.2},{:.8},{:.9},{:.6},{}",
            r.lambda.unwrap_or(f64::NAN),
            r.energy.re,
            r.energy.im,
            r.theta_star,
            r.basis_used.n_max_x
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_and_validation() {
        let g = theta_grid(0.03 * PI, 0.10 * PI, 15).unwrap();
        assert_eq!(g.len(), 15);
        assert!((g[1] - g[0] - 0.005 * PI).abs() < 1e-15);
        assert!((g[14] - 0.10 * PI).abs() < 1e-15);
        assert!(theta_grid(0.1, 0.05, 5).is_err());
        assert!(theta_grid(0.0, 0.8, 5).is_err());
        assert!(theta_grid(0.0, 0.1, 2).is_err());
    }

    #[test]
    fn greedy_link_follows_nearest() {
        let a = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let b = [Complex64::new(1.05, -0.01), Complex64::new(0.02, 0.0)];
        let (p, amb) = link(&a, &b);
        assert_eq!(p, vec![1, 0]);
        assert_eq!(amb, 0);
        let c = [Complex64::new(0.5, 0.0), Complex64::new(0.6, 0.0)];
        let (_, amb) = link(&a[..1], &c);
        assert_eq!(amb, 1);
    }

    #[test]
    fn stability_of_flat_and_rotating_tracks() {
        let thetas = [0.0, 0.1, 0.2, 0.3];
        let flat = Trajectory {
            points: vec![Complex64::new(2.0, 0.0); 4],
        };
        assert_eq!(flat.most_stationary(&thetas), Some((1, 0.0)));
        let rot = Trajectory {
            points: thetas.iter().map(|&t| Complex64::from_polar(10.0, -2.0 * t)).collect(),
        };
        let s = rot.stability(&thetas);
        let chord = 20.0 * 0.2f64.sin() / 0.2;
        assert!(s.iter().all(|&v| (v - chord).abs() < 1e-12));
    }

    #[test]
    fn harmonic_spectrum_at_zero_angle() {
        let sweep = theta_trajectory(&PolynomialPotential::harmonic(), &BasisSpec::new(4, 1.0, 0.0), &[0.0, 0.01, 0.02]).unwrap();
        let mut expected: Vec<f64> = (0..4).flat_map(|a| (0..4).map(move |b| 2.0 * (a + b) as f64 + 2.0)).collect();
        expected.sort_by(f64::total_cmp);
        for (z, e) in sweep.spectra[0].iter().zip(&expected) {
            assert!((z.re - e).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_unsorted_angles() {
        let err = theta_trajectory(&PolynomialPotential::harmonic(), &BasisSpec::new(2, 1.0, 0.0), &[0.1, 0.05]).unwrap_err();
        assert!(matches!(err, ResonanceError::InvalidThetaGrid(_)));
    }

    #[test]
    fn csv_layout() {
        let r = Resonance {
            lambda: Some(0.1),
            energy: Complex64::new(2.073350644, -0.000459014),
            theta_star: 0.06 * PI,
            stability: 1e-6,
            basis_used: BasisSpec::new(30, 1.0, 0.06 * PI),
            enlarged_energy: Complex64::new(2.073350644, -0.000459014),
            converged: true,
        };
        assert_eq!(
            table1_csv(&[r]),
            "lambda,re_e,im_e,theta_star,nmax\n0.10,2.07335064,-0.000459014,0.188496,30\n"
        );
    }
}
