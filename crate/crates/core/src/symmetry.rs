//! Point groups of potentials within the order-16 dihedral candidate set.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::Serialize;

use crate::error::SymmetryError;
use crate::map::OrthogonalMap2;
use crate::poly2d::{golden_section, PolynomialPotential};

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryGroup {
    elements: Vec<OrthogonalMap2>,
    /// `table[a][b]` is the index of `elements[a] · elements[b]`.
    table: Vec<Vec<usize>>,
}

impl SymmetryGroup {
    /// Validates closure and inverses and fills the multiplication table.
    pub fn from_elements(elements: Vec<OrthogonalMap2>) -> Result<Self, SymmetryError> {
        if !elements.iter().any(OrthogonalMap2::is_identity) {
            return Err(SymmetryError::MissingIdentity);
        }
        let find = |m: &OrthogonalMap2| elements.iter().position(|e| e == m);
        let mut table = Vec::with_capacity(elements.len());
        for a in &elements {
            let mut row = Vec::with_capacity(elements.len());
            for b in &elements {
                let ab = a.compose(b);
                match find(&ab) {
                    Some(k) => row.push(k),
                    None => {
                        return Err(SymmetryError::NotClosed(a.label().into(), b.label().into()));
                    }
                }
            }
            table.push(row);
        }
        // Inverses are automatic for a closed finite set, but checked anyway.
        for a in &elements {
            if find(&a.transpose()).is_none() {
                return Err(SymmetryError::NotClosed(a.label().into(), "inverse".into()));
            }
        }
        Ok(Self { elements, table })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[OrthogonalMap2] {
        &self.elements
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn labels(&self) -> Vec<String> {
        self.elements.iter().map(|e| e.label().to_string()).collect()
    }

    pub fn contains(&self, m: &OrthogonalMap2) -> bool {
        self.elements.contains(m)
    }

    pub fn report(&self) -> GroupReport {
        GroupReport {
            order: self.order(),
            elements: self.labels(),
            table: self.table.clone(),
        }
    }
}

/// JSON view: `{"order":h,"elements":[labels],"table":[[indices]]}`.
#[derive(Clone, Debug, Serialize)]
pub struct GroupReport {
    pub order: usize,
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

pub fn leaves_invariant(poly: &PolynomialPotential, map: &OrthogonalMap2) -> bool {
    poly.apply_linear_map(map) == *poly
}

pub fn default_candidates() -> Vec<OrthogonalMap2> {
    OrthogonalMap2::dihedral16()
}

/// The candidates that leave `poly` invariant, as a group.
pub fn detect_group(
    poly: &PolynomialPotential,
    candidates: &[OrthogonalMap2],
) -> Result<SymmetryGroup, SymmetryError> {
    if !candidates.iter().any(OrthogonalMap2::is_identity) {
        return Err(SymmetryError::MissingIdentity);
    }
    let invariant = candidates
        .iter()
        .filter(|m| leaves_invariant(poly, m))
        .cloned()
        .collect();
    SymmetryGroup::from_elements(invariant)
}

/// `{M U_i Mᵀ}` in the same element order, so the table carries over.
pub fn conjugate_group(group: &SymmetryGroup, map: &OrthogonalMap2) -> SymmetryGroup {
    let elements: Vec<OrthogonalMap2> = group.elements.iter().map(|u| map.conjugate(u)).collect();
    let table = elements
        .iter()
        .map(|a| {
            elements
                .iter()
                .map(|b| {
                    let ab = a.compose(b);
                    elements.iter().position(|e| *e == ab).expect("conjugation preserves closure")
                })
                .collect()
        })
        .collect();
    SymmetryGroup { elements, table }
}

#[derive(Clone, Debug)]
pub struct SeparatingRotation {
    /// Axis rotation angle in (−π/4, π/4].
    pub angle: f64,
    /// Exact map, present when the angle is a multiple of π/4 and the
    /// separation was verified in exact arithmetic.
    pub map: Option<OrthogonalMap2>,
}

const SCAN_POINTS: usize = 4096;
const RESIDUAL_TOL: f64 = 1e-10;
const SNAP_TOL: f64 = 1e-6;

/// Coefficients of `V(x cos φ + y sin φ, −x sin φ + y cos φ)` in floating point.
fn rotated_terms(terms: &[(u32, u32, f64)], phi: f64) -> BTreeMap<(u32, u32), f64> {
    let (s, c) = phi.sin_cos();
    let binom = |n: u32, k: u32| (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64);
    let mut out = BTreeMap::new();
    for &(i, j, coef) in terms {
        for a in 0..=i {
            let fa = binom(i, a) * c.powi(a as i32) * s.powi((i - a) as i32);
            for b in 0..=j {
                let fb = binom(j, b) * (-s).powi(b as i32) * c.powi((j - b) as i32);
                *out.entry((a + b, i + j - a - b)).or_insert(0.0) += coef * fa * fb;
            }
        }
    }
    out
}

fn mixed_coeffs(terms: &[(u32, u32, f64)], phi: f64) -> Vec<f64> {
    rotated_terms(terms, phi)
        .into_iter()
        .filter(|((i, j), _)| *i > 0 && *j > 0)
        .map(|(_, v)| v)
        .collect()
}

/// Searches for an axis rotation that removes every mixed term.
pub fn separating_rotation(poly: &PolynomialPotential) -> Option<SeparatingRotation> {
    if poly.is_separable() {
        return Some(SeparatingRotation {
            angle: 0.0,
            map: Some(OrthogonalMap2::identity()),
        });
    }
    let terms = poly.float_terms();
    let norm = terms.iter().map(|t| t.2 * t.2).sum::<f64>().sqrt();
    let residual = |phi: f64| mixed_coeffs(&terms, phi).iter().map(|v| v * v).sum::<f64>().sqrt() / norm;

    // Separability is preserved by quarter turns, so (−π/4, π/4] suffices.
    let h = FRAC_PI_2 / SCAN_POINTS as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS).map(|k| -FRAC_PI_4 + h * (k + 1) as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&p| residual(p)).collect();
    let n = SCAN_POINTS;
    let (r, phi) = (0..n)
        .filter(|&k| values[k] <= values[(k + n - 1) % n] && values[k] <= values[(k + 1) % n])
        .map(|k| {
            let phi = polish(&terms, &residual, grid[k] - h, grid[k] + h);
            (residual(phi), phi)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))?;
    if r >= RESIDUAL_TOL {
        return None;
    }
    let k = (phi / FRAC_PI_4).round();
    if (phi - k * FRAC_PI_4).abs() < SNAP_TOL {
        let k = if k < 0.0 { k as i32 + 2 } else { k as i32 };
        let map = OrthogonalMap2::rotation_quarter(k);
        if poly.apply_linear_map(&map).is_separable() {
            return Some(SeparatingRotation {
                angle: k as f64 * FRAC_PI_4,
                map: Some(map),
            });
        }
    }
    let angle = if phi <= -FRAC_PI_4 { phi + FRAC_PI_2 } else { phi };
    Some(SeparatingRotation { angle, map: None })
}

/// Bisection on the sign of the mixed coefficient that changes sign most
/// steeply across the bracket; golden section on the residual otherwise.
fn polish(terms: &[(u32, u32, f64)], residual: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (cl, ch) = (mixed_coeffs(terms, lo), mixed_coeffs(terms, hi));
    let pick = cl
        .iter()
        .zip(&ch)
        .enumerate()
        .filter(|(_, (a, b))| a.signum() != b.signum())
        .max_by(|x, y| (x.1 .0 - x.1 .1).abs().total_cmp(&(y.1 .0 - y.1 .1).abs()))
        .map(|(k, _)| k);
    let Some(k) = pick else {
        return golden_section(residual, lo, hi);
    };
    let (mut a, mut b) = (lo, hi);
    let sign_a = cl[k].signum();
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if mixed_coeffs(terms, mid)[k].signum() == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
