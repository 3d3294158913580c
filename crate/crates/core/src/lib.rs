//! Analysis of two-dimensional quartic anharmonic oscillators
//! `H = p_x² + p_y² + V(x, y)`.
//!
//! * [`poly2d`] / [`coeff`] / [`map`]: exact potentials over ℚ(√2) and exact
//!   orthogonal coordinate maps.
//! * [`symmetry`]: point groups, conjugation, separating rotations.
//! * [`oscbasis`] / [`eig`]: Rayleigh–Ritz and complex-scaled matrices in a
//!   harmonic-oscillator product basis and their spectra.
//! * [`resonance`]: complex-rotation resonance search.
//! * [`rpm`]: Riccati–Padé eigenvalues of `p² + x² + g x⁴` in high precision.

pub mod coeff;
pub mod eig;
pub mod error;
pub mod map;
pub mod oscbasis;
pub mod poly2d;
pub mod resonance;
pub mod rpm;
pub mod symmetry;

pub use coeff::ExactCoeff;
pub use error::Error;
pub use map::OrthogonalMap2;
pub use oscbasis::{BasisSpec, OperatorMatrix};
pub use poly2d::{make_quartic, Boundedness, CasePreset, PolynomialPotential};
