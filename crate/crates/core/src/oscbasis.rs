//! Hamiltonian matrices in a product basis of harmonic-oscillator functions.
//!
//! The 1D basis functions are eigenfunctions of `p² + ω²x²` (eigenvalues
//! `ω(2n + 1)`), so `⟨n|x|n+1⟩ = sqrt((n+1)/(2ω))`. Complex scaling
//! `x → x·e^{iθ}` is applied to the matrix elements: `p²` picks up
//! `e^{−2iθ}` and a monomial of total degree `k` picks up `e^{ikθ}`.

use std::f64::consts::FRAC_PI_4;
use std::io::{Read, Write};

use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{BasisError, ParseError};
use crate::poly2d::PolynomialPotential;

/// Highest total degree the padding policy supports.
pub const MAX_DEGREE: u32 = 4;

const DUMP_MAGIC: &[u8; 4] = b"OSCM";
const DUMP_VERSION: u32 = 1;
const FLAG_HERMITIAN: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BasisSpec {
    pub n_max_x: usize,
    pub n_max_y: usize,
    pub omega_x: f64,
    pub omega_y: f64,
    pub theta: f64,
}

impl BasisSpec {
    /// Same size and frequency for both coordinates.
    pub fn new(n_max: usize, omega: f64, theta: f64) -> Self {
        Self::anisotropic(n_max, n_max, omega, omega, theta)
    }

    pub fn anisotropic(n_max_x: usize, n_max_y: usize, omega_x: f64, omega_y: f64, theta: f64) -> Self {
        Self {
            n_max_x,
            n_max_y,
            omega_x,
            omega_y,
            theta,
        }
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }

    /// Grows both coordinates by `extra` functions.
    pub fn enlarged(self, extra: usize) -> Self {
        Self {
            n_max_x: self.n_max_x + extra,
            n_max_y: self.n_max_y + extra,
            ..self
        }
    }

    pub fn dim(&self) -> usize {
        self.n_max_x * self.n_max_y
    }

    /// Row-major product index, `n_x` outer.
    pub fn index(&self, n_x: usize, n_y: usize) -> usize {
        n_x * self.n_max_y + n_y
    }

    pub fn validate(&self) -> Result<(), BasisError> {
        if self.n_max_x == 0 || self.n_max_y == 0 {
            return Err(BasisError::InvalidBasis("n_max must be >= 1".into()));
        }
        if !(self.omega_x > 0.0 && self.omega_y > 0.0) {
            return Err(BasisError::InvalidBasis("omega must be > 0".into()));
        }
        if !(self.theta.abs() < FRAC_PI_4) {
            return Err(BasisError::InvalidBasis("|theta| must be < pi/4".into()));
        }
        Ok(())
    }
}

/// Dense (possibly complex-symmetric) operator matrix.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    entries: Mat<Complex64>,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Wraps a square matrix and measures its hermiticity.
    pub fn from_complex(entries: Mat<Complex64>) -> Self {
        assert_eq!(entries.nrows(), entries.ncols(), "operator matrix must be square");
        let hermitian = hermitian_defect(&entries) <= 1e-12 * max_abs(&entries).max(f64::MIN_POSITIVE);
        Self { entries, hermitian }
    }

    pub fn from_real(entries: &Mat<f64>) -> Self {
        Self::from_complex(Mat::from_fn(entries.nrows(), entries.ncols(), |i, j| {
            Complex64::new(entries[(i, j)], 0.0)
        }))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Mat<Complex64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entries[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.entries)
    }

    /// `max |A_ij − conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.entries)
    }

    /// Binary dump: `"OSCM"`, version, dim, flags (u32 LE each), then
    /// row-major `(re, im)` pairs as f64 LE.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.dim();
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&DUMP_VERSION.to_le_bytes())?;
        w.write_all(&(n as u32).to_le_bytes())?;
        let flags = if self.hermitian { FLAG_HERMITIAN } else { 0 };
        w.write_all(&flags.to_le_bytes())?;
        for i in 0..n {
            for j in 0..n {
                let z = self.entries[(i, j)];
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_dump<R: Read>(mut r: R) -> Result<Self, ParseError> {
        let io = |e: std::io::Error| ParseError::MatrixDump(e.to_string());
        let mut header = [0u8; 16];
        r.read_exact(&mut header).map_err(io)?;
        if &header[..4] != DUMP_MAGIC {
            return Err(ParseError::MatrixDump("bad magic".into()));
        }
        let word = |k: usize| u32::from_le_bytes(header[k..k + 4].try_into().expect("4 bytes"));
        if word(4) != DUMP_VERSION {
            return Err(ParseError::MatrixDump(format!("unsupported version {}", word(4))));
        }
        let n = word(8) as usize;
        let flags = word(12);
        let mut buf = vec![0u8; n * n * 16];
        r.read_exact(&mut buf).map_err(io)?;
        let f = |k: usize| f64::from_le_bytes(buf[8 * k..8 * k + 8].try_into().expect("8 bytes"));
        let entries = Mat::from_fn(n, n, |i, j| {
            let k = 2 * (i * n + j);
            Complex64::new(f(k), f(k + 1))
        });
        Ok(Self {
            entries,
            hermitian: flags & FLAG_HERMITIAN != 0,
        })
    }
}

fn max_abs(m: &Mat<Complex64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

fn hermitian_defect(m: &Mat<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Tridiagonal position matrix of dimension `n_max + pad`.
pub fn position_matrix_1d(n_max: usize, omega: f64, pad: usize) -> Mat<f64> {
    let n = n_max + pad;
    let mut x = Mat::<f64>::zeros(n, n);
    for k in 0..n.saturating_sub(1) {
        let v = ((k + 1) as f64 / (2.0 * omega)).sqrt();
        x[(k, k + 1)] = v;
        x[(k + 1, k)] = v;
    }
    x
}

/// Exact `⟨m|x^k|n⟩` for `k = 0..=max_power`, `m, n < n_max`: powers are taken
/// on a matrix padded by `max_power` and then truncated.
pub fn position_powers(n_max: usize, omega: f64, max_power: usize) -> Vec<Mat<f64>> {
    let x = position_matrix_1d(n_max, omega, max_power);
    let big = n_max + max_power;
    let mut acc = Mat::<f64>::identity(big, big);
    let mut out = Vec::with_capacity(max_power + 1);
    for k in 0..=max_power {
        if k > 0 {
            acc = &acc * &x;
        }
        out.push(acc.subrows(0, n_max).subcols(0, n_max).to_owned());
    }
    out
}

/// `p²` in the ω-basis, from `p = i·sqrt(ω/2)(a† − a)`.
pub fn kinetic_matrix_1d(n_max: usize, omega: f64) -> Mat<f64> {
    let mut k = Mat::<f64>::zeros(n_max, n_max);
    for n in 0..n_max {
        k[(n, n)] = omega * (2 * n + 1) as f64 / 2.0;
        if n + 2 < n_max {
            let v = -0.5 * omega * (((n + 1) * (n + 2)) as f64).sqrt();
            k[(n, n + 2)] = v;
            k[(n + 2, n)] = v;
        }
    }
    k
}

/// Matrix of `e^{−2iθ}(p_x² + p_y²) + Σ c_ij e^{i(i+j)θ} x^i y^j`.
pub fn build_hamiltonian(poly: &PolynomialPotential, basis: &BasisSpec) -> Result<OperatorMatrix, BasisError> {
    basis.validate()?;
    for (i, j, _) in poly.terms() {
        if i + j > MAX_DEGREE {
            return Err(BasisError::DegreeTooHigh(i, j));
        }
    }
    let (nx, ny) = (basis.n_max_x, basis.n_max_y);
    let pad = MAX_DEGREE as usize;
    let xp = position_powers(nx, basis.omega_x, pad);
    let yp = position_powers(ny, basis.omega_y, pad);
    let kx = kinetic_matrix_1d(nx, basis.omega_x);
    let ky = kinetic_matrix_1d(ny, basis.omega_y);

    let dim = basis.dim();
    let mut h = Mat::<Complex64>::zeros(dim, dim);
    let kin_phase = Complex64::from_polar(1.0, -2.0 * basis.theta);
    // Kinetic terms: Kx ⊗ I + I ⊗ Ky.
    for a in 0..nx {
        for c in band(a, nx, 2) {
            let v = kx[(a, c)];
            if v != 0.0 {
                for b in 0..ny {
                    h[(basis.index(a, b), basis.index(c, b))] += kin_phase * v;
                }
            }
        }
    }
    for b in 0..ny {
        for d in band(b, ny, 2) {
            let v = ky[(b, d)];
            if v != 0.0 {
                for a in 0..nx {
                    h[(basis.index(a, b), basis.index(a, d))] += kin_phase * v;
                }
            }
        }
    }
    for (i, j, c) in poly.float_terms() {
        let coef = Complex64::from_polar(c, (i + j) as f64 * basis.theta);
        let (xi, yj) = (&xp[i as usize], &yp[j as usize]);
        for a in 0..nx {
            for cc in band(a, nx, i as usize) {
                let vx = xi[(a, cc)];
                if vx == 0.0 {
                    continue;
                }
                for b in 0..ny {
                    for d in band(b, ny, j as usize) {
                        let vy = yj[(b, d)];
                        if vy != 0.0 {
                            h[(basis.index(a, b), basis.index(cc, d))] += coef * (vx * vy);
                        }
                    }
                }
            }
        }
    }
    Ok(OperatorMatrix::from_complex(h))
}

/// `e^{−2iθ}p² + Σ_k coeffs[k] e^{ikθ} x^k` for a single coordinate.
pub fn build_hamiltonian_1d(coeffs: &[f64], n_max: usize, omega: f64, theta: f64) -> Result<OperatorMatrix, BasisError> {
    BasisSpec::anisotropic(n_max, 1, omega, 1.0, theta).validate()?;
    if coeffs.len() > MAX_DEGREE as usize + 1 {
        return Err(BasisError::DegreeTooHigh(coeffs.len() as u32 - 1, 0));
    }
    let xp = position_powers(n_max, omega, MAX_DEGREE as usize);
    let k = kinetic_matrix_1d(n_max, omega);
    let kin_phase = Complex64::from_polar(1.0, -2.0 * theta);
    let h = Mat::from_fn(n_max, n_max, |r, c| {
        let mut v = kin_phase * k[(r, c)];
        for (p, &cp) in coeffs.iter().enumerate() {
            if cp != 0.0 {
                v += Complex64::from_polar(cp, p as f64 * theta) * xp[p][(r, c)];
            }
        }
        v
    });
    Ok(OperatorMatrix::from_complex(h))
}

/// Column indices `c` with `|a − c| ≤ width`, clipped to `0..n`.
fn band(a: usize, n: usize, width: usize) -> std::ops::Range<usize> {
    a.saturating_sub(width)..(a + width + 1).min(n)
}

/// Positive root of `ω³ − ω − 3g = 0`, the frequency minimizing `⟨0|p² + x² + gx⁴|0⟩`.
pub fn optimal_omega(g: f64) -> f64 {
    assert!(g >= 0.0, "optimal_omega requires g >= 0");
    if g == 0.0 {
        return 1.0;
    }
    // Starting right of the root, Newton on this convex branch decreases monotonically.
    let f = |w: f64| w * w * w - w - 3.0 * g;
    let mut w = 1.0 + (3.0 * g).cbrt();
    for _ in 0..100 {
        let step = f(w) / (3.0 * w * w - 1.0);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w {
            break;
        }
    }
    w
}

/// Per-axis optimal frequencies from the pure `x⁴` and `y⁴` coefficients;
/// axes without a positive quartic term get `ω = 1`.
pub fn axis_omegas(poly: &PolynomialPotential) -> (f64, f64) {
    let pick = |c: f64| if c > 0.0 { optimal_omega(c) } else { 1.0 };
    (pick(poly.coefficient(4, 0).to_f64()), pick(poly.coefficient(0, 4).to_f64()))
}

/// Lowest `count` levels of `p² + x² + g x⁴` in an `n_max` basis at the optimal frequency.
pub fn quartic_levels_1d(g: f64, n_max: usize, count: usize) -> Result<Vec<f64>, crate::Error> {
    let omega = optimal_omega(g.max(0.0));
    let h = build_hamiltonian_1d(&[0.0, 0.0, 1.0, 0.0, g], n_max, omega, 0.0)?;
    let mut levels = crate::eig::eigenvalues_selfadjoint(&h)?;
    levels.truncate(count);
    Ok(levels)
}
