//! Riccati–Padé eigenvalues of even 1D potentials `V(x) = Σ v_m x^(2m)`.
//!
//! With `f(x) = s/x − ψ'/ψ = x Σ f_j x^(2j)` the Schrödinger equation
//! `−ψ'' + Vψ = Eψ` turns into the recursion
//!
//! ```text
//! (2m + 2s + 1) f_m = Σ_{j<m} f_j f_{m−1−j} − v_m + E·[m = 0]
//! ```
//!
//! and eigenvalues are the roots in `E` of the Hankel determinants
//! `H_D^d(E) = det[f_{i+j+d+1}]_{i,j<D}`, which converge as `D` grows.

use std::fmt;
use std::str::FromStr;

use dashu_float::round::mode::HalfAway;
use dashu_float::{DBig, FBig};
use dashu_int::IBig;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{ParseError, RpmError};

/// Binary floating point with per-value precision (in bits).
pub type HighPrec = FBig<HalfAway, 2>;

pub const DEFAULT_DIGITS: u32 = 80;
pub const DEFAULT_D_MAX: usize = 25;
const NEWTON_MAX_ITER: usize = 60;
/// Relative agreement of consecutive roots that switches on continuation.
const ATTACH_TOLERANCE: f64 = 1e-4;
/// Roots farther than this (relative to `max(1, |seed|)`) never attach.
const SEED_WINDOW: f64 = 0.05;

/// Extra working digits for determinant evaluation. Elimination on the Hankel
/// matrix loses roughly two digits per unit of `D`.
pub fn guard_digits(d_max: usize) -> u32 {
    2 * d_max as u32
}

pub fn bits_for_digits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize
}

fn with_bits(x: HighPrec, bits: usize) -> HighPrec {
    x.with_precision(bits).value()
}

pub fn hp_from_f64(x: f64, bits: usize) -> HighPrec {
    with_bits(HighPrec::try_from(x).expect("finite f64"), bits)
}

pub fn hp_from_int(n: i64, bits: usize) -> HighPrec {
    with_bits(HighPrec::from(IBig::from(n)), bits)
}

fn hp_from_bigint(n: &num_bigint::BigInt) -> HighPrec {
    HighPrec::from(IBig::from_str(&n.to_string()).expect("integer literal"))
}

pub fn hp_from_rational(r: &BigRational, bits: usize) -> HighPrec {
    with_bits(hp_from_bigint(r.numer()), bits) / with_bits(hp_from_bigint(r.denom()), bits)
}

/// Parses a decimal literal exactly, then rounds once to `bits`.
pub fn hp_from_decimal(s: &str, bits: usize) -> Result<HighPrec, ParseError> {
    Ok(hp_from_rational(&crate::coeff::parse_decimal_rational(s)?, bits))
}

pub fn hp_to_f64(x: &HighPrec) -> f64 {
    x.to_f64().value()
}

fn hp_abs(x: &HighPrec) -> HighPrec {
    if *x < HighPrec::ZERO {
        -x.clone()
    } else {
        x.clone()
    }
}

fn pow10(k: usize, bits: usize) -> HighPrec {
    with_bits(HighPrec::from(IBig::from(10u8).pow(k)), bits)
}

/// Rounds to `sig_digits` significant decimal digits; positional notation
/// for moderate exponents, `d.ddde±x` otherwise.
pub fn to_decimal_string(x: &HighPrec, sig_digits: usize) -> String {
    if *x == HighPrec::ZERO {
        return "0".into();
    }
    let d: DBig = x.clone().with_base::<10>().value().with_precision(sig_digits).value();
    let repr = d.repr();
    let sig = repr.significand();
    let neg = *sig < IBig::ZERO;
    let digits = if neg { (-sig.clone()).to_string() } else { sig.to_string() };
    let exp = repr.exponent();
    let n = digits.len() as isize;
    let lead = n - 1 + exp;
    let body = if (-6..=60).contains(&lead) {
        if exp >= 0 {
            format!("{digits}{}", "0".repeat(exp as usize))
        } else if n + exp > 0 {
            let p = (n + exp) as usize;
            format!("{}.{}", &digits[..p], &digits[p..])
        } else {
            format!("0.{}{digits}", "0".repeat((-(n + exp)) as usize))
        }
    } else if n == 1 {
        format!("{digits}e{lead}")
    } else {
        format!("{}.{}e{lead}", &digits[..1], &digits[1..])
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// `⌊−log₁₀(|a − b| / |a|)⌋`, clamped to `[0, cap]`.
pub fn agreeing_digits(a: &HighPrec, b: &HighPrec, cap: u32) -> u32 {
    let diff = hp_abs(&(a - b));
    if diff == HighPrec::ZERO {
        return cap;
    }
    let scale = hp_abs(a);
    if scale == HighPrec::ZERO {
        return 0;
    }
    let rel = hp_to_f64(&(diff / scale));
    let d = -rel.log10();
    if !d.is_finite() {
        return if rel == 0.0 { cap } else { 0 };
    }
    (d.floor().max(0.0) as u32).min(cap)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// `s` in `f = s/x − ψ'/ψ`.
    pub fn index(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RiccatiSeries {
    pub parity: Parity,
    /// Even-power potential coefficients `[v₀, v₁, v₂, …]`.
    pub v: Vec<HighPrec>,
    pub energy: HighPrec,
    /// `f_0 ..= f_{m_max}`.
    pub coeffs: Vec<HighPrec>,
}

pub fn riccati_coeffs(v: &[HighPrec], parity: Parity, energy: &HighPrec, m_max: usize, bits: usize) -> RiccatiSeries {
    let s = parity.index() as u64;
    let mut f: Vec<HighPrec> = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let mut acc = with_bits(HighPrec::ZERO, bits);
        // The convolution is symmetric; sum half of it twice.
        for j in 0..m / 2 {
            acc += &f[j] * &f[m - 1 - j];
        }
        acc = &acc + &acc;
        if m % 2 == 1 {
            let mid = &f[m / 2];
            acc += mid * mid;
        }
        if let Some(vm) = v.get(m) {
            acc -= vm;
        }
        if m == 0 {
            acc += energy;
        }
        f.push(acc / HighPrec::from(2 * m as u64 + 2 * s + 1));
    }
    RiccatiSeries {
        parity,
        v: v.to_vec(),
        energy: energy.clone(),
        coeffs: f,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HankelSpec {
    /// Determinant dimension `D`.
    pub dim: usize,
    /// Displacement `d`.
    pub displacement: usize,
    pub precision_digits: u32,
}

impl HankelSpec {
    /// Highest coefficient index the determinant reads.
    pub fn max_index(&self) -> usize {
        2 * self.dim - 1 + self.displacement
    }
}

/// `det[f_{i+j+d+1}]` by Gaussian elimination with partial pivoting.
pub fn hankel_det(series: &RiccatiSeries, spec: &HankelSpec) -> Result<HighPrec, RpmError> {
    let needed = spec.max_index();
    if series.coeffs.len() <= needed || spec.dim == 0 {
        return Err(RpmError::InsufficientCoefficients {
            needed,
            available: series.coeffs.len().saturating_sub(1),
        });
    }
    let n = spec.dim;
    let bits = bits_for_digits(spec.precision_digits);
    let off = spec.displacement + 1;
    let mut a: Vec<Vec<HighPrec>> = (0..n)
        .map(|i| (0..n).map(|j| with_bits(series.coeffs[i + j + off].clone(), bits)).collect())
        .collect();
    let mut det = hp_from_int(1, bits);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| hp_abs(&a[x][k]).partial_cmp(&hp_abs(&a[y][k])).expect("ordered"))
            .expect("non-empty");
        if a[p][k] == HighPrec::ZERO {
            return Ok(with_bits(HighPrec::ZERO, bits));
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot = &top[k][k];
        det *= pivot;
        for row in rest.iter_mut() {
            if row[k] == HighPrec::ZERO {
                continue;
            }
            let factor = &row[k] / pivot;
            for j in k + 1..n {
                let t = &factor * &top[k][j];
                row[j] -= t;
            }
        }
    }
    Ok(det)
}

/// Evaluates `H_D^d(E)` from scratch.
pub fn hankel_at(v: &[HighPrec], parity: Parity, energy: &HighPrec, spec: &HankelSpec) -> Result<HighPrec, RpmError> {
    let bits = bits_for_digits(spec.precision_digits);
    let series = riccati_coeffs(v, parity, energy, spec.max_index(), bits);
    hankel_det(&series, spec)
}

#[derive(Clone, Debug)]
pub struct RpmProblem {
    /// Exact even-power potential coefficients `[v₀, v₁, v₂, …]`.
    pub v: Vec<BigRational>,
    pub parity: Parity,
    pub displacement: usize,
    pub d_max: usize,
    /// Starting guess, e.g. a variational eigenvalue.
    pub seed: f64,
    /// Requested precision; arithmetic runs with [`guard_digits`] more.
    pub precision_digits: u32,
}

impl RpmProblem {
    pub fn working_digits(&self) -> u32 {
        self.precision_digits + guard_digits(self.d_max)
    }

    /// `p² + x² + g x⁴` with the default displacement, `D_max` and precision.
    pub fn quartic(g: BigRational, parity: Parity, seed: f64) -> Self {
        use num_traits::{One, Zero};
        Self {
            v: vec![BigRational::zero(), BigRational::one(), g],
            parity,
            displacement: 0,
            d_max: DEFAULT_D_MAX,
            seed,
            precision_digits: DEFAULT_DIGITS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrailPoint {
    pub dim: usize,
    pub energy: HighPrec,
}

#[derive(Clone, Debug)]
pub struct RpmSolution {
    pub energy: HighPrec,
    /// Digits shared by the roots for `D_max` and `D_max − 1`.
    pub stabilized_digits: u32,
    pub trail: Vec<TrailPoint>,
    /// Set when the last root difference grew: convergence stalled before `D_max`.
    pub non_monotone_trail: bool,
}

impl RpmSolution {
    pub fn energy_string(&self, digits: usize) -> String {
        to_decimal_string(&self.energy, digits)
    }

    /// `|E_D − E_{D−1}|` as f64, for `D = 3..=D_max`.
    pub fn trail_differences(&self) -> Vec<f64> {
        self.trail
            .windows(2)
            .map(|w| hp_to_f64(&hp_abs(&(&w[1].energy - &w[0].energy))))
            .collect()
    }

    pub fn report(&self, problem: &RpmProblem) -> TrailReport {
        let digits = problem.precision_digits as usize;
        let g = problem
            .v
            .get(2)
            .map(|g| to_decimal_string(&hp_from_rational(g, bits_for_digits(problem.precision_digits)), digits))
            .unwrap_or_else(|| "0".into());
        TrailReport {
            g,
            s: problem.parity.index(),
            d: problem.displacement,
            roots: self
                .trail
                .iter()
                .map(|t| TrailRoot {
                    dim: t.dim,
                    energy: to_decimal_string(&t.energy, digits),
                })
                .collect(),
            stabilized_digits: self.stabilized_digits,
        }
    }
}

/// JSON trail: `{"g":…,"s":…,"d":…,"roots":[{"D":…,"E":"…"}],"stabilized_digits":…}`.
#[derive(Clone, Debug, Serialize)]
pub struct TrailReport {
    pub g: String,
    pub s: u32,
    pub d: usize,
    pub roots: Vec<TrailRoot>,
    pub stabilized_digits: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrailRoot {
    #[serde(rename = "D")]
    pub dim: usize,
    #[serde(rename = "E")]
    pub energy: String,
}

/// Newton iteration on `H_D^d(E) = 0` with a central-difference derivative.
fn newton_root(v: &[HighPrec], parity: Parity, spec: &HankelSpec, start: &HighPrec) -> Result<HighPrec, RpmError> {
    let digits = spec.precision_digits as usize;
    let bits = bits_for_digits(spec.precision_digits);
    let one = hp_from_int(1, bits);
    let scale = |e: &HighPrec| {
        let a = hp_abs(e);
        if a > one {
            a
        } else {
            one.clone()
        }
    };
    let start_scale = scale(start);
    let h_rel = one.clone() / pow10(digits / 3, bits);
    let tol_rel = one.clone() / pow10(digits.saturating_sub(6), bits);
    let stall_rel = one.clone() / pow10(digits / 4, bits);
    let two = hp_from_int(2, bits);

    let mut e = with_bits(start.clone(), bits);
    let mut prev_step: Option<HighPrec> = None;
    let mut prev_ratio: Option<f64> = None;
    let mut multiplicity = 1.0;
    for _ in 0..NEWTON_MAX_ITER {
        let sc = scale(&e);
        let h = &h_rel * &sc;
        let f = hankel_at(v, parity, &e, spec)?;
        let fp = hankel_at(v, parity, &(&e + &h), spec)?;
        let fm = hankel_at(v, parity, &(&e - &h), spec)?;
        let deriv = (fp - fm) / (&two * &h);
        if deriv == HighPrec::ZERO {
            return Err(RpmError::NewtonDivergence { dim: spec.dim });
        }
        let step = f / deriv;
        let size = hp_abs(&step);
        e -= &step * &hp_from_f64(multiplicity, bits);
        if size <= &tol_rel * &sc {
            return Ok(e);
        }
        // Rounding noise in the determinant sets a floor below which steps
        // stop shrinking.
        if let Some(prev) = &prev_step {
            if size > prev / &two && size <= &stall_rel * &sc {
                return Ok(e);
            }
        }
        if size > &start_scale * &hp_from_int(10, bits) {
            return Err(RpmError::NewtonDivergence { dim: spec.dim });
        }
        // Clustered roots look like a root of multiplicity m from outside the
        // cluster: plain steps shrink by (m−1)/m, so two plain steps with the
        // same ratio r set the next step to m = 1/(1−r) times Newton's.
        if multiplicity != 1.0 {
            multiplicity = 1.0;
            prev_ratio = None;
        } else if let Some(prev) = &prev_step {
            let ratio = hp_to_f64(&(&size / prev));
            if let Some(r) = prev_ratio {
                if (0.3..0.99).contains(&ratio) && (ratio - r).abs() < 0.05 {
                    multiplicity = (1.0 / (1.0 - ratio)).round();
                }
            }
            prev_ratio = Some(ratio);
        }
        prev_step = Some(size);
    }
    Err(RpmError::NewtonDivergence { dim: spec.dim })
}

/// Follows the Hankel root from `D = 2` to `D_max`, each root seeding the next.
pub fn rpm_eigenvalue(problem: &RpmProblem) -> Result<RpmSolution, RpmError> {
    if problem.d_max < 3 {
        return Err(RpmError::InvalidSetup("D_max must be >= 3".into()));
    }
    if !problem.seed.is_finite() {
        return Err(RpmError::InvalidSetup("seed must be finite".into()));
    }
    if problem.precision_digits < 10 {
        return Err(RpmError::InvalidSetup("precision must be >= 10 digits".into()));
    }
    let working = problem.working_digits();
    let bits = bits_for_digits(working);
    let v: Vec<HighPrec> = problem.v.iter().map(|c| hp_from_rational(c, bits)).collect();
    let seed = hp_from_f64(problem.seed, bits);
    let near_seed = |e: &HighPrec| {
        let scale = problem.seed.abs().max(1.0);
        (hp_to_f64(e) - problem.seed).abs() <= SEED_WINDOW * scale
    };
    // Low-order determinants may lack a root near an excited-state seed, so
    // every D starts from the seed until two consecutive roots near it agree;
    // from then on each D starts from the previous root.
    let mut attached = false;
    let mut trail: Vec<TrailPoint> = Vec::with_capacity(problem.d_max - 1);
    let mut last_failure = None;
    for dim in 2..=problem.d_max {
        let spec = HankelSpec {
            dim,
            displacement: problem.displacement,
            precision_digits: working,
        };
        let root = if attached {
            let current = &trail[trail.len() - 1].energy;
            newton_root(&v, problem.parity, &spec, current).or_else(|_| newton_root(&v, problem.parity, &spec, &seed))
        } else {
            newton_root(&v, problem.parity, &spec, &seed)
        };
        let root = match root {
            Ok(r) => r,
            Err(e) if attached => return Err(e),
            Err(e) => {
                last_failure = Some(e);
                continue;
            }
        };
        if !attached {
            if let Some(prev) = trail.last() {
                attached = near_seed(&root)
                    && hp_to_f64(&hp_abs(&(&root - &prev.energy))) <= ATTACH_TOLERANCE * hp_to_f64(&hp_abs(&root));
            }
        }
        trail.push(TrailPoint { dim, energy: root });
    }
    if trail.len() < 2 || trail[trail.len() - 1].dim != problem.d_max {
        return Err(last_failure.unwrap_or(RpmError::NewtonDivergence { dim: problem.d_max }));
    }
    let last = &trail[trail.len() - 1].energy;
    let prev = &trail[trail.len() - 2].energy;
    let stabilized_digits = agreeing_digits(last, prev, problem.precision_digits);
    let mut solution = RpmSolution {
        energy: last.clone(),
        stabilized_digits,
        trail,
        non_monotone_trail: false,
    };
    let diffs = solution.trail_differences();
    solution.non_monotone_trail = diffs.len() >= 2 && diffs[diffs.len() - 1] > diffs[diffs.len() - 2];
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    const BITS: usize = 200;

    fn hp(x: i64) -> HighPrec {
        hp_from_int(x, BITS)
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn harmonic_ground_state_is_gaussian() {
        let s = riccati_coeffs(&[hp(0), hp(1)], Parity::Even, &hp(1), 5, BITS);
        assert_eq!(s.coeffs[0], hp(1));
        assert!(s.coeffs[1..].iter().all(|c| *c == HighPrec::ZERO));
    }

    #[test]
    fn harmonic_first_excited_state() {
        let s = riccati_coeffs(&[hp(0), hp(1)], Parity::Odd, &hp(3), 3, BITS);
        assert_eq!(s.coeffs[0], hp(1));
        assert!(s.coeffs[1..].iter().all(|c| *c == HighPrec::ZERO));
    }

    #[test]
    fn hand_recursion_g4() {
        let s = riccati_coeffs(&[hp(0), hp(1), hp(4)], Parity::Even, &hp(2), 2, BITS);
        assert_eq!(s.coeffs[0], hp(2));
        assert_eq!(s.coeffs[1], hp(1));
        assert_eq!(s.coeffs[2], hp(0));
    }

    #[test]
    fn hankel_small_cases() {
        let harmonic = riccati_coeffs(&[hp(0), hp(1)], Parity::Even, &hp(1), 12, BITS);
        for dim in 1..=5 {
            let spec = HankelSpec {
                dim,
                displacement: 0,
                precision_digits: 60,
            };
            assert_eq!(hankel_det(&harmonic, &spec).unwrap(), HighPrec::ZERO);
        }
        let s = riccati_coeffs(&[hp(0), hp(1), hp(4)], Parity::Even, &hp_from_decimal("1.7", BITS).unwrap(), 4, BITS);
        let one = HankelSpec {
            dim: 1,
            displacement: 0,
            precision_digits: 60,
        };
        assert_eq!(hankel_det(&s, &one).unwrap(), s.coeffs[1]);
        let too_big = HankelSpec { dim: 3, ..one };
        assert_eq!(
            hankel_det(&s, &too_big).unwrap_err(),
            RpmError::InsufficientCoefficients { needed: 5, available: 4 }
        );
    }

    #[test]
    fn hankel_sign_change_brackets_ground_state() {
        let v = [hp(0), hp(1), hp(4)];
        let spec = HankelSpec {
            dim: 2,
            displacement: 0,
            precision_digits: 60,
        };
        // The D = 2 root sits at 1.89265; from D = 3 on it lies in [1.9, 1.91].
        let lo = hankel_at(&v, Parity::Even, &hp_from_decimal("1.85", BITS).unwrap(), &spec).unwrap();
        let hi = hankel_at(&v, Parity::Even, &hp_from_decimal("1.9", BITS).unwrap(), &spec).unwrap();
        assert!((lo < HighPrec::ZERO) != (hi < HighPrec::ZERO));
        let spec3 = HankelSpec { dim: 3, ..spec };
        let a = hankel_at(&v, Parity::Even, &hp_from_decimal("1.9", BITS).unwrap(), &spec3).unwrap();
        let b = hankel_at(&v, Parity::Even, &hp_from_decimal("1.91", BITS).unwrap(), &spec3).unwrap();
        assert!((a < HighPrec::ZERO) != (b < HighPrec::ZERO));
    }

    #[test]
    fn low_order_roots() {
        let mut p = RpmProblem::quartic(rat(4), Parity::Even, 1.9);
        p.d_max = 3;
        p.precision_digits = 40;
        let sol = rpm_eigenvalue(&p).unwrap();
        assert_eq!(sol.trail[0].dim, 2);
        assert_eq!(to_decimal_string(&sol.trail[0].energy, 20), "1.8926479448605058775");
        assert_eq!(to_decimal_string(&sol.trail[1].energy, 20), "1.9030221734650886007");
    }

    #[test]
    fn decimal_formatting() {
        let x = hp_from_decimal("1.90313694545900002229385", BITS).unwrap();
        assert_eq!(to_decimal_string(&x, 12), "1.90313694546");
        assert_eq!(to_decimal_string(&hp_from_decimal("-0.000459014", BITS).unwrap(), 6), "-0.000459014");
        assert_eq!(to_decimal_string(&hp_from_decimal("133.6", BITS).unwrap(), 10), "133.6");
        assert_eq!(to_decimal_string(&hp_from_decimal("2.5e-30", BITS).unwrap(), 5), "2.5e-30");
        assert_eq!(to_decimal_string(&hp(2_000_000), 10), "2000000");
    }

    #[test]
    fn agreeing_digits_counts() {
        let a = hp_from_decimal("1.2345678", BITS).unwrap();
        let b = hp_from_decimal("1.2345600", BITS).unwrap();
        assert_eq!(agreeing_digits(&a, &b, 80), 5);
        assert_eq!(agreeing_digits(&a, &a, 80), 80);
    }

    #[test]
    fn invalid_setups() {
        let mut p = RpmProblem::quartic(rat(4), Parity::Even, 1.9);
        p.d_max = 2;
        assert!(matches!(rpm_eigenvalue(&p), Err(RpmError::InvalidSetup(_))));
        p.d_max = 5;
        p.seed = f64::NAN;
        assert!(matches!(rpm_eigenvalue(&p), Err(RpmError::InvalidSetup(_))));
    }
}
