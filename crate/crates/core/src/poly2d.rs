//! Bivariate polynomial potentials with exact ℚ(√2) coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::{format_rational, parse_rational, ExactCoeff};
use crate::eig::polynomial_roots;
use crate::error::{ParseError, PolyError};
use crate::map::OrthogonalMap2;

/// Canonical polynomial `Σ c_ij x^i y^j`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PolynomialPotential {
    terms: BTreeMap<(u32, u32), ExactCoeff>,
}

impl PolynomialPotential {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Sums repeated monomials and drops zeros.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, ExactCoeff)>,
    {
        let mut p = Self::zero();
        for (i, j, c) in terms {
            p.add_term(i, j, &c);
        }
        p
    }

    /// `x² + y²`.
    pub fn harmonic() -> Self {
        Self::from_terms([(2, 0, ExactCoeff::one()), (0, 2, ExactCoeff::one())])
    }

    pub fn monomial(i: u32, j: u32, c: ExactCoeff) -> Self {
        Self::from_terms([(i, j, c)])
    }

    fn add_term(&mut self, i: u32, j: u32, c: &ExactCoeff) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((i, j)).or_insert_with(ExactCoeff::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coefficient(&self, i: u32, j: u32) -> ExactCoeff {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(ExactCoeff::zero)
    }

    /// Terms in ascending `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &ExactCoeff)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum total degree (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn homogeneous_part(&self, degree: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(&(i, j), _)| i + j == degree)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &ExactCoeff) -> Self {
        Self::from_terms(self.terms().map(|(i, j, v)| (i, j, v * c)))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (i, j, c) in rhs.terms() {
            out.add_term(i, j, c);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&-ExactCoeff::one()))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (i, j, a) in self.terms() {
            for (k, l, b) in rhs.terms() {
                out.add_term(i + k, j + l, &(a * b));
            }
        }
        out
    }

    pub fn float_terms(&self) -> Vec<(u32, u32, f64)> {
        self.terms().map(|(i, j, c)| (i, j, c.to_f64())).collect()
    }

    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        self.terms()
            .map(|(i, j, c)| c.to_f64() * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }

    /// Exact expansion of `V(M·(x, y))`.
    pub fn apply_linear_map(&self, map: &OrthogonalMap2) -> Self {
        let m = map.entries();
        let lin = |row: &[ExactCoeff; 2]| {
            Self::from_terms([(1, 0, row[0].clone()), (0, 1, row[1].clone())])
        };
        let (lx, ly) = (lin(&m[0]), lin(&m[1]));
        let max_deg = self.degree() as usize;
        let powers = |l: &Self| {
            let mut v = vec![Self::monomial(0, 0, ExactCoeff::one())];
            for k in 1..=max_deg {
                let next = v[k - 1].mul(l);
                v.push(next);
            }
            v
        };
        let (px, py) = (powers(&lx), powers(&ly));
        let mut out = Self::zero();
        for (i, j, c) in self.terms() {
            let t = px[i as usize].mul(&py[j as usize]).scale(c);
            out = out.add(&t);
        }
        out
    }

    /// True iff no term mixes both coordinates.
    pub fn is_separable(&self) -> bool {
        self.terms.keys().all(|&(i, j)| i == 0 || j == 0)
    }

    /// Coefficients `q_k` of `x^(4−k) y^k` in the degree-4 part.
    fn quartic_coeffs(&self) -> [ExactCoeff; 5] {
        std::array::from_fn(|k| self.coefficient(4 - k as u32, k as u32))
    }

    /// Minimum of the quartic part on the unit circle.
    ///
    /// Stationary points of `Q(cos φ, sin φ)` are the real roots of
    /// `(1 + t²)P'(t) − 4tP(t)` with `t = tan φ` and `P(t) = Σ q_k t^k`, plus the
    /// direction `φ = π/2`.
    pub fn quartic_form_min(&self) -> Result<QuarticMin, PolyError> {
        let q = self.quartic_coeffs();
        if q.iter().all(Zero::is_zero) {
            return Err(PolyError::NoQuarticPart);
        }
        let qf: Vec<f64> = q.iter().map(ExactCoeff::to_f64).collect();
        let form = |phi: f64| quartic_on_circle(&qf, phi);

        let two = ExactCoeff::from_int(2);
        let three = ExactCoeff::from_int(3);
        let four = ExactCoeff::from_int(4);
        let mut r = vec![
            q[1].clone(),
            &two * &q[2] - &four * &q[0],
            &three * &q[3] - &three * &q[1],
            &four * &q[4] - &two * &q[2],
            -q[3].clone(),
        ];
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }

        let mut candidates = vec![0.0, FRAC_PI_2];
        if r.len() > 1 {
            let rf: Vec<f64> = r.iter().map(ExactCoeff::to_f64).collect();
            match polynomial_roots(&rf) {
                Ok(roots) if roots.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
                    for z in roots {
                        if z.im.abs() <= 1e-6 * (1.0 + z.re.abs()) {
                            candidates.push(polish_real_root(&rf, z.re).atan());
                        }
                    }
                }
                _ => candidates.push(scan_minimum(&form)),
            }
        }
        let mut best = QuarticMin {
            min_value: f64::INFINITY,
            direction_angle: 0.0,
        };
        candidates.sort_by(|a, b| a.total_cmp(b));
        for phi in candidates {
            let v = form(phi);
            if v < best.min_value {
                best = QuarticMin {
                    min_value: v,
                    direction_angle: phi,
                };
            }
        }
        Ok(best)
    }

    /// Sign classification of the quartic form on the unit circle.
    pub fn is_bounded_below(&self) -> Boundedness {
        let Ok(m) = self.quartic_form_min() else {
            return Boundedness::Marginal;
        };
        let q = self.quartic_coeffs();
        let scale = q.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max);
        let tol = 1e-10 * scale;
        if m.min_value < -tol {
            return Boundedness::Unbounded;
        }
        if m.min_value > tol {
            return Boundedness::Bounded;
        }
        // A non-negative form touches zero only at a repeated real root of
        // P(t), or at φ = π/2 when q₄ = q₃ = 0.
        let vertical_double = q[4].is_zero() && q[3].is_zero();
        let p: Vec<ExactCoeff> = q.to_vec();
        let dp: Vec<ExactCoeff> = (1..p.len())
            .map(|k| &ExactCoeff::from_int(k as i64) * &p[k])
            .collect();
        let repeated = upoly_degree(&upoly_gcd(p, dp)) > 0;
        if vertical_double || repeated {
            Boundedness::Marginal
        } else if m.min_value < 0.0 {
            Boundedness::Unbounded
        } else {
            Boundedness::Bounded
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolyJson::from(self)).expect("polynomial json")
    }

    pub fn from_json(s: &str) -> Result<Self, ParseError> {
        let raw: PolyJson = serde_json::from_str(s).map_err(|e| ParseError::Json(e.to_string()))?;
        raw.try_into()
    }
}

fn quartic_on_circle(q: &[f64], phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    (0..5).map(|k| q[k] * c.powi(4 - k as i32) * s.powi(k as i32)).sum()
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn polish_real_root(coeffs: &[f64], mut t: f64) -> f64 {
    let deriv: Vec<f64> = (1..coeffs.len()).map(|k| k as f64 * coeffs[k]).collect();
    for _ in 0..8 {
        let d = horner(&deriv, t);
        if d == 0.0 {
            break;
        }
        let step = horner(coeffs, t) / d;
        if !step.is_finite() {
            break;
        }
        t -= step;
    }
    t
}

/// 4096-point scan of (−π/2, π/2] refined by golden-section search.
fn scan_minimum(f: &impl Fn(f64) -> f64) -> f64 {
    const N: usize = 4096;
    let h = PI / N as f64;
    let (k, _) = (0..N)
        .map(|k| (k, f(-FRAC_PI_2 + h * (k + 1) as f64)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty scan");
    let centre = -FRAC_PI_2 + h * (k + 1) as f64;
    golden_section(f, centre - h, centre + h)
}

pub(crate) fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..100 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}

// Univariate polynomials over ℚ(√2), coefficients in ascending order.

fn upoly_trim(mut p: Vec<ExactCoeff>) -> Vec<ExactCoeff> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn upoly_degree(p: &[ExactCoeff]) -> usize {
    p.len().saturating_sub(1)
}

fn upoly_rem(mut a: Vec<ExactCoeff>, b: &[ExactCoeff]) -> Vec<ExactCoeff> {
    let lead_inv = b.last().and_then(ExactCoeff::inverse).expect("non-zero divisor");
    while a.len() >= b.len() {
        let shift = a.len() - b.len();
        let f = a.last().expect("non-empty") * &lead_inv;
        for (k, bk) in b.iter().enumerate() {
            a[shift + k] -= &(&f * bk);
        }
        a.pop();
        a = upoly_trim(a);
    }
    a
}

fn upoly_gcd(a: Vec<ExactCoeff>, b: Vec<ExactCoeff>) -> Vec<ExactCoeff> {
    let (mut a, mut b) = (upoly_trim(a), upoly_trim(b));
    while !b.is_empty() {
        let r = upoly_rem(a, &b);
        a = b;
        b = r;
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuarticMin {
    pub min_value: f64,
    /// Minimizing direction `(cos φ, sin φ)`, `φ ∈ (−π/2, π/2]`.
    pub direction_angle: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Boundedness {
    Bounded,
    Unbounded,
    /// The quartic form vanishes along some ray; lower-degree terms would decide.
    Marginal,
}

/// `x² + y² + λ(a_xx x⁴ + 4b_xy x³y + 6c_xy x²y² + 4b_yx xy³ + a_yy y⁴)`.
pub fn make_quartic(
    a_xx: &ExactCoeff,
    b_xy: &ExactCoeff,
    c_xy: &ExactCoeff,
    b_yx: &ExactCoeff,
    a_yy: &ExactCoeff,
    lambda: &ExactCoeff,
) -> PolynomialPotential {
    let k = |n: i64, c: &ExactCoeff| &(&ExactCoeff::from_int(n) * c) * lambda;
    PolynomialPotential::harmonic().add(&PolynomialPotential::from_terms([
        (4, 0, k(1, a_xx)),
        (3, 1, k(4, b_xy)),
        (2, 2, k(6, c_xy)),
        (1, 3, k(4, b_yx)),
        (0, 4, k(1, a_yy)),
    ]))
}

/// One of the five parameter sets of the quartic family.
#[derive(Clone, Debug)]
pub struct CasePreset {
    pub id: u8,
    pub lambda: ExactCoeff,
    pub potential: PolynomialPotential,
}

impl CasePreset {
    pub fn new(id: u8, lambda: ExactCoeff) -> Result<Self, PolyError> {
        let (a_xx, b_xy, c_xy, b_yx, a_yy) = match id {
            1 => (1, 1, 1, 1, 1),
            2 => (1, 0, 1, 0, 1),
            3 => (0, 1, 1, 1, 0),
            4 => (1, -1, 1, -1, 1),
            5 => (0, 0, 1, 0, 0),
            other => return Err(PolyError::UnknownCase(other)),
        };
        let c = ExactCoeff::from_int;
        let potential = make_quartic(&c(a_xx), &c(b_xy), &c(c_xy), &c(b_yx), &c(a_yy), &lambda);
        Ok(Self {
            id,
            lambda,
            potential,
        })
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64()
    }

    /// The coordinate map the analysis applies to this case: the decoupling
    /// map for case 1, the π/4 axis rotation for cases 2 and 3, and the
    /// parity flip relating case 4 to case 1.
    pub fn reference_map(&self) -> Option<OrthogonalMap2> {
        let h = ExactCoeff::inv_sqrt2();
        match self.id {
            1 => Some(
                OrthogonalMap2::new([[h.clone(), -h.clone()], [-h.clone(), -h]], "U_case1")
                    .expect("orthogonal"),
            ),
            2 | 3 => Some(OrthogonalMap2::rotation_quarter(1).with_label("U_pi/4")),
            4 => Some(OrthogonalMap2::flip_x()),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    i: u32,
    j: u32,
    p: String,
    q: String,
}

impl From<&PolynomialPotential> for PolyJson {
    fn from(poly: &PolynomialPotential) -> Self {
        PolyJson {
            terms: poly
                .terms()
                .map(|(i, j, c)| TermJson {
                    i,
                    j,
                    p: format_rational(c.rational_part()),
                    q: format_rational(c.sqrt2_part()),
                })
                .collect(),
        }
    }
}

impl TryFrom<PolyJson> for PolynomialPotential {
    type Error = ParseError;
    fn try_from(raw: PolyJson) -> Result<Self, ParseError> {
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            let c = ExactCoeff::new(parse_rational(&t.p)?, parse_rational(&t.q)?);
            terms.push((t.i, t.j, c));
        }
        Ok(PolynomialPotential::from_terms(terms))
    }
}

fn monomial_str(i: u32, j: u32) -> String {
    let var = |v: &str, e: u32| match e {
        0 => String::new(),
        1 => v.to_string(),
        e => format!("{v}^{e}"),
    };
    match (i, j) {
        (0, 0) => String::new(),
        (_, 0) => var("x", i),
        (0, _) => var("y", j),
        _ => format!("{}*{}", var("x", i), var("y", j)),
    }
}

impl fmt::Display for PolynomialPotential {
    /// Ascending total degree, descending x power within a degree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by(|a, b| match (a.0 + a.1).cmp(&(b.0 + b.1)) {
            Ordering::Equal => b.0.cmp(&a.0),
            o => o,
        });
        for (n, (i, j)) in keys.into_iter().enumerate() {
            let c = &self.terms[&(i, j)];
            let neg = c.signum() == Ordering::Less;
            let mag = c.abs();
            let mono = monomial_str(i, j);
            let coeff = if mag.is_rational() || mag.rational_part().is_zero() {
                mag.to_string()
            } else {
                format!("({mag})")
            };
            let body = match (mag.is_one(), mono.is_empty()) {
                (true, false) => mono,
                (_, true) => coeff,
                (false, false) => format!("{coeff}*{mono}"),
            };
            match (n, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}
