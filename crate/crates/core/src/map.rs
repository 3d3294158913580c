//! Exact 2×2 orthogonal coordinate maps.
//!
//! A map `M` acts on a potential by substitution, `V ↦ V(M·(x, y))`, so
//! composing substitutions corresponds to the matrix product.

use std::fmt;

use num_traits::{One, Zero};

use crate::coeff::ExactCoeff;
use crate::error::PolyError;

#[derive(Clone, Debug)]
pub struct OrthogonalMap2 {
    m: [[ExactCoeff; 2]; 2],
    label: String,
}

/// Equality compares entries only; labels are cosmetic.
impl PartialEq for OrthogonalMap2 {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}

impl Eq for OrthogonalMap2 {}

/// `cos(k·π/4)` exactly.
fn cos_quarter(k: i32) -> ExactCoeff {
    match k.rem_euclid(8) {
        0 => ExactCoeff::one(),
        1 | 7 => ExactCoeff::inv_sqrt2(),
        2 | 6 => ExactCoeff::zero(),
        3 | 5 => -ExactCoeff::inv_sqrt2(),
        _ => -ExactCoeff::one(),
    }
}

fn sin_quarter(k: i32) -> ExactCoeff {
    cos_quarter(k - 2)
}

fn pi_label(k: i32, den: i32) -> String {
    let g = num_integer::gcd(k, den);
    let (n, d) = (k / g, den / g);
    match (n, d) {
        (0, _) => "0".into(),
        (1, 1) => "pi".into(),
        (n, 1) => format!("{n}pi"),
        (1, d) => format!("pi/{d}"),
        (n, d) => format!("{n}pi/{d}"),
    }
}

impl OrthogonalMap2 {
    /// Checks `MᵀM = I` exactly.
    pub fn new(m: [[ExactCoeff; 2]; 2], label: impl Into<String>) -> Result<Self, PolyError> {
        let label = label.into();
        let map = Self { m, label };
        if map.is_orthogonal() {
            Ok(map)
        } else {
            Err(PolyError::NonOrthogonalMap(map.label))
        }
    }

    fn new_trusted(m: [[ExactCoeff; 2]; 2], label: String) -> Self {
        debug_assert!(Self { m: m.clone(), label: String::new() }.is_orthogonal());
        Self { m, label }
    }

    pub fn identity() -> Self {
        Self::rotation_quarter(0)
    }

    /// Rotation of the coordinate axes by `k·π/4`:
    /// `(x, y) ↦ (x cos φ + y sin φ, −x sin φ + y cos φ)`.
    pub fn rotation_quarter(k: i32) -> Self {
        let k = k.rem_euclid(8);
        let (c, s) = (cos_quarter(k), sin_quarter(k));
        let label = if k == 0 {
            "E".to_string()
        } else {
            format!("R({})", pi_label(k, 4))
        };
        Self::new_trusted([[c.clone(), s.clone()], [-s, c]], label)
    }

    /// Reflection through the line at angle `k·π/8` from the x axis.
    pub fn reflection_eighth(k: i32) -> Self {
        let k = k.rem_euclid(8);
        let (c, s) = (cos_quarter(k), sin_quarter(k));
        Self::new_trusted(
            [[c.clone(), s.clone()], [s, -c]],
            format!("sigma({})", pi_label(k, 8)),
        )
    }

    /// The order-16 dihedral group: 8 rotations by multiples of π/4 followed by
    /// 8 reflections.
    pub fn dihedral16() -> Vec<Self> {
        (0..8)
            .map(Self::rotation_quarter)
            .chain((0..8).map(Self::reflection_eighth))
            .collect()
    }

    /// `(x, y) ↦ (−x, y)`.
    pub fn flip_x() -> Self {
        Self::reflection_eighth(4).with_label("flip_x")
    }

    /// `(x, y) ↦ (x, −y)`.
    pub fn flip_y() -> Self {
        Self::reflection_eighth(0).with_label("flip_y")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn entries(&self) -> &[[ExactCoeff; 2]; 2] {
        &self.m
    }

    pub fn entry(&self, r: usize, c: usize) -> &ExactCoeff {
        &self.m[r][c]
    }

    pub fn is_orthogonal(&self) -> bool {
        let t = self.mul_raw(&self.transpose_raw(), &self.m);
        t == [
            [ExactCoeff::one(), ExactCoeff::zero()],
            [ExactCoeff::zero(), ExactCoeff::one()],
        ]
    }

    pub fn determinant(&self) -> ExactCoeff {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Inverse of an orthogonal map.
    pub fn transpose(&self) -> Self {
        Self::new_trusted(self.transpose_raw(), format!("{}^T", self.label))
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &Self) -> Self {
        Self::new_trusted(
            self.mul_raw(&self.m, &rhs.m),
            format!("{}*{}", self.label, rhs.label),
        )
    }

    /// `self · u · selfᵀ`.
    pub fn conjugate(&self, u: &Self) -> Self {
        let m = self.mul_raw(&self.mul_raw(&self.m, &u.m), &self.transpose_raw());
        Self::new_trusted(m, u.label.clone())
    }

    pub fn apply_f64(&self, x: f64, y: f64) -> (f64, f64) {
        let f = self.to_f64();
        (f[0][0] * x + f[0][1] * y, f[1][0] * x + f[1][1] * y)
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [
            [self.m[0][0].to_f64(), self.m[0][1].to_f64()],
            [self.m[1][0].to_f64(), self.m[1][1].to_f64()],
        ]
    }

    fn transpose_raw(&self) -> [[ExactCoeff; 2]; 2] {
        [
            [self.m[0][0].clone(), self.m[1][0].clone()],
            [self.m[0][1].clone(), self.m[1][1].clone()],
        ]
    }

    fn mul_raw(
        &self,
        a: &[[ExactCoeff; 2]; 2],
        b: &[[ExactCoeff; 2]; 2],
    ) -> [[ExactCoeff; 2]; 2] {
        let e = |r: usize, c: usize| &a[r][0] * &b[0][c] + &a[r][1] * &b[1][c];
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    }
}

impl fmt::Display for OrthogonalMap2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: (x, y) -> ({}, {})",
            self.label,
            linear_form(&self.m[0]),
            linear_form(&self.m[1])
        )
    }
}

fn linear_form(row: &[ExactCoeff; 2]) -> String {
    let mut out = String::new();
    for (c, v) in row.iter().zip(["x", "y"]) {
        if c.is_zero() {
            continue;
        }
        let s = c.to_string();
        let (neg, body) = match s.strip_prefix('-') {
            Some(b) => (true, b.to_string()),
            None => (false, s),
        };
        let term = if body == "1" { v.to_string() } else { format!("{body}*{v}") };
        if out.is_empty() {
            out = if neg { format!("-{term}") } else { term };
        } else {
            out.push_str(if neg { " - " } else { " + " });
            out.push_str(&term);
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}
