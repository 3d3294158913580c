#![allow(dead_code)]

use anharmonic::rpm::{hp_from_int, HighPrec};
use faer::Mat;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::Rng;

/// Taylor coefficients of `−ψ'/ψ` from the power series of `ψ` itself:
/// `ψ = Σ a_k x^(2k+s)` with
/// `(2n+2+s)(2n+1+s) a_{n+1} = Σ_{m≤n} v_m a_{n−m} − E a_n`,
/// then `Σ f_j u^j = −2 φ'(u) / φ(u)` for `φ(u) = Σ a_k u^k`.
pub fn series_oracle(v: &[HighPrec], s: u64, e: &HighPrec, terms: usize, bits: usize) -> Vec<HighPrec> {
    let mut a = vec![hp_from_int(1, bits)];
    for n in 0..=terms {
        let mut rhs = -(e * &a[n]);
        for (m, vm) in v.iter().enumerate().take(n + 1) {
            rhs += vm * &a[n - m];
        }
        let denom = hp_from_int(((2 * n as u64 + 2 + s) * (2 * n as u64 + 1 + s)) as i64, bits);
        a.push(rhs / denom);
    }
    let num: Vec<HighPrec> = (0..terms).map(|k| -(&a[k + 1] * &hp_from_int(2 * (k as i64 + 1), bits))).collect();
    let mut f: Vec<HighPrec> = Vec::with_capacity(terms);
    for j in 0..terms {
        let mut acc = num[j].clone();
        for i in 1..=j {
            acc -= &a[i] * &f[j - i];
        }
        f.push(acc / &a[0]);
    }
    f
}

pub fn random_hermitian(rng: &mut StdRng, n: usize) -> Mat<Complex64> {
    let raw = Mat::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    Mat::from_fn(n, n, |i, j| (raw[(i, j)] + raw[(j, i)].conj()) * 0.5)
}

/// Product of `n` random Householder reflections.
pub fn random_orthogonal(rng: &mut StdRng, n: usize) -> Mat<f64> {
    let mut q = Mat::<f64>::identity(n, n);
    for _ in 0..n {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let h = Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - 2.0 * v[i] * v[j] / vv);
        q = &q * &h;
    }
    q
}

/// `Q A Qᵀ`, symmetrized against rounding.
pub fn orthogonal_conjugate(a: &Mat<Complex64>, q: &Mat<f64>) -> Mat<Complex64> {
    let n = a.nrows();
    let qc = Mat::from_fn(n, n, |i, j| Complex64::new(q[(i, j)], 0.0));
    let qt = Mat::from_fn(n, n, |i, j| Complex64::new(q[(j, i)], 0.0));
    let b = &(&qc * a) * &qt;
    Mat::from_fn(n, n, |i, j| (b[(i, j)] + b[(j, i)].conj()) * 0.5)
}

/// Minimum of `eval` on the unit circle by dense angular scan plus golden
/// section refinement around the best sample.
pub fn unit_circle_min(eval: impl Fn(f64, f64) -> f64) -> f64 {
    let f = |phi: f64| eval(phi.cos(), phi.sin());
    let samples = 200_000;
    let step = std::f64::consts::TAU / samples as f64;
    let best = (0..samples).map(|k| k as f64 * step).min_by(|a, b| f(*a).total_cmp(&f(*b))).unwrap();
    let (mut lo, mut hi) = (best - step, best + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let (c, d) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(c) < f(d) {
            hi = d;
        } else {
            lo = c;
        }
    }
    f(0.5 * (lo + hi))
}
