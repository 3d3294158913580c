//! Dense eigensolvers behind the Rayleigh–Ritz and complex-rotation stages.
//!
//! Both solvers first split the matrix into its irreducible diagonal blocks
//! (connected components of the nonzero pattern). Parity-conserving
//! potentials give several blocks, each diagonalized separately.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::EigError;
use crate::oscbasis::OperatorMatrix;

/// Upper bound on `‖Av − Ev‖ / (‖A‖ ‖v‖)` accepted from the backend.
pub const RESIDUAL_BOUND: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SpectralResult<T> {
    pub eigenvalues: Vec<T>,
    /// Measured max relative residual over the returned pairs.
    pub residual_bound: f64,
    /// Column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: Option<Mat<Complex64>>,
}

/// Index sets of the irreducible diagonal blocks, each sorted ascending.
pub fn diagonal_blocks(m: &Mat<Complex64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for j in 0..n {
        for i in 0..n {
            if i != j && m[(i, j)] != Complex64::new(0.0, 0.0) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    blocks
}

fn sub_matrix(m: &Mat<Complex64>, idx: &[usize]) -> Mat<Complex64> {
    Mat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

fn evd_err(e: impl std::fmt::Debug) -> EigError {
    EigError::ConvergenceFailure(format!("{e:?}"))
}

fn frobenius(m: &Mat<Complex64>) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

/// `max_k ‖A v_k − E_k v_k‖ / (‖A‖_F ‖v_k‖)`.
fn relative_residual(a: &Mat<Complex64>, values: &[Complex64], vectors: &Mat<Complex64>) -> f64 {
    let norm_a = frobenius(a).max(f64::MIN_POSITIVE);
    let av = a * vectors;
    let mut worst = 0.0f64;
    for (k, &e) in values.iter().enumerate() {
        let (mut r, mut v) = (0.0, 0.0);
        for i in 0..a.nrows() {
            r += (av[(i, k)] - e * vectors[(i, k)]).norm_sqr();
            v += vectors[(i, k)].norm_sqr();
        }
        worst = worst.max(r.sqrt() / (norm_a * v.sqrt().max(f64::MIN_POSITIVE)));
    }
    worst
}

fn is_real(m: &Mat<Complex64>) -> bool {
    (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| m[(i, j)].im == 0.0))
}

fn block_selfadjoint(a: &Mat<Complex64>, vectors: bool) -> Result<(Vec<f64>, Option<Mat<Complex64>>), EigError> {
    let n = a.nrows();
    if is_real(a) {
        let r = Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)].re);
        if !vectors {
            return Ok((r.self_adjoint_eigenvalues(Side::Lower).map_err(evd_err)?, None));
        }
        let evd = r.self_adjoint_eigen(Side::Lower).map_err(evd_err)?;
        let vals = evd.S().column_vector().iter().copied().collect();
        let u = evd.U();
        let v = Mat::from_fn(n, n, |i, j| Complex64::new(u[(i, j)], 0.0));
        Ok((vals, Some(v)))
    } else {
        if !vectors {
            let vals = a.self_adjoint_eigenvalues(Side::Lower).map_err(evd_err)?;
            return Ok((vals, None));
        }
        let evd = a.self_adjoint_eigen(Side::Lower).map_err(evd_err)?;
        let vals = evd.S().column_vector().iter().map(|z| z.re).collect();
        Ok((vals, Some(evd.U().to_owned())))
    }
}

fn block_general(a: &Mat<Complex64>, vectors: bool) -> Result<(Vec<Complex64>, Option<Mat<Complex64>>), EigError> {
    if !vectors {
        return Ok((a.eigenvalues().map_err(evd_err)?, None));
    }
    let evd = a.eigen().map_err(evd_err)?;
    let vals = evd.S().column_vector().iter().copied().collect();
    Ok((vals, Some(evd.U().to_owned())))
}

/// Runs `solve` on every diagonal block and scatters the results back.
fn solve_blocks<T: Copy>(
    a: &Mat<Complex64>,
    vectors: bool,
    solve: impl Fn(&Mat<Complex64>, bool) -> Result<(Vec<T>, Option<Mat<Complex64>>), EigError>,
) -> Result<(Vec<T>, Option<Mat<Complex64>>), EigError> {
    let n = a.nrows();
    let blocks = diagonal_blocks(a);
    if blocks.len() == 1 {
        return solve(a, vectors);
    }
    let mut values = Vec::with_capacity(n);
    let mut full = vectors.then(|| Mat::<Complex64>::zeros(n, n));
    for idx in &blocks {
        let (vals, vecs) = solve(&sub_matrix(a, idx), vectors)?;
        if let (Some(full), Some(vecs)) = (full.as_mut(), vecs) {
            let col0 = values.len();
            for k in 0..vals.len() {
                for (r, &row) in idx.iter().enumerate() {
                    full[(row, col0 + k)] = vecs[(r, k)];
                }
            }
        }
        values.extend(vals);
    }
    Ok((values, full))
}

fn permute_columns(m: &Mat<Complex64>, order: &[usize]) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), order.len(), |i, k| m[(i, order[k])])
}

/// All eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn eig_selfadjoint(mat: &OperatorMatrix) -> Result<SpectralResult<f64>, EigError> {
    if !mat.is_hermitian() {
        return Err(EigError::NotHermitian);
    }
    let (vals, vecs) = solve_blocks(mat.entries(), true, block_selfadjoint)?;
    let vecs = vecs.expect("vectors requested");
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| vals[k]).collect();
    let vectors = permute_columns(&vecs, &order);
    let cvals: Vec<Complex64> = eigenvalues.iter().map(|&e| Complex64::new(e, 0.0)).collect();
    let residual_bound = relative_residual(mat.entries(), &cvals, &vectors);
    if residual_bound > RESIDUAL_BOUND {
        return Err(EigError::ConvergenceFailure(format!("residual {residual_bound:.3e}")));
    }
    Ok(SpectralResult {
        eigenvalues,
        residual_bound,
        eigenvectors: Some(vectors),
    })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues_selfadjoint(mat: &OperatorMatrix) -> Result<Vec<f64>, EigError> {
    if !mat.is_hermitian() {
        return Err(EigError::NotHermitian);
    }
    let (mut vals, _) = solve_blocks(mat.entries(), false, block_selfadjoint)?;
    vals.sort_by(|a, b| a.total_cmp(b));
    Ok(vals)
}

fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// All complex eigenvalues and eigenvectors of a general square matrix,
/// ordered by real part.
pub fn eig_complex(mat: &OperatorMatrix) -> Result<SpectralResult<Complex64>, EigError> {
    let (vals, vecs) = solve_blocks(mat.entries(), true, block_general)?;
    let vecs = vecs.expect("vectors requested");
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].re.total_cmp(&vals[b].re).then(vals[a].im.total_cmp(&vals[b].im)));
    let eigenvalues: Vec<Complex64> = order.iter().map(|&k| vals[k]).collect();
    let vectors = permute_columns(&vecs, &order);
    if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(EigError::ConvergenceFailure("non-finite eigenvalue".into()));
    }
    let residual_bound = relative_residual(mat.entries(), &eigenvalues, &vectors);
    if residual_bound > RESIDUAL_BOUND {
        return Err(EigError::ConvergenceFailure(format!("residual {residual_bound:.3e}")));
    }
    Ok(SpectralResult {
        eigenvalues,
        residual_bound,
        eigenvectors: Some(vectors),
    })
}

/// Eigenvalues only, ordered by real part.
pub fn eigenvalues_complex(mat: &OperatorMatrix) -> Result<Vec<Complex64>, EigError> {
    let (mut vals, _) = solve_blocks(mat.entries(), false, block_general)?;
    if vals.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(EigError::ConvergenceFailure("non-finite eigenvalue".into()));
    }
    sort_complex(&mut vals);
    Ok(vals)
}

/// Roots of `Σ coeffs[k] t^k` from the companion matrix.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>, EigError> {
    let mut c = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Ok(Vec::new());
    }
    let n = c.len() - 1;
    let lead = c[n];
    let comp = Mat::<f64>::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    comp.eigenvalues().map_err(evd_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn real(rows: &[&[f64]]) -> OperatorMatrix {
        let n = rows.len();
        OperatorMatrix::from_real(&Mat::from_fn(n, n, |i, j| rows[i][j]))
    }

    #[test]
    fn two_by_two_symmetric() {
        let r = eig_selfadjoint(&real(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((r.eigenvalues[1] - 3.0).abs() < 1e-14);
        assert!(r.residual_bound <= RESIDUAL_BOUND);
    }

    #[test]
    fn rotation_generator_has_imaginary_pair() {
        let r = eig_complex(&real(&[&[0.0, 1.0], &[-1.0, 0.0]])).unwrap();
        let mut ims: Vec<f64> = r.eigenvalues.iter().map(|z| z.im).collect();
        ims.sort_by(|a, b| a.total_cmp(b));
        assert!((ims[0] + 1.0).abs() < 1e-14 && (ims[1] - 1.0).abs() < 1e-14);
        assert!(r.eigenvalues.iter().all(|z| z.re.abs() < 1e-14));
    }

    #[test]
    fn not_hermitian_rejected() {
        let m = real(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert_eq!(eig_selfadjoint(&m).unwrap_err(), EigError::NotHermitian);
    }

    #[test]
    fn tridiagonal_toeplitz_closed_form() {
        // a on the diagonal, b off it: a + 2b cos(kπ/(n+1)).
        let (n, a, b) = (6, 1.5, -0.7);
        let m = OperatorMatrix::from_real(&Mat::from_fn(n, n, |i, j| {
            if i == j {
                a
            } else if i.abs_diff(j) == 1 {
                b
            } else {
                0.0
            }
        }));
        let mut exact: Vec<f64> = (1..=n).map(|k| a + 2.0 * b * (k as f64 * PI / (n + 1) as f64).cos()).collect();
        exact.sort_by(|x, y| x.total_cmp(y));
        let got = eig_selfadjoint(&m).unwrap().eigenvalues;
        for (g, e) in got.iter().zip(&exact) {
            assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn circulant_closed_form() {
        // Eigenvalues Σ_k c_k ω^{jk}, ω = e^{2πi/n}.
        let c = [2.0, -1.0, 0.5, 0.25, 0.0, 3.0];
        let n = c.len();
        let m = OperatorMatrix::from_real(&Mat::from_fn(n, n, |i, j| c[(j + n - i) % n]));
        let got = eig_complex(&m).unwrap().eigenvalues;
        for jj in 0..n {
            let e: Complex64 = (0..n)
                .map(|k| c[k] * Complex64::from_polar(1.0, 2.0 * PI * (jj * k) as f64 / n as f64))
                .sum();
            let best = got.iter().map(|z| (z - e).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-12, "{e}");
        }
    }

    #[test]
    fn block_split_matches_full_solve() {
        // Two decoupled 2×2 blocks interleaved.
        let m = real(&[
            &[1.0, 0.0, 2.0, 0.0],
            &[0.0, 5.0, 0.0, 1.0],
            &[2.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 5.0],
        ]);
        assert_eq!(diagonal_blocks(m.entries()), vec![vec![0, 2], vec![1, 3]]);
        let r = eig_selfadjoint(&m).unwrap();
        let exact = [-1.0, 3.0, 4.0, 6.0];
        for (g, e) in r.eigenvalues.iter().zip(exact) {
            assert!((g - e).abs() < 1e-13);
        }
        assert!(r.residual_bound < 1e-14);
        let vals = eigenvalues_complex(&m).unwrap();
        for (g, e) in vals.iter().zip(exact) {
            assert!((g.re - e).abs() < 1e-13 && g.im.abs() < 1e-13);
        }
    }

    #[test]
    fn companion_roots() {
        // (t − 1)(t + 2)(t − 3) = t³ − 2t² − 5t + 6
        let mut r: Vec<f64> = polynomial_roots(&[6.0, -5.0, -2.0, 1.0]).unwrap().iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.total_cmp(b));
        for (g, e) in r.iter().zip([-2.0, 1.0, 3.0]) {
            assert!((g - e).abs() < 1e-12);
        }
        assert!(polynomial_roots(&[3.0]).unwrap().is_empty());
    }
}
