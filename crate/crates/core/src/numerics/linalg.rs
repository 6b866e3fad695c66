use nalgebra::DMatrix;

use crate::error::{domain, CasimirError, Result};

/// Below this Frobenius norm the two-term trace expansion is used.
const SMALL_NORM: f64 = 1e-6;

/// `ln det(1 − A)` for a square matrix `A` whose eigenvalues lie inside the
/// unit disk.
///
/// Uses LU factorisation of `1 − A` with partial pivoting. For tiny `A`
/// the result is `−tr A − tr(A²)/2`, which avoids the cancellation in
/// `ln(1 − ε)`. A non-positive determinant means an odd number of
/// eigenvalues crossed 1 and is reported as [`CasimirError::NotContraction`].
pub fn log_det_one_minus(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(domain("log_det_one_minus", format!("matrix is {}x{}", n, a.ncols())));
    }
    if n == 0 {
        return Ok(0.0);
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(domain("log_det_one_minus", "matrix has non-finite entries"));
    }
    if a.norm() < SMALL_NORM {
        let tr = a.trace();
        let tr2 = a.component_mul(&a.transpose()).sum();
        return Ok(-tr - 0.5 * tr2);
    }
    let b = DMatrix::<f64>::identity(n, n) - a;
    let lu = b.lu();
    let u = lu.u();
    let mut sign = if lu.p().determinant::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let mut acc = 0.0;
    for i in 0..n {
        let d = u[(i, i)];
        if d == 0.0 {
            return Err(CasimirError::NotContraction("1 − A is singular".into()));
        }
        if d < 0.0 {
            sign = -sign;
        }
        acc += d.abs().ln();
    }
    if sign < 0.0 {
        return Err(CasimirError::NotContraction("det(1 − A) is negative".into()));
    }
    Ok(acc)
}

/// `ln det(1 − A[..k, ..k])` for every leading block size `k = 1..=n`.
///
/// Gaussian elimination without pivoting on `1 − A`, with the diagonal held
/// as an offset from one so that pivots `1 + δ` keep full relative accuracy
/// through `ln_1p(δ)` when `A` is small. Every pivot must be positive; this
/// holds when `1 − A` is symmetric positive definite, and for the block
/// forms `[[1, X], [±Xᵀ, 1]]` whose leading minors are `det(1 ± YᵀY)`.
pub fn log_det_one_minus_minors(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(domain("log_det_one_minus_minors", format!("matrix is {}x{}", n, a.ncols())));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(domain("log_det_one_minus_minors", "matrix has non-finite entries"));
    }
    let mut m = -a;
    let mut delta: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    for k in 0..n {
        let dk = delta[k];
        let p = 1.0 + dk;
        if !(p > 0.0) {
            return Err(CasimirError::NotContraction(format!("non-positive pivot {p:e} at index {k}")));
        }
        acc += dk.ln_1p();
        out.push(acc);
        for i in (k + 1)..n {
            let f = m[(i, k)] / p;
            if f == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                let v = m[(k, j)];
                m[(i, j)] -= f * v;
            }
            delta[i] = m[(i, i)];
        }
    }
    Ok(out)
}
