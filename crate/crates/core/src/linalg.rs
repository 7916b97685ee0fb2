//! Small dense linear algebra used by the regressors and the homography solver.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `min ‖A·x − b‖₂` with Householder QR.
///
/// `a` is row-major with `rows × cols` entries and `rows ≥ cols`. Returns
/// [`Error::Fit`] when `A` is numerically rank deficient.
pub fn least_squares<T: Scalar>(a: &[T], rows: usize, cols: usize, b: &[T]) -> Result<Vec<T>> {
    if a.len() != rows * cols || b.len() != rows {
        return Err(Error::Fit(format!(
            "design matrix is {}x{} but holds {} entries for {} targets",
            rows,
            cols,
            a.len(),
            b.len()
        )));
    }
    if rows < cols {
        return Err(Error::Fit(format!("underdetermined system: {rows} equations for {cols} unknowns")));
    }
    let mut m = a.to_vec();
    let mut rhs = b.to_vec();
    let mut diag = vec![T::zero(); cols];
    let mut scale = T::zero();
    for j in 0..cols {
        for i in 0..rows {
            scale = scale.max(m[i * cols + j].abs());
        }
    }
    if scale == T::zero() {
        return Err(Error::Fit("design matrix is all zeros".into()));
    }

    for k in 0..cols {
        let norm = (k..rows).map(|i| m[i * cols + k] * m[i * cols + k]).sum::<T>().sqrt();
        let tol = T::epsilon() * T::from_usize_lossy(rows.max(cols)) * scale * T::lit(16.0);
        if norm <= tol {
            return Err(Error::Fit(format!("design matrix is singular (column {k})")));
        }
        let x0 = m[k * cols + k];
        let alpha = if x0 >= T::zero() { -norm } else { norm };
        // v = x - alpha e1, stored in place below the diagonal.
        let mut v: Vec<T> = (k..rows).map(|i| m[i * cols + k]).collect();
        v[0] -= alpha;
        let vnorm2: T = v.iter().map(|&e| e * e).sum();
        if vnorm2 > T::zero() {
            let two = T::lit(2.0);
            for j in k..cols {
                let dot: T = (k..rows).map(|i| v[i - k] * m[i * cols + j]).sum();
                let f = two * dot / vnorm2;
                for i in k..rows {
                    m[i * cols + j] -= f * v[i - k];
                }
            }
            let dot: T = (k..rows).map(|i| v[i - k] * rhs[i]).sum();
            let f = two * dot / vnorm2;
            for i in k..rows {
                rhs[i] -= f * v[i - k];
            }
        }
        diag[k] = m[k * cols + k];
    }

    let max_diag = diag.iter().fold(T::zero(), |acc, d| acc.max(d.abs()));
    let rank_tol = T::epsilon() * T::from_usize_lossy(rows.max(cols)) * max_diag * T::lit(16.0);
    if let Some(k) = diag.iter().position(|d| d.abs() <= rank_tol) {
        return Err(Error::Fit(format!("design matrix is singular (column {k})")));
    }

    let mut x = vec![T::zero(); cols];
    for k in (0..cols).rev() {
        let mut acc = rhs[k];
        for j in k + 1..cols {
            acc -= m[k * cols + j] * x[j];
        }
        x[k] = acc / m[k * cols + k];
    }
    Ok(x)
}

pub type Mat3<T> = [[T; 3]; 3];

pub fn det3<T: Scalar>(m: &Mat3<T>) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Inverse via the adjugate. `None` when the determinant vanishes.
pub fn inv3<T: Scalar>(m: &Mat3<T>) -> Option<Mat3<T>> {
    let det = det3(m);
    if det == T::zero() || !det.is_finite() {
        return None;
    }
    let c = |r0: usize, c0: usize, r1: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [c(1, 1, 2, 2), -c(0, 1, 2, 2), c(0, 1, 1, 2)],
        [-c(1, 0, 2, 2), c(0, 0, 2, 2), -c(0, 0, 1, 2)],
        [c(1, 0, 2, 1), -c(0, 0, 2, 1), c(0, 0, 1, 1)],
    ];
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = adj[i][j] / det;
        }
    }
    Some(out)
}

pub fn mul3<T: Scalar>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}
