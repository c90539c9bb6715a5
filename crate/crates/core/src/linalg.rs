//! Dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Relative cutoff for singular values treated as zero.
pub const SINGULAR_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub solution: DVector<f64>,
    pub rank: usize,
    /// `max |A x - b|`.
    pub residual: f64,
}

/// Minimum-norm least-squares solution of `A x = b` through the SVD
/// pseudo-inverse, dropping singular values below `SINGULAR_CUTOFF * sigma_max`.
pub fn min_norm_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> LeastSquares {
    let cols = a.ncols();
    if a.nrows() == 0 || cols == 0 {
        return LeastSquares { solution: DVector::zeros(cols), rank: 0, residual: b.amax() };
    }
    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    if sigma_max == 0.0 {
        return LeastSquares { solution: DVector::zeros(cols), rank: 0, residual: b.amax() };
    }
    let cutoff = SINGULAR_CUTOFF * sigma_max;
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut x = DVector::zeros(cols);
    for (j, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            let coeff = u.column(j).dot(b) / s;
            x += v_t.row(j).transpose() * coeff;
        }
    }
    let residual = (a * &x - b).amax();
    LeastSquares { solution: x, rank, residual }
}
