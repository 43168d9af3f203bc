//! Dense linear algebra helpers on top of nalgebra's SVD.

use nalgebra::{DMatrix, DVector};

/// Singular values above this are counted as nonzero.
fn cutoff(rows: usize, cols: usize, sigma_max: f64, tol: f64) -> f64 {
    tol * rows.max(cols) as f64 * sigma_max
}

/// Number of singular values exceeding `tol * max(rows, cols) * sigma_max`.
pub fn numeric_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    let c = cutoff(m.nrows(), m.ncols(), smax, tol);
    sv.iter().filter(|&&s| s > c).count()
}

/// Result of projecting a vector onto the row space of a matrix.
#[derive(Debug, Clone)]
pub struct Projection {
    /// Minimal-norm coefficients, one per row.
    pub coefficients: DVector<f64>,
    pub residual_norm_sq: f64,
    /// Numeric rank of the spanning rows.
    pub rank: usize,
}

/// Least-squares projection of `target` onto the span of the rows of `rows`.
pub fn project_onto_rows(rows: &DMatrix<f64>, target: &DVector<f64>, tol: f64) -> Projection {
    let k = rows.nrows();
    assert_eq!(rows.ncols(), target.len(), "row length mismatch");
    if k == 0 || rows.ncols() == 0 {
        return Projection {
            coefficients: DVector::zeros(k),
            residual_norm_sq: target.norm_squared(),
            rank: 0,
        };
    }
    let a = rows.transpose();
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let (coefficients, rank) = if smax == 0.0 {
        (DVector::zeros(k), 0)
    } else {
        let c = cutoff(a.nrows(), a.ncols(), smax, tol);
        let rank = svd.singular_values.iter().filter(|&&s| s > c).count();
        let x = svd.solve(target, c).expect("u and v were computed");
        (x, rank)
    };
    let residual = target - &a * &coefficients;
    Projection {
        residual_norm_sq: residual.norm_squared(),
        coefficients,
        rank,
    }
}

/// Orthonormal basis of the left null space of `m`: vectors x with xᵀ m = 0.
///
/// Returned as columns. Dimension is `nrows - numeric_rank(m)`.
pub fn left_kernel(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let k = m.nrows();
    if k == 0 {
        return DMatrix::zeros(0, 0);
    }
    let cols = m.ncols();
    // SVD of mᵀ padded to at least k rows so the full right factor is available.
    let padded_rows = cols.max(k);
    let mut a = DMatrix::zeros(padded_rows, k);
    a.view_mut((0, 0), (cols, k)).copy_from(&m.transpose());
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("v was computed");
    let smax = svd.singular_values.max();
    let c = if smax == 0.0 {
        f64::INFINITY
    } else {
        cutoff(k, cols, smax, tol)
    };
    let null: Vec<usize> = (0..k)
        .filter(|&i| svd.singular_values[i] <= c || svd.singular_values[i].is_nan())
        .collect();
    let mut basis = DMatrix::zeros(k, null.len());
    for (col, &i) in null.iter().enumerate() {
        basis.set_column(col, &v_t.row(i).transpose());
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(numeric_rank(&DMatrix::zeros(3, 4), 1e-9), 0);
        assert_eq!(numeric_rank(&DMatrix::identity(2, 2), 1e-9), 2);
        let u = DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0, 1.5]);
        let v = DVector::from_vec(vec![0.3, 1.0, -1.0, 2.0, 0.7]);
        assert_eq!(numeric_rank(&(&u * v.transpose()), 1e-9), 1);
        assert_eq!(numeric_rank(&DMatrix::zeros(0, 3), 1e-9), 0);
    }

    #[test]
    fn projection_single_row() {
        let rows = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let p = project_onto_rows(&rows, &DVector::from_vec(vec![3.0, 4.0]), 1e-9);
        assert!((p.coefficients[0] - 3.0).abs() < 1e-12);
        assert!((p.residual_norm_sq - 16.0).abs() < 1e-12);
        assert_eq!(p.rank, 1);
    }

    #[test]
    fn projection_min_norm_with_dependent_rows() {
        let rows = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let p = project_onto_rows(&rows, &DVector::from_vec(vec![2.0, 2.0]), 1e-9);
        assert!((p.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((p.coefficients[1] - 1.0).abs() < 1e-12);
        assert!(p.residual_norm_sq < 1e-24);
        assert_eq!(p.rank, 1);
    }

    #[test]
    fn kernel_of_wide_and_tall() {
        // Three rows in R^1: kernel has dimension two.
        let m = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 3.0]);
        let k = left_kernel(&m, 1e-9);
        assert_eq!(k.ncols(), 2);
        assert!((k.transpose() * &m).norm() < 1e-12);

        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 2.0, 0.0, 1.0, 1.0]);
        assert_eq!(left_kernel(&m, 1e-9).ncols(), 0);

        let m = DMatrix::<f64>::zeros(2, 5);
        assert_eq!(left_kernel(&m, 1e-9).ncols(), 2);
    }
}
