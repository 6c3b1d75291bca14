use crate::error::{Error, Result};
use crate::space::EmbeddingSpace;

use super::svd::svd;
use super::Matrix;

/// Square orthogonal matrix `w`; rows of a space are mapped as `r · w`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMap {
    w: Matrix,
}

impl OrthogonalMap {
    pub fn identity(dim: usize) -> Self {
        Self { w: Matrix::identity(dim) }
    }

    /// Wraps `w` after checking `‖wᵀw − I‖_F ≤ tol`.
    pub fn new(w: Matrix, tol: f64) -> Result<Self> {
        if w.rows() != w.cols() {
            return Err(Error::ShapeMismatch {
                left_rows: w.rows(),
                left_cols: w.cols(),
                right_rows: w.cols(),
                right_cols: w.rows(),
            });
        }
        let map = Self { w };
        let err = map.orthogonality_error();
        if err.is_nan() || err > tol {
            return Err(Error::InvalidParameter(alloc::format!("matrix is not orthogonal (‖wᵀw − I‖ = {err:e})")));
        }
        Ok(map)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w.rows()
    }

    /// `‖wᵀw − I‖_F`
    pub fn orthogonality_error(&self) -> f64 {
        let g = self.w.t_matmul(&self.w).expect("square");
        g.frobenius_distance(&Matrix::identity(self.dim())).expect("square")
    }

    /// `x · w`
    pub fn apply_matrix(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.cols() });
        }
        x.matmul(&self.w)
    }
}

/// Orthogonal `w` minimizing `‖x·w − z‖_F`, where rows of `x` and `z` are paired.
///
/// `w = u·vᵀ` for the SVD `xᵀz = u·s·vᵀ`. With repeated or zero singular values the
/// minimizer is not unique; some optimal orthogonal `w` is still returned.
pub fn solve_procrustes(x: &Matrix, z: &Matrix) -> Result<OrthogonalMap> {
    if x.rows() != z.rows() || x.cols() != z.cols() {
        return Err(Error::ShapeMismatch {
            left_rows: x.rows(),
            left_cols: x.cols(),
            right_rows: z.rows(),
            right_cols: z.cols(),
        });
    }
    if x.rows() == 0 {
        return Err(Error::Empty("procrustes needs at least one paired row"));
    }
    if x.cols() == 0 {
        return Err(Error::ZeroDimension);
    }
    for (m, _) in [(x, 'x'), (z, 'z')] {
        if let Some(pos) = m.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / m.cols(), col: pos % m.cols() });
        }
    }
    let cross = x.t_matmul(z)?;
    let d = svd(&cross);
    let w = d.u.matmul(&d.v.transpose())?;
    Ok(OrthogonalMap { w })
}

/// Maps every row `r` of the space to `r · w`.
pub fn apply_map(space: &EmbeddingSpace, map: &OrthogonalMap) -> Result<EmbeddingSpace> {
    let m = map.apply_matrix(space.matrix())?;
    space.with_matrix(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use rand::{Rng, SeedableRng};

    fn rot90() -> Matrix {
        Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]])
    }

    #[test]
    fn recovers_quarter_turn() {
        let x = Matrix::identity(2);
        let z = x.matmul(&rot90()).unwrap();
        let w = solve_procrustes(&x, &z).unwrap();
        assert!(w.matrix().frobenius_distance(&rot90()).unwrap() < 1e-14);
        let residual = w.apply_matrix(&x).unwrap().frobenius_distance(&z).unwrap();
        assert!(residual < 1e-14);
    }

    #[test]
    fn self_alignment_is_identity() {
        let x = Matrix::from_rows(&[[2.0, 0.3], [0.1, 1.0], [-0.4, 0.2]]);
        let w = solve_procrustes(&x, &x).unwrap();
        assert!(w.matrix().frobenius_distance(&Matrix::identity(2)).unwrap() < 1e-12);
    }

    #[test]
    fn applying_maps_rows_on_the_right() {
        let s = EmbeddingSpace::new(["p".to_string()].into(), Matrix::from_rows(&[[1.0, 0.0]])).unwrap();
        let w = OrthogonalMap::new(rot90(), 1e-12).unwrap();
        assert_eq!(apply_map(&s, &w).unwrap().row(0), &[0.0, 1.0]);
        assert_eq!(apply_map(&s, &OrthogonalMap::identity(2)).unwrap(), s);
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = Matrix::zeros(3, 2);
        assert!(matches!(solve_procrustes(&a, &Matrix::zeros(2, 2)), Err(Error::ShapeMismatch { .. })));
        let mut b = Matrix::zeros(3, 2);
        b[(1, 1)] = f64::INFINITY;
        assert!(matches!(solve_procrustes(&a, &b), Err(Error::NonFinite { row: 1, col: 1 })));
        assert!(OrthogonalMap::new(Matrix::from_rows(&[[2.0, 0.0], [0.0, 1.0]]), 1e-8).is_err());
        let s = EmbeddingSpace::new(["p".to_string()].into(), Matrix::from_rows(&[[1.0, 0.0, 0.0]])).unwrap();
        assert!(matches!(apply_map(&s, &OrthogonalMap::identity(2)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn degenerate_cross_covariance_gives_orthogonal_map() {
        // a single pair makes xᵀz rank one
        let x = Matrix::from_rows(&[[1.0, 2.0, 3.0]]);
        let z = Matrix::from_rows(&[[3.0, -1.0, 2.0]]);
        let w = solve_procrustes(&x, &z).unwrap();
        assert!(w.orthogonality_error() < 1e-12);
        assert!(w.apply_matrix(&x).unwrap().frobenius_distance(&z).unwrap() < 1e-12);
        // all-zero input
        let w = solve_procrustes(&Matrix::zeros(2, 3), &Matrix::zeros(2, 3)).unwrap();
        assert!(w.orthogonality_error() < 1e-12);
    }

    #[test]
    fn random_maps_are_orthogonal_and_preserve_gram() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for d in [3usize, 10, 40] {
            let n = 60;
            let x = Matrix::from_vec(n, d, (0..n * d).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let z = Matrix::from_vec(n, d, (0..n * d).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let w = solve_procrustes(&x, &z).unwrap();
            assert!(w.orthogonality_error() <= 1e-8);
            let mapped = w.apply_matrix(&x).unwrap();
            let g0 = x.matmul(&x.transpose()).unwrap();
            let g1 = mapped.matmul(&mapped.transpose()).unwrap();
            let worst = g0.as_slice().iter().zip(g1.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(worst <= 1e-8, "d={d}: {worst}");
        }
    }
}
