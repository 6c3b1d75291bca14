use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::space::EmbeddingSpace;

use super::svd::right_singular;
use super::{column_means, Matrix};

/// PCA projection fitted on one space, optionally followed by removal of the
/// dominant directions of the projected data.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionMap {
    mean: Vec<f64>,
    basis: Matrix,
    singular_values: Vec<f64>,
    post_remove: usize,
    post_mean: Vec<f64>,
    post_directions: Matrix,
}

impl ReductionMap {
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// `d × k`, orthonormal columns ordered by descending singular value.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Singular values of the centered training matrix (all of them, descending).
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn post_remove(&self) -> usize {
        self.post_remove
    }

    pub fn input_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.basis.cols()
    }

    fn project(&self, m: &Matrix) -> Result<Matrix> {
        if m.cols() != self.input_dim() {
            return Err(Error::DimensionMismatch { expected: self.input_dim(), found: m.cols() });
        }
        let mut centered = m.clone();
        for i in 0..centered.rows() {
            for (x, mu) in centered.row_mut(i).iter_mut().zip(&self.mean) {
                *x -= mu;
            }
        }
        let mut y = centered.matmul(&self.basis)?;
        if self.post_remove > 0 {
            remove_directions(&mut y, &self.post_mean, &self.post_directions);
        }
        Ok(y)
    }
}

/// Fits a `k`-dimensional PCA on the rows of `space`.
///
/// With `post_remove > 0` the top `post_remove` principal directions of the
/// projected data are also recorded and removed by [`apply_reduction`].
pub fn fit_reduction(space: &EmbeddingSpace, k: usize, post_remove: usize) -> Result<ReductionMap> {
    let d = space.dim();
    if k == 0 || k > d {
        return Err(Error::InvalidParameter(format!("target dimension {k} must be in 1..={d}")));
    }
    if post_remove >= k {
        return Err(Error::InvalidParameter(format!(
            "post_remove {post_remove} must be smaller than target dimension {k}"
        )));
    }
    if space.is_empty() {
        return Err(Error::Empty("cannot fit a reduction on an empty space"));
    }
    let m = space.matrix();
    let mean = column_means(m);
    let mut centered = m.clone();
    for i in 0..centered.rows() {
        for (x, mu) in centered.row_mut(i).iter_mut().zip(&mean) {
            *x -= mu;
        }
    }
    let (singular_values, v) = right_singular(&centered);
    let mut basis = v.leading_columns(k);
    normalize_signs(&mut basis);

    let mut map = ReductionMap {
        mean,
        basis,
        singular_values,
        post_remove: 0,
        post_mean: Vec::new(),
        post_directions: Matrix::zeros(k, 0),
    };
    if post_remove > 0 {
        let y = map.project(m)?;
        let post_mean = column_means(&y);
        let mut yc = y;
        for i in 0..yc.rows() {
            for (x, mu) in yc.row_mut(i).iter_mut().zip(&post_mean) {
                *x -= mu;
            }
        }
        let (_, pv) = right_singular(&yc);
        let mut dirs = pv.leading_columns(post_remove);
        normalize_signs(&mut dirs);
        map.post_remove = post_remove;
        map.post_mean = post_mean;
        map.post_directions = dirs;
    }
    Ok(map)
}

/// Projects rows as `(r − mean) · basis`, then removes the recorded dominant
/// directions when the map was fitted with `post_remove > 0`.
pub fn apply_reduction(space: &EmbeddingSpace, rmap: &ReductionMap) -> Result<EmbeddingSpace> {
    let y = rmap.project(space.matrix())?;
    space.with_matrix(y)
}

fn remove_directions(y: &mut Matrix, mean: &[f64], dirs: &Matrix) {
    for i in 0..y.rows() {
        let row = y.row_mut(i);
        for (x, mu) in row.iter_mut().zip(mean) {
            *x -= mu;
        }
        for j in 0..dirs.cols() {
            let p: f64 = row.iter().enumerate().map(|(t, x)| x * dirs[(t, j)]).sum();
            for (t, x) in row.iter_mut().enumerate() {
                *x -= p * dirs[(t, j)];
            }
        }
    }
}

/// Makes the largest-magnitude entry of every column non-negative.
fn normalize_signs(m: &mut Matrix) {
    for j in 0..m.cols() {
        let mut best = 0;
        for i in 1..m.rows() {
            if libm::fabs(m[(i, j)]) > libm::fabs(m[(best, j)]) {
                best = i;
            }
        }
        if m.rows() > 0 && m[(best, j)] < 0.0 {
            for i in 0..m.rows() {
                m[(i, j)] = -m[(i, j)];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm;
    use alloc::string::{String, ToString};
    use rand::{Rng, SeedableRng};

    fn space_of(m: Matrix) -> EmbeddingSpace {
        let tokens: Vec<String> = (0..m.rows()).map(|i| i.to_string()).collect();
        EmbeddingSpace::new(tokens, m).unwrap()
    }

    fn random(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect())
    }

    fn pairwise_distances(m: &Matrix) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..m.rows() {
            for j in i + 1..m.rows() {
                let d: Vec<f64> = m.row(i).iter().zip(m.row(j)).map(|(a, b)| a - b).collect();
                out.push(norm(&d));
            }
        }
        out
    }

    #[test]
    fn rank_one_data_projects_onto_its_line() {
        // points on the line through (1, 1) along direction (3, 4)/5
        let m =
            Matrix::from_rows(&[[1.0 - 0.6, 1.0 - 0.8], [1.0, 1.0], [1.0 + 1.2, 1.0 + 1.6], [1.0 + 3.0, 1.0 + 4.0]]);
        let s = space_of(m);
        let r = fit_reduction(&s, 1, 0).unwrap();
        let b = r.basis();
        assert!((b[(0, 0)] - 0.6).abs() < 1e-12 && (b[(1, 0)] - 0.8).abs() < 1e-12);
        let y = apply_reduction(&s, &r).unwrap();
        assert_eq!(y.dim(), 1);
        // reconstruct and compare
        for i in 0..s.len() {
            for t in 0..2 {
                let rec = r.mean()[t] + y.row(i)[0] * b[(t, 0)];
                assert!((rec - s.row(i)[t]).abs() < 1e-12);
            }
        }
        let coords: Vec<f64> = (0..4).map(|i| y.row(i)[0]).collect();
        let expected = [-2.5, -1.5, 0.5, 3.5];
        for (c, e) in coords.iter().zip(expected) {
            assert!((c - e).abs() < 1e-12, "{coords:?}");
        }
    }

    #[test]
    fn full_rank_reduction_is_an_isometry() {
        let s = space_of(random(40, 6, 3));
        let r = fit_reduction(&s, 6, 0).unwrap();
        let y = apply_reduction(&s, &r).unwrap();
        for (a, b) in pairwise_distances(s.matrix()).iter().zip(pairwise_distances(y.matrix())) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn basis_is_orthonormal_and_sign_normalized() {
        let s = space_of(random(50, 8, 11));
        let r = fit_reduction(&s, 5, 0).unwrap();
        let g = r.basis().t_matmul(r.basis()).unwrap();
        assert!(g.frobenius_distance(&Matrix::identity(5)).unwrap() < 1e-8);
        for j in 0..5 {
            let col = r.basis().column(j);
            let big = col.iter().copied().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
            assert!(big >= 0.0);
        }
    }

    #[test]
    fn planted_dominant_direction_is_removed() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let dir = [0.48, 0.6, 0.64];
        let n = 200;
        let mut data = Vec::with_capacity(n * 3);
        for _ in 0..n {
            let big: f64 = rng.gen_range(-50.0..50.0);
            for t in dir {
                data.push(big * t + rng.gen_range(-0.1..0.1));
            }
        }
        let s = space_of(Matrix::from_vec(n, 3, data));
        let r = fit_reduction(&s, 3, 1).unwrap();
        let y = apply_reduction(&s, &r).unwrap();
        // the dominant direction of the reduced data is its first axis
        let first = y.matrix().column(0);
        let mean = first.iter().sum::<f64>() / n as f64;
        let var = first.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(var < 1e-10, "{var}");
        // and in original coordinates: projection onto the planted direction vanishes
        let top = r.basis().column(0);
        assert!((top.iter().zip(dir).map(|(a, b)| a * b).sum::<f64>().abs() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn parameter_checks() {
        let s = space_of(random(5, 3, 1));
        assert!(fit_reduction(&s, 4, 0).is_err());
        assert!(fit_reduction(&s, 0, 0).is_err());
        assert!(fit_reduction(&s, 2, 2).is_err());
        let r = fit_reduction(&s, 2, 0).unwrap();
        let other = space_of(random(5, 4, 2));
        assert!(matches!(apply_reduction(&other, &r), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn wide_data_still_gets_full_basis() {
        let s = space_of(random(3, 8, 2));
        let r = fit_reduction(&s, 6, 0).unwrap();
        let g = r.basis().t_matmul(r.basis()).unwrap();
        assert!(g.frobenius_distance(&Matrix::identity(6)).unwrap() < 1e-10);
    }
}
