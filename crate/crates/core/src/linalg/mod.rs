//! Dense linear algebra for the pipeline: row normalization, orthogonal
//! Procrustes, PCA reduction and cosine similarity.

mod matrix;
mod procrustes;
mod reduction;
pub mod svd;

pub use matrix::Matrix;
pub use procrustes::{apply_map, solve_procrustes, OrthogonalMap};
pub use reduction::{apply_reduction, fit_reduction, ReductionMap};

use crate::space::EmbeddingSpace;

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn norm(u: &[f64]) -> f64 {
    libm::sqrt(dot(u, u))
}

/// Cosine similarity, or `None` when either vector is zero.
///
/// Vectors of different length are compared on their common prefix; callers keep
/// dimensions consistent.
pub fn cosine(u: &[f64], v: &[f64]) -> Option<f64> {
    cosine_with_norms(u, norm(u), v, norm(v))
}

/// [`cosine`] with precomputed norms. Produces bitwise the same result.
pub(crate) fn cosine_with_norms(u: &[f64], nu: f64, v: &[f64], nv: f64) -> Option<f64> {
    if nu == 0.0 || nv == 0.0 {
        return None;
    }
    Some((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// A transformed space plus the number of rows that ended up (or stayed) zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub space: EmbeddingSpace,
    pub zero_rows: usize,
}

/// Which composition of normalization steps to run before mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Step0 {
    /// unit length, mean center, unit length again; output rows are unit length.
    #[default]
    UnitCenterUnit,
    /// unit length then mean center.
    UnitCenter,
}

/// Scales every nonzero row to unit Euclidean norm. Zero rows stay zero and are counted.
pub fn l2_normalize_rows(space: &EmbeddingSpace) -> Normalized {
    let mut m = space.matrix().clone();
    let zero_rows = normalize_rows_in_place(&mut m);
    Normalized { space: with_matrix(space, m), zero_rows }
}

pub(crate) fn normalize_rows_in_place(m: &mut Matrix) -> usize {
    let mut zero = 0;
    for i in 0..m.rows() {
        let row = m.row_mut(i);
        let n = norm(row);
        if n == 0.0 {
            zero += 1;
        } else {
            row.iter_mut().for_each(|x| *x /= n);
        }
    }
    zero
}

/// Subtracts the column mean from every row.
pub fn mean_center_columns(space: &EmbeddingSpace) -> EmbeddingSpace {
    let mut m = space.matrix().clone();
    center_in_place(&mut m);
    with_matrix(space, m)
}

/// Column means of `m` (zeros for an empty matrix).
pub fn column_means(m: &Matrix) -> alloc::vec::Vec<f64> {
    let mut mean = alloc::vec![0.0; m.cols()];
    for r in m.iter_rows() {
        for (acc, x) in mean.iter_mut().zip(r) {
            *acc += x;
        }
    }
    if m.rows() > 0 {
        let n = m.rows() as f64;
        mean.iter_mut().for_each(|x| *x /= n);
    }
    mean
}

pub(crate) fn center_in_place(m: &mut Matrix) {
    let mean = column_means(m);
    for i in 0..m.rows() {
        for (x, mu) in m.row_mut(i).iter_mut().zip(&mean) {
            *x -= mu;
        }
    }
}

/// Length normalization and mean centering applied before orthogonal mapping.
///
/// `zero_rows` counts rows that are zero in the output, which happens for zero
/// input rows and for rows equal to the column mean (e.g. a single-token space).
pub fn normalize_step0(space: &EmbeddingSpace, variant: Step0) -> Normalized {
    let mut m = space.matrix().clone();
    normalize_rows_in_place(&mut m);
    center_in_place(&mut m);
    let zero_rows = match variant {
        Step0::UnitCenterUnit => normalize_rows_in_place(&mut m),
        Step0::UnitCenter => m.iter_rows().filter(|r| r.iter().all(|&x| x == 0.0)).count(),
    };
    Normalized { space: with_matrix(space, m), zero_rows }
}

fn with_matrix(space: &EmbeddingSpace, m: Matrix) -> EmbeddingSpace {
    // row count and dimension are unchanged and all operations keep values finite
    space.with_matrix(m).expect("normalization preserves space invariants")
}
