//! One-sided Jacobi (Hestenes) singular value decomposition.
//!
//! Column rotations are applied until every pair of columns is orthogonal to
//! working precision, which gives singular values with high relative accuracy.
//! Tall inputs are first reduced to their triangular QR factor when only the
//! right singular vectors are needed.

use alloc::vec;
use alloc::vec::Vec;

use super::Matrix;

const MAX_SWEEPS: usize = 80;

/// Thin SVD `a = u · diag(s) · vᵀ`, singular values in descending order.
///
/// For an `m × n` input, `u` is `m × min(m, n)` with orthonormal columns (columns
/// belonging to zero singular values are completed to an orthonormal set), `s`
/// has `min(m, n)` entries and `v` is the full `n × n` orthogonal matrix.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

pub fn svd(a: &Matrix) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    let mut cols = to_columns(a);
    let mut v = identity_columns(n);
    jacobi(&mut cols, &mut v);

    let norms: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let order = descending_order(&norms);
    let r = m.min(n);
    let smax = order.first().map_or(0.0, |&j| norms[j]);
    let cutoff = smax * (m.max(n) as f64) * f64::EPSILON;

    let mut u_cols: Vec<Option<Vec<f64>>> = Vec::with_capacity(r);
    let mut s = Vec::with_capacity(r);
    for &j in order.iter().take(r) {
        let sigma = norms[j];
        s.push(sigma);
        if sigma > cutoff && sigma > 0.0 {
            u_cols.push(Some(cols[j].iter().map(|x| x / sigma).collect()));
        } else {
            u_cols.push(None);
        }
    }
    let u_cols = complete_orthonormal(m, u_cols);

    let mut u = Matrix::zeros(m, r);
    for (j, c) in u_cols.iter().enumerate() {
        for i in 0..m {
            u[(i, j)] = c[i];
        }
    }
    let mut vm = Matrix::zeros(n, n);
    for (jj, &j) in order.iter().enumerate() {
        for i in 0..n {
            vm[(i, jj)] = v[j][i];
        }
    }
    Svd { u, s, v: vm }
}

/// Singular values (descending, `min(m, n)` of them) and the full `n × n` matrix of
/// right singular vectors. Cheaper than [`svd`] for tall inputs.
pub fn right_singular(a: &Matrix) -> (Vec<f64>, Matrix) {
    let (m, n) = (a.rows(), a.cols());
    let mut cols = if m > n { householder_r(a) } else { to_columns(a) };
    let mut v = identity_columns(n);
    jacobi(&mut cols, &mut v);
    let norms: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let order = descending_order(&norms);
    let s = order.iter().take(m.min(n)).map(|&j| norms[j]).collect();
    let mut vm = Matrix::zeros(n, n);
    for (jj, &j) in order.iter().enumerate() {
        for i in 0..n {
            vm[(i, jj)] = v[j][i];
        }
    }
    (s, vm)
}

fn jacobi(cols: &mut [Vec<f64>], v: &mut [Vec<f64>]) {
    let n = cols.len();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&cols[p], &cols[q]);
                    let mut a = 0.0;
                    let mut b = 0.0;
                    let mut g = 0.0;
                    for (x, y) in cp.iter().zip(cq) {
                        a += x * x;
                        b += y * y;
                        g += x * y;
                    }
                    (a, b, g)
                };
                if gamma == 0.0 || libm::fabs(gamma) <= f64::EPSILON * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = libm::copysign(1.0, zeta) / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(cols, p, q, c, s);
                rotate(v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Upper-triangular factor of a Householder QR, as `n` columns of length `n`.
fn householder_r(a: &Matrix) -> Vec<Vec<f64>> {
    let (m, n) = (a.rows(), a.cols());
    let mut cols = to_columns(a);
    for k in 0..n {
        let xnorm = norm(&cols[k][k..]);
        if xnorm == 0.0 {
            continue;
        }
        let alpha = -libm::copysign(xnorm, cols[k][k]);
        let mut hv: Vec<f64> = cols[k][k..].to_vec();
        hv[0] -= alpha;
        let hn = norm(&hv);
        if hn == 0.0 {
            continue;
        }
        for x in hv.iter_mut() {
            *x /= hn;
        }
        for col in cols.iter_mut().skip(k) {
            let seg = &mut col[k..m];
            let d: f64 = seg.iter().zip(&hv).map(|(x, h)| x * h).sum();
            for (x, h) in seg.iter_mut().zip(&hv) {
                *x -= 2.0 * d * h;
            }
        }
        cols[k][k] = alpha;
        for x in cols[k][k + 1..].iter_mut() {
            *x = 0.0;
        }
    }
    cols.into_iter()
        .map(|mut c| {
            c.truncate(n);
            c
        })
        .collect()
}

/// Fills `None` slots with unit vectors orthogonal to everything else.
fn complete_orthonormal(m: usize, slots: Vec<Option<Vec<f64>>>) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = slots.iter().flatten().cloned().collect();
    let mut candidate = 0usize;
    let mut out = Vec::with_capacity(slots.len());
    for slot in slots {
        match slot {
            Some(c) => out.push(c),
            None => loop {
                assert!(candidate < m, "cannot complete orthonormal basis");
                let mut e = vec![0.0; m];
                e[candidate] = 1.0;
                candidate += 1;
                // two passes of modified Gram-Schmidt
                for _ in 0..2 {
                    for b in &basis {
                        let d: f64 = e.iter().zip(b).map(|(x, y)| x * y).sum();
                        for (x, y) in e.iter_mut().zip(b) {
                            *x -= d * y;
                        }
                    }
                }
                let nrm = norm(&e);
                if nrm > 0.5 {
                    for x in e.iter_mut() {
                        *x /= nrm;
                    }
                    basis.push(e.clone());
                    out.push(e);
                    break;
                }
            },
        }
    }
    out
}

fn to_columns(a: &Matrix) -> Vec<Vec<f64>> {
    (0..a.cols()).map(|j| a.column(j)).collect()
}

fn identity_columns(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|j| {
            let mut c = vec![0.0; n];
            c[j] = 1.0;
            c
        })
        .collect()
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order
}

fn norm(x: &[f64]) -> f64 {
    libm::sqrt(x.iter().map(|v| v * v).sum())
}
