//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::Rng;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Numerical rank from singular values, relative threshold `rtol`.
pub fn rank(m: &Matrix, rtol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    let cut = rtol * smax * (m.nrows().max(m.ncols()) as f64);
    sv.iter().filter(|&&s| s > cut).count()
}

pub const RANK_RTOL: f64 = 1e-12;

pub fn full_row_rank(m: &Matrix) -> Result<()> {
    let r = rank(m, RANK_RTOL);
    if r < m.nrows() {
        return Err(Error::RankDeficient { rank: r, dim: m.nrows() });
    }
    Ok(())
}

/// Determinant: cofactor expansion up to 4×4, partial-pivot LU beyond.
pub fn det(m: &Matrix) -> f64 {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    match n {
        0 => 1.0,
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        3 | 4 => {
            let mut acc = 0.0;
            for j in 0..n {
                let a = m[(0, j)];
                if a == 0.0 {
                    continue;
                }
                let minor = m.clone().remove_row(0).remove_column(j);
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += s * a * det(&minor);
            }
            acc
        }
        _ => m.clone().lu().determinant(),
    }
}

/// Square submatrix made of the given columns.
pub fn select_columns(m: &Matrix, cols: &[usize]) -> Matrix {
    Matrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

/// Unit vector orthogonal to `d-1` vectors in R^d, via signed maximal minors.
/// Returns `None` when the vectors are dependent. The sign is canonicalized so
/// the first nonzero coordinate is positive.
pub fn unit_normal(vectors: &Matrix) -> Option<Vector> {
    let d = vectors.nrows();
    if vectors.ncols() + 1 != d {
        return None;
    }
    if d == 1 {
        return Some(Vector::from_element(1, 1.0));
    }
    let mut u = Vector::zeros(d);
    for k in 0..d {
        let minor = vectors.clone().remove_row(k);
        let s = if k % 2 == 0 { 1.0 } else { -1.0 };
        u[k] = s * det(&minor);
    }
    let scale: f64 = vectors.column_iter().map(|c| c.norm()).product();
    let norm = u.norm();
    if scale == 0.0 || norm <= 1e-10 * scale {
        return None;
    }
    u /= norm;
    Some(canonical_sign(u))
}

/// Flip `v` so its first coordinate above 1e-12 in magnitude is positive.
pub fn canonical_sign(mut v: Vector) -> Vector {
    if let Some(x) = v.iter().find(|x| x.abs() > 1e-12) {
        if *x < 0.0 {
            v.neg_mut();
        }
    }
    v
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
pub fn sym_eigen(m: &Matrix) -> (Vector, Matrix) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = Vector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let vectors = Matrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// `M^{-1/2}` for symmetric positive-definite `M`. Eigenvalues below
/// `1e-12 * λ_max` are treated as zero and reported as rank deficiency.
pub fn sym_inv_sqrt(m: &Matrix) -> Result<Matrix> {
    let (vals, vecs) = sym_eigen(m);
    let n = m.nrows();
    let lmax = vals.iter().cloned().fold(0.0_f64, f64::max);
    let rank = vals.iter().filter(|&&l| l > 1e-12 * lmax).count();
    if lmax <= 0.0 || rank < n {
        return Err(Error::RankDeficient { rank, dim: n });
    }
    let diag = Vector::from_iterator(n, vals.iter().map(|l| 1.0 / l.sqrt()));
    Ok(&vecs * Matrix::from_diagonal(&diag) * vecs.transpose())
}

/// Eigenvalues of the pencil `(a, b)` with `b` symmetric positive definite,
/// ascending.
pub fn generalized_eigenvalues(a: &Matrix, b: &Matrix) -> Result<Vector> {
    let s = sym_inv_sqrt(b)?;
    let c = &s * a * &s;
    let c = (&c + c.transpose()) * 0.5;
    Ok(sym_eigen(&c).0)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Uniform direction on the unit sphere S^{d-1}.
pub fn random_unit(rng: &mut Rng, d: usize) -> Vector {
    loop {
        let v = Vector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-300 {
            return v / n;
        }
    }
}

pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        // scale to avoid overflow for large p
        let m = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if m == 0.0 {
            return 0.0;
        }
        m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn det_agrees_with_lu() {
        let m = Matrix::from_row_slice(
            5,
            5,
            &[
                2.0, 1.0, 0.0, 3.0, 1.0, 1.0, 4.0, 1.0, 0.0, 2.0, 0.0, 1.0, 5.0, 1.0, 1.0, 3.0, 0.0, 1.0, 6.0, 2.0,
                1.0, 2.0, 1.0, 2.0, 7.0,
            ],
        );
        for k in 1..=5 {
            let sub = m.view((0, 0), (k, k)).into_owned();
            assert_relative_eq!(det(&sub), sub.clone().lu().determinant(), epsilon = 1e-9);
        }
    }

    #[test]
    fn unit_normal_in_3d() {
        let v = Matrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let u = unit_normal(&v).unwrap();
        assert_relative_eq!(u, Vector::from_vec(vec![0.0, 0.0, 1.0]), epsilon = 1e-12);
        let dep = Matrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        assert!(unit_normal(&dep).is_none());
    }

    #[test]
    fn inverse_sqrt_whitens() {
        let m = Matrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let s = sym_inv_sqrt(&m).unwrap();
        let id = &s * &m * &s;
        assert_relative_eq!(id, Matrix::identity(2, 2), epsilon = 1e-12);
        let sing = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(sym_inv_sqrt(&sing), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 2), 15);
        assert_eq!(binomial(24, 12), 2_704_156);
        assert_eq!(binomial(3, 5), 0);
    }
}
