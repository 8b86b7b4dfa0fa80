//! Bring a zonotope into normalized position: `W Wᵀ = I` and every column
//! of norm at most `2√(d/n)`.
//!
//! Whitening is an invertible linear map; replacing `w` by two copies of
//! `w/2` leaves the point set unchanged. Alternating the two therefore gives
//! `T(Z) = Z_norm` exactly.

use super::Zonotope;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

pub const DEFAULT_MAX_ITER: usize = 64;
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct NormalizationResult {
    pub transform: Matrix,
    pub normalized: Zonotope,
    /// `split_map[i]` lists the normalized columns descending from input column `i`.
    pub split_map: Vec<Vec<usize>>,
    /// Whitening passes performed.
    pub iterations: usize,
    pub splits: usize,
}

pub fn column_norm_bound(d: usize, n: usize) -> f64 {
    2.0 * (d as f64 / n as f64).sqrt()
}

pub fn identity_defect(w: &Matrix) -> f64 {
    let d = w.nrows();
    (w * w.transpose() - Matrix::identity(d, d)).norm()
}

pub fn normalize(z: &Zonotope, max_iter: usize) -> Result<NormalizationResult> {
    let d = z.dim();
    let rank = z.rank();
    if rank < d {
        return Err(Error::RankDeficient { rank, dim: d });
    }
    let mut cols: Vec<(Vector, usize)> =
        z.generators().column_iter().enumerate().map(|(i, c)| (c.into_owned(), i)).collect();
    let mut transform = Matrix::identity(d, d);
    let mut splits = 0;
    for iter in 1..=max_iter {
        let w = Matrix::from_columns(&cols.iter().map(|c| c.0.clone()).collect::<Vec<_>>());
        let s = linalg::sym_inv_sqrt(&(&w * w.transpose()))?;
        transform = &s * transform;
        for c in cols.iter_mut() {
            c.0 = &s * &c.0;
        }
        let bound = column_norm_bound(d, cols.len());
        let mut next = Vec::with_capacity(cols.len());
        let mut split_now = 0;
        for (c, origin) in cols {
            if c.norm() > bound {
                let half = c * 0.5;
                next.push((half.clone(), origin));
                next.push((half, origin));
                split_now += 1;
            } else {
                next.push((c, origin));
            }
        }
        cols = next;
        splits += split_now;
        if split_now == 0 {
            let w = Matrix::from_columns(&cols.iter().map(|c| c.0.clone()).collect::<Vec<_>>());
            let defect = identity_defect(&w);
            if defect <= IDENTITY_TOL {
                let mut split_map = vec![Vec::new(); z.count()];
                for (j, (_, origin)) in cols.iter().enumerate() {
                    split_map[*origin].push(j);
                }
                return Ok(NormalizationResult {
                    transform,
                    normalized: Zonotope::new(w)?,
                    split_map,
                    iterations: iter,
                    splits,
                });
            }
        }
    }
    let w = Matrix::from_columns(&cols.iter().map(|c| c.0.clone()).collect::<Vec<_>>());
    Err(Error::NoConvergence { iterations: max_iter, residual: identity_defect(&w) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_is_fixed() {
        let r = normalize(&Zonotope::new(Matrix::identity(2, 2)).unwrap(), 64).unwrap();
        assert_relative_eq!(r.transform, Matrix::identity(2, 2), epsilon = 1e-14);
        assert_eq!(r.splits, 0);
        assert_eq!(r.normalized.count(), 2);
    }

    #[test]
    fn diagonal_whitening() {
        let w = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 1.0]));
        let r = normalize(&Zonotope::new(w).unwrap(), 64).unwrap();
        let t = Matrix::from_diagonal(&Vector::from_vec(vec![0.5, 1.0]));
        assert_relative_eq!(r.transform, t, epsilon = 1e-14);
        assert_relative_eq!(*r.normalized.generators(), Matrix::identity(2, 2), epsilon = 1e-14);
    }

    #[test]
    fn one_dimensional_split() {
        let z = Zonotope::new(Matrix::from_row_slice(1, 5, &[1.0, 0.1, 0.1, 0.1, 0.1])).unwrap();
        let r = normalize(&z, 64).unwrap();
        assert_eq!(r.normalized.count(), 6);
        assert_eq!(r.splits, 1);
        assert_eq!(r.iterations, 2);
        assert_eq!(r.split_map[0], vec![0, 1]);
        let norms = r.normalized.column_norms();
        assert_relative_eq!(norms[0], 0.680, epsilon = 1e-3);
        assert_relative_eq!(norms[2], 0.136, epsilon = 1e-3);
        assert!(norms.iter().all(|&x| x <= column_norm_bound(1, 6)));
    }

    #[test]
    fn caps_iterations() {
        let z = Zonotope::new(Matrix::from_row_slice(1, 5, &[1.0, 0.1, 0.1, 0.1, 0.1])).unwrap();
        assert!(matches!(normalize(&z, 1), Err(Error::NoConvergence { .. })));
    }
}
