//! Subdeterminant scans and the facet band of Δ-modular matrices.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::par;

/// A nonsingular submatrix must have `|det| >= 1 - DELTA_MODULAR_TOL`.
pub const DELTA_MODULAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaModularityReport {
    pub min_abs_det: f64,
    /// Δ: largest |det| over d×d submatrices.
    pub max_abs_det: f64,
    pub num_submatrices: u64,
    pub num_nonsingular: u64,
    pub is_delta_modular: bool,
}

impl DeltaModularityReport {
    /// Ratio `max/min` over nonsingular submatrices; bounds `β/α` in
    /// [`facet_profile`] for any full-rank matrix.
    pub fn ratio(&self) -> f64 {
        self.max_abs_det / self.min_abs_det
    }
}

/// Scan every d×d submatrix of `w`.
pub fn delta_of(w: &Matrix, limit: usize) -> Result<DeltaModularityReport> {
    let (d, n) = (w.nrows(), w.ncols());
    linalg::full_row_rank(w)?;
    let count = linalg::binomial(n, d);
    if count > limit as u128 {
        return Err(Error::TooManySubsets { count, limit });
    }
    let maxnorm = w.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let thresh = 1e-9 * maxnorm.powi(d as i32);
    let subsets: Vec<Vec<usize>> = (0..n).combinations(d).collect();
    let dets = par::map_slice(&subsets, |s| linalg::det(&linalg::select_columns(w, s)).abs());
    let nonsingular: Vec<f64> = dets.iter().copied().filter(|&v| v > thresh).collect();
    let min_abs_det = nonsingular.iter().copied().fold(f64::INFINITY, f64::min);
    let max_abs_det = nonsingular.iter().copied().fold(0.0, f64::max);
    Ok(DeltaModularityReport {
        min_abs_det,
        max_abs_det,
        num_submatrices: dets.len() as u64,
        num_nonsingular: nonsingular.len() as u64,
        is_delta_modular: min_abs_det >= 1.0 - DELTA_MODULAR_TOL,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FacetProfile {
    pub normal: Vector,
    pub alpha: f64,
    pub beta: f64,
    pub zero_indices: Vec<usize>,
}

impl FacetProfile {
    pub fn ratio(&self) -> f64 {
        self.beta / self.alpha
    }
}

/// Unit normal `u` of the span of `d-1` chosen columns, and the band
/// `[α, β]` holding every nonzero `|u·w_i|`.
pub fn facet_profile(w: &Matrix, subset: &[usize]) -> Result<FacetProfile> {
    let d = w.nrows();
    if subset.len() + 1 != d {
        return Err(Error::BadShape(format!("subset of size {} for d = {d}", subset.len())));
    }
    if subset.iter().any(|&i| i >= w.ncols()) {
        return Err(Error::BadShape("subset index out of range".into()));
    }
    let u = linalg::unit_normal(&linalg::select_columns(w, subset)).ok_or(Error::DependentSubset)?;
    let mut zero_indices = Vec::new();
    let (mut alpha, mut beta) = (f64::INFINITY, 0.0_f64);
    for (i, col) in w.column_iter().enumerate() {
        let v = u.dot(&col).abs();
        if v <= 1e-9 * col.norm().max(1.0) {
            zero_indices.push(i);
        } else {
            alpha = alpha.min(v);
            beta = beta.max(v);
        }
    }
    if beta == 0.0 {
        // every generator lies in the hyperplane: W is rank deficient
        return Err(Error::RankDeficient { rank: d - 1, dim: d });
    }
    Ok(FacetProfile { normal: u, alpha, beta, zero_indices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cols(c: &[[f64; 2]]) -> Matrix {
        Matrix::from_fn(2, c.len(), |i, j| c[j][i])
    }

    #[test]
    fn delta_examples() {
        for d in 1..=4 {
            let r = delta_of(&Matrix::identity(d, d), 100).unwrap();
            assert_eq!(r.max_abs_det, 1.0);
            assert!(r.is_delta_modular);
        }
        let r = delta_of(&cols(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]), 100).unwrap();
        assert_eq!((r.min_abs_det, r.max_abs_det, r.num_submatrices), (1.0, 1.0, 3));
        let r = delta_of(&cols(&[[1.0, 0.0], [0.0, 1.0], [1.0, 2.0]]), 100).unwrap();
        assert_eq!((r.min_abs_det, r.max_abs_det), (1.0, 2.0));
        assert!(r.is_delta_modular);
        let r = delta_of(&cols(&[[0.5, 0.0], [0.0, 1.0]]), 100).unwrap();
        assert!(!r.is_delta_modular);
        assert!(matches!(delta_of(&cols(&[[1.0, 0.0], [2.0, 0.0]]), 100), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn profile_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = facet_profile(&cols(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]), &[2]).unwrap();
        assert_relative_eq!(p.normal[0], s, epsilon = 1e-12);
        assert_relative_eq!(p.normal[1], -s, epsilon = 1e-12);
        assert_relative_eq!(p.alpha, s, epsilon = 1e-12);
        assert_relative_eq!(p.beta, s, epsilon = 1e-12);
        assert_eq!(p.zero_indices, vec![2]);

        let p = facet_profile(&cols(&[[1.0, 0.0], [0.0, 1.0], [1.0, 2.0]]), &[0]).unwrap();
        assert_relative_eq!(p.normal[1], 1.0, epsilon = 1e-12);
        assert_relative_eq!(p.alpha, 1.0, epsilon = 1e-12);
        assert_relative_eq!(p.beta, 2.0, epsilon = 1e-12);
        assert_relative_eq!(p.ratio(), 2.0, epsilon = 1e-12);

        let p = facet_profile(&Matrix::identity(2, 2), &[0]).unwrap();
        assert_eq!((p.alpha, p.beta), (1.0, 1.0));
        assert_eq!(p.normal.as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn dependent_subset() {
        let w = Matrix::from_fn(3, 3, |i, j| {
            if i == 0 {
                (j + 1) as f64
            } else if i == j {
                1.0
            } else {
                0.0
            }
        });
        let dep = Matrix::from_column_slice(3, 3, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(facet_profile(&w, &[0, 1]).is_ok());
        assert!(matches!(facet_profile(&dep, &[0, 1]), Err(Error::DependentSubset)));
    }
}
