use rand::Rng as _;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::lp::{self, LpOptions, LpOutcome};
use crate::par;
use crate::rng::{self, stream};

/// |w_i·a| at or below this counts as a tie in [`Zonotope::extreme_point`].
pub const TIE_TOL: f64 = 1e-12;

/// `Z(W) = { W x : ‖x‖∞ ≤ 1 }` for a d×n generator matrix `W`.
///
/// Zero columns contribute nothing to the set and are dropped at
/// construction; their original indices are kept in
/// [`Zonotope::dropped_zero_columns`].
#[derive(Debug, Clone, PartialEq)]
pub struct Zonotope {
    generators: Matrix,
    dropped_zero_columns: Vec<usize>,
}

impl Zonotope {
    pub fn new(w: Matrix) -> Result<Self> {
        if w.nrows() == 0 {
            return Err(Error::BadShape("zonotope needs d >= 1".into()));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("generator matrix has non-finite entries".into()));
        }
        let (keep, dropped): (Vec<usize>, Vec<usize>) =
            (0..w.ncols()).partition(|&j| w.column(j).iter().any(|&v| v != 0.0));
        if keep.is_empty() {
            return Err(Error::BadShape("zonotope needs at least one nonzero generator".into()));
        }
        let generators = if dropped.is_empty() { w } else { linalg::select_columns(&w, &keep) };
        Ok(Zonotope { generators, dropped_zero_columns: dropped })
    }

    /// Build from generator columns.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let d = cols.first().map(Vec::len).unwrap_or(0);
        if cols.iter().any(|c| c.len() != d) {
            return Err(Error::BadShape("ragged generator columns".into()));
        }
        Self::new(Matrix::from_fn(d, cols.len(), |i, j| cols[j][i]))
    }

    pub fn dim(&self) -> usize {
        self.generators.nrows()
    }

    pub fn count(&self) -> usize {
        self.generators.ncols()
    }

    pub fn generators(&self) -> &Matrix {
        &self.generators
    }

    pub fn dropped_zero_columns(&self) -> &[usize] {
        &self.dropped_zero_columns
    }

    pub fn column_norms(&self) -> Vec<f64> {
        self.generators.column_iter().map(|c| c.norm()).collect()
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.generators, linalg::RANK_RTOL)
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim()
    }

    pub fn scaled(&self, c: f64) -> Zonotope {
        Zonotope { generators: &self.generators * c, dropped_zero_columns: self.dropped_zero_columns.clone() }
    }

    /// `h_Z(a) = ‖Wᵀa‖₁`.
    pub fn support_function(&self, a: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), self.dim());
        self.generators.column_iter().map(|w| w.iter().zip(a).map(|(x, y)| x * y).sum::<f64>().abs()).sum()
    }

    /// Maximizer of `a·x` over `Z` with its sign vector. Generators with
    /// `|w_i·a| <= TIE_TOL` get sign +1.
    pub fn extreme_point(&self, a: &[f64]) -> Result<(Vector, Vec<i8>)> {
        if a.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroDirection);
        }
        let signs: Vec<i8> = self
            .generators
            .column_iter()
            .map(|w| {
                let dot: f64 = w.iter().zip(a).map(|(x, y)| x * y).sum();
                if dot < -TIE_TOL {
                    -1
                } else {
                    1
                }
            })
            .collect();
        Ok((self.image(&signs), signs))
    }

    /// `W y` for a sign vector `y`.
    pub fn image(&self, signs: &[i8]) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for (w, &s) in self.generators.column_iter().zip(signs) {
            match s {
                1 => out += w,
                -1 => out -= w,
                _ => {}
            }
        }
        out
    }

    /// Minkowski functional `‖p‖_Z = min{t : W x = p, ‖x‖∞ <= t}` via the
    /// bounded-variable LP. Errors with `RankDeficient` when `p` is outside
    /// the column span.
    pub fn gauge(&self, p: &[f64], tol: f64) -> Result<f64> {
        let (d, n) = (self.dim(), self.count());
        if p.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.len() });
        }
        if p.iter().all(|&v| v == 0.0) {
            return Ok(0.0);
        }
        // x_i = s_i - t with 0 <= s_i <= 2t:
        //   W s - (W 1) t = p,   s_i - 2t + slack_i = 0
        let w = &self.generators;
        let rowsum: Vec<f64> = (0..d).map(|i| w.row(i).sum()).collect();
        let cols = 2 * n + 1;
        let a = Matrix::from_fn(d + n, cols, |i, j| {
            if i < d {
                if j < n {
                    w[(i, j)]
                } else if j == n {
                    -rowsum[i]
                } else {
                    0.0
                }
            } else {
                let r = i - d;
                if j == r {
                    1.0
                } else if j == n {
                    -2.0
                } else if j == n + 1 + r {
                    1.0
                } else {
                    0.0
                }
            }
        });
        let mut b = vec![0.0; d + n];
        b[..d].copy_from_slice(p);
        let mut c = vec![0.0; cols];
        c[n] = 1.0;
        let opts = LpOptions { tol, max_iter: lp::DEFAULT_MAX_ITER };
        match lp::solve_standard(&a, &b, &c, &opts)? {
            LpOutcome::Optimal { value, .. } => Ok(value.max(0.0)),
            LpOutcome::Infeasible => Err(Error::RankDeficient { rank: self.rank(), dim: d }),
            LpOutcome::Unbounded => Err(Error::LpNumerical("gauge LP reported unbounded".into())),
        }
    }

    /// Monte Carlo mean width `E_u[h(u) + h(-u)] = 2 E_u[h(u)]` over
    /// uniform unit directions. Returns `(estimate, standard error)`.
    pub fn mean_width_estimate(&self, num_dirs: usize, seed: u64) -> Result<(f64, f64)> {
        if num_dirs < 100 {
            return Err(Error::InvalidArgument(format!("num_dirs {num_dirs} < 100")));
        }
        const CHUNK: usize = 1024;
        let d = self.dim();
        let chunks = num_dirs.div_ceil(CHUNK);
        let partial = par::map_indexed(chunks, |c| {
            let mut rng = rng::rng_for(seed, stream::MEAN_WIDTH, c as u64);
            let end = ((c + 1) * CHUNK).min(num_dirs);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in c * CHUNK..end {
                let u = if d == 1 {
                    Vector::from_element(1, if rng.random::<bool>() { 1.0 } else { -1.0 })
                } else {
                    linalg::random_unit(&mut rng, d)
                };
                let h = self.support_function(u.as_slice());
                s += h;
                s2 += h * h;
            }
            (s, s2)
        });
        let (s, s2) = partial.into_iter().fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
        let n = num_dirs as f64;
        let mean = s / n;
        let var = ((s2 / n) - mean * mean).max(0.0) * n / (n - 1.0);
        Ok((2.0 * mean, 2.0 * (var / n).sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hexagon() -> Zonotope {
        Zonotope::from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn zero_columns_dropped() {
        let z = Zonotope::from_columns(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert_eq!(z.count(), 2);
        assert_eq!(z.dropped_zero_columns(), &[1]);
        assert!(Zonotope::from_columns(&[vec![0.0, 0.0]]).is_err());
    }

    #[test]
    fn support_examples() {
        let sq = Zonotope::new(Matrix::identity(2, 2)).unwrap();
        assert_eq!(sq.support_function(&[1.0, 0.0]), 1.0);
        assert_eq!(hexagon().support_function(&[1.0, 0.0]), 2.0);
        assert_eq!(hexagon().support_function(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn extreme_point_examples() {
        let sq = Zonotope::new(Matrix::identity(2, 2)).unwrap();
        assert_eq!(sq.extreme_point(&[1.0, -1.0]).unwrap().0.as_slice(), &[1.0, -1.0]);
        let (p, s) = hexagon().extreme_point(&[2.0, 1.0]).unwrap();
        assert_eq!(p.as_slice(), &[2.0, 2.0]);
        assert_eq!(s, vec![1, 1, 1]);
        // w3·a = 0 is a tie, resolved to +1
        let (p, s) = hexagon().extreme_point(&[1.0, -1.0]).unwrap();
        assert_eq!(s, vec![1, -1, 1]);
        assert_eq!(p.as_slice(), &[2.0, 0.0]);
        assert!(matches!(hexagon().extreme_point(&[0.0, 0.0]), Err(Error::ZeroDirection)));
    }

    #[test]
    fn gauge_examples() {
        let z = hexagon();
        assert_relative_eq!(z.gauge(&[2.0, 2.0], 1e-9).unwrap(), 1.0, epsilon = 1e-9);
        assert_eq!(z.gauge(&[0.0, 0.0], 1e-9).unwrap(), 0.0);
        assert_relative_eq!(z.gauge(&[4.0, 4.0], 1e-9).unwrap(), 2.0, epsilon = 1e-9);
        // (1, 0.5) = 0.5 w1 + 0 w2 + 0.5 w3 -> gauge 0.5
        assert_relative_eq!(z.gauge(&[1.0, 0.5], 1e-9).unwrap(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn gauge_outside_span() {
        let z = Zonotope::from_columns(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_relative_eq!(z.gauge(&[1.0, 0.0], 1e-9).unwrap(), 0.5, epsilon = 1e-9);
        assert!(matches!(z.gauge(&[0.0, 1.0], 1e-9), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn mean_width_examples() {
        let seg = Zonotope::from_columns(&[vec![1.0]]).unwrap();
        let (w, se) = seg.mean_width_estimate(200, 1).unwrap();
        assert_eq!(w, 2.0);
        assert_eq!(se, 0.0);
        let sq = Zonotope::new(Matrix::identity(2, 2)).unwrap();
        let (w, se) = sq.mean_width_estimate(100_000, 3).unwrap();
        assert!((w - 8.0 / std::f64::consts::PI).abs() <= 3.0 * se, "{w} ± {se}");
        let (w2, se2) = sq.scaled(2.0).mean_width_estimate(100_000, 3).unwrap();
        assert!((w2 - 16.0 / std::f64::consts::PI).abs() <= 3.0 * se2);
        assert!(sq.mean_width_estimate(99, 0).is_err());
    }
}
