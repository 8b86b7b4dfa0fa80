//! Seeded instance generators.

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{HPolytope, Zonotope};
use crate::io;
use crate::linalg::{self, Matrix};
use crate::rng::{self, stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gaussian,
    /// Incidence columns `e_u − e_v` of a connected graph on `d + 1`
    /// vertices with the last row dropped.
    TuIncidence,
    /// Indicator vectors of integer intervals (consecutive-ones columns).
    IntervalOnes,
    /// `(d/n)` times each axis repeated `n/d` times; the zonotope is the cube.
    SplitAxes,
    /// Generators read from a CSV file.
    ExplicitPath(PathBuf),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::TuIncidence => "tu_incidence",
            Family::IntervalOnes => "interval_ones",
            Family::SplitAxes => "split_axes",
            Family::ExplicitPath(_) => "explicit_path",
        }
    }
}

pub fn gen_random_zonotope(d: usize, n: usize, family: &Family, seed: u64) -> Result<Zonotope> {
    if d == 0 || (n == 0 && !matches!(family, Family::ExplicitPath(_))) {
        return Err(Error::BadShape(format!("d = {d}, n = {n} must be positive")));
    }
    let mut rng = rng::rng_for(seed, stream::INSTANCE, ((d as u64) << 32) | n as u64);
    let w = match family {
        Family::Gaussian => Matrix::from_fn(d, n, |_, _| StandardNormal.sample(&mut rng)),
        Family::TuIncidence => {
            let max = d * (d + 1) / 2;
            if n < d || n > max {
                return Err(Error::BadShape(format!("tu_incidence needs {d} <= n <= {max}, got {n}")));
            }
            // random recursive spanning tree over a shuffled vertex order
            let mut order: Vec<usize> = (0..=d).collect();
            order.shuffle(&mut rng);
            let mut edges: Vec<(usize, usize)> = (1..=d).map(|k| (order[rng.random_range(0..k)], order[k])).collect();
            let mut rest: Vec<(usize, usize)> = (0..=d)
                .flat_map(|u| (u + 1..=d).map(move |v| (u, v)))
                .filter(|&(u, v)| !edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u)))
                .collect();
            rest.shuffle(&mut rng);
            edges.extend(rest.into_iter().take(n - d));
            let mut w = Matrix::zeros(d, n);
            for (j, &(u, v)) in edges.iter().enumerate() {
                if u < d {
                    w[(u, j)] = 1.0;
                }
                if v < d {
                    w[(v, j)] = -1.0;
                }
            }
            w
        }
        Family::IntervalOnes => {
            if n < d {
                return Err(Error::BadShape(format!("interval_ones needs n >= d = {d}, got {n}")));
            }
            // prefixes [0, k] give full rank; the rest are uniform intervals
            let mut w = Matrix::zeros(d, n);
            for j in 0..n {
                let (a, b) = if j < d {
                    (0, j)
                } else {
                    let a = rng.random_range(0..d);
                    (a, rng.random_range(a..d))
                };
                for r in a..=b {
                    w[(r, j)] = 1.0;
                }
            }
            w
        }
        Family::SplitAxes => {
            if !n.is_multiple_of(d) {
                return Err(Error::BadShape(format!("split_axes needs n a multiple of d = {d}, got {n}")));
            }
            let reps = n / d;
            let c = d as f64 / n as f64;
            Matrix::from_fn(d, n, |r, j| if j / reps == r { c } else { 0.0 })
        }
        Family::ExplicitPath(path) => {
            let w = io::read_matrix_csv(path)?;
            if w.nrows() != d {
                return Err(Error::DimensionMismatch { expected: d, got: w.nrows() });
            }
            w
        }
    };
    Zonotope::new(w)
}

/// An origin-symmetric H-polytope with `max{α : αK ⊆ Q} = alpha` exactly,
/// where `K` has support function `h`.
///
/// Rows are `±e_k` plus `m` random unit normals `±a_j`, with offsets
/// `b_j = alpha · h(a_j) · (1 + U/2)`, `U ~ Uniform[0,1)`, and the first
/// random row made tight.
pub fn hpoly_with_alpha<F>(h: F, d: usize, alpha: f64, m: usize, seed: u64) -> Result<HPolytope>
where
    F: Fn(&[f64]) -> f64,
{
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} must be positive")));
    }
    let mut rng = rng::rng_for(seed, stream::INSTANCE, 0xa1fa);
    let mut dirs: Vec<Vec<f64>> = (0..m).map(|_| linalg::random_unit(&mut rng, d).as_slice().to_vec()).collect();
    for k in 0..d {
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        dirs.push(e);
    }
    let mut rows = Vec::with_capacity(2 * dirs.len());
    let mut offsets = Vec::with_capacity(2 * dirs.len());
    for (j, a) in dirs.iter().enumerate() {
        let slack: f64 = rng.random();
        let b = alpha * h(a) * if j == 0 { 1.0 } else { 1.0 + 0.5 * slack };
        if !(b > 0.0) {
            return Err(Error::InvalidBody("inner body is flat along a generated normal".into()));
        }
        rows.push(a.clone());
        offsets.push(b);
        rows.push(a.iter().map(|v| -v).collect());
        offsets.push(b);
    }
    HPolytope::from_rows(&rows, offsets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{delta_of, exact_opt_containment};
    use approx::assert_relative_eq;

    #[test]
    fn tu_incidence_k4() {
        let z = gen_random_zonotope(3, 6, &Family::TuIncidence, 1).unwrap();
        let rep = delta_of(z.generators(), 1000).unwrap();
        assert!(rep.is_delta_modular);
        assert_relative_eq!(rep.max_abs_det, 1.0, epsilon = 1e-12);
        assert!(gen_random_zonotope(3, 7, &Family::TuIncidence, 1).is_err());
    }

    #[test]
    fn families_are_unimodular() {
        for seed in 0..5 {
            for d in 2..=4 {
                let z = gen_random_zonotope(d, (d + 3).min(d * (d + 1) / 2), &Family::TuIncidence, seed).unwrap();
                assert_relative_eq!(delta_of(z.generators(), 100_000).unwrap().ratio(), 1.0, epsilon = 1e-9);
                let z = gen_random_zonotope(d, 2 * d + 1, &Family::IntervalOnes, seed).unwrap();
                let rep = delta_of(z.generators(), 100_000).unwrap();
                assert!(rep.is_delta_modular && (rep.max_abs_det - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn split_axes_is_cube() {
        let z = gen_random_zonotope(2, 16, &Family::SplitAxes, 0).unwrap();
        assert_relative_eq!(z.support_function(&[1.0, 0.0]), 1.0, epsilon = 1e-12);
        assert_relative_eq!(z.support_function(&[1.0, -1.0]), 2.0, epsilon = 1e-12);
        assert!(gen_random_zonotope(3, 16, &Family::SplitAxes, 0).is_err());
    }

    #[test]
    fn gaussian_is_deterministic() {
        let a = gen_random_zonotope(3, 10, &Family::Gaussian, 7).unwrap();
        let b = gen_random_zonotope(3, 10, &Family::Gaussian, 7).unwrap();
        let mut ba = Vec::new();
        let mut bb = Vec::new();
        io::write_matrix(&mut ba, a.generators()).unwrap();
        io::write_matrix(&mut bb, b.generators()).unwrap();
        assert_eq!(ba, bb);
    }

    #[test]
    fn planted_alpha_is_exact() {
        let z = gen_random_zonotope(3, 7, &Family::Gaussian, 2).unwrap();
        let q = hpoly_with_alpha(|a| z.support_function(a), 3, 0.9, 6, 4).unwrap();
        let ex = exact_opt_containment(|a| z.support_function(a), &q);
        assert_relative_eq!(ex.alpha, 0.9, epsilon = 1e-12);
    }
}
