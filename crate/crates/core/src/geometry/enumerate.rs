//! Exhaustive small-scale oracles: vertices, facet normals, exact volume.

use std::collections::HashMap;

use itertools::Itertools;

use super::Zonotope;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::lp::{self, LpOptions, LpOutcome};
use crate::par;

pub const DEFAULT_VERTEX_LIMIT: usize = 24;
pub const DEFAULT_SUBSET_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct VertexSet {
    pub points: Vec<Vector>,
    pub signs: Vec<Vec<i8>>,
    /// Set when `rank(W) < d`; the points are then extreme points of a
    /// lower-dimensional zonotope.
    pub degenerate: bool,
}

fn signs_of(mask: u64, n: usize) -> Vec<i8> {
    (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect()
}

/// `W y` is a vertex iff some `a` has `y_i (w_i·a) > 0` for every `i`;
/// in that case the preimage `y` is unique, so no deduplication is needed.
fn is_vertex_signs(w: &Matrix, signs: &[i8], image: &Vector) -> Result<bool> {
    let (d, n) = (w.nrows(), w.ncols());
    let scale: f64 = w.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    // Cheap certificate: the image itself is often a separating direction.
    let strict = |a: &[f64]| {
        w.column_iter().zip(signs).all(|(c, &s)| {
            let dot: f64 = c.iter().zip(a).map(|(x, y)| x * y).sum();
            f64::from(s) * dot > 1e-12 * scale * scale
        })
    };
    if strict(image.as_slice()) {
        return Ok(true);
    }
    // y_i w_i·(a⁺ - a⁻) - σ_i = 1
    let a = Matrix::from_fn(n, 2 * d + n, |i, j| {
        let s = f64::from(signs[i]);
        if j < d {
            s * w[(j, i)]
        } else if j < 2 * d {
            -s * w[(j - d, i)]
        } else if j - 2 * d == i {
            -1.0
        } else {
            0.0
        }
    });
    let c = vec![0.0; 2 * d + n];
    let out = lp::solve_standard(&a, &vec![1.0; n], &c, &LpOptions::default())?;
    Ok(matches!(out, LpOutcome::Optimal { .. }))
}

/// All extreme points of `Z`, by testing every sign vector. Requires
/// `n <= limit`.
pub fn enumerate_vertices(z: &Zonotope, limit: usize) -> Result<VertexSet> {
    let n = z.count();
    if n > limit || n > 63 {
        return Err(Error::TooManyGenerators { n, limit });
    }
    let w = z.generators();
    let total = 1u64 << n;
    const CHUNK: u64 = 256;
    let chunks = total.div_ceil(CHUNK) as usize;
    let found = par::map_indexed(chunks, |c| -> Result<Vec<(Vec<i8>, Vector)>> {
        let mut out = Vec::new();
        for mask in c as u64 * CHUNK..((c as u64 + 1) * CHUNK).min(total) {
            let s = signs_of(mask, n);
            let img = z.image(&s);
            if is_vertex_signs(w, &s, &img)? {
                out.push((s, img));
            }
        }
        Ok(out)
    });
    let mut points = Vec::new();
    let mut signs = Vec::new();
    for chunk in found {
        for (s, p) in chunk? {
            signs.push(s);
            points.push(p);
        }
    }
    Ok(VertexSet { points, signs, degenerate: !z.is_full_rank() })
}

fn quantize(v: &Vector) -> Vec<i64> {
    v.iter().map(|x| (x * 1e7).round() as i64).collect()
}

/// Unit facet normals (one per ± pair), sign-canonicalized and deduplicated.
pub fn enumerate_facet_normals(z: &Zonotope, limit: usize) -> Result<Vec<Vector>> {
    let (d, n) = (z.dim(), z.count());
    let rank = z.rank();
    if rank < d {
        return Err(Error::RankDeficient { rank, dim: d });
    }
    let count = linalg::binomial(n, d - 1);
    if count > limit as u128 {
        return Err(Error::TooManySubsets { count, limit });
    }
    let w = z.generators();
    let subsets: Vec<Vec<usize>> = (0..n).combinations(d - 1).collect();
    let normals = par::map_slice(&subsets, |s| linalg::unit_normal(&linalg::select_columns(w, s)));
    let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
    let mut out = Vec::new();
    for u in normals.into_iter().flatten() {
        if seen.insert(quantize(&u), ()).is_none() {
            out.push(u);
        }
    }
    out.sort_by(|a, b| {
        a.iter().zip(b.iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// `Vol(Z) = 2^d Σ_{|S|=d} |det W_S|`.
pub fn volume(z: &Zonotope, limit: usize) -> Result<f64> {
    let (d, n) = (z.dim(), z.count());
    let count = linalg::binomial(n, d);
    if count > limit as u128 {
        return Err(Error::TooManySubsets { count, limit });
    }
    let w = z.generators();
    let subsets: Vec<Vec<usize>> = (0..n).combinations(d).collect();
    const CHUNK: usize = 512;
    let total = par::chunked_sum(subsets.len(), CHUNK, |r| {
        subsets[r].iter().map(|s| linalg::det(&linalg::select_columns(w, s)).abs()).sum()
    });
    Ok(2f64.powi(d as i32) * total)
}

/// Convex hull of planar points, counter-clockwise, collinear points removed.
pub fn convex_hull_2d(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross =
        |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let floor = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for p in iter {
            while hull.len() >= floor + 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 1e-12 {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull
}

/// Shoelace area of a simple polygon.
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum();
    twice.abs() / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hexagon() -> Zonotope {
        Zonotope::from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap()
    }

    fn as_pairs(vs: &VertexSet) -> Vec<(i64, i64)> {
        let mut v: Vec<(i64, i64)> = vs.points.iter().map(|p| (p[0].round() as i64, p[1].round() as i64)).collect();
        v.sort();
        v
    }

    #[test]
    fn vertices_of_square_and_hexagon() {
        let sq = Zonotope::new(Matrix::identity(2, 2)).unwrap();
        assert_eq!(as_pairs(&enumerate_vertices(&sq, 24).unwrap()), vec![(-1, -1), (-1, 1), (1, -1), (1, 1)]);
        let hex = enumerate_vertices(&hexagon(), 24).unwrap();
        assert_eq!(as_pairs(&hex), vec![(-2, -2), (-2, 0), (0, -2), (0, 2), (2, 0), (2, 2)]);
        assert!(!hex.degenerate);
    }

    #[test]
    fn degenerate_vertices() {
        let z = Zonotope::from_columns(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let vs = enumerate_vertices(&z, 24).unwrap();
        assert!(vs.degenerate);
        assert_eq!(as_pairs(&vs), vec![(-2, 0), (2, 0)]);
        let too_many = Zonotope::new(Matrix::from_element(1, 5, 1.0)).unwrap();
        assert!(matches!(enumerate_vertices(&too_many, 4), Err(Error::TooManyGenerators { .. })));
    }

    #[test]
    fn facet_normal_examples() {
        let sq = Zonotope::new(Matrix::identity(2, 2)).unwrap();
        let f = enumerate_facet_normals(&sq, 1000).unwrap();
        assert_eq!(f.len(), 2);
        let f = enumerate_facet_normals(&hexagon(), 1000).unwrap();
        assert_eq!(f.len(), 3);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(f.iter().any(|u| (u[0] - s).abs() < 1e-12 && (u[1] + s).abs() < 1e-12));
        let par = Zonotope::from_columns(&[vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(enumerate_facet_normals(&par, 1000).unwrap().len(), 2);
        let flat = Zonotope::from_columns(&[vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert!(matches!(enumerate_facet_normals(&flat, 1000), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn volume_examples() {
        for d in 1..=4 {
            let z = Zonotope::new(Matrix::identity(d, d)).unwrap();
            assert_relative_eq!(volume(&z, 100).unwrap(), 2f64.powi(d as i32));
            assert_relative_eq!(volume(&z.scaled(1.5), 100).unwrap(), 3f64.powi(d as i32), epsilon = 1e-12);
        }
        assert_relative_eq!(volume(&hexagon(), 100).unwrap(), 12.0);
        let hex = enumerate_vertices(&hexagon(), 24).unwrap();
        let pts: Vec<[f64; 2]> = hex.points.iter().map(|p| [p[0], p[1]]).collect();
        assert_relative_eq!(polygon_area(&convex_hull_2d(&pts)), 12.0, epsilon = 1e-12);
        let flat = Zonotope::from_columns(&[vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(volume(&flat, 100).unwrap(), 0.0);
        let big = Zonotope::new(Matrix::from_element(3, 40, 1.0)).unwrap();
        assert!(matches!(volume(&big, 100), Err(Error::TooManySubsets { .. })));
    }
}
