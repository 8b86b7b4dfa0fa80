//! Volumes of convex hulls of point clouds in dimensions 2 and 3.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geometry::{convex_hull_2d, polygon_area};

type P3 = [f64; 3];

fn sub(a: &P3, b: &P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: &P3, b: &P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: &P3, b: &P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &P3) -> f64 {
    dot(a, a).sqrt()
}

/// Volume of the convex hull of 3D points.
///
/// Every supporting plane through three points is found by brute force;
/// the facet on each plane is the 2D hull of the points lying on it, and the
/// volume is the sum of the pyramids from the centroid. Cubic in the number
/// of points, intended for a few hundred at most.
pub fn hull_volume_3d(points: &[P3]) -> f64 {
    let n = points.len();
    if n < 4 {
        return 0.0;
    }
    let scale = points.iter().map(norm).fold(0.0, f64::max).max(1e-300);
    let tol = 1e-9 * scale;
    let centroid = {
        let mut c = [0.0; 3];
        for p in points {
            for k in 0..3 {
                c[k] += p[k] / n as f64;
            }
        }
        c
    };
    let mut seen: HashSet<[i64; 4]> = HashSet::new();
    let mut volume = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut nrm = cross(&sub(&points[j], &points[i]), &sub(&points[k], &points[i]));
                let len = norm(&nrm);
                if len <= tol * scale {
                    continue;
                }
                nrm.iter_mut().for_each(|v| *v /= len);
                let mut off = dot(&nrm, &points[i]);
                let (mut above, mut below) = (false, false);
                for p in points {
                    let s = dot(&nrm, p) - off;
                    above |= s > tol;
                    below |= s < -tol;
                    if above && below {
                        break;
                    }
                }
                if above && below {
                    continue;
                }
                if above {
                    nrm.iter_mut().for_each(|v| *v = -*v);
                    off = -off;
                }
                let q = 1e7 / scale;
                let key = [
                    (nrm[0] * 1e7).round() as i64,
                    (nrm[1] * 1e7).round() as i64,
                    (nrm[2] * 1e7).round() as i64,
                    (off * q).round() as i64,
                ];
                if !seen.insert(key) {
                    continue;
                }
                // orthonormal basis of the plane
                let e1 = {
                    let t = sub(&points[j], &points[i]);
                    let l = norm(&t);
                    [t[0] / l, t[1] / l, t[2] / l]
                };
                let e2 = cross(&nrm, &e1);
                let on_plane: Vec<[f64; 2]> = points
                    .iter()
                    .filter(|p| (dot(&nrm, p) - off).abs() <= tol)
                    .map(|p| [dot(&e1, p), dot(&e2, p)])
                    .collect();
                let area = polygon_area(&convex_hull_2d(&on_plane));
                let height = off - dot(&nrm, &centroid);
                volume += area * height / 3.0;
            }
        }
    }
    volume
}

/// Hull volume for `d ∈ {2, 3}`; points given as rows of length `d`.
pub fn hull_volume(points: &[Vec<f64>], d: usize) -> Result<f64> {
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: points.iter().map(Vec::len).find(|&l| l != d).unwrap_or(0),
        });
    }
    match d {
        2 => {
            let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
            Ok(polygon_area(&convex_hull_2d(&pts)))
        }
        3 => {
            let pts: Vec<P3> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
            Ok(hull_volume_3d(&pts))
        }
        _ => Err(Error::InvalidArgument(format!("hull volume supports d = 2 or 3, got {d}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cube_volume() {
        let mut pts = Vec::new();
        for m in 0..8 {
            pts.push([
                (m & 1) as f64 * 2.0 - 1.0,
                ((m >> 1) & 1) as f64 * 2.0 - 1.0,
                ((m >> 2) & 1) as f64 * 2.0 - 1.0,
            ]);
        }
        pts.push([0.0, 0.0, 0.0]);
        pts.push([0.5, 1.0, 0.0]);
        assert_relative_eq!(hull_volume_3d(&pts), 8.0, epsilon = 1e-9);
    }

    #[test]
    fn tetrahedron_and_degenerate() {
        let t = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_relative_eq!(hull_volume_3d(&t), 1.0 / 6.0, epsilon = 1e-12);
        let flat = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        assert_relative_eq!(hull_volume_3d(&flat), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn dispatch() {
        let sq = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        assert_relative_eq!(hull_volume(&sq, 2).unwrap(), 1.0);
        assert!(hull_volume(&sq, 4).is_err());
    }
}
