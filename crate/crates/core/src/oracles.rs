//! Outer bodies described by a membership oracle.
//!
//! A [`BodySpec`] is the declarative, serializable description (JSON with a
//! `"type"` discriminator); [`Body`] is the validated form that answers
//! membership queries and counts them.
//!
//! ```json
//! {"type": "hpoly", "normals": [[1,0],[-1,0],[0,1],[0,-1]], "offsets": [3,3,3,3]}
//! {"type": "lp_ball", "dim": 3, "p": 2.0, "radius": 1.0}
//! {"type": "lp_ball", "dim": 3, "p": "inf", "radius": 1.0}
//! {"type": "ellipsoid", "shape": [[1,0],[0,4]]}
//! {"type": "scaled", "inner": {...}, "factor": 2.5}
//! {"type": "polar_of_zonotope", "generators": [[1,0,1],[0,1,1]]}
//! ```
//!
//! `polar_of_zonotope` generators are given row-wise, `d` rows of `n`
//! entries, matching the generator CSV layout.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::SystemTime;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{HPolytope, Zonotope};
use crate::linalg::{self, Matrix};
use crate::lp::{self, LpOptions};

/// Additive tolerance on each body's defining functional.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BodySpec {
    #[serde(rename = "hpoly")]
    HPoly {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    LpBall {
        dim: usize,
        #[serde(with = "pnorm")]
        p: f64,
        radius: f64,
    },
    /// `{x : xᵀ M x <= 1}`.
    Ellipsoid {
        shape: Vec<Vec<f64>>,
    },
    Scaled {
        inner: Box<BodySpec>,
        factor: f64,
    },
    PolarOfZonotope {
        generators: Vec<Vec<f64>>,
    },
}

mod pnorm {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Str(s) => match s.to_ascii_lowercase().as_str() {
                "inf" | "infinity" => Ok(f64::INFINITY),
                other => other.parse().map_err(serde::de::Error::custom),
            },
        }
    }
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<Matrix> {
    let c = rows.first().map(Vec::len).unwrap_or(0);
    if rows.is_empty() || c == 0 || rows.iter().any(|r| r.len() != c) {
        return Err(Error::BadShape("expected a nonempty rectangular matrix".into()));
    }
    Ok(Matrix::from_fn(rows.len(), c, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl BodySpec {
    pub fn cube(dim: usize, half: f64) -> BodySpec {
        BodySpec::LpBall { dim, p: f64::INFINITY, radius: half }
    }

    pub fn ball(dim: usize, radius: f64) -> BodySpec {
        BodySpec::LpBall { dim, p: 2.0, radius }
    }

    pub fn from_hpolytope(q: &HPolytope) -> BodySpec {
        BodySpec::HPoly { normals: matrix_to_rows(q.normals()), offsets: q.offsets().to_vec() }
    }

    pub fn ellipsoid(m: &Matrix) -> BodySpec {
        BodySpec::Ellipsoid { shape: matrix_to_rows(m) }
    }

    pub fn polar_of_zonotope(z: &Zonotope) -> BodySpec {
        BodySpec::PolarOfZonotope { generators: matrix_to_rows(z.generators()) }
    }

    pub fn scaled(self, factor: f64) -> BodySpec {
        BodySpec::Scaled { inner: Box::new(self), factor }
    }

    pub fn from_json(s: &str) -> Result<BodySpec> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone)]
enum Compiled {
    HPoly(HPolytope),
    LpBall { dim: usize, p: f64, radius: f64 },
    Ellipsoid(Matrix),
    Scaled(Box<Compiled>, f64),
    Polar(Zonotope),
}

impl Compiled {
    fn build(spec: &BodySpec) -> Result<Compiled> {
        match spec {
            BodySpec::HPoly { normals, offsets } => {
                Ok(Compiled::HPoly(HPolytope::new(rows_to_matrix(normals)?, offsets.clone())?))
            }
            BodySpec::LpBall { dim, p, radius } => {
                if *dim == 0 {
                    return Err(Error::InvalidBody("lp_ball dim must be >= 1".into()));
                }
                if !(*p >= 1.0) {
                    return Err(Error::InvalidBody(format!("p = {p} must lie in [1, inf]")));
                }
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::InvalidBody(format!("radius {radius} must be positive")));
                }
                Ok(Compiled::LpBall { dim: *dim, p: *p, radius: *radius })
            }
            BodySpec::Ellipsoid { shape } => {
                let m = rows_to_matrix(shape)?;
                if m.nrows() != m.ncols() {
                    return Err(Error::InvalidBody("ellipsoid shape must be square".into()));
                }
                let asym = (&m - m.transpose()).amax();
                if asym > 1e-9 * m.amax().max(1.0) {
                    return Err(Error::InvalidBody("ellipsoid shape must be symmetric".into()));
                }
                let (vals, _) = linalg::sym_eigen(&m);
                if !(vals[0] > 0.0) {
                    return Err(Error::InvalidBody("ellipsoid shape must be positive definite".into()));
                }
                Ok(Compiled::Ellipsoid(m))
            }
            BodySpec::Scaled { inner, factor } => {
                if !(*factor > 0.0) || !factor.is_finite() {
                    return Err(Error::InvalidBody(format!("scale factor {factor} must be positive")));
                }
                Ok(Compiled::Scaled(Box::new(Compiled::build(inner)?), *factor))
            }
            BodySpec::PolarOfZonotope { generators } => {
                let z = Zonotope::new(rows_to_matrix(generators)?)?;
                let rank = z.rank();
                if rank < z.dim() {
                    // polar of a flat zonotope is unbounded
                    return Err(Error::InvalidBody(format!(
                        "polar of a rank-{rank} zonotope in R^{} is unbounded",
                        z.dim()
                    )));
                }
                Ok(Compiled::Polar(z))
            }
        }
    }

    fn dim(&self) -> usize {
        match self {
            Compiled::HPoly(q) => q.dim(),
            Compiled::LpBall { dim, .. } => *dim,
            Compiled::Ellipsoid(m) => m.nrows(),
            Compiled::Scaled(inner, _) => inner.dim(),
            Compiled::Polar(z) => z.dim(),
        }
    }

    fn contains(&self, x: &[f64]) -> bool {
        match self {
            Compiled::HPoly(q) => q.contains(x, MEMBERSHIP_TOL),
            Compiled::LpBall { p, radius, .. } => linalg::lp_norm(x, *p) <= radius + MEMBERSHIP_TOL,
            Compiled::Ellipsoid(m) => {
                let v = linalg::Vector::from_column_slice(x);
                v.dot(&(m * &v)) <= 1.0 + MEMBERSHIP_TOL
            }
            Compiled::Scaled(inner, c) => {
                let y: Vec<f64> = x.iter().map(|v| v / c).collect();
                inner.contains(&y)
            }
            Compiled::Polar(z) => z.support_function(x) <= 1.0 + MEMBERSHIP_TOL,
        }
    }

    fn roundness(&self) -> Result<Roundness> {
        match self {
            Compiled::HPoly(q) => {
                let r =
                    q.normals().row_iter().zip(q.offsets()).map(|(a, b)| b / a.norm()).fold(f64::INFINITY, f64::min);
                let d = q.dim();
                let mut acc = 0.0;
                for k in 0..d {
                    let mut e = vec![0.0; d];
                    let mut extent = 0.0_f64;
                    for s in [1.0, -1.0] {
                        e[k] = s;
                        let (v, _) = lp::maximize_over_polyhedron(q.normals(), q.offsets(), &e, &LpOptions::default())
                            .map_err(|_| Error::Unbounded(format!("coordinate {k} unbounded")))?
                            .ok_or_else(|| Error::InvalidBody("empty polyhedron".into()))?;
                        extent = extent.max(v.abs());
                    }
                    acc += extent * extent;
                }
                Ok(Roundness { r, big_r: acc.sqrt(), approximate: false })
            }
            Compiled::LpBall { dim, p, radius } => {
                let expo = 0.5 - if p.is_infinite() { 0.0 } else { 1.0 / p };
                let f = (*dim as f64).powf(expo);
                Ok(Roundness { r: radius * f.min(1.0), big_r: radius * f.max(1.0), approximate: false })
            }
            Compiled::Ellipsoid(m) => {
                let (vals, _) = linalg::sym_eigen(m);
                let lmin = vals[0];
                let lmax = vals[vals.len() - 1];
                Ok(Roundness { r: 1.0 / lmax.sqrt(), big_r: 1.0 / lmin.sqrt(), approximate: false })
            }
            Compiled::Scaled(inner, c) => {
                let r = inner.roundness()?;
                Ok(Roundness { r: r.r * c, big_r: r.big_r * c, approximate: r.approximate })
            }
            Compiled::Polar(z) => {
                // max_u h_Z(u) <= min(Σ‖w_i‖, √n σ_max) and min_u h_Z(u) >= σ_min
                let w = z.generators();
                let sv = w.clone().svd(false, false).singular_values;
                let smax = sv.iter().cloned().fold(0.0, f64::max);
                let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
                if !(smin > 0.0) {
                    return Err(Error::Unbounded("polar of a flat zonotope".into()));
                }
                let hmax = z.column_norms().iter().sum::<f64>().min((z.count() as f64).sqrt() * smax);
                Ok(Roundness { r: 1.0 / hmax, big_r: 1.0 / smin, approximate: false })
            }
        }
    }
}

/// Radii with `r·B₂ ⊆ Q ⊆ R·B₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Roundness {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    /// True when either radius is an estimate rather than a certified bound.
    pub approximate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleStats {
    pub membership_queries: u64,
    pub last_reset: SystemTime,
}

/// Anything that answers membership queries.
pub trait MembershipOracle: Sync {
    fn dim(&self) -> usize;

    /// Counted membership query.
    fn membership(&self, x: &[f64]) -> Result<bool>;

    fn queries(&self) -> u64;
}

/// A validated body with a thread-safe query counter.
#[derive(Debug)]
pub struct Body {
    spec: BodySpec,
    compiled: Compiled,
    queries: AtomicU64,
    last_reset: Mutex<SystemTime>,
}

impl Clone for Body {
    fn clone(&self) -> Self {
        Body {
            spec: self.spec.clone(),
            compiled: self.compiled.clone(),
            queries: AtomicU64::new(0),
            last_reset: Mutex::new(SystemTime::now()),
        }
    }
}

impl Body {
    pub fn new(spec: BodySpec) -> Result<Body> {
        let compiled = Compiled::build(&spec)?;
        Ok(Body { spec, compiled, queries: AtomicU64::new(0), last_reset: Mutex::new(SystemTime::now()) })
    }

    pub fn spec(&self) -> &BodySpec {
        &self.spec
    }

    pub fn roundness(&self) -> Result<Roundness> {
        let r = self.compiled.roundness()?;
        let d = self.dim() as f64;
        if r.big_r / r.r > d.powi(4).max(1e3) {
            log::warn!("body is poorly rounded: R/r = {:.3e}", r.big_r / r.r);
        }
        Ok(r)
    }

    pub fn stats(&self) -> OracleStats {
        OracleStats {
            membership_queries: self.queries.load(Ordering::Relaxed),
            last_reset: *self.last_reset.lock().expect("stats lock"),
        }
    }

    pub fn reset(&self) {
        self.queries.store(0, Ordering::Relaxed);
        *self.last_reset.lock().expect("stats lock") = SystemTime::now();
    }

    /// The polar body, for the variants whose polar has a closed form.
    pub fn polar_spec(spec: &BodySpec) -> Result<BodySpec> {
        match spec {
            BodySpec::LpBall { dim, p, radius } => {
                let q = if p.is_infinite() {
                    1.0
                } else if *p == 1.0 {
                    f64::INFINITY
                } else {
                    p / (p - 1.0)
                };
                Ok(BodySpec::LpBall { dim: *dim, p: q, radius: 1.0 / radius })
            }
            BodySpec::Ellipsoid { shape } => {
                let m = rows_to_matrix(shape)?;
                let inv = m.try_inverse().ok_or_else(|| Error::InvalidBody("singular ellipsoid".into()))?;
                let inv = (&inv + inv.transpose()) * 0.5;
                Ok(BodySpec::ellipsoid(&inv))
            }
            BodySpec::HPoly { .. } => {
                let half = box_half_widths(spec)
                    .ok_or_else(|| Error::UnsupportedBody("only axis-aligned symmetric boxes".into()))?;
                let d = half.len();
                let w = Matrix::from_fn(d, d, |i, j| if i == j { half[i] } else { 0.0 });
                Ok(BodySpec::PolarOfZonotope { generators: matrix_to_rows(&w) })
            }
            BodySpec::Scaled { inner, factor } => Ok(Body::polar_spec(inner)?.scaled(1.0 / factor)),
            BodySpec::PolarOfZonotope { .. } => {
                Err(Error::UnsupportedBody("polar of a polar zonotope is the zonotope itself".into()))
            }
        }
    }
}

/// Half widths `b_k` when the H-description is exactly `{|x_k| <= b_k}`.
pub fn box_half_widths(spec: &BodySpec) -> Option<Vec<f64>> {
    let BodySpec::HPoly { normals, offsets } = spec else {
        return None;
    };
    let d = normals.first()?.len();
    let mut hi = vec![None; d];
    let mut lo = vec![None; d];
    for (a, &b) in normals.iter().zip(offsets) {
        let nz: Vec<usize> = (0..d).filter(|&k| a[k] != 0.0).collect();
        if nz.len() != 1 {
            return None;
        }
        let k = nz[0];
        let v = b / a[k].abs();
        if a[k] > 0.0 {
            hi[k] = Some(hi[k].map_or(v, |h: f64| h.min(v)));
        } else {
            lo[k] = Some(lo[k].map_or(v, |h: f64| h.min(v)));
        }
    }
    (0..d)
        .map(|k| match (hi[k], lo[k]) {
            (Some(h), Some(l)) if (h - l).abs() <= 1e-12 * h.max(1.0) => Some(h),
            _ => None,
        })
        .collect()
}

impl MembershipOracle for Body {
    fn dim(&self) -> usize {
        self.compiled.dim()
    }

    fn membership(&self, x: &[f64]) -> Result<bool> {
        let d = self.dim();
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len() });
        }
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.compiled.contains(x))
    }

    fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}
