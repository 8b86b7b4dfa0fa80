//! Hit-and-run sampling from a body known only through membership queries.

use rand::Rng as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::oracles::{Body, MembershipOracle};
use crate::rng::{self, stream};

const MAX_BISECTIONS: usize = 60;
const GROWTH_START: f64 = 1.0 / 1024.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Chord endpoint accuracy; `None` means `1e-9 · R`.
    pub chord_tol: Option<f64>,
}

impl WalkConfig {
    pub fn defaults(d: usize, seed: u64) -> Self {
        WalkConfig { burn_in: 1000 + 50 * d, thin: (2 * d).max(1), seed, chord_tol: None }
    }

    fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(Error::InvalidArgument("thin must be >= 1".into()));
        }
        if let Some(t) = self.chord_tol {
            if !(t > 0.0) {
                return Err(Error::InvalidArgument(format!("chord_tol {t} must be positive")));
            }
        }
        Ok(())
    }
}

/// Largest `t` with `x + tθ` inside, to within `tol`; `x` must be inside.
fn chord_end<O: MembershipOracle + ?Sized>(
    body: &O,
    x: &[f64],
    theta: &[f64],
    big_r: f64,
    tol: f64,
    buf: &mut [f64],
) -> Result<f64> {
    let probe = |t: f64, buf: &mut [f64]| -> Result<bool> {
        for k in 0..x.len() {
            buf[k] = x[k] + t * theta[k];
        }
        body.membership(buf)
    };
    let mut inside = 0.0;
    let mut outside = big_r * GROWTH_START;
    while probe(outside, buf)? {
        inside = outside;
        outside *= 2.0;
        if outside > 4.0 * big_r {
            return Err(Error::OracleInconsistent(format!(
                "body extends beyond {:.3e} along a ray, past the circumradius bound {big_r:.3e}",
                inside
            )));
        }
    }
    for _ in 0..MAX_BISECTIONS {
        if outside - inside <= tol {
            break;
        }
        let mid = 0.5 * (inside + outside);
        if probe(mid, buf)? {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(inside)
}

/// Runs one chain with circumradius bound `big_r`, returning `count` points.
pub fn walk<O: MembershipOracle + ?Sized>(
    body: &O,
    big_r: f64,
    start: &[f64],
    count: usize,
    cfg: &WalkConfig,
) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let d = body.dim();
    if start.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: start.len() });
    }
    if !(big_r > 0.0) || !big_r.is_finite() {
        return Err(Error::InvalidArgument(format!("circumradius bound {big_r} must be positive")));
    }
    let margin = 1e-6 * big_r;
    let mut probe = start.to_vec();
    if !body.membership(start)? {
        return Err(Error::StartNotInterior);
    }
    for k in 0..d {
        for s in [margin, -margin] {
            probe.copy_from_slice(start);
            probe[k] += s;
            if !body.membership(&probe)? {
                return Err(Error::StartNotInterior);
            }
        }
    }

    let tol = cfg.chord_tol.unwrap_or(1e-9 * big_r);
    let mut rng = rng::rng_for(cfg.seed, stream::WALK, 0);
    let mut x = start.to_vec();
    let mut theta = vec![0.0; d];
    let mut neg = vec![0.0; d];
    let mut out = Vec::with_capacity(count);
    let total = cfg.burn_in + count * cfg.thin;
    for step in 1..=total {
        theta.copy_from_slice(linalg::random_unit(&mut rng, d).as_slice());
        neg.iter_mut().zip(&theta).for_each(|(n, t)| *n = -t);
        let hi = chord_end(body, &x, &theta, big_r, tol, &mut probe)?;
        let lo = -chord_end(body, &x, &neg, big_r, tol, &mut probe)?;
        let t = if hi > lo { rng.random_range(lo..=hi) } else { 0.0 };
        for k in 0..d {
            x[k] += t * theta[k];
        }
        if step > cfg.burn_in && (step - cfg.burn_in).is_multiple_of(cfg.thin) {
            if !body.membership(&x)? {
                return Err(Error::OracleInconsistent("chord interior point rejected".into()));
            }
            out.push(x.clone());
        }
    }
    Ok(out)
}

/// Hit-and-run on `body`, using its roundness radius `R` for chord search.
pub fn hit_and_run(body: &Body, start: &[f64], count: usize, cfg: &WalkConfig) -> Result<Vec<Vec<f64>>> {
    let big_r = body.roundness()?.big_r;
    walk(body, big_r, start, count, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityReport {
    pub count: usize,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    /// `E[x_k²]` per coordinate.
    pub second_moment: Vec<f64>,
    pub mean_sq_norm: f64,
    /// Fraction of points per orthant, indexed by sign bits (bit k set when
    /// `x_k < 0`); only for `d <= 4`.
    pub orthant_fractions: Option<Vec<f64>>,
    /// Largest gap between an orthant and its opposite; 0 for mirrored sets.
    pub symmetry_statistic: Option<f64>,
    pub membership_pass_fraction: f64,
}

pub fn uniformity_diagnostics<O: MembershipOracle + ?Sized>(points: &[Vec<f64>], body: &O) -> Result<UniformityReport> {
    let d = body.dim();
    let n = points.len();
    if n < 1000 {
        log::warn!("uniformity diagnostics on only {n} points");
    }
    if n == 0 {
        return Err(Error::InvalidArgument("no points".into()));
    }
    let mut mean = vec![0.0; d];
    let mut sq = vec![0.0; d];
    let mut pass = 0usize;
    let mut counts = vec![0usize; 1 << d.min(4)];
    for p in points {
        if body.membership(p)? {
            pass += 1;
        }
        for k in 0..d {
            mean[k] += p[k];
            sq[k] += p[k] * p[k];
        }
        if d <= 4 {
            let idx = (0..d).filter(|&k| p[k] < 0.0).fold(0usize, |acc, k| acc | (1 << k));
            counts[idx] += 1;
        }
    }
    let nf = n as f64;
    mean.iter_mut().for_each(|m| *m /= nf);
    sq.iter_mut().for_each(|m| *m /= nf);
    let variance: Vec<f64> = (0..d).map(|k| sq[k] - mean[k] * mean[k]).collect();
    let (orthant_fractions, symmetry_statistic) = if d <= 4 {
        let f: Vec<f64> = counts.iter().map(|&c| c as f64 / nf).collect();
        let full = (1usize << d) - 1;
        let sym = (0..f.len()).map(|i| (f[i] - f[full ^ i]).abs()).fold(0.0, f64::max);
        (Some(f), Some(sym))
    } else {
        (None, None)
    };
    Ok(UniformityReport {
        count: n,
        mean,
        variance,
        mean_sq_norm: sq.iter().sum(),
        second_moment: sq,
        orthant_fractions,
        symmetry_statistic,
        membership_pass_fraction: pass as f64 / nf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::BodySpec;

    #[test]
    fn box_moments() {
        let body = Body::new(BodySpec::cube(2, 1.0)).unwrap();
        let cfg = WalkConfig { burn_in: 1000, thin: 10, seed: 3, chord_tol: None };
        let pts = hit_and_run(&body, &[0.0, 0.0], 10_000, &cfg).unwrap();
        let rep = uniformity_diagnostics(&pts, &body).unwrap();
        assert_eq!(rep.membership_pass_fraction, 1.0);
        for k in 0..2 {
            assert!(rep.mean[k].abs() < 0.05);
            assert!((rep.second_moment[k] - 1.0 / 3.0).abs() < 0.05);
        }
        for f in rep.orthant_fractions.unwrap() {
            assert!((f - 0.25).abs() < 0.03);
        }
    }

    #[test]
    fn ball_moment() {
        let body = Body::new(BodySpec::ball(3, 1.0)).unwrap();
        let pts = hit_and_run(&body, &[0.0; 3], 10_000, &WalkConfig::defaults(3, 1)).unwrap();
        let rep = uniformity_diagnostics(&pts, &body).unwrap();
        assert!((rep.mean_sq_norm - 3.0 / 5.0).abs() < 0.05, "{}", rep.mean_sq_norm);
    }

    #[test]
    fn boundary_start_rejected() {
        let body = Body::new(BodySpec::cube(2, 1.0)).unwrap();
        let r = hit_and_run(&body, &[1.0, 0.0], 10, &WalkConfig::defaults(2, 0));
        assert!(matches!(r, Err(Error::StartNotInterior)));
    }

    #[test]
    fn deterministic() {
        let body = Body::new(BodySpec::ball(2, 2.0)).unwrap();
        let cfg = WalkConfig { burn_in: 50, thin: 3, seed: 9, chord_tol: None };
        let a = hit_and_run(&body, &[0.1, 0.0], 40, &cfg).unwrap();
        let b = hit_and_run(&body, &[0.1, 0.0], 40, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mirrored_set_is_balanced() {
        let body = Body::new(BodySpec::cube(2, 1.0)).unwrap();
        let cfg = WalkConfig { burn_in: 100, thin: 2, seed: 4, chord_tol: None };
        let mut pts = hit_and_run(&body, &[0.0, 0.0], 500, &cfg).unwrap();
        let neg: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|x| -x).collect()).collect();
        pts.extend(neg);
        let rep = uniformity_diagnostics(&pts, &body).unwrap();
        assert_eq!(rep.symmetry_statistic, Some(0.0));
    }
}
