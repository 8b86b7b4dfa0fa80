//! Containment decision procedures: hypercube sampling for zonotopes, the
//! sampling test for general bodies, the bracketing search for the optimal
//! scale, and supporting diagnostics.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Zonotope;
use crate::linalg::{self, Matrix, Vector};
use crate::oracles::{self, Body, BodySpec, MembershipOracle};
use crate::par;
use crate::rng::{self, stream};
use crate::sampler::{self, WalkConfig};
use crate::sparsify::{self, Method};

/// Trials evaluated together; witnesses are resolved to the lowest index
/// within the first batch that has one, so query counts do not depend on
/// scheduling.
pub const TRIAL_BATCH: usize = 64;
/// Constant in the recommended sample count for the general-body test.
pub const C_N: f64 = 8.0;
pub const DEFAULT_EPSILON: f64 = 1.0 / 3.0;
pub const GAUGE_TOL: f64 = 1e-9;
pub const EXHAUSTIVE_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SparsifyChoice {
    Lewis,
    /// Caller asserts Δ-modularity; `None` computes Δ by a determinant scan.
    DeltaModular {
        delta: Option<f64>,
    },
    /// Use the generators as given.
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapConfig {
    /// `None` uses `min(10⁴, 16 n′²)`.
    pub trials: Option<usize>,
    pub seed: u64,
    pub sparsify_epsilon: f64,
    pub sparsify: SparsifyChoice,
    /// Replaces `2√(n′/ln n′)` as the test-point factor.
    pub scale_override: Option<f64>,
    /// Anti-concentration exponent `C`; diagnostic only.
    pub exponent_c: f64,
}

impl Default for GapConfig {
    fn default() -> Self {
        GapConfig {
            trials: None,
            seed: 0,
            sparsify_epsilon: DEFAULT_EPSILON,
            sparsify: SparsifyChoice::Lewis,
            scale_override: None,
            exponent_c: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ContainmentVerdict {
    Contained { trials_run: usize, queries: u64 },
    Witness { point: Vec<f64>, gauge_bound: f64, trial_index: usize, queries: u64 },
}

impl ContainmentVerdict {
    pub fn is_witness(&self) -> bool {
        matches!(self, ContainmentVerdict::Witness { .. })
    }

    pub fn queries(&self) -> u64 {
        match self {
            ContainmentVerdict::Contained { queries, .. } | ContainmentVerdict::Witness { queries, .. } => *queries,
        }
    }

    pub fn witness_point(&self) -> Option<&[f64]> {
        match self {
            ContainmentVerdict::Witness { point, .. } => Some(point),
            ContainmentVerdict::Contained { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapOutcome {
    pub verdict: ContainmentVerdict,
    pub n: usize,
    pub n_sparsified: usize,
    /// Test-point factor `2√(n′/ln n′)` (or the override).
    pub scale: f64,
    pub method: Option<Method>,
    /// Exact gauge of the witness in the original zonotope.
    pub witness_gauge: Option<f64>,
}

/// `2√(n/ln n)`; undefined for `n < 2`.
pub fn hypercube_factor(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::DegenerateLog { n });
    }
    let n = n as f64;
    Ok(2.0 * (n / n.ln()).sqrt())
}

pub fn default_trials(n_prime: usize) -> usize {
    (16 * n_prime.saturating_mul(n_prime)).min(10_000)
}

/// The sparsified generators and test-point factor for one zonotope.
#[derive(Debug, Clone)]
pub struct GapPlan {
    pub generators: Matrix,
    pub scale: f64,
    pub trials: usize,
    pub method: Option<Method>,
    n: usize,
}

impl GapPlan {
    /// Sparsifies only when the zonotope has more generators than the
    /// sparsifier would output; otherwise `Z′ = Z` and the gauge bound of a
    /// witness is exact.
    pub fn new(z: &Zonotope, cfg: &GapConfig) -> Result<GapPlan> {
        if !z.is_full_rank() {
            return Err(Error::RankDeficient { rank: z.rank(), dim: z.dim() });
        }
        let w = z.generators();
        let (d, n) = (z.dim(), z.count());
        let eps = cfg.sparsify_epsilon;
        let (generators, method) = match cfg.sparsify {
            SparsifyChoice::Lewis if n > sparsify::lewis_sample_size(d, eps) => {
                let r = sparsify::sparsify_lewis(w, eps, cfg.seed)?;
                (r.generators(w) / (1.0 + eps), Some(Method::Lewis))
            }
            SparsifyChoice::DeltaModular { delta } if n > sparsify::bss_cap(d, eps) => {
                let r = sparsify::sparsify_delta_modular(w, eps, delta)?;
                (r.generators(w) / r.upper_factor(), Some(Method::DeltaModular))
            }
            _ => (w.clone(), None),
        };
        let n_prime = generators.ncols();
        let scale = match cfg.scale_override {
            Some(s) if s > 0.0 && s.is_finite() => s,
            Some(s) => return Err(Error::InvalidArgument(format!("scale override {s} must be positive"))),
            None => hypercube_factor(n_prime)?,
        };
        let trials = cfg.trials.unwrap_or_else(|| default_trials(n_prime));
        if trials == 0 {
            return Err(Error::InvalidArgument("trials must be >= 1".into()));
        }
        Ok(GapPlan { generators, scale, trials, method, n })
    }

    pub fn n_sparsified(&self) -> usize {
        self.generators.ncols()
    }

    /// Test point of trial `t` for the instance `alpha · Z`.
    pub fn test_point(&self, seed: u64, trial: usize, alpha: f64) -> Vec<f64> {
        let mut rng = rng::rng_for(seed, stream::GAP_TRIAL, trial as u64);
        let (d, n) = self.generators.shape();
        let mut x = vec![0.0; d];
        for j in 0..n {
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            for (k, xk) in x.iter_mut().enumerate() {
                *xk += s * self.generators[(k, j)];
            }
        }
        let f = alpha * self.scale;
        x.iter_mut().for_each(|v| *v *= f);
        x
    }

    /// Runs the trials for `alpha · Z` against `q`.
    pub fn run<O: MembershipOracle + ?Sized>(&self, q: &O, seed: u64, alpha: f64) -> Result<ContainmentVerdict> {
        if q.dim() != self.generators.nrows() {
            return Err(Error::DimensionMismatch { expected: self.generators.nrows(), got: q.dim() });
        }
        let (hit, evaluated) = first_failure(self.trials, |t| {
            let x = self.test_point(seed, t, alpha);
            Ok(if q.membership(&x)? { None } else { Some(x) })
        })?;
        Ok(match hit {
            Some((trial_index, point)) => ContainmentVerdict::Witness {
                point,
                gauge_bound: alpha * self.scale,
                trial_index,
                queries: evaluated as u64,
            },
            None => ContainmentVerdict::Contained { trials_run: self.trials, queries: evaluated as u64 },
        })
    }
}

/// Evaluates `f` over `0..total` in batches; returns the lowest index with
/// `Some` and the number of evaluations made.
fn first_failure<T, F>(total: usize, f: F) -> Result<(Option<(usize, T)>, usize)>
where
    T: Send,
    F: Fn(usize) -> Result<Option<T>> + Send + Sync,
{
    let mut start = 0;
    while start < total {
        let len = TRIAL_BATCH.min(total - start);
        let results = par::map_indexed(len, |i| f(start + i));
        for (i, r) in results.into_iter().enumerate() {
            if let Some(v) = r? {
                return Ok((Some((start + i, v)), start + len));
            }
        }
        start += len;
    }
    Ok((None, total))
}

/// Hypercube sampling: draws `y ∈ {±1}^{n′}` and tests
/// `x = 2√(n′/ln n′) · W′y` against `q`. A witness certifies
/// `gauge_bound · Z ⊄ Q`; `Contained` is a probabilistic assertion.
pub fn hypercube_gap<O: MembershipOracle + ?Sized>(z: &Zonotope, q: &O, cfg: &GapConfig) -> Result<GapOutcome> {
    let plan = GapPlan::new(z, cfg)?;
    let mut verdict = plan.run(q, cfg.seed, 1.0)?;
    let mut witness_gauge = None;
    if let ContainmentVerdict::Witness { point, gauge_bound, .. } = &mut verdict {
        let g = z.gauge(point, GAUGE_TOL)?;
        if g > *gauge_bound + 1e-6 {
            log::warn!("sparsified sandwich violated: witness gauge {g} exceeds {gauge_bound}");
            *gauge_bound = g;
        }
        witness_gauge = Some(g);
    }
    Ok(GapOutcome {
        verdict,
        n: plan.n,
        n_sparsified: plan.n_sparsified(),
        scale: plan.scale,
        method: plan.method,
        witness_gauge,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnticoncentrationMode {
    Exhaustive,
    Sampled,
}

/// Fraction of `y ∈ {±1}^n` with `a·y >= ‖a‖₁ √(ln n / n)`.
pub fn anticoncentration_fraction(a: &[f64], mode: AnticoncentrationMode, samples: usize, seed: u64) -> Result<f64> {
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    let nf = n as f64;
    let norm1: f64 = a.iter().map(|v| v.abs()).sum();
    let threshold = norm1 * (nf.ln() / nf).sqrt() - 1e-12 * norm1.max(1.0);
    match mode {
        AnticoncentrationMode::Exhaustive => {
            if n > EXHAUSTIVE_LIMIT {
                return Err(Error::TooManyVertices { n, limit: EXHAUSTIVE_LIMIT });
            }
            let total = 1usize << n;
            let hits = par::chunked_sum(total, 1 << 12, |range| {
                range
                    .filter(|&mask| {
                        let s: f64 = a.iter().enumerate().map(|(i, v)| if mask >> i & 1 == 1 { *v } else { -v }).sum();
                        s >= threshold
                    })
                    .count() as f64
            });
            Ok(hits / total as f64)
        }
        AnticoncentrationMode::Sampled => {
            if samples == 0 {
                return Err(Error::InvalidArgument("samples must be >= 1".into()));
            }
            let hits = par::chunked_sum(samples, 4096, |range| {
                let mut rng = rng::rng_for(seed, stream::ANTICONC, (range.start / 4096) as u64);
                range
                    .filter(|_| {
                        let s: f64 = a.iter().map(|v| if rng.random::<bool>() { *v } else { -v }).sum();
                        s >= threshold
                    })
                    .count() as f64
            });
            Ok(hits / samples as f64)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StressResult {
    pub empirical: f64,
    pub hoeffding_bound: f64,
    pub stderr: f64,
}

/// `W = (d/n)(e₁ … e₁, …, e_d … e_d)` with `n/d` copies of each axis;
/// estimates `P[⟨Wy, 1⟩ >= d/s]` against the bound `exp(−n/(2s²))`.
pub fn split_generator_stress(d: usize, n: usize, s: f64, samples: usize, seed: u64) -> Result<StressResult> {
    if d == 0 || n == 0 || !n.is_multiple_of(d) {
        return Err(Error::BadShape(format!("n = {n} must be a positive multiple of d = {d}")));
    }
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("s = {s} must be positive")));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    // ⟨Wy, 1⟩ = (d/n) Σ y_i
    let df = d as f64;
    let nf = n as f64;
    let threshold = df / s - 1e-12;
    const CHUNK: usize = 4096;
    let hits = par::chunked_sum(samples, CHUNK, |range| {
        let mut rng = rng::rng_for(seed, stream::SPLIT_STRESS, (range.start / CHUNK) as u64);
        range
            .filter(|_| {
                let sum: i64 = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).sum();
                df / nf * sum as f64 >= threshold
            })
            .count() as f64
    });
    let p = hits / samples as f64;
    Ok(StressResult {
        empirical: p,
        hoeffding_bound: (-nf / (2.0 * s * s)).exp(),
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

/// `⌈C_N · d · (1−1/s)^{−d} · max(1, ln(1/(1−1/s)))⌉`.
pub fn recommended_t(d: usize, s: f64) -> Result<u64> {
    if !(s > 1.0) {
        return Err(Error::InvalidArgument(format!("s = {s} must exceed 1")));
    }
    let q = 1.0 - 1.0 / s;
    let v = C_N * d as f64 * q.powf(-(d as f64)) * (-q.ln()).max(1.0);
    // guard against ceil(24.000000000000004)
    let v = (v * (1.0 - 1e-12)).ceil();
    if !v.is_finite() || v > 2f64.powi(62) {
        return Err(Error::Overflow(format!("recommended T for d = {d}, s = {s} exceeds 2^62")));
    }
    Ok(v as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NaszodiOutcome {
    pub verdict: ContainmentVerdict,
    /// The sample of `K` whose `s`-multiple left `Q`.
    pub witness_sample: Option<Vec<f64>>,
    pub samples: usize,
    pub inner_queries: u64,
}

/// Samples `T` points of `K` by hit-and-run from the origin and reports a
/// witness when some `s·x_i` leaves `Q`, which certifies `s·K ⊄ Q`.
pub fn naszodi_gap<O: MembershipOracle + ?Sized>(
    k: &Body,
    q: &O,
    s: f64,
    trials: usize,
    cfg: &WalkConfig,
) -> Result<NaszodiOutcome> {
    if trials == 0 {
        return Err(Error::InvalidArgument("T must be >= 1".into()));
    }
    if !(s > 1.0) {
        return Err(Error::InvalidArgument(format!("s = {s} must exceed 1")));
    }
    if k.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: q.dim() });
    }
    let before = k.queries();
    let pts = sampler::hit_and_run(k, &vec![0.0; k.dim()], trials, cfg)?;
    let inner_queries = k.queries() - before;
    let (hit, evaluated) = first_failure(pts.len(), |i| {
        let x: Vec<f64> = pts[i].iter().map(|v| s * v).collect();
        Ok(if q.membership(&x)? { None } else { Some(x) })
    })?;
    let (verdict, witness_sample) = match hit {
        Some((i, point)) => (
            ContainmentVerdict::Witness { point, gauge_bound: s, trial_index: i, queries: evaluated as u64 },
            Some(pts[i].clone()),
        ),
        None => (ContainmentVerdict::Contained { trials_run: trials, queries: evaluated as u64 }, None),
    };
    Ok(NaszodiOutcome { verdict, witness_sample, samples: pts.len(), inner_queries })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptBracket {
    pub alpha_low: f64,
    pub alpha_high: f64,
    pub ratio: f64,
    /// Test-point factor of the gap test; the bracket cannot close below it.
    pub gauge_bound: f64,
    /// Point in `alpha_high · Z` outside `Q`.
    pub witness: Vec<f64>,
    /// True when `alpha_low` is the roundness floor rather than a tested scale.
    pub low_is_floor: bool,
    pub steps: usize,
    pub queries: u64,
}

const OPT_MAX_DOUBLINGS: usize = 200;
const OPT_MAX_STEPS: usize = 400;

/// Brackets `α* = max{α : αZ ⊆ Q}` by geometric bisection over gap tests of
/// scaled instances, stopping once `alpha_high / alpha_low <= g (1 + rel_tol)`.
pub fn opt_containment_search(z: &Zonotope, q: &Body, cfg: &GapConfig, rel_tol: f64) -> Result<OptBracket> {
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("rel_tol {rel_tol} must be positive")));
    }
    let plan = GapPlan::new(z, cfg)?;
    let g = plan.scale;
    let r_q = q.roundness()?.r;
    // Z ⊆ (Σ‖w_i‖) B₂, so this scale is contained outright
    let floor = r_q / z.column_norms().iter().sum::<f64>();
    let mut low = floor;
    let mut low_is_floor = true;
    let mut queries = 0u64;
    let mut steps = 0usize;

    let mut test = |alpha: f64, steps: &mut usize| -> Result<Option<(f64, Vec<f64>)>> {
        let seed = rng::derive_seed(cfg.seed, stream::OPT_STEP, *steps as u64);
        *steps += 1;
        let v = plan.run(q, seed, alpha)?;
        queries += v.queries();
        match v {
            ContainmentVerdict::Witness { point, .. } => Ok(Some((z.gauge(&point, GAUGE_TOL)?, point))),
            ContainmentVerdict::Contained { .. } => Ok(None),
        }
    };

    let mut alpha = floor;
    let mut found = None;
    for _ in 0..OPT_MAX_DOUBLINGS {
        match test(alpha, &mut steps)? {
            Some(w) => {
                found = Some(w);
                break;
            }
            None => {
                low = alpha;
                low_is_floor = alpha == floor;
                alpha *= 2.0;
            }
        }
    }
    let (mut high, mut witness) = found.ok_or(Error::NoWitnessFound { scale: alpha })?;
    if high <= low {
        low = floor;
        low_is_floor = true;
    }

    while high / low > g * (1.0 + rel_tol) && steps < OPT_MAX_STEPS {
        let beta = low * (high / low / g).sqrt();
        match test(beta, &mut steps)? {
            Some((gx, x)) => {
                if gx < high {
                    high = gx;
                    witness = x;
                }
                if high <= low {
                    // a contained verdict below was a false assertion
                    low = floor;
                    low_is_floor = true;
                }
            }
            None => {
                low = beta;
                low_is_floor = false;
            }
        }
    }
    Ok(OptBracket {
        alpha_low: low,
        alpha_high: high,
        ratio: high / low,
        gauge_bound: g,
        witness,
        low_is_floor,
        steps,
        queries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarReport {
    pub out_rad: f64,
    pub r: f64,
    /// Per direction: whether the extreme point of `K = P` lies in `r²Q`.
    pub per_direction: Vec<bool>,
    pub containment_holds: bool,
    /// `OutRad <= r` implies every sampled point passed.
    pub forward_pass: bool,
    /// Each violation exhibited a vector of norm `> r` in `P`.
    pub backward_pass: bool,
    pub longest_exhibited: Option<f64>,
}

impl PolarReport {
    pub fn passed(&self) -> bool {
        self.forward_pass && self.backward_pass
    }
}

type ExtremeMap = Box<dyn Fn(&Vector) -> Vector>;

/// Exact circumradius and extreme-point map for the supported variants.
fn primal_geometry(p: &BodySpec) -> Result<(f64, ExtremeMap)> {
    match p {
        BodySpec::LpBall { dim, p, radius } => {
            let (p, rho, d) = (*p, *radius, *dim);
            let expo = 0.5 - if p.is_infinite() { 0.0 } else { 1.0 / p };
            let out = rho * (d as f64).powf(expo).max(1.0);
            let ext = move |u: &Vector| -> Vector {
                if p.is_infinite() {
                    u.map(|v| if v >= 0.0 { rho } else { -rho })
                } else if p == 1.0 {
                    let k = u.iamax();
                    let mut x = Vector::zeros(u.len());
                    x[k] = rho * u[k].signum();
                    x
                } else {
                    let q = p / (p - 1.0);
                    let nq = linalg::lp_norm(u.as_slice(), q);
                    u.map(|v| rho * v.signum() * (v.abs() / nq).powf(q - 1.0))
                }
            };
            Ok((out, Box::new(ext)))
        }
        BodySpec::Ellipsoid { shape } => {
            Body::new(p.clone())?;
            let m = Matrix::from_fn(shape.len(), shape.len(), |i, j| shape[i][j]);
            let (vals, _) = linalg::sym_eigen(&m);
            let inv = m.try_inverse().ok_or_else(|| Error::InvalidBody("singular ellipsoid".into()))?;
            let ext = move |u: &Vector| -> Vector {
                let y = &inv * u;
                let s = u.dot(&y).sqrt();
                y / s
            };
            Ok((1.0 / vals[0].sqrt(), Box::new(ext)))
        }
        BodySpec::HPoly { .. } => {
            let b = oracles::box_half_widths(p)
                .ok_or_else(|| Error::UnsupportedBody("only axis-aligned symmetric boxes".into()))?;
            let out = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            let ext =
                move |u: &Vector| -> Vector { Vector::from_fn(b.len(), |k, _| if u[k] >= 0.0 { b[k] } else { -b[k] }) };
            Ok((out, Box::new(ext)))
        }
        BodySpec::Scaled { inner, factor } => {
            let (out, ext) = primal_geometry(inner)?;
            let c = *factor;
            Ok((out * c, Box::new(move |u: &Vector| ext(u) * c)))
        }
        BodySpec::PolarOfZonotope { .. } => {
            Err(Error::UnsupportedBody("polar_reduction_check needs ball, box or ellipsoid".into()))
        }
    }
}

/// With `K = P` and `Q = P°`, checks `OutRad₂(P) <= r ⇔ K ⊆ r²Q` on the
/// extreme points of `P` in `dirs` random directions plus `±e_k`.
pub fn polar_reduction_check(p: &BodySpec, r: f64, dirs: usize, seed: u64) -> Result<PolarReport> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("r = {r} must be positive")));
    }
    let body = Body::new(p.clone())?;
    let d = body.dim();
    let (out_rad, extreme) = primal_geometry(p)?;
    let q = Body::new(Body::polar_spec(p)?.scaled(r * r))?;

    let mut rng = rng::rng_for(seed, stream::POLAR, 0);
    let mut directions: Vec<Vector> = (0..dirs).map(|_| linalg::random_unit(&mut rng, d)).collect();
    for k in 0..d {
        for s in [1.0, -1.0] {
            let mut e = Vector::zeros(d);
            e[k] = s;
            directions.push(e);
        }
    }

    let mut per_direction = Vec::with_capacity(directions.len());
    let mut longest: Option<f64> = None;
    let mut backward_pass = true;
    for u in &directions {
        let x = extreme(u);
        let inside = q.membership(x.as_slice())?;
        per_direction.push(inside);
        if !inside {
            // x/r² ∉ P° gives a ∈ P with ⟨a, x⟩ > r², so one of them is longer than r
            let a = extreme(&x);
            let len = x.norm().max(a.norm());
            longest = Some(longest.map_or(len, |l: f64| l.max(len)));
            if !(len > r) {
                backward_pass = false;
            }
        }
    }
    let containment_holds = per_direction.iter().all(|&b| b);
    let forward_pass = out_rad > r * (1.0 + 1e-12) || containment_holds;
    Ok(PolarReport {
        out_rad,
        r,
        per_direction,
        containment_holds,
        forward_pass,
        backward_pass,
        longest_exhibited: longest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HPolytope;
    use approx::assert_relative_eq;

    fn hexagon() -> Zonotope {
        Zonotope::from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap()
    }

    fn cube_body(d: usize, h: f64) -> Body {
        Body::new(BodySpec::from_hpolytope(&HPolytope::cube(d, h).unwrap())).unwrap()
    }

    #[test]
    fn factor_values() {
        assert_relative_eq!(hypercube_factor(2).unwrap(), 3.3972, epsilon = 1e-4);
        assert!(matches!(hypercube_factor(1), Err(Error::DegenerateLog { n: 1 })));
    }

    #[test]
    fn square_in_large_box_is_contained() {
        let z = Zonotope::new(Matrix::identity(2, 2)).unwrap();
        let cfg = GapConfig { trials: Some(10_000), seed: 1, ..GapConfig::default() };
        let out = hypercube_gap(&z, &cube_body(2, 10.0), &cfg).unwrap();
        assert_eq!(out.verdict, ContainmentVerdict::Contained { trials_run: 10_000, queries: 10_000 });
    }

    #[test]
    fn square_in_small_box_witness_first_trial() {
        let z = Zonotope::new(Matrix::identity(2, 2)).unwrap();
        let q = cube_body(2, 0.5);
        let out = hypercube_gap(&z, &q, &GapConfig::default()).unwrap();
        match out.verdict {
            ContainmentVerdict::Witness { trial_index, gauge_bound, ref point, .. } => {
                assert_eq!(trial_index, 0);
                assert_relative_eq!(gauge_bound, 3.3972, epsilon = 1e-4);
                assert!(!q.membership(point).unwrap());
            }
            _ => panic!("expected witness"),
        }
        assert_relative_eq!(out.witness_gauge.unwrap(), 3.3972, epsilon = 1e-4);
    }

    #[test]
    fn hexagon_hit_rate() {
        let z = hexagon();
        let q = Body::new(BodySpec::HPoly {
            normals: vec![
                vec![1.0, 1.0],
                vec![-1.0, -1.0],
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
            offsets: vec![1.0, 1.0, 4.0, 4.0, 4.0, 4.0],
        })
        .unwrap();
        let plan = GapPlan::new(&z, &GapConfig::default()).unwrap();
        let hits = (0..4000).filter(|&t| !q.membership(&plan.test_point(5, t, 1.0)).unwrap()).count();
        let rate = hits as f64 / 4000.0;
        assert!((rate - 0.75).abs() < 0.03, "{rate}");
    }

    #[test]
    fn witness_monotone_under_scaling() {
        let z = hexagon();
        let spec = BodySpec::from_hpolytope(&HPolytope::cube(2, 5.0).unwrap());
        let cfg = GapConfig { trials: Some(500), seed: 3, ..GapConfig::default() };
        let big = hypercube_gap(&z, &Body::new(spec.clone()).unwrap(), &cfg).unwrap();
        let small = hypercube_gap(&z, &Body::new(spec.scaled(0.8)).unwrap(), &cfg).unwrap();
        if let ContainmentVerdict::Witness { trial_index: a, .. } = big.verdict {
            match small.verdict {
                ContainmentVerdict::Witness { trial_index: b, .. } => assert!(b <= a),
                _ => panic!("smaller body lost the witness"),
            }
        }
    }

    #[test]
    fn anticoncentration_fixtures() {
        use AnticoncentrationMode::Exhaustive;
        assert_relative_eq!(anticoncentration_fraction(&[1.0; 4], Exhaustive, 0, 0).unwrap(), 1.0 / 16.0);
        assert_relative_eq!(anticoncentration_fraction(&[1.0, 0.0, 0.0, 0.0], Exhaustive, 0, 0).unwrap(), 0.5);
        assert_relative_eq!(anticoncentration_fraction(&[1.0; 2], Exhaustive, 0, 0).unwrap(), 0.25);
        assert!(matches!(anticoncentration_fraction(&[1.0; 25], Exhaustive, 0, 0), Err(Error::TooManyVertices { .. })));
        let s = anticoncentration_fraction(&[1.0; 4], AnticoncentrationMode::Sampled, 40_000, 2).unwrap();
        assert!((s - 1.0 / 16.0).abs() < 0.01);
    }

    #[test]
    fn stress_regimes() {
        let r = split_generator_stress(2, 16, 2.0, 100_000, 1).unwrap();
        assert!(r.empirical <= r.hoeffding_bound + 3.0 * r.stderr);
        let s = (16f64 / 16f64.ln()).sqrt();
        assert!(split_generator_stress(2, 16, s, 100_000, 1).unwrap().empirical >= 0.01);
        // P[Σy > 0] = (1 − C(16,8)/2^16) / 2
        let inf = split_generator_stress(2, 16, 1e12, 100_000, 1).unwrap();
        assert!((inf.empirical - (1.0 - 12870.0 / 65536.0) / 2.0).abs() < 0.01);
        assert!(matches!(split_generator_stress(3, 16, 2.0, 10, 0), Err(Error::BadShape(_))));
    }

    #[test]
    fn recommended_t_values() {
        assert_eq!(recommended_t(3, 1e15).unwrap(), 24);
        let t16 = recommended_t(16, 16.0 / 16f64.ln()).unwrap();
        assert!(t16 <= 1_000_000);
        assert!(recommended_t(5, 2.0).unwrap() > recommended_t(5, 4.0).unwrap());
        assert!(matches!(recommended_t(200, 1.01), Err(Error::Overflow(_))));
        assert!(recommended_t(3, 1.0).is_err());
    }

    #[test]
    fn naszodi_fixtures() {
        let k = Body::new(BodySpec::cube(2, 1.0)).unwrap();
        let cfg = WalkConfig { burn_in: 200, thin: 4, seed: 1, chord_tol: None };
        let out = naszodi_gap(&k, &Body::new(BodySpec::cube(2, 100.0)).unwrap(), 4.0, 100, &cfg).unwrap();
        assert!(!out.verdict.is_witness());
        let q = Body::new(BodySpec::cube(2, 0.1)).unwrap();
        let out = naszodi_gap(&k, &q, 4.0, 100, &cfg).unwrap();
        match out.verdict {
            ContainmentVerdict::Witness { trial_index, ref point, .. } => {
                assert!(trial_index < 5);
                assert!(!q.membership(point).unwrap());
                assert!(k.membership(out.witness_sample.as_ref().unwrap()).unwrap());
            }
            _ => panic!("expected witness"),
        }
        assert!(naszodi_gap(&k, &q, 4.0, 0, &cfg).is_err());
    }

    #[test]
    fn opt_brackets_square() {
        let z = Zonotope::new(Matrix::identity(2, 2)).unwrap();
        let q = cube_body(2, 3.0);
        let b = opt_containment_search(&z, &q, &GapConfig::default(), 0.05).unwrap();
        assert!(b.alpha_low <= 3.0 && 3.0 <= b.alpha_high, "{b:?}");
        assert!(b.ratio <= b.gauge_bound * 1.05);
        assert!(!q.membership(&b.witness).unwrap());
    }

    #[test]
    fn opt_brackets_hexagon() {
        let q = cube_body(2, 4.0);
        let b = opt_containment_search(&hexagon(), &q, &GapConfig::default(), 0.05).unwrap();
        assert!(b.alpha_low <= 2.0 && 2.0 <= b.alpha_high, "{b:?}");
    }

    #[test]
    fn polar_ball_box_ellipsoid() {
        let ball = BodySpec::ball(3, 2.0);
        assert!(polar_reduction_check(&ball, 2.0, 64, 1).unwrap().containment_holds);
        let rep = polar_reduction_check(&ball, 1.9, 64, 1).unwrap();
        assert!(!rep.containment_holds && rep.passed());

        let bx = BodySpec::from_hpolytope(&HPolytope::cube(2, 1.0).unwrap());
        let rep = polar_reduction_check(&bx, 2f64.sqrt(), 64, 1).unwrap();
        assert_relative_eq!(rep.out_rad, 2f64.sqrt(), epsilon = 1e-12);
        assert!(rep.containment_holds && rep.passed());
        assert!(!polar_reduction_check(&bx, 1.35, 64, 1).unwrap().containment_holds);

        let m = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]);
        let rep = polar_reduction_check(&BodySpec::ellipsoid(&m), 1.0, 64, 1).unwrap();
        assert_relative_eq!(rep.out_rad, 1.0, epsilon = 1e-12);
        assert!(rep.containment_holds && rep.passed());

        let poly = BodySpec::polar_of_zonotope(&hexagon());
        assert!(matches!(polar_reduction_check(&poly, 1.0, 8, 0), Err(Error::UnsupportedBody(_))));
    }
}
