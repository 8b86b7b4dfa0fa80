//! Generator-count reduction.
//!
//! Two routes: randomized sampling by ℓ1 Lewis weights, and the deterministic
//! barrier-potential spectral sparsifier, which also drives the Δ-modular
//! pipeline.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Zonotope};
use crate::linalg::{self, Matrix, Vector};
use crate::rng::{self, stream};

/// Sampling constant in `m = ⌈C_L · d · ln(d/ε) / ε²⌉`.
pub const C_L: f64 = 8.0;
/// Size constant in the BSS cap `nnz <= ⌈C_B · d / ε²⌉`.
pub const C_B: f64 = 16.0;

pub const LEWIS_TOL: f64 = 1e-8;
pub const LEWIS_MAX_ITER: usize = 500;
/// Upper bound on columns after splitting integer-weighted generators.
pub const SPLIT_LIMIT: usize = 100_000;

const LEWIS_RESAMPLE_ATTEMPTS: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lewis,
    Bss,
    DeltaModular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsificationResult {
    pub method: Method,
    pub epsilon: f64,
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
    /// `[lower, upper]` with `lower·Z ⊆ Z′ ⊆ upper·Z` claimed. For plain BSS
    /// these bound the generalized eigenvalues instead.
    pub certified_factors: [f64; 2],
    /// Δ-modular route only: weights before the Δ rescale.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre_rescale_weights: Option<Vec<f64>>,
}

impl SparsificationResult {
    pub fn lower_factor(&self) -> f64 {
        self.certified_factors[0]
    }

    pub fn upper_factor(&self) -> f64 {
        self.certified_factors[1]
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    /// The sparsified generator matrix `(c_i w_i)_{i ∈ I}`.
    pub fn generators(&self, w: &Matrix) -> Matrix {
        columns_scaled(w, &self.indices, &self.weights)
    }

    pub fn pre_rescale_generators(&self, w: &Matrix) -> Option<Matrix> {
        self.pre_rescale_weights.as_ref().map(|c| columns_scaled(w, &self.indices, c))
    }
}

fn columns_scaled(w: &Matrix, indices: &[usize], weights: &[f64]) -> Matrix {
    Matrix::from_fn(w.nrows(), indices.len(), |r, k| w[(r, indices[k])] * weights[k])
}

#[derive(Debug, Clone, PartialEq)]
pub struct LewisState {
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

fn check_rank(w: &Matrix) -> Result<()> {
    if w.ncols() == 0 {
        return Err(Error::BadShape("matrix has no columns".into()));
    }
    let r = linalg::rank(w, linalg::RANK_RTOL);
    if r < w.nrows() {
        return Err(Error::RankDeficient { rank: r, dim: w.nrows() });
    }
    Ok(())
}

/// ℓ1 Lewis weights of the columns of `w`: the fixed point of
/// `ω_i = (w_iᵀ M⁻¹ w_i)^{1/2}` with `M = Σ_j w_j w_jᵀ / ω_j`.
pub fn lewis_weights(w: &Matrix, tol: f64, max_iter: usize) -> Result<LewisState> {
    check_rank(w)?;
    let (d, n) = w.shape();
    let mut omega = vec![d as f64 / n as f64; n];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let mut m = Matrix::zeros(d, d);
        for (j, col) in w.column_iter().enumerate() {
            m.ger(1.0 / omega[j], &col, &col, 1.0);
        }
        let chol = m.clone().cholesky().ok_or(Error::RankDeficient { rank: linalg::rank(&m, 1e-12), dim: d })?;
        residual = 0.0;
        for (j, col) in w.column_iter().enumerate() {
            let q = col.dot(&chol.solve(&col.into_owned())).max(0.0);
            // damped update: geometric mean of old and new
            let next = (omega[j] * q.sqrt()).sqrt().max(f64::MIN_POSITIVE);
            residual = f64::max(residual, (next - omega[j]).abs() / omega[j]);
            omega[j] = next;
        }
        if residual <= tol {
            return Ok(LewisState { weights: omega, iterations: it, residual });
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual })
}

pub fn lewis_sample_size(d: usize, epsilon: f64) -> usize {
    let d = d as f64;
    (C_L * d * (d / epsilon).ln() / (epsilon * epsilon)).ceil() as usize
}

fn check_epsilon(epsilon: f64, hi: f64, inclusive: bool, range: &'static str) -> Result<()> {
    let ok = epsilon > 0.0 && if inclusive { epsilon <= hi } else { epsilon < hi };
    if ok {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange { epsilon, range })
    }
}

/// Samples `m` columns with replacement, column `i` with probability
/// `ω_i / d`, each kept column scaled by `count_i / (m p_i)`.
pub fn sparsify_lewis(w: &Matrix, epsilon: f64, seed: u64) -> Result<SparsificationResult> {
    check_epsilon(epsilon, 0.5, true, "(0, 1/2]")?;
    let state = lewis_weights(w, LEWIS_TOL, LEWIS_MAX_ITER)?;
    let d = w.nrows();
    let total: f64 = state.weights.iter().sum();
    let p: Vec<f64> = state.weights.iter().map(|x| x / total).collect();
    let m = lewis_sample_size(d, epsilon);
    let dist = WeightedIndex::new(&p).map_err(|e| Error::InvalidArgument(e.to_string()))?;

    for attempt in 0..LEWIS_RESAMPLE_ATTEMPTS {
        let mut rng = rng::rng_for(seed, stream::LEWIS_SAMPLE, attempt);
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for _ in 0..m {
            *counts.entry(dist.sample(&mut rng)).or_default() += 1;
        }
        let indices: Vec<usize> = counts.keys().copied().collect();
        let weights: Vec<f64> = counts.iter().map(|(&i, &c)| c as f64 / (m as f64 * p[i])).collect();
        let sub = columns_scaled(w, &indices, &weights);
        if linalg::rank(&sub, linalg::RANK_RTOL) == d {
            return Ok(SparsificationResult {
                method: Method::Lewis,
                epsilon,
                indices,
                weights,
                certified_factors: [1.0 - epsilon, 1.0 + epsilon],
                pre_rescale_weights: None,
            });
        }
        log::debug!("lewis sample attempt {attempt} lost rank, resampling");
    }
    Err(Error::RankDeficient { rank: d - 1, dim: d })
}

pub fn bss_cap(d: usize, epsilon: f64) -> usize {
    (C_B * d as f64 / (epsilon * epsilon)).ceil() as usize
}

/// Barrier schedule for `√b = 2/ε`; after `⌈b·d⌉` rounds the condition
/// number is at most `((√b+1)/(√b−1))² < ((1+ε)/(1−ε))²`.
struct Schedule {
    delta_l: f64,
    delta_u: f64,
    u0: f64,
    l0: f64,
    rounds: usize,
}

impl Schedule {
    fn new(d: usize, epsilon: f64) -> Self {
        let sb = 2.0 / epsilon;
        let b = sb * sb;
        let eps_l = 1.0 / sb;
        let eps_u = (sb - 1.0) / (b + sb);
        let d = d as f64;
        Schedule {
            delta_l: 1.0,
            delta_u: (sb + 1.0) / (sb - 1.0),
            u0: d / eps_u,
            l0: -d / eps_l,
            rounds: (b * d).ceil() as usize,
        }
    }
}

/// Deterministic spectral sparsifier: nonnegative weights `c` with
/// `(1−ε)² WWᵀ ⪯ W diag(c) Wᵀ ⪯ (1+ε)² WWᵀ`.
pub fn sparsify_bss(w: &Matrix, epsilon: f64) -> Result<SparsificationResult> {
    check_epsilon(epsilon, 1.0, false, "(0, 1)")?;
    check_rank(w)?;
    let (d, n) = w.shape();
    let whiten = linalg::sym_inv_sqrt(&(w * w.transpose()))?;
    let v = &whiten * w;
    let sched = Schedule::new(d, epsilon);
    let target = ((1.0 + epsilon) / (1.0 - epsilon)).powi(2);

    let mut a = Matrix::zeros(d, d);
    let mut t = vec![0.0; n];
    let mut u = sched.u0;
    let mut l = sched.l0;
    let mut finished = None;

    for round in 0..sched.rounds {
        let (lam, q) = linalg::sym_eigen(&a);
        let (u2, l2) = (u + sched.delta_u, l + sched.delta_l);
        let phi = |f: &dyn Fn(f64) -> f64| lam.iter().map(|&x| f(x)).sum::<f64>();
        let du = phi(&|x| 1.0 / (u - x)) - phi(&|x| 1.0 / (u2 - x));
        let dl = phi(&|x| 1.0 / (x - l2)) - phi(&|x| 1.0 / (x - l));
        let proj = q.transpose() * &v;

        let mut best: Option<(usize, f64, f64)> = None;
        for i in 0..n {
            let (mut u1, mut u2s, mut l1, mut l2s) = (0.0, 0.0, 0.0, 0.0);
            for k in 0..d {
                let y2 = proj[(k, i)] * proj[(k, i)];
                let gu = 1.0 / (u2 - lam[k]);
                let gl = 1.0 / (lam[k] - l2);
                u1 += y2 * gu;
                u2s += y2 * gu * gu;
                l1 += y2 * gl;
                l2s += y2 * gl * gl;
            }
            let up = u2s / du + u1;
            let lo = l2s / dl - l1;
            if up <= lo && best.is_none_or(|(_, bu, bl)| lo - up > bl - bu) {
                best = Some((i, up, lo));
            }
        }
        let (i, up, lo) = best.ok_or(Error::BarrierStall { round })?;
        let step = 2.0 / (up + lo);
        let col = v.column(i);
        a.ger(step, &col, &col, 1.0);
        t[i] += step;
        u = u2;
        l = l2;

        let (lam, _) = linalg::sym_eigen(&a);
        let (lmin, lmax) = (lam[0], lam[d - 1]);
        if lmin > 0.0 && lmax / lmin <= target {
            finished = Some((lmin, lmax));
            break;
        }
    }
    let (lmin, lmax) = finished.ok_or(Error::BarrierStall { round: sched.rounds })?;
    let scale = (1.0 - epsilon * epsilon) / (lmin * lmax).sqrt();
    let (indices, weights): (Vec<usize>, Vec<f64>) =
        t.iter().enumerate().filter(|(_, &c)| c > 0.0).map(|(i, &c)| (i, c * scale)).unzip();
    Ok(SparsificationResult {
        method: Method::Bss,
        epsilon,
        indices,
        weights,
        certified_factors: [(1.0 - epsilon).powi(2), (1.0 + epsilon).powi(2)],
        pre_rescale_weights: None,
    })
}

/// BSS followed by the Δ rescale, giving
/// `(1−ε)² h_Z(u) <= h_{Z′}(u) <= Δ²(1+ε)² h_Z(u)` at every facet normal `u`.
///
/// When `delta` is `None` it is computed by a determinant scan as the ratio
/// of the largest to the smallest nonzero `|det|`.
pub fn sparsify_delta_modular(w: &Matrix, epsilon: f64, delta: Option<f64>) -> Result<SparsificationResult> {
    let delta = match delta {
        Some(x) if x >= 1.0 => x,
        Some(x) => return Err(Error::InvalidArgument(format!("delta {x} must be >= 1"))),
        None => geometry::delta_of(w, geometry::DEFAULT_SUBSET_LIMIT)?.ratio(),
    };
    let mut res = sparsify_bss(w, epsilon)?;
    res.method = Method::DeltaModular;
    res.pre_rescale_weights = Some(res.weights.clone());
    res.weights.iter_mut().for_each(|c| *c *= delta);
    res.certified_factors = [(1.0 - epsilon).powi(2), delta * delta * (1.0 + epsilon).powi(2)];
    Ok(res)
}

/// Replaces each column `w_i` by `counts[i]` copies, so that integer column
/// weights become an unweighted matrix with the same zonotope up to scale.
pub fn split_weighted_columns(w: &Matrix, counts: &[u64]) -> Result<Matrix> {
    if counts.len() != w.ncols() {
        return Err(Error::DimensionMismatch { expected: w.ncols(), got: counts.len() });
    }
    let total: u128 = counts.iter().map(|&c| c as u128).sum();
    if total > SPLIT_LIMIT as u128 {
        return Err(Error::TooManyGenerators { n: total.min(usize::MAX as u128) as usize, limit: SPLIT_LIMIT });
    }
    let cols: Vec<usize> = counts.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize)).collect();
    if cols.is_empty() {
        return Err(Error::BadShape("all multiplicities are zero".into()));
    }
    Ok(linalg::select_columns(w, &cols))
}

/// Min and max over `dirs` of `h_{Z′}(u) / h_Z(u)`.
pub fn verify_sandwich(w: &Matrix, result: &SparsificationResult, dirs: &[Vector]) -> Result<(f64, f64)> {
    if dirs.is_empty() {
        return Err(Error::InvalidArgument("no test directions".into()));
    }
    let z = Zonotope::new(w.clone())?;
    let zs = Zonotope::new(result.generators(w))?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for u in dirs {
        if u.iter().all(|x| *x == 0.0) {
            return Err(Error::ZeroDirection);
        }
        let h = z.support_function(u.as_slice());
        if h <= 0.0 {
            return Err(Error::ZeroDirection);
        }
        let r = zs.support_function(u.as_slice()) / h;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}
