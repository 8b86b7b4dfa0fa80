//! Reproducible experiment grids over dimensions and seeds.
//!
//! A run evaluates every `(d, seed)` cell (concurrently when the `parallel`
//! feature is on), sorts the records by `(d, seed)`, and writes them as CSV
//! together with a JSON file of witness points next to it.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::containment::{self, GapConfig, SparsifyChoice};
use crate::error::{Error, Result};
use crate::geometry::{self, exact_opt_containment, HPolytope, Zonotope};
use crate::hull;
use crate::instances::{self, Family};
use crate::linalg::Matrix;
use crate::oracles::{Body, BodySpec, MembershipOracle};
use crate::par;
use crate::rng::{self, stream};
use crate::sampler::WalkConfig;
use crate::sparsify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    HypercubeGapSweep,
    DeltaModularSweep,
    NaszodiSweep,
    VolumeRatio,
    StressSplit,
    PolarCheck,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::HypercubeGapSweep => "hypercube_gap_sweep",
            Scenario::DeltaModularSweep => "delta_modular_sweep",
            Scenario::NaszodiSweep => "naszodi_sweep",
            Scenario::VolumeRatio => "volume_ratio",
            Scenario::StressSplit => "stress_split",
            Scenario::PolarCheck => "polar_check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub dims: Vec<usize>,
    #[serde(default = "default_family")]
    pub generator_family: Family,
    pub seeds: Vec<u64>,
    /// Outer body; when absent a body is planted per instance.
    #[serde(default)]
    pub body: Option<BodySpec>,
    pub output_path: PathBuf,
    /// Generators per instance; defaults depend on the scenario.
    #[serde(default)]
    pub n: Option<usize>,
    /// Planted `α*` for gap sweeps.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Scale `s` for the sampling test and the stress test.
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub samples: Option<usize>,
    /// Hull sizes for `volume_ratio`.
    #[serde(default)]
    pub hull_points: Option<Vec<usize>>,
    /// Multiples of the circumradius tried by `polar_check`.
    #[serde(default)]
    pub radius_factors: Option<Vec<f64>>,
    /// Wall-clock timings make the CSV non-reproducible, so they are opt-in.
    #[serde(default)]
    pub record_timings: bool,
}

fn default_family() -> Family {
    Family::Gaussian
}

fn default_alpha() -> f64 {
    0.9
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario, dims: Vec<usize>, seeds: Vec<u64>, output_path: PathBuf) -> Self {
        ExperimentConfig {
            scenario,
            dims,
            generator_family: default_family(),
            seeds,
            body: None,
            output_path,
            n: None,
            alpha: default_alpha(),
            trials: None,
            epsilon: None,
            s: None,
            samples: None,
            hull_points: None,
            radius_factors: None,
            record_timings: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.dims.is_empty() {
            return bad("dims must be nonempty".into());
        }
        if self.seeds.is_empty() {
            return bad("seeds must be nonempty".into());
        }
        if self.dims.contains(&0) {
            return bad("dimensions must be >= 1".into());
        }
        if !(self.alpha > 0.0) {
            return bad(format!("alpha {} must be positive", self.alpha));
        }
        match self.scenario {
            Scenario::VolumeRatio => {
                if let Some(&d) = self.dims.iter().find(|&&d| d != 2 && d != 3) {
                    return bad(format!("volume_ratio supports d in {{2, 3}}, got {d}"));
                }
                if self.hull_points.as_ref().is_some_and(|h| h.is_empty() || h.contains(&0)) {
                    return bad("hull_points must be nonempty and positive".into());
                }
            }
            Scenario::NaszodiSweep => {
                if self.s.is_some_and(|s| !(s > 1.0)) {
                    return bad("s must exceed 1".into());
                }
            }
            Scenario::StressSplit => {
                if self.s.is_some_and(|s| !(s > 0.0)) {
                    return bad("s must be positive".into());
                }
            }
            Scenario::PolarCheck => {
                if let Some(b) = &self.body {
                    if !matches!(
                        b,
                        BodySpec::LpBall { .. }
                            | BodySpec::Ellipsoid { .. }
                            | BodySpec::HPoly { .. }
                            | BodySpec::Scaled { .. }
                    ) {
                        return bad("polar_check needs a ball, box or ellipsoid body".into());
                    }
                }
            }
            Scenario::HypercubeGapSweep | Scenario::DeltaModularSweep => {}
        }
        if let Some(b) = &self.body {
            Body::new(b.clone())?;
        }
        Ok(())
    }

    fn default_n(&self, d: usize) -> usize {
        if let Some(n) = self.n {
            return n;
        }
        match (self.scenario, &self.generator_family) {
            (Scenario::StressSplit, _) => 8 * d,
            (_, Family::TuIncidence) => d * (d + 1) / 2,
            (_, Family::SplitAxes) => 4 * d,
            (Scenario::VolumeRatio, _) => d + 3,
            _ => 2 * d + 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub scenario: String,
    pub d: usize,
    pub n: Option<usize>,
    pub n_sparsified: Option<usize>,
    pub seed: u64,
    pub verdict: String,
    pub gauge_bound: Option<f64>,
    pub exact_alpha: Option<f64>,
    pub membership_queries: Option<u64>,
    pub wall_time_ms: Option<f64>,
    pub metric_name: Option<String>,
    pub metric_value: Option<f64>,
    pub metric_bound: Option<f64>,
    pub error: Option<String>,
}

impl ExperimentRecord {
    fn blank(scenario: Scenario, d: usize, seed: u64) -> Self {
        ExperimentRecord {
            scenario: scenario.name().into(),
            d,
            n: None,
            n_sparsified: None,
            seed,
            verdict: String::new(),
            gauge_bound: None,
            exact_alpha: None,
            membership_queries: None,
            wall_time_ms: None,
            metric_name: None,
            metric_value: None,
            metric_bound: None,
            error: None,
        }
    }

    pub fn is_witness(&self) -> bool {
        self.verdict == "witness"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub scenario: String,
    pub d: usize,
    pub seed: u64,
    pub point: Vec<f64>,
    pub gauge_bound: f64,
    /// Outer body the point lies outside of.
    pub body: BodySpec,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub witnesses: Vec<WitnessEntry>,
}

impl ExperimentOutput {
    /// Witness frequency per dimension, over records without errors.
    pub fn witness_rate_by_dim(&self) -> Vec<(usize, f64)> {
        let mut dims: Vec<usize> = self.records.iter().map(|r| r.d).collect();
        dims.dedup();
        dims.into_iter()
            .map(|d| {
                let rows: Vec<&ExperimentRecord> =
                    self.records.iter().filter(|r| r.d == d && r.error.is_none()).collect();
                let w = rows.iter().filter(|r| r.is_witness()).count();
                (d, if rows.is_empty() { 0.0 } else { w as f64 / rows.len() as f64 })
            })
            .collect()
    }
}

/// Witness file path: `out.csv` → `out.witnesses.json`.
pub fn witness_path(csv: &Path) -> PathBuf {
    csv.with_extension("witnesses.json")
}

type Cell = (Vec<ExperimentRecord>, Vec<WitnessEntry>);

/// Runs the grid and writes the CSV and witness file.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let out = evaluate(cfg)?;
    write_records(&cfg.output_path, &out.records)?;
    std::fs::write(witness_path(&cfg.output_path), serde_json::to_string_pretty(&out.witnesses)? + "\n")?;
    Ok(out)
}

/// Runs the grid without touching the filesystem.
pub fn evaluate(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let cells: Vec<(usize, u64)> = cfg.dims.iter().flat_map(|&d| cfg.seeds.iter().map(move |&s| (d, s))).collect();
    let results: Vec<Cell> = par::map_slice(&cells, |&(d, seed)| {
        let start = Instant::now();
        let (mut recs, wits) = match run_cell(cfg, d, seed) {
            Ok(c) => c,
            Err(e) => {
                let mut r = ExperimentRecord::blank(cfg.scenario, d, seed);
                r.verdict = "error".into();
                r.error = Some(e.to_string());
                (vec![r], Vec::new())
            }
        };
        if cfg.record_timings {
            let ms = start.elapsed().as_secs_f64() * 1e3;
            recs.iter_mut().for_each(|r| r.wall_time_ms = Some(ms));
        }
        (recs, wits)
    });
    let mut out = ExperimentOutput::default();
    for (r, w) in results {
        out.records.extend(r);
        out.witnesses.extend(w);
    }
    out.records.sort_by_key(|r| (r.d, r.seed));
    out.witnesses.sort_by_key(|w| (w.d, w.seed));
    Ok(out)
}

pub fn write_records(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    Ok(rdr.deserialize().collect::<std::result::Result<Vec<_>, _>>()?)
}

fn outer_body(
    cfg: &ExperimentConfig,
    d: usize,
    planted: impl FnOnce() -> Result<HPolytope>,
) -> Result<(BodySpec, Option<HPolytope>)> {
    match &cfg.body {
        Some(spec) => {
            let hp = match spec {
                BodySpec::HPoly { normals, offsets } => Some(HPolytope::from_rows(normals, offsets.clone())?),
                _ => None,
            };
            let b = Body::new(spec.clone())?;
            if b.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: b.dim() });
            }
            Ok((spec.clone(), hp))
        }
        None => {
            let hp = planted()?;
            Ok((BodySpec::from_hpolytope(&hp), Some(hp)))
        }
    }
}

fn verdict_fields(rec: &mut ExperimentRecord, v: &containment::ContainmentVerdict) {
    rec.membership_queries = Some(v.queries());
    rec.verdict = if v.is_witness() { "witness" } else { "contained" }.into();
}

fn run_cell(cfg: &ExperimentConfig, d: usize, seed: u64) -> Result<Cell> {
    let scen = cfg.scenario;
    let mut rec = ExperimentRecord::blank(scen, d, seed);
    let mut wits = Vec::new();
    let n = cfg.default_n(d);
    match scen {
        Scenario::HypercubeGapSweep | Scenario::DeltaModularSweep => {
            let z = instances::gen_random_zonotope(d, n, &cfg.generator_family, seed)?;
            rec.n = Some(z.count());
            let (spec, hp) = outer_body(cfg, d, || {
                instances::hpoly_with_alpha(|a| z.support_function(a), d, cfg.alpha, 2 * d, seed)
            })?;
            rec.exact_alpha = hp.as_ref().map(|q| exact_opt_containment(|a| z.support_function(a), q).alpha);
            let q = Body::new(spec.clone())?;
            let eps = cfg.epsilon.unwrap_or(if scen == Scenario::DeltaModularSweep {
                0.4
            } else {
                containment::DEFAULT_EPSILON
            });
            let gap_cfg = GapConfig {
                trials: Some(cfg.trials.unwrap_or(10_000)),
                seed,
                sparsify_epsilon: eps,
                sparsify: if scen == Scenario::DeltaModularSweep {
                    SparsifyChoice::DeltaModular { delta: None }
                } else {
                    SparsifyChoice::Lewis
                },
                ..GapConfig::default()
            };
            let out = containment::hypercube_gap(&z, &q, &gap_cfg)?;
            rec.n_sparsified = Some(out.n_sparsified);
            rec.gauge_bound = Some(out.scale);
            verdict_fields(&mut rec, &out.verdict);
            if let containment::ContainmentVerdict::Witness { point, gauge_bound, .. } = &out.verdict {
                rec.gauge_bound = Some(*gauge_bound);
                wits.push(WitnessEntry {
                    scenario: scen.name().into(),
                    d,
                    seed,
                    point: point.clone(),
                    gauge_bound: *gauge_bound,
                    body: spec,
                });
            }
            if scen == Scenario::DeltaModularSweep {
                let w = z.generators();
                let res = sparsify::sparsify_delta_modular(w, eps, None)?;
                let normals = geometry::enumerate_facet_normals(&z, geometry::DEFAULT_SUBSET_LIMIT)?;
                let (_, hi) = sparsify::verify_sandwich(w, &res, &normals)?;
                rec.metric_name = Some("max_facet_ratio".into());
                rec.metric_value = Some(hi);
                rec.metric_bound = Some(res.upper_factor());
            }
            Ok((vec![rec], wits))
        }
        Scenario::NaszodiSweep => {
            let s = cfg.s.unwrap_or(4.0);
            let z = instances::gen_random_zonotope(d, n, &cfg.generator_family, seed)?;
            let k_poly = instances::hpoly_with_alpha(|a| z.support_function(a), d, 1.0, 2 * d, seed ^ 0x6b)?;
            let k_support = |a: &[f64]| k_poly.support_function(a).unwrap_or(f64::INFINITY);
            let (spec, hp) = outer_body(cfg, d, || instances::hpoly_with_alpha(k_support, d, cfg.alpha, 2 * d, seed))?;
            rec.n = Some(k_poly.num_facets());
            rec.exact_alpha = hp.as_ref().map(|q| exact_opt_containment(k_support, q).alpha);
            let k = Body::new(BodySpec::from_hpolytope(&k_poly))?;
            let q = Body::new(spec.clone())?;
            let t = cfg.trials.map(|t| t as u64).map_or_else(|| containment::recommended_t(d, s), Ok)?;
            let out = containment::naszodi_gap(&k, &q, s, t as usize, &WalkConfig::defaults(d, seed))?;
            rec.gauge_bound = Some(s);
            verdict_fields(&mut rec, &out.verdict);
            if let Some(p) = out.verdict.witness_point() {
                wits.push(WitnessEntry {
                    scenario: scen.name().into(),
                    d,
                    seed,
                    point: p.to_vec(),
                    gauge_bound: s,
                    body: spec,
                });
            }
            Ok((vec![rec], wits))
        }
        Scenario::VolumeRatio => {
            let z = instances::gen_random_zonotope(d, n, &cfg.generator_family, seed)?;
            let vol_z = geometry::volume(&z, geometry::DEFAULT_SUBSET_LIMIT)?;
            let sizes = cfg.hull_points.clone().unwrap_or_else(|| vec![8, 16, 32, 64]);
            let max = sizes.iter().copied().max().unwrap_or(0);
            let pts = random_vertices(&z, max, seed);
            let mut recs = Vec::new();
            for &m in &sizes {
                let v = hull::hull_volume(&pts[..m], d)?;
                let mut r = ExperimentRecord::blank(scen, d, seed);
                r.n = Some(z.count());
                r.verdict = "ok".into();
                r.metric_name = Some(format!("volume_ratio_{m}"));
                r.metric_value = Some((v / vol_z).powf(1.0 / d as f64));
                r.metric_bound = Some(1.0);
                recs.push(r);
            }
            Ok((recs, wits))
        }
        Scenario::StressSplit => {
            let s = cfg.s.unwrap_or(2.0);
            let res = containment::split_generator_stress(d, n, s, cfg.samples.unwrap_or(100_000), seed)?;
            rec.n = Some(n);
            rec.verdict =
                if res.empirical <= res.hoeffding_bound + 3.0 * res.stderr { "within_bound" } else { "above_bound" }
                    .into();
            rec.metric_name = Some("empirical_probability".into());
            rec.metric_value = Some(res.empirical);
            rec.metric_bound = Some(res.hoeffding_bound);
            Ok((vec![rec], wits))
        }
        Scenario::PolarCheck => {
            let spec = cfg.body.clone().unwrap_or_else(|| BodySpec::ball(d, 1.0));
            let dims = Body::new(spec.clone())?.dim();
            if dims != d {
                return Err(Error::DimensionMismatch { expected: d, got: dims });
            }
            let factors = cfg.radius_factors.clone().unwrap_or_else(|| vec![0.9, 1.0, 1.5]);
            let out_rad = containment::polar_reduction_check(&spec, 1.0, 0, seed)?.out_rad;
            let mut recs = Vec::new();
            for f in factors {
                let rep = containment::polar_reduction_check(&spec, f * out_rad, cfg.samples.unwrap_or(256), seed)?;
                let mut r = ExperimentRecord::blank(scen, d, seed);
                r.verdict = match (rep.passed(), rep.containment_holds) {
                    (true, true) => "pass_contained",
                    (true, false) => "pass_not_contained",
                    (false, _) => "fail",
                }
                .into();
                r.membership_queries = Some(rep.per_direction.len() as u64);
                r.metric_name = Some("r_over_outrad".into());
                r.metric_value = Some(f);
                r.metric_bound = Some(rep.out_rad);
                recs.push(r);
            }
            Ok((recs, wits))
        }
    }
}

/// Images `W y` of seeded uniform sign vectors.
pub fn random_vertices(z: &Zonotope, count: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::Rng as _;
    let mut rng = rng::rng_for(seed, stream::HULL, 0);
    let w: &Matrix = z.generators();
    (0..count)
        .map(|_| {
            let signs: Vec<i8> = (0..w.ncols()).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            z.image(&signs).as_slice().to_vec()
        })
        .collect()
}

/// Re-checks every persisted witness against its body.
pub fn verify_witnesses(witnesses: &[WitnessEntry]) -> Result<bool> {
    for w in witnesses {
        if Body::new(w.body.clone())?.membership(&w.point)? {
            return Ok(false);
        }
    }
    Ok(true)
}
