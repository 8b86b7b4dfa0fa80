use std::io::{self, Write as _};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;
use zono_core::containment::{
    hypercube_gap, naszodi_gap, opt_containment_search, recommended_t, GapConfig, SparsifyChoice,
};
use zono_core::experiment::{self, ExperimentConfig};
use zono_core::geometry::{self, exact_opt_containment, HPolytope};
use zono_core::sampler::{hit_and_run, WalkConfig};
use zono_core::sparsify::{sparsify_bss, sparsify_delta_modular, sparsify_lewis};
use zono_core::{io as zio, linalg, Body, BodySpec, Matrix, MembershipOracle, Zonotope};

use crate::{Command, GapArgs, SparsifyMethod, SparsifyMode, EXIT_WITNESS};

pub fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Contain(a) => contain(a),
        Command::Opt(a) => opt(a),
        Command::Norm(a) => norm(a),
        Command::Sparsify(a) => sparsify(a),
        Command::Sample(a) => sample(a),
        Command::Volume(a) => {
            let z = zonotope(&a.generators)?;
            let volume = geometry::volume(&z, geometry::DEFAULT_SUBSET_LIMIT)?;
            emit(&json!({ "d": z.dim(), "n": z.count(), "volume": volume }))
        }
        Command::Facets(a) => {
            let z = zonotope(&a.generators)?;
            let normals: Vec<Vec<f64>> = geometry::enumerate_facet_normals(&z, geometry::DEFAULT_SUBSET_LIMIT)?
                .into_iter()
                .map(|u| u.as_slice().to_vec())
                .collect();
            emit(&json!({ "d": z.dim(), "n": z.count(), "facets": 2 * normals.len(), "normals": normals }))
        }
        Command::Delta(a) => {
            let z = zonotope(&a.generators)?;
            let rep = geometry::delta_of(z.generators(), geometry::DEFAULT_SUBSET_LIMIT)?;
            emit(&json!({ "report": rep, "ratio": rep.ratio() }))
        }
        Command::Normalize(a) => normalize(a),
        Command::Experiment(a) => {
            let mut cfg: ExperimentConfig = zio::read_json(&a.config)?;
            if let Some(out) = a.output {
                cfg.output_path = out;
            }
            let out = experiment::run_experiment(&cfg)?;
            let rates: Vec<_> =
                out.witness_rate_by_dim().into_iter().map(|(d, r)| json!({ "d": d, "witness_rate": r })).collect();
            emit(&json!({
                "scenario": cfg.scenario.name(),
                "records": out.records.len(),
                "errors": out.records.iter().filter(|r| r.error.is_some()).count(),
                "witnesses": out.witnesses.len(),
                "witness_rate_by_dim": rates,
                "output": cfg.output_path,
                "witness_file": experiment::witness_path(&cfg.output_path),
            }))
        }
    }
}

fn emit<T: Serialize>(v: &T) -> Result<u8> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(0)
}

fn zonotope(path: &Path) -> Result<Zonotope> {
    zio::read_zonotope(path).with_context(|| format!("reading generators from {}", path.display()))
}

fn body_spec(path: &Path) -> Result<BodySpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading body from {}", path.display()))?;
    Ok(BodySpec::from_json(&text)?)
}

fn gap_config(a: &GapArgs) -> GapConfig {
    let sparsify = match a.sparsify {
        SparsifyMode::Lewis => SparsifyChoice::Lewis,
        SparsifyMode::Delta => SparsifyChoice::DeltaModular { delta: a.delta },
        SparsifyMode::Off => SparsifyChoice::Off,
    };
    GapConfig {
        trials: a.trials,
        seed: a.seed,
        sparsify_epsilon: a.epsilon,
        sparsify,
        scale_override: a.scale,
        ..GapConfig::default()
    }
}

fn contain(a: crate::ContainArgs) -> Result<u8> {
    let q = Body::new(body_spec(&a.body)?)?;
    let witness = if let Some(path) = &a.inner {
        let k = Body::new(body_spec(path)?)?;
        let d = k.dim();
        let trials = match a.gap.trials {
            Some(t) => t,
            None => usize::try_from(recommended_t(d, a.s)?).context("recommended T does not fit in memory")?,
        };
        let out = naszodi_gap(&k, &q, a.s, trials, &WalkConfig::defaults(d, a.gap.seed))?;
        emit(&out)?;
        out.verdict.is_witness()
    } else {
        let z = zonotope(a.generators.as_deref().expect("clap enforces one inner body"))?;
        let out = hypercube_gap(&z, &q, &gap_config(&a.gap))?;
        emit(&out)?;
        out.verdict.is_witness()
    };
    Ok(if witness { EXIT_WITNESS } else { 0 })
}

fn hpolytope(spec: &BodySpec) -> Option<HPolytope> {
    match spec {
        BodySpec::HPoly { normals, offsets } => HPolytope::from_rows(normals, offsets.clone()).ok(),
        _ => None,
    }
}

fn opt(a: crate::OptArgs) -> Result<u8> {
    let z = zonotope(&a.generators)?;
    let spec = body_spec(&a.body)?;
    let q = Body::new(spec.clone())?;
    let bracket = opt_containment_search(&z, &q, &gap_config(&a.gap), a.rel_tol)?;
    let exact = hpolytope(&spec).map(|h| exact_opt_containment(|u| z.support_function(u), &h).alpha);
    emit(&json!({ "bracket": bracket, "exact_alpha": exact }))
}

fn parse_p(s: &str) -> Result<f64> {
    let p = match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        t => t.parse().with_context(|| format!("bad norm exponent {s:?}"))?,
    };
    if p.is_nan() || p < 1.0 {
        bail!("norm exponent must lie in [1, inf], got {s}");
    }
    Ok(p)
}

/// `‖A‖_{∞→p} = max_{x ∈ Z(A)} ‖x‖_p = 1/α*` with `Q` the unit `p`-ball.
fn norm(a: crate::NormArgs) -> Result<u8> {
    let p = parse_p(&a.to)?;
    let z = zonotope(&a.matrix)?;
    let q = Body::new(BodySpec::LpBall { dim: z.dim(), p, radius: 1.0 })?;
    let b = opt_containment_search(&z, &q, &gap_config(&a.gap), a.rel_tol)?;
    let exact = (z.count() <= 20)
        .then(|| geometry::enumerate_vertices(&z, 20))
        .transpose()?
        .map(|v| v.points.iter().map(|x| linalg::lp_norm(x.as_slice(), p)).fold(0.0, f64::max));
    emit(&json!({
        "p": a.to,
        "lower": 1.0 / b.alpha_high,
        "upper": 1.0 / b.alpha_low,
        "upper_is_trivial": b.low_is_floor,
        "exact": exact,
        "witness": b.witness,
        "queries": b.queries,
    }))
}

fn sparsify(a: crate::SparsifyArgs) -> Result<u8> {
    let z = zonotope(&a.generators)?;
    let w = z.generators();
    let res = match a.method {
        SparsifyMethod::Lewis => sparsify_lewis(w, a.epsilon, a.seed)?,
        SparsifyMethod::Bss => sparsify_bss(w, a.epsilon)?,
        SparsifyMethod::Delta => sparsify_delta_modular(w, a.epsilon, a.delta)?,
    };
    if let Some(out) = &a.output {
        zio::write_matrix_csv(out, &res.generators(w))?;
    }
    emit(&res)
}

fn sample(a: crate::SampleArgs) -> Result<u8> {
    let body = Body::new(body_spec(&a.body)?)?;
    let d = body.dim();
    let mut cfg = WalkConfig::defaults(d, a.seed);
    cfg.burn_in = a.burn_in.unwrap_or(cfg.burn_in);
    cfg.thin = a.thin.unwrap_or(cfg.thin);
    let pts = hit_and_run(&body, &vec![0.0; d], a.count, &cfg)?;
    match &a.output {
        Some(path) => zio::write_points(std::fs::File::create(path)?, &pts)?,
        None => zio::write_points(io::stdout().lock(), &pts)?,
    }
    Ok(0)
}

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn normalize(a: crate::NormalizeArgs) -> Result<u8> {
    let z = zonotope(&a.generators)?;
    let res = geometry::normalize(&z, a.max_iter)?;
    let zn = &res.normalized;
    if let Some(out) = &a.output {
        zio::write_zonotope(out, zn)?;
    }
    emit(&json!({
        "d": zn.dim(),
        "n_in": z.count(),
        "n_out": zn.count(),
        "iterations": res.iterations,
        "splits": res.splits,
        "identity_defect": geometry::identity_defect(zn.generators()),
        "max_column_norm": zn.column_norms().into_iter().fold(0.0, f64::max),
        "column_norm_bound": geometry::column_norm_bound(zn.dim(), zn.count()),
        "transform": rows(&res.transform),
    }))
}
