use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zono_core::containment::{self, AnticoncentrationMode, GapConfig};
use zono_core::geometry::{enumerate_vertices, HPolytope};
use zono_core::instances::{gen_random_zonotope, Family};
use zono_core::{Body, BodySpec};

// One thread versus the default pool. Build with --no-default-features for
// the fully sequential code path.
fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let all = rayon::current_num_threads();
    [1, all]
        .into_iter()
        .map(|t| (format!("{t}_threads"), rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap()))
        .collect()
}

fn gap_trials(c: &mut Criterion) {
    let z = gen_random_zonotope(6, 40, &Family::Gaussian, 1).unwrap();
    let q = Body::new(BodySpec::from_hpolytope(&HPolytope::cube(6, 1e6).unwrap())).unwrap();
    let cfg = GapConfig { trials: Some(10_000), seed: 3, ..GapConfig::default() };
    let mut g = c.benchmark_group("hypercube_gap");
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| containment::hypercube_gap(&z, &q, &cfg).unwrap()))
        });
    }
    g.finish();
}

fn anticoncentration(c: &mut Criterion) {
    let a: Vec<f64> = (0..20).map(|i| 1.0 + i as f64 * 0.1).collect();
    let mut g = c.benchmark_group("anticoncentration_exhaustive");
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                pool.install(|| {
                    containment::anticoncentration_fraction(&a, AnticoncentrationMode::Exhaustive, 0, 0).unwrap()
                })
            })
        });
    }
    g.finish();
}

fn vertices(c: &mut Criterion) {
    let z = gen_random_zonotope(3, 16, &Family::Gaussian, 2).unwrap();
    let mut g = c.benchmark_group("enumerate_vertices");
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| enumerate_vertices(&z, 24).unwrap()))
        });
    }
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = gap_trials, anticoncentration, vertices
}
criterion_main!(benches);
