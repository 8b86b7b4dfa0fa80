//! `zono`: approximate containment of zonotopes and other symmetric convex
//! bodies from the command line. Results are printed as JSON on stdout.

mod cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status for a found witness (the inner body does not fit).
pub const EXIT_WITNESS: u8 = 3;
const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "zono", version, about = "Approximate convex-body containment with zonotope inner bodies")]
#[command(after_help = "Set ZONO_THREADS to bound the worker pool (default: all cores).\n\
Exit status: 0 contained or success, 3 witness found, 1 usage error, 2 numerical failure.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gap test: is Z ⊆ Q, or is a scaled copy of Z provably outside Q?
    Contain(ContainArgs),
    /// Bracket max{α : αZ ⊆ Q} by bisection over gap tests.
    Opt(OptArgs),
    /// Bracket the ∞→p operator norm of a matrix.
    Norm(NormArgs),
    /// Sparsify a generator matrix.
    Sparsify(SparsifyArgs),
    /// Draw approximately uniform points from a body by hit-and-run.
    Sample(SampleArgs),
    /// Exact volume of a zonotope.
    Volume(MatrixArg),
    /// Facet normals of a zonotope, one per ± pair.
    Facets(MatrixArg),
    /// Determinant scan: smallest and largest nonzero |det| of d×d submatrices.
    Delta(MatrixArg),
    /// Bring a zonotope to normalized position (orthonormal rows, short columns).
    Normalize(NormalizeArgs),
    /// Run a seeded experiment grid from a JSON config.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct MatrixArg {
    /// Generator matrix CSV, d rows by n columns.
    #[arg(short, long)]
    generators: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct GapArgs {
    /// Number of test points (default min(10⁴, 16n′²)).
    #[arg(short, long)]
    trials: Option<usize>,
    #[arg(short, long, default_value_t = 0)]
    seed: u64,
    /// Sparsification before testing.
    #[arg(long, value_enum, default_value_t = SparsifyMode::Lewis)]
    sparsify: SparsifyMode,
    /// Accuracy of the sparsifier.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    epsilon: f64,
    /// Known Δ for `--sparsify delta` (default: determinant scan).
    #[arg(long)]
    delta: Option<f64>,
    /// Replace the test-point factor 2√(n′/ln n′).
    #[arg(long)]
    scale: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum SparsifyMode {
    Lewis,
    Delta,
    Off,
}

#[derive(Args, Debug)]
struct ContainArgs {
    /// Zonotope generators (CSV). Exclusive with --inner.
    #[arg(short, long, required_unless_present = "inner", conflicts_with = "inner")]
    generators: Option<PathBuf>,
    /// General inner body K (JSON); uses random samples of K instead.
    #[arg(long)]
    inner: Option<PathBuf>,
    /// Outer body Q (JSON).
    #[arg(short, long)]
    body: PathBuf,
    /// Gap factor s for --inner: a witness certifies sK ⊄ Q.
    #[arg(long, default_value_t = 4.0, requires = "inner")]
    s: f64,
    #[command(flatten)]
    gap: GapArgs,
}

#[derive(Args, Debug)]
struct OptArgs {
    #[arg(short, long)]
    generators: PathBuf,
    #[arg(short, long)]
    body: PathBuf,
    /// Stop once high/low <= factor·(1 + rel_tol).
    #[arg(long, default_value_t = 0.05)]
    rel_tol: f64,
    #[command(flatten)]
    gap: GapArgs,
}

#[derive(Args, Debug)]
struct NormArgs {
    /// Matrix A (CSV).
    #[arg(short, long)]
    matrix: PathBuf,
    /// Target norm p in [1, ∞]; accepts `inf`.
    #[arg(long)]
    to: String,
    #[arg(long, default_value_t = 0.05)]
    rel_tol: f64,
    #[command(flatten)]
    gap: GapArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SparsifyMethod {
    Lewis,
    Bss,
    Delta,
}

#[derive(Args, Debug)]
struct SparsifyArgs {
    #[arg(short, long)]
    generators: PathBuf,
    #[arg(short, long, value_enum)]
    method: SparsifyMethod,
    #[arg(short, long, default_value_t = 0.3)]
    epsilon: f64,
    #[arg(short, long, default_value_t = 0)]
    seed: u64,
    /// Known Δ for the delta method.
    #[arg(long)]
    delta: Option<f64>,
    /// Write the sparsified generators (c_i·w_i) here.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(short, long)]
    body: PathBuf,
    #[arg(short, long)]
    count: usize,
    #[arg(short, long, default_value_t = 0)]
    seed: u64,
    /// Burn-in steps (default 1000 + 50d).
    #[arg(long)]
    burn_in: Option<usize>,
    /// Steps between emitted points (default 2d).
    #[arg(long)]
    thin: Option<usize>,
    /// CSV destination (default stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct NormalizeArgs {
    #[arg(short, long)]
    generators: PathBuf,
    /// Write the normalized generators here (with a JSON sidecar).
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    max_iter: usize,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Experiment config (JSON).
    #[arg(short, long)]
    config: PathBuf,
    /// Override the config's output_path.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("ZONO_THREADS") else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| anyhow::anyhow!("ZONO_THREADS must be a positive integer, got {v:?}"))?;
    anyhow::ensure!(n > 0, "ZONO_THREADS must be positive");
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<zono_core::Error>() {
        Some(e) if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let run = init_threads().and_then(|_| cmd::run(cli.command));
    match run {
        Ok(code) => ExitCode::from(code),
        Err(e)
            if e.chain().any(|c| {
                c.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            }) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
