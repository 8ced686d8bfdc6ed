//! `discrepancy`: point-set generation and experiment sweeps.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on a
//! configuration or input error.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use discrepancy_core::experiment::{
    self, parse_config_text, ExperimentConfig, ExperimentKind, ExperimentReport, Format,
};
use discrepancy_core::pointset::{corner_collapse, io as pio};
use discrepancy_core::Error;

#[derive(Parser)]
#[command(
    name = "discrepancy",
    version,
    about = "Discrepancy norms, Haar coefficients and test-function experiments"
)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a point set in the text or binary format.
    Generate(GenerateArgs),
    /// L1, L2, L^p and Orlicz norms of D_N across a sweep.
    Norms(ExperimentArgs),
    /// Haar coefficient statistics per shape.
    HaarScan(ExperimentArgs),
    /// <D_N, Z>, the exact norm of Z and the dichotomy function.
    Roth(ExperimentArgs),
    /// Extremes of <D_N, f_r> over greedy r-functions per level.
    LemmaBounds(ExperimentArgs),
    /// Corner-collapse example: L1 and L2 norms of the modified set.
    Dichotomy(ExperimentArgs),
    /// Product of the L1 and L log L norms and the sine test function.
    Product(ExperimentArgs),
    /// Survival function of |Z| and its exponential-squared fit.
    Tails(ExperimentArgs),
    /// Elementary-box verification of nets and the counting bound.
    NetVerify(ExperimentArgs),
    /// Hölder interpolation inequality on sampled values of D_N.
    Interpolate(ExperimentArgs),
}

impl Command {
    fn experiment(&self) -> Option<(ExperimentKind, &ExperimentArgs)> {
        let kind = match self {
            Command::Generate(_) => return None,
            Command::Norms(a) => (ExperimentKind::NormsSweep, a),
            Command::HaarScan(a) => (ExperimentKind::HaarScan, a),
            Command::Roth(a) => (ExperimentKind::RothTest, a),
            Command::LemmaBounds(a) => (ExperimentKind::LemmaBounds, a),
            Command::Dichotomy(a) => (ExperimentKind::DichotomyExample, a),
            Command::Product(a) => (ExperimentKind::ProductBound, a),
            Command::Tails(a) => (ExperimentKind::Tails, a),
            Command::NetVerify(a) => (ExperimentKind::NetVerify, a),
            Command::Interpolate(a) => (ExperimentKind::Interpolation, a),
        };
        Some(kind)
    }
}

/// Flags shared by the experiment subcommands. Each overrides the key of
/// the same name in the `--config` file.
#[derive(Args)]
struct ExperimentArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated dimensions.
    #[arg(long)]
    dim: Option<String>,
    /// Sizes: `64,256`, `2^10` or ranges `2^4..2^12`.
    #[arg(long)]
    n_list: Option<String>,
    #[arg(long, value_parser = ["random", "hammersley", "faure"])]
    generator: Option<String>,
    /// Faure base (default: smallest prime >= d).
    #[arg(long)]
    base: Option<String>,
    /// Corner-collapse exponent (default 1/(2d)).
    #[arg(long)]
    delta: Option<String>,
    /// Dichotomy exponent (default min(1/d, 1/2)).
    #[arg(long)]
    epsilon: Option<String>,
    /// Comma-separated constants of the sine test function.
    #[arg(long)]
    sine_c: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    /// Seed for random point sets and Monte-Carlo samples (required here
    /// or in the configuration file).
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, value_parser = ["json", "csv"])]
    format: Option<String>,
    /// Report path (default: standard output).
    #[arg(long)]
    out: Option<String>,
    /// Exponent of the interpolation check.
    #[arg(long)]
    p: Option<String>,
    /// Comma-separated tail thresholds.
    #[arg(long)]
    thresholds: Option<String>,
    /// Relative tolerance of the Orlicz-norm bisection.
    #[arg(long)]
    tol: Option<String>,
    /// Levels above n scanned by lemma-bounds and haar-scan.
    #[arg(long)]
    levels_above: Option<String>,
    /// Random boxes used by the counting-bound check.
    #[arg(long)]
    trials: Option<String>,
    /// Point-set file used instead of the generator.
    #[arg(long)]
    points: Option<String>,
    /// Permit the sine construction and product bound outside d = 3.
    #[arg(long)]
    allow_any_dim: bool,
    /// Also write gnuplot data (N, value, std_error) to this path.
    #[arg(long)]
    plot: Option<String>,
    /// Record wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

impl ExperimentArgs {
    fn entries(&self) -> io::Result<Vec<(String, String)>> {
        let mut entries = match &self.config {
            Some(path) => parse_config_text(&fs::read_to_string(path)?)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?,
            None => Vec::new(),
        };
        let flags = [
            ("dim", &self.dim),
            ("n-list", &self.n_list),
            ("generator", &self.generator),
            ("base", &self.base),
            ("delta", &self.delta),
            ("epsilon", &self.epsilon),
            ("sine-c", &self.sine_c),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("format", &self.format),
            ("out", &self.out),
            ("p", &self.p),
            ("thresholds", &self.thresholds),
            ("tol", &self.tol),
            ("levels-above", &self.levels_above),
            ("trials", &self.trials),
            ("points", &self.points),
            ("plot", &self.plot),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                entries.push((key.to_string(), v.clone()));
            }
        }
        if self.allow_any_dim {
            entries.push(("allow-any-dim".into(), "true".into()));
        }
        if self.timing {
            entries.push(("timing".into(), "true".into()));
        }
        Ok(entries)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_parser = ["random", "hammersley", "faure"])]
    generator: String,
    #[arg(long)]
    dim: usize,
    /// Number of points (a power of the base for Faure nets).
    #[arg(long)]
    n: u64,
    #[arg(long)]
    base: Option<u64>,
    /// Seed of the random generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Apply the corner collapse with this exponent.
    #[arg(long)]
    delta: Option<f64>,
    /// Write the binary format instead of text.
    #[arg(long)]
    binary: bool,
    /// Output path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn generate(args: &GenerateArgs) -> Result<(), Error> {
    let mut entries = vec![
        ("generator".to_string(), args.generator.clone()),
        ("seed".to_string(), args.seed.to_string()),
        ("dim".to_string(), args.dim.to_string()),
        ("n-list".to_string(), args.n.to_string()),
    ];
    if let Some(b) = args.base {
        entries.push(("base".into(), b.to_string()));
    }
    let cfg = ExperimentConfig::resolve(Some(ExperimentKind::NormsSweep), &entries)?;
    let mut points = experiment::build_point_set(&cfg, args.dim, args.n)?.points;
    if let Some(delta) = args.delta {
        points = corner_collapse(&points, delta)?;
    }
    let mut buf = Vec::new();
    if args.binary {
        pio::write_binary(&points, &mut buf)?;
    } else {
        pio::write_text(&points, &mut buf)?;
    }
    emit(args.out.as_deref().map(PathBuf::from), &buf)?;
    Ok(())
}

fn emit(path: Option<PathBuf>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}

fn write_report(cfg: &ExperimentConfig, report: &ExperimentReport) -> io::Result<()> {
    let body = match cfg.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    emit(cfg.out.as_ref().map(PathBuf::from), body.as_bytes())?;
    if let Some(plot) = &cfg.plot {
        fs::write(plot, report.to_plot_data())?;
    }
    Ok(())
}

fn run_experiment(kind: ExperimentKind, args: &ExperimentArgs) -> ExitCode {
    let entries = match args.entries() {
        Ok(e) => e,
        Err(e) => return fail(&format!("reading configuration: {e}")),
    };
    let cfg = match ExperimentConfig::resolve(Some(kind), &entries) {
        Ok(c) => c,
        Err(e) => return fail(&e.to_string()),
    };
    let report = match experiment::run(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e.to_string()),
    };
    if let Err(e) = write_report(&cfg, &report) {
        return fail(&format!("writing report: {e}"));
    }
    let failed: Vec<_> = report.failed_checks().collect();
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        for c in failed {
            eprintln!("check failed: {} ({})", c.name, c.detail);
        }
        ExitCode::from(1)
    }
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            return fail(&format!("thread pool: {e}"));
        }
    }
    match cli.command.experiment() {
        Some((kind, args)) => run_experiment(kind, args),
        None => match &cli.command {
            Command::Generate(args) => match generate(args) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(&e.to_string()),
            },
            _ => unreachable!("experiments handled above"),
        },
    }
}
