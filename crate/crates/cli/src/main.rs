//! `gpcp`: benchmark CLI for conformal Gaussian-process prediction intervals.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use gpcp_cli::config::{
    ExperimentConfig, ExperimentOverrides, MethodTag, OutputFormat, ParetoConfig,
};
use gpcp_cli::emit::{emit_pareto_csv, emit_results};
use gpcp_cli::runner::{run_benchmark, run_pareto};

#[derive(Parser)]
#[command(
    name = "gpcp",
    version,
    about = "Calibration benchmarks for conformal Gaussian-process prediction intervals"
)]
struct Cli {
    /// Worker threads for repetition parallelism (0 = library default).
    /// Ignored in builds without the `parallel` feature.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coverage/width/IAE benchmark over seeded repetitions.
    Bench(BenchArgs),
    /// Hyperparameter-robustness scatter around the REML fit.
    Pareto(ParetoArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Test function: goldstein_price, hartmann4, hartmann6, park, branin,
    /// or becker2d.
    #[arg(long)]
    function: Option<String>,

    /// Matérn regularity indices (ν = p + 1/2), comma-separated.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<usize>>,

    /// Training-design size (default 20·d).
    #[arg(long)]
    n_train: Option<usize>,

    /// Test-design size (default 1100).
    #[arg(long)]
    n_test: Option<usize>,

    /// Number of repetitions (default 40).
    #[arg(long)]
    reps: Option<usize>,

    /// Nominal coverage level (default 0.9).
    #[arg(long)]
    alpha: Option<f64>,

    /// Score-normalization exponent (default 1).
    #[arg(long)]
    beta: Option<f64>,

    /// Interval constructors, comma-separated (default: all). Choices:
    /// gaussian_reml, fcp_gp, jplus_gp, asym_jplus_gp, scp, jcp, jplus.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,

    /// Base seed; repetition r runs with seed base_seed + r (default 0).
    #[arg(long)]
    seed: Option<u64>,

    /// Number of interior IAE grid levels (default 99).
    #[arg(long)]
    iae_grid: Option<usize>,

    /// Optional JSON config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output file path.
    #[arg(long)]
    out: PathBuf,

    /// Output format: csv or json (default csv).
    #[arg(long, default_value = "csv")]
    format: String,

    /// Measure wall-clock time per record (makes outputs non-deterministic).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct ParetoArgs {
    /// Test function tag.
    #[arg(long)]
    function: String,

    /// Matérn regularity index (default 2).
    #[arg(long)]
    p: Option<usize>,

    /// Training-design size (default 150).
    #[arg(long)]
    n_train: Option<usize>,

    /// Test-design size (default 1500).
    #[arg(long)]
    n_test: Option<usize>,

    /// Number of hyperparameter draws (default 200; 0 emits only the REML
    /// and J+GP rows).
    #[arg(long)]
    n_samples: Option<usize>,

    /// Seed for the design and the hyperparameter draws (default 0).
    #[arg(long)]
    seed: Option<u64>,

    /// Variance sampling range as multiples of the REML estimate, "lo,hi"
    /// (default 1e-2,1e2).
    #[arg(long)]
    sigma2_range: Option<String>,

    /// Lengthscale sampling range as multiples of the REML estimate, "lo,hi"
    /// (default 1e-1,1e1).
    #[arg(long)]
    rho_range: Option<String>,

    /// Number of interior IAE grid levels (default 99).
    #[arg(long)]
    iae_grid: Option<usize>,

    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    init_threads(cli.threads)?;
    match cli.command {
        Command::Bench(args) => bench(args),
        Command::Pareto(args) => pareto(args),
    }
}

#[cfg(feature = "parallel")]
fn init_threads(threads: usize) -> Result<()> {
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn init_threads(threads: usize) -> Result<()> {
    if threads > 0 {
        eprintln!("note: built without the parallel feature; --threads is ignored");
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let format: OutputFormat = args.format.parse()?;
    let file_overrides = match &args.config {
        Some(path) => ExperimentOverrides::from_json_file(path)?,
        None => ExperimentOverrides::default(),
    };
    let methods = args
        .methods
        .map(|list| {
            list.iter()
                .map(|name| name.parse::<MethodTag>())
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let cli_overrides = ExperimentOverrides {
        function: args.function,
        p_values: args.p,
        n_train: args.n_train,
        n_test: args.n_test,
        repetitions: args.reps,
        alpha: args.alpha,
        beta: args.beta,
        methods,
        base_seed: args.seed,
        iae_grid_size: args.iae_grid,
    };
    let config = ExperimentConfig::from_overrides(cli_overrides.over(file_overrides))?;

    let report = run_benchmark(&config, args.timing)?;
    for warning in &report.warnings {
        eprintln!("{warning}");
    }
    emit_results(&report.records, format, &args.out)?;
    print!("{}", report.summary);
    eprintln!(
        "wrote {} records to {}",
        report.records.len(),
        args.out.display()
    );
    Ok(())
}

fn pareto(args: ParetoArgs) -> Result<()> {
    let mut config = ParetoConfig::new(&args.function)?;
    if let Some(p) = args.p {
        config.p = p;
    }
    if let Some(n) = args.n_train {
        config.n_train = n;
    }
    if let Some(n) = args.n_test {
        config.n_test = n;
    }
    if let Some(n) = args.n_samples {
        config.n_samples = n;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(range) = &args.sigma2_range {
        config.sigma2_factors = parse_range(range)?;
    }
    if let Some(range) = &args.rho_range {
        config.rho_factors = parse_range(range)?;
    }
    if let Some(g) = args.iae_grid {
        config.iae_grid_size = g;
    }

    let report = run_pareto(&config)?;
    let file = std::fs::File::create(&args.out)
        .with_context(|| format!("creating output file {}", args.out.display()))?;
    emit_pareto_csv(&report.rows, std::io::BufWriter::new(file))?;
    print!("{}", report.summary);
    if report.skipped > 0 {
        eprintln!(
            "warning: {} hyperparameter draws skipped (conditioning failures)",
            report.skipped
        );
    }
    eprintln!("wrote {} rows to {}", report.rows.len(), args.out.display());
    Ok(())
}

/// Parse "lo,hi" into a positive range.
fn parse_range(text: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        anyhow::bail!("expected a range of the form lo,hi — got '{text}'");
    }
    let lo: f64 = parts[0].trim().parse().context("parsing range lower end")?;
    let hi: f64 = parts[1].trim().parse().context("parsing range upper end")?;
    Ok((lo, hi))
}
