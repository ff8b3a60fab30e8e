use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dsholo::report::{emit_residual_table, residual_table_csv, OutputFormat, RunConfig, Suite};
use dsholo::verify::{self, SweepConfig, SweepKind};

/// Verification suites for principal-series modes on de Sitter space.
///
/// Log verbosity is read from DSHOLO_LOG (error, warn, info, debug, trace).
#[derive(Parser)]
#[command(name = "dsholo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more suites and write a report.
    Verify(VerifyArgs),
    /// Tabulate truncation residuals over (Lmax, epsilon) as CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run, or `all`.
    #[arg(required = true, value_name = "SUITE")]
    suites: Vec<String>,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    nu: f64,
    /// Degree cutoff (for `antipodal`, the largest degree checked).
    #[arg(long = "Lmax", visible_alias = "L")]
    lmax: Option<usize>,
    #[arg(long, default_value_t = dsholo::tolerance::DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long)]
    grid_exactness: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Expansion,
    Kernel,
}

#[derive(Args)]
struct SweepArgs {
    kind: Kind,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    nu: f64,
    /// Comma-separated cutoffs; empty for a header-only table.
    #[arg(long = "Lmax", default_value = "5,10,20")]
    lmax: String,
    /// Comma-separated shifts.
    #[arg(long, default_value = "0.05,0.1,0.5")]
    epsilon: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seeded sample points averaged per cell.
    #[arg(long, default_value_t = 10)]
    samples: usize,
    /// CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn to_stdout(text: &str) -> dsholo::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(dsholo::Error::Io(e.to_string())),
        _ => Ok(()),
    }
}

fn run_verify(args: VerifyArgs) -> dsholo::Result<bool> {
    let suites = if args.suites.iter().any(|s| s == "all") {
        Suite::ALL.to_vec()
    } else {
        args.suites.iter().map(|s| s.parse()).collect::<dsholo::Result<Vec<Suite>>>()?
    };
    let format = match args.format {
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
    };
    let cfg = RunConfig {
        d: args.d,
        nu: args.nu,
        lmax: args.lmax,
        epsilon: args.epsilon,
        grid_exactness: args.grid_exactness,
        seed: args.seed,
        suites,
        output_path: args.out.clone(),
        format,
    };
    let report = verify::run(&cfg)?;
    match &args.out {
        Some(path) => report.write(path, format)?,
        None => match format {
            OutputFormat::Json => to_stdout(&format!("{}\n", report.to_json()?))?,
            OutputFormat::Csv => to_stdout(&report.to_csv()?)?,
        },
    }
    for c in report.failed_checks() {
        match (&c.residual, &c.error) {
            (_, Some(e)) => eprintln!("FAIL {}: {e}", c.name),
            (Some(r), None) => eprintln!("FAIL {}: residual {r:e} > tolerance {:e}", c.name, c.tolerance),
            (None, None) => eprintln!("FAIL {}", c.name),
        }
    }
    let failed = report.failed_checks().count();
    eprintln!("{}: {} checks, {failed} failed", report.run_id, report.checks.len());
    Ok(report.passed())
}

fn parse_list<T: std::str::FromStr>(flag: &str, text: &str) -> dsholo::Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| dsholo::Error::Config(format!("--{flag}: cannot parse '{s}'"))))
        .collect()
}

fn run_sweep(args: SweepArgs) -> dsholo::Result<()> {
    let kind = match args.kind {
        Kind::Expansion => SweepKind::Expansion,
        Kind::Kernel => SweepKind::Kernel,
    };
    let cfg = SweepConfig {
        d: args.d,
        nu: args.nu,
        lmax_values: parse_list("Lmax", &args.lmax)?,
        epsilon_values: parse_list("epsilon", &args.epsilon)?,
        seed: args.seed,
        samples: args.samples,
    };
    let rows = verify::sweep(kind, &cfg)?;
    match &args.out {
        Some(path) => emit_residual_table(&rows, path),
        None => to_stdout(&residual_table_csv(&rows)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DSHOLO_LOG", "warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(args) => run_verify(args),
        Command::Sweep(args) => run_sweep(args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
