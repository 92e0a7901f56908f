use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};
use landsberg_cli::{list_catalog, run, RunConfig, EXIT_ERROR};
use landsberg_core::verify::Verdict;

#[derive(Parser)]
#[command(name = "landsberg", version, about = "Classify Finsler metrics as Berwald, Landsberg or neither")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a catalog metric and report its Landsberg and Berwald residuals.
    Classify(ClassifyArgs),
    /// Print the catalog.
    List,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Catalog id, see `landsberg list`.
    #[arg(long)]
    metric: String,
    /// Metric parameter as name=value; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Conformal factor f(x1).
    #[arg(long = "f", default_value = "exp(x1)")]
    f: String,
    /// product, euclid, mixed4 or a row-major symmetric matrix.
    #[arg(long)]
    quadratic: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Interval for x1 as lo,hi.
    #[arg(long = "x-range", value_parser = parse_range, default_value = "-0.5,0.5", allow_hyphen_values = true)]
    x_range: (f64, f64),
    /// berwald, landsberg-non-berwald or non-landsberg.
    #[arg(long)]
    expect: Option<Verdict>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also emit the per-sample table as CSV.
    #[arg(long)]
    csv: bool,
    /// Derive the spray from F by automatic differentiation.
    #[arg(long = "oracle-ad")]
    oracle_ad: bool,
    /// default, strict or loose.
    #[arg(long = "tol-profile", default_value = "default")]
    tol_profile: String,
    /// More output on stderr; repeatable.
    #[arg(short, long, action = ArgAction::Count)]
    verbose: u8,
    /// No summary on stderr.
    #[arg(short, long)]
    quiet: bool,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected lo,hi, got `{s}`"))?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("bad bound `{a}`: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("bad bound `{b}`: {e}"))?;
    Ok((lo, hi))
}

impl From<ClassifyArgs> for RunConfig {
    fn from(a: ClassifyArgs) -> Self {
        RunConfig {
            metric: a.metric,
            params: a.params,
            f: a.f,
            quadratic: a.quadratic,
            dim: a.dim,
            points: a.points,
            seed: a.seed,
            x_range: a.x_range,
            expect: a.expect,
            out: a.out,
            csv: a.csv,
            oracle_ad: a.oracle_ad,
            tol_profile: a.tol_profile,
            verbosity: if a.quiet { 0 } else { 1 + a.verbose },
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            print!("{}", list_catalog());
            ExitCode::SUCCESS
        }
        Command::Classify(args) => match run(&args.into()) {
            Ok(outcome) => ExitCode::from(outcome.exit_code as u8),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_ERROR as u8)
            }
        },
    }
}
