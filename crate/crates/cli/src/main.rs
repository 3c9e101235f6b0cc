use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vpfp::harness::{self, Model, SweepConfig, SweepResult, SUMMARY_FILE};
use vpfp::Error;

const DEFAULT_OUT: &str = "out";

#[derive(Debug, Parser)]
#[command(name = "vpfp", version, about = "Kinetic and fluid solvers with an epsilon-sweep harness")]
struct Cli {
    /// TOML configuration with [grid], [solver], [sweep] and [diagnostics] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random test fields.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Kinetic,
    Fluid,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One kinetic or fluid run, written as a CSV time series.
    Run {
        #[arg(long, value_enum, default_value_t = ModelArg::Kinetic)]
        model: ModelArg,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// The full epsilon-sweep against the fluid reference.
    Sweep,
    /// Operator and solver self-tests.
    Check,
    /// Render a sweep summary as text and CSV.
    Report {
        /// A summary file or the directory holding it; defaults to --out.
        path: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Run(String),
}

impl Failure {
    fn from_run(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::NonzeroMean { .. } | Error::NegativeDistribution { .. } => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Run(e.to_string()),
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<SweepConfig, Failure> {
    match path {
        Some(p) => SweepConfig::load(p).map_err(|e| Failure::Config(e.to_string())),
        None => Ok(SweepConfig::default()),
    }
}

fn out_dir(cli: &Cli, cfg: Option<&SweepConfig>) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.and_then(|c| c.sweep.out_dir.clone()))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Run(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let say = |s: &str| {
        if !cli.quiet {
            println!("{s}");
        }
    };
    match &cli.command {
        Command::Run { model, epsilon } => {
            let cfg = load_config(cli.config.as_deref())?;
            let model = match model {
                ModelArg::Kinetic => Model::Kinetic,
                ModelArg::Fluid => Model::Fluid,
            };
            let out = harness::run_single(&cfg, model, *epsilon).map_err(Failure::from_run)?;
            let path = out_dir(cli, Some(&cfg)).join(&out.file_name);
            write(&path, &out.csv)?;
            say(&format!("wrote {}", path.display()));
        }
        Command::Sweep => {
            let cfg = load_config(cli.config.as_deref())?;
            let out = harness::run_sweep(&cfg).map_err(Failure::from_run)?;
            let dir = out_dir(cli, Some(&cfg));
            out.write(&dir).map_err(|e| Failure::Run(e.to_string()))?;
            say(&harness::render_text(&out.result));
            say(&format!("wrote {}", dir.join(SUMMARY_FILE).display()));
            if !out.result.is_complete() {
                return Err(Failure::Run(format!(
                    "sweep incomplete: {}",
                    out.result.failure.as_deref().unwrap_or("unknown failure")
                )));
            }
        }
        Command::Check => {
            let results = harness::run_checks(cli.seed);
            for c in &results {
                say(&format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
            }
            let failed = results.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(Failure::Run(format!("{failed} of {} checks failed", results.len())));
            }
        }
        Command::Report { path } => {
            let src = path.clone().unwrap_or_else(|| out_dir(cli, None));
            let summary = if src.is_dir() { src.join(SUMMARY_FILE) } else { src };
            let result = SweepResult::load(&summary).map_err(|e| Failure::Config(e.to_string()))?;
            let dir = match &cli.out {
                Some(d) => d.clone(),
                None => summary.parent().map(Path::to_path_buf).unwrap_or_default(),
            };
            let text = harness::render_text(&result);
            write(&dir.join("report.txt"), &text)?;
            write(&dir.join("report.csv"), &harness::render_csv(&result))?;
            say(&text);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
