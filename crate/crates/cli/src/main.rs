use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dephase_core::stats::BinConfig;
use dephase_lab::experiments::{self, ExperimentOutput, Overrides};
use dephase_lab::output::{write_csv, write_json};
use dephase_lab::verify::{self, VerifyConfig};
use dephase_lab::{exit_code_for, Result};

/// Ensemble sweeps of initial entanglement vs final entropy under pure
/// dephasing against a thermal mode.
#[derive(Parser)]
#[command(name = "dephase-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ad-hoc ensemble sweep with explicit ensemble and interaction specs.
    Sample(RunArgs),
    /// Run a named experiment from the registry (see `list`).
    Experiment {
        /// Experiment name or alias.
        name: String,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Run the acceptance checks and print one pass/fail line per check.
    Verify(VerifyArgs),
    /// List the experiment registry.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Register size.
    #[arg(long)]
    qubits: Option<usize>,

    /// Samples to draw (accepted samples for rejection ensembles).
    #[arg(long)]
    samples: Option<u64>,

    /// Base RNG seed; worker w draws from stream (seed, w).
    #[arg(long, env = "DEPHASE_LAB_SEED", default_value_t = 7)]
    seed: u64,

    /// Worker streams (defaults to the available cores).
    #[arg(long)]
    workers: Option<usize>,

    /// Ensemble spec: haar | separable | clusters=2+2+2 | energy=0.2:0.01 | dicke=1.
    #[arg(long)]
    ensemble: Option<String>,

    /// Interaction spec: comma-separated per-qubit tokens, e.g. `z,2z` or
    /// `0:0:0:1,i` (defaults to distinct-magnitude z couplings).
    #[arg(long)]
    interaction: Option<String>,

    /// Couple only the first k qubits (experiments that support it).
    #[arg(long)]
    interacting: Option<usize>,

    /// Bin width of the averaged curve.
    #[arg(long, default_value_t = 0.05)]
    bins: f64,

    /// Minimum samples per emitted bin.
    #[arg(long, default_value_t = 200)]
    min_bin_count: u64,

    /// Scatter CSV path.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Summary JSON path.
    #[arg(long)]
    summary: Option<PathBuf>,

    /// Manifest JSON path (defaults to `<out>.manifest.json` when --out is set).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            qubits: self.qubits,
            samples: self.samples,
            seed: self.seed,
            workers: self
                .workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get())),
            interacting: self.interacting,
            ensemble: self.ensemble.clone(),
            interaction: self.interaction.clone(),
            bins: BinConfig {
                width: self.bins,
                min_count: self.min_bin_count,
            },
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, env = "DEPHASE_LAB_SEED", default_value_t = 7)]
    seed: u64,

    #[arg(long)]
    workers: Option<usize>,

    /// Sample-count multiplier (1.0 = reference counts).
    #[arg(long, default_value_t = 1.0)]
    scale: f64,

    /// Comma-separated criteria to run, e.g. `1,2,3`.
    #[arg(long)]
    criteria: Option<String>,

    /// Run only the closed-form and invariant criteria (no large sampling).
    #[arg(long)]
    properties_only: bool,
}

fn emit(output: &ExperimentOutput, args: &RunArgs) -> Result<()> {
    for warning in &output.warnings {
        eprintln!("warning: {warning}");
    }
    if let Some(path) = &args.out {
        write_csv(path, &output.columns, &output.rows)?;
        eprintln!("wrote {} rows to {}", output.rows.len(), path.display());
    }
    if let Some(path) = &args.summary {
        write_json(path, &output.summary)?;
    }
    let manifest_path = args.manifest.clone().or_else(|| {
        args.out
            .as_ref()
            .map(|p: &PathBuf| append_ext(p, "manifest.json"))
    });
    if let Some(path) = manifest_path {
        write_json(&path, &output.manifest)?;
    }
    if args.out.is_none() && args.summary.is_none() {
        // No files requested: print the summary to stdout.
        println!("{}", serde_json::to_string_pretty(&output.summary).unwrap());
    }
    Ok(())
}

fn append_ext(path: &Path, ext: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(ext);
    path.with_file_name(name)
}

fn parse_criteria(text: &str) -> Result<Vec<u8>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<u8>()
                .ok()
                .filter(|c| (1..=9).contains(c))
                .ok_or_else(|| {
                    dephase_core::Error::Parse(format!("bad criterion {p:?}; expected 1..9"))
                })
        })
        .collect()
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sample(args) => {
            let output = experiments::run_adhoc(&args.overrides())?;
            emit(&output, &args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment { name, args } => {
            let output = experiments::run_experiment(&name, &args.overrides())?;
            emit(&output, &args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let config = VerifyConfig {
                seed: args.seed,
                workers: args
                    .workers
                    .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get())),
                scale: args.scale,
                criteria: match &args.criteria {
                    Some(text) => Some(parse_criteria(text)?),
                    None => None,
                },
                properties_only: args.properties_only,
            };
            let report = verify::run(&config)?;
            print!("{}", report.render());
            if report.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
        Command::List => {
            for info in experiments::registry() {
                let aliases = if info.aliases.is_empty() {
                    String::new()
                } else {
                    format!(" (aliases: {})", info.aliases.join(", "))
                };
                println!("{}{aliases}\n    {}", info.name, info.description);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
