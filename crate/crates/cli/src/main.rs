use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use socsim_cli::analyze::{analyze, default_thresholds, parse_thresholds, AnalyzeOptions};
use socsim_cli::config_file::{parse_policy, parse_tie_mode, Overrides};
use socsim_cli::report::{report, ReportOptions};
use socsim_cli::runner::{resume, simulate, SimulateOptions};
use socsim_cli::sweep::{sweep, SweepOptions};
use socsim_cli::{CliError, CliResult};

/// Deterministic multi-agent social-media simulation engine.
#[derive(Parser)]
#[command(name = "socsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OverrideArgs {
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Agent policy: scripted | llm.
    #[arg(long)]
    policy: Option<String>,
    /// Tie evidence mode: heuristic | text.
    #[arg(long = "tie-mode")]
    tie_mode: Option<String>,
    /// Coach: on | off.
    #[arg(long)]
    coach: Option<String>,
}

impl OverrideArgs {
    fn resolve(&self) -> CliResult<Overrides> {
        let coach = match self.coach.as_deref() {
            None => None,
            Some("on") => Some(true),
            Some("off") => Some(false),
            Some(other) => {
                return Err(CliError::config(format!(
                    "--coach takes `on` or `off`, got `{other}`"
                )))
            }
        };
        Ok(Overrides {
            seed: self.seed,
            policy: self.policy.as_deref().map(parse_policy).transpose()?,
            tie_mode: self.tie_mode.as_deref().map(parse_tie_mode).transpose()?,
            coach,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation to completion, writing all run artifacts.
    Simulate {
        /// Run configuration file (TOML).
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
        /// Output root directory for runs.
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        /// Explicit run id (defaults to a hash of the resolved config).
        #[arg(long = "run-id")]
        run_id: Option<String>,
        /// Overwrite an existing run directory.
        #[arg(long)]
        force: bool,
    },
    /// Continue an interrupted run from its checkpoint.
    Resume {
        /// Run directory containing checkpoint.json.
        #[arg(long)]
        run: PathBuf,
    },
    /// Compute network metrics for a finished run across thresholds.
    Analyze {
        /// Run id (under --root) or a run directory path.
        #[arg(long)]
        run: String,
        /// Root directory runs live in.
        #[arg(long, default_value = "runs")]
        root: PathBuf,
        /// Comma-separated thresholds in [0,1]; default 0.1..0.9.
        #[arg(long)]
        thresholds: Option<String>,
    },
    /// Aggregate analyzed runs into plot-ready CSV bundles.
    Report {
        /// Comma-separated run ids or run directory paths.
        #[arg(long, value_delimiter = ',')]
        runs: Vec<String>,
        #[arg(long, default_value = "runs")]
        root: PathBuf,
        /// Output directory for the report bundle.
        #[arg(long, default_value = "reports")]
        out: PathBuf,
    },
    /// Run R replications with consecutive seeds, analyze, and report.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        replications: u32,
        #[command(flatten)]
        overrides: OverrideArgs,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        #[arg(long)]
        thresholds: Option<String>,
    },
}

fn resolve_run_dir(root: &PathBuf, id_or_path: &str) -> PathBuf {
    let as_path = PathBuf::from(id_or_path);
    if as_path.is_dir() {
        as_path
    } else {
        root.join(id_or_path)
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate {
            config,
            overrides,
            out,
            run_id,
            force,
        } => {
            let manifest = simulate(&SimulateOptions {
                config_path: config,
                out_root: out.clone(),
                overrides: overrides.resolve()?,
                run_id,
                force,
            })?;
            println!(
                "run {} finished: {} rounds, artifacts in {}",
                manifest.run_id,
                manifest.config.rounds,
                out.join(&manifest.run_id).display()
            );
            Ok(())
        }
        Command::Resume { run } => {
            let manifest = resume(&run)?;
            println!("run {} resumed and finished", manifest.run_id);
            Ok(())
        }
        Command::Analyze {
            run,
            root,
            thresholds,
        } => {
            let thresholds = match thresholds {
                Some(t) => parse_thresholds(&t)?,
                None => default_thresholds(),
            };
            let run_dir = resolve_run_dir(&root, &run);
            let reports = analyze(&AnalyzeOptions {
                run_dir: run_dir.clone(),
                thresholds,
            })?;
            for tr in &reports {
                println!(
                    "theta={:.2}: edges={} density={:.4} clustering={:.4} lcc={:.4}",
                    tr.theta, tr.report.edges, tr.report.density, tr.report.clustering, tr.report.lcc
                );
            }
            println!("analysis written to {}", run_dir.join("analysis").display());
            Ok(())
        }
        Command::Report { runs, root, out } => {
            let runs: Vec<String> = runs
                .into_iter()
                .filter(|r| !r.trim().is_empty())
                .collect();
            if runs.is_empty() {
                return Err(CliError::config("report requires at least one run id"));
            }
            let run_dirs = runs.iter().map(|r| resolve_run_dir(&root, r)).collect();
            report(&ReportOptions {
                run_dirs,
                out_dir: out.clone(),
            })?;
            println!("report bundle written to {}", out.display());
            Ok(())
        }
        Command::Sweep {
            config,
            replications,
            overrides,
            out,
            thresholds,
        } => {
            let thresholds = match thresholds {
                Some(t) => parse_thresholds(&t)?,
                None => default_thresholds(),
            };
            let summary = sweep(&SweepOptions {
                config_path: config,
                out_root: out,
                replications,
                thresholds,
                overrides: overrides.resolve()?,
            })?;
            println!(
                "sweep finished: {} runs, report in {}",
                summary.manifests.len(),
                summary.report_dir.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
