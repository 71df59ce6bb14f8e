//! Replication sweeps: repeated runs over consecutive seeds, analyzed and
//! aggregated into one report bundle.

use std::path::PathBuf;

use crate::analyze::{analyze, AnalyzeOptions};
use crate::config_file::Overrides;
use crate::error::CliResult;
use crate::report::{report, ReportOptions};
use crate::runner::{simulate, SimulateOptions};
use crate::{CliError, RunManifest};

pub struct SweepOptions {
    pub config_path: PathBuf,
    pub out_root: PathBuf,
    pub replications: u32,
    pub thresholds: Vec<f64>,
    pub overrides: Overrides,
}

pub struct SweepSummary {
    pub manifests: Vec<RunManifest>,
    pub report_dir: PathBuf,
}

/// Runs `replications` simulations with seeds base, base+1, ..., analyzes
/// each across the threshold grid, and writes the aggregated report.
pub fn sweep(opts: &SweepOptions) -> CliResult<SweepSummary> {
    if opts.replications == 0 {
        return Err(CliError::config("replications must be at least 1"));
    }
    let (base_config, _) = crate::load_config(&opts.config_path, &opts.overrides)?;
    let base_seed = base_config.seed;

    let mut manifests = Vec::new();
    let mut run_dirs = Vec::new();
    for i in 0..opts.replications {
        let mut overrides = opts.overrides.clone();
        overrides.seed = Some(base_seed + u64::from(i));
        let manifest = simulate(&SimulateOptions {
            config_path: opts.config_path.clone(),
            out_root: opts.out_root.clone(),
            overrides,
            run_id: None,
            force: true,
        })?;
        let run_dir = opts.out_root.join(&manifest.run_id);
        analyze(&AnalyzeOptions {
            run_dir: run_dir.clone(),
            thresholds: opts.thresholds.clone(),
        })?;
        run_dirs.push(run_dir);
        manifests.push(manifest);
    }

    let report_dir = opts.out_root.join("sweep_report");
    report(&ReportOptions {
        run_dirs,
        out_dir: report_dir.clone(),
    })?;
    Ok(SweepSummary {
        manifests,
        report_dir,
    })
}
