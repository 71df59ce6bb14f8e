//! Cross-run report bundles: reward-vs-round curves with replication bands,
//! metric-vs-threshold tables, and degree CCDFs, all as long-format CSV.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

pub struct ReportOptions {
    pub run_dirs: Vec<PathBuf>,
    pub out_dir: PathBuf,
}

struct LoadedRun {
    manifest: RunManifest,
    dir: PathBuf,
}

fn policy_label(m: &RunManifest) -> String {
    format!(
        "{}/{}/coach={}",
        m.config.policy.name(),
        match m.config.tie_mode {
            socsim_core::TieMode::Heuristic => "heuristic",
            socsim_core::TieMode::Text => "text",
        },
        if m.config.coach_enabled { "on" } else { "off" }
    )
}

/// Aggregates analyzed runs into plot-ready CSV bundles. With a single run
/// the min/mean/max band collapses onto the mean.
pub fn report(opts: &ReportOptions) -> CliResult<()> {
    if opts.run_dirs.is_empty() {
        return Err(CliError::config("report requires at least one run"));
    }
    let mut runs = Vec::new();
    for dir in &opts.run_dirs {
        let manifest = RunManifest::load(dir)?;
        runs.push(LoadedRun {
            manifest,
            dir: dir.clone(),
        });
    }
    let version = &runs[0].manifest.schema_version;
    if runs.iter().any(|r| &r.manifest.schema_version != version) {
        return Err(CliError::artifact(
            "runs carry mixed schema versions; refusing to aggregate",
        ));
    }

    std::fs::create_dir_all(&opts.out_dir)?;
    write_reward_bands(&runs, &opts.out_dir)?;
    write_metric_bands(&runs, &opts.out_dir)?;
    write_degree_ccdf(&runs, &opts.out_dir)?;
    Ok(())
}

/// Per (policy, round, component): the across-run band of the per-run agent
/// means.
fn write_reward_bands(runs: &[LoadedRun], out_dir: &Path) -> CliResult<()> {
    // (policy, round, component) -> per-run means
    let mut cells: BTreeMap<(String, u32, &'static str), Vec<f64>> = BTreeMap::new();
    for run in runs {
        let path = run.dir.join(&run.manifest.artifacts.rewards_csv);
        let mut reader = csv::Reader::from_path(&path)
            .map_err(|e| CliError::artifact(format!("cannot read {}: {e}", path.display())))?;
        // (round, component) -> (sum, count) over agents
        let mut sums: BTreeMap<(u32, &'static str), (f64, u32)> = BTreeMap::new();
        for record in reader.records() {
            let record = record?;
            let round: u32 = record[0]
                .parse()
                .map_err(|e| CliError::artifact(format!("bad round: {e}")))?;
            for (idx, component) in
                [(2, "soc"), (3, "inf"), (4, "pre"), (5, "coord"), (6, "emo"), (7, "total")]
            {
                let value: f64 = record[idx]
                    .parse()
                    .map_err(|e| CliError::artifact(format!("bad value: {e}")))?;
                let cell = sums.entry((round, component)).or_insert((0.0, 0));
                cell.0 += value;
                cell.1 += 1;
            }
        }
        let label = policy_label(&run.manifest);
        for ((round, component), (sum, count)) in sums {
            cells
                .entry((label.clone(), round, component))
                .or_default()
                .push(sum / f64::from(count));
        }
    }

    let mut w = csv::Writer::from_writer(File::create(out_dir.join("rewards_by_policy.csv"))?);
    w.write_record(["policy", "round", "component", "lo", "mean", "hi", "runs"])?;
    for ((policy, round, component), values) in cells {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        w.write_record([
            policy,
            round.to_string(),
            component.to_string(),
            lo.to_string(),
            mean.to_string(),
            hi.to_string(),
            values.len().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn metrics_csv_path(run: &LoadedRun) -> PathBuf {
    run.dir.join("analysis").join("metrics.csv")
}

fn write_metric_bands(runs: &[LoadedRun], out_dir: &Path) -> CliResult<()> {
    // (policy, theta, metric) -> values across runs
    let mut cells: BTreeMap<(String, String, String), Vec<f64>> = BTreeMap::new();
    for run in runs {
        let path = metrics_csv_path(run);
        if !path.exists() {
            return Err(CliError::artifact(format!(
                "missing analysis for {}: {} (run `analyze` first)",
                run.manifest.run_id,
                path.display()
            )));
        }
        let mut reader = csv::Reader::from_path(&path)?;
        let headers = reader.headers()?.clone();
        for record in reader.records() {
            let record = record?;
            let theta = record[1].to_string();
            let label = policy_label(&run.manifest);
            for (i, field) in record.iter().enumerate() {
                let name = &headers[i];
                if matches!(
                    name,
                    "density" | "clustering" | "lcc" | "aspl" | "modularity" | "homophily"
                        | "gamma_hat" | "edges"
                ) && !field.is_empty()
                {
                    if let Ok(v) = field.parse::<f64>() {
                        cells
                            .entry((label.clone(), theta.clone(), name.to_string()))
                            .or_default()
                            .push(v);
                    }
                }
            }
        }
    }

    let mut w = csv::Writer::from_writer(File::create(out_dir.join("metrics_by_theta.csv"))?);
    w.write_record(["policy", "theta", "metric", "lo", "mean", "hi", "runs"])?;
    for ((policy, theta, metric), values) in cells {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        w.write_record([
            policy,
            theta,
            metric,
            lo.to_string(),
            mean.to_string(),
            hi.to_string(),
            values.len().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_degree_ccdf(runs: &[LoadedRun], out_dir: &Path) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(File::create(out_dir.join("degree_ccdf.csv"))?);
    w.write_record(["run_id", "theta", "degree", "pmf", "ccdf"])?;
    for run in runs {
        let analysis = run.dir.join("analysis");
        let mut hist_files: Vec<PathBuf> = std::fs::read_dir(&analysis)
            .map_err(|e| {
                CliError::artifact(format!("missing analysis dir {}: {e}", analysis.display()))
            })?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("degree_hist_theta_") && n.ends_with(".csv"))
            })
            .collect();
        hist_files.sort();
        for path in hist_files {
            let name = path.file_name().unwrap().to_string_lossy().to_string();
            let theta = name
                .trim_start_matches("degree_hist_theta_")
                .trim_end_matches(".csv")
                .to_string();
            let mut reader = csv::Reader::from_path(&path)?;
            let mut rows: Vec<(u64, f64)> = Vec::new();
            for record in reader.records() {
                let record = record?;
                rows.push((
                    record[0]
                        .parse()
                        .map_err(|e| CliError::artifact(format!("bad degree: {e}")))?,
                    record[1]
                        .parse()
                        .map_err(|e| CliError::artifact(format!("bad pmf: {e}")))?,
                ));
            }
            rows.sort_by_key(|(k, _)| *k);
            // CCDF(k) = P(K >= k), accumulated from the top.
            let mut suffix = 0.0;
            let mut ccdf: Vec<f64> = vec![0.0; rows.len()];
            for (i, (_, p)) in rows.iter().enumerate().rev() {
                suffix += p;
                ccdf[i] = suffix;
            }
            for ((k, p), c) in rows.iter().zip(ccdf) {
                w.write_record([
                    run.manifest.run_id.clone(),
                    theta.clone(),
                    k.to_string(),
                    p.to_string(),
                    c.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
