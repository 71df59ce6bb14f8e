//! Threshold-sweep analysis of a finished run: symmetrize, binarize, run the
//! full metric suite per threshold, and emit plot-ready CSVs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use socsim_core::metrics::{full_report, Graph, MetricsReport, Partition};
use socsim_core::persona::PersonaFile;
use socsim_core::ties::{binarize, symmetrize};

use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::runner::{check_log_consistency, read_dense_matrix};

pub struct AnalyzeOptions {
    pub run_dir: PathBuf,
    pub thresholds: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ThresholdReport {
    pub theta: f64,
    pub report: MetricsReport,
}

/// Stance-based grouping for homophily, or `None` when all personas share
/// one stance.
fn stance_groups(personas: &PersonaFile) -> Option<Partition> {
    let mut sorted = personas.personas.clone();
    sorted.sort_by(|a, b| a.user.cmp(&b.user));
    let mut stances: Vec<&str> = sorted.iter().map(|p| p.stance.as_str()).collect();
    stances.sort_unstable();
    stances.dedup();
    if stances.len() < 2 {
        return None;
    }
    let labels: Vec<usize> = sorted
        .iter()
        .map(|p| 1 + stances.iter().position(|s| *s == p.stance).unwrap())
        .collect();
    Some(Partition::from_labels(&labels))
}

fn format_theta(theta: f64) -> String {
    format!("{theta:.2}")
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Analyzes persisted run artifacts. Never mutates run data: all output goes
/// under `analysis/`. Asserts the log/state consistency invariant and the
/// monotone edge-count invariant across the ascending threshold sweep.
pub fn analyze(opts: &AnalyzeOptions) -> CliResult<Vec<ThresholdReport>> {
    let run_dir = &opts.run_dir;
    let manifest = RunManifest::load(run_dir)?;
    for theta in &opts.thresholds {
        if !(0.0..=1.0).contains(theta) {
            return Err(CliError::config(format!(
                "threshold {theta} outside [0,1]"
            )));
        }
    }
    if opts.thresholds.is_empty() {
        return Err(CliError::config("at least one threshold is required"));
    }

    let matrix_path = run_dir.join(&manifest.artifacts.final_matrix);
    let ties = read_dense_matrix(&matrix_path)?;
    check_log_consistency(run_dir, &ties)?;

    let personas_path = run_dir.join(&manifest.artifacts.personas);
    let personas = PersonaFile::load(&personas_path).map_err(CliError::from)?;
    let groups = stance_groups(&personas);

    let mut thresholds = opts.thresholds.clone();
    thresholds.sort_by(|a, b| a.partial_cmp(b).expect("thresholds are finite"));

    let undirected = symmetrize(&ties);
    let mut reports = Vec::new();
    let mut last_edges = usize::MAX;
    for theta in thresholds {
        let binary = binarize(&undirected, theta);
        let graph = Graph::from_binary(&binary);
        let report = full_report(&graph, groups.as_ref(), format!("theta={theta}"))
            .map_err(|e| CliError::Other(format!("metric suite failed: {e}")))?;
        if report.edges > last_edges {
            return Err(CliError::Other(format!(
                "edge count increased across the threshold sweep at theta={theta}"
            )));
        }
        last_edges = report.edges;
        reports.push(ThresholdReport { theta, report });
    }

    let analysis_dir = run_dir.join("analysis");
    std::fs::create_dir_all(&analysis_dir)?;
    write_metrics_csv(&analysis_dir, &manifest.run_id, &reports)?;
    for tr in &reports {
        write_degree_hist(&analysis_dir, tr)?;
    }
    Ok(reports)
}

fn write_metrics_csv(dir: &Path, run_id: &str, reports: &[ThresholdReport]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(File::create(dir.join("metrics.csv"))?);
    w.write_record([
        "run_id",
        "theta",
        "nodes",
        "edges",
        "density",
        "clustering",
        "lcc",
        "aspl",
        "modularity",
        "communities",
        "homophily",
        "gamma_hat",
    ])?;
    for tr in reports {
        let r = &tr.report;
        w.write_record([
            run_id.to_string(),
            format_theta(tr.theta),
            r.nodes.to_string(),
            r.edges.to_string(),
            r.density.to_string(),
            r.clustering.to_string(),
            r.lcc.to_string(),
            opt_cell(r.aspl),
            opt_cell(r.modularity),
            r.communities.to_string(),
            opt_cell(r.homophily),
            opt_cell(r.power_law_exponent),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_degree_hist(dir: &Path, tr: &ThresholdReport) -> CliResult<()> {
    let path = dir.join(format!("degree_hist_theta_{}.csv", format_theta(tr.theta)));
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "degree,probability")?;
    for (k, p) in &tr.report.degree_histogram {
        writeln!(out, "{k},{p}")?;
    }
    out.flush()?;
    Ok(())
}

/// The standard sweep grid 0.1, 0.2, ..., 0.9.
pub fn default_thresholds() -> Vec<f64> {
    (1..=9).map(|i| f64::from(i) / 10.0).collect()
}

pub fn parse_thresholds(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| CliError::config(format!("bad threshold `{s}`: {e}")))
        })
        .collect()
}
