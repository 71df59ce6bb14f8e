//! Integration tests for the command-line surface: exit codes, artifact
//! layout, resume-from-checkpoint, sweeps, and report bundles.

use std::path::{Path, PathBuf};
use std::process::Command;

use socsim_cli::analyze::{analyze, AnalyzeOptions};
use socsim_cli::config_file::Overrides;
use socsim_cli::report::{report, ReportOptions};
use socsim_cli::runner::{resume_with, simulate, simulate_with, SimulateOptions};
use socsim_cli::sweep::{sweep, SweepOptions};
use socsim_core::agents::{
    ActionPlan, PlanContext, Policy, PolicyError, ScriptedPolicy, TieRating, TieRatingContext,
    VoteDecision, VoteItem,
};
use socsim_core::config::ScriptedParams;
use socsim_core::persona::Persona;

fn write_config(dir: &Path, agents: usize, rounds: u32, seed: u64) -> PathBuf {
    let text = format!(
        r#"
schema_version = "1"

[sim]
num_agents = {agents}
rounds = {rounds}
actions_per_round = 3
seed = {seed}

[ties]
xi = 0.45
delta_max = 0.15
half_life = 3.0
beta_rec = 0.9
evidence_weights = [0.25, 0.25, 0.25, 0.25]
"#
    );
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_socsim"))
}

#[test]
fn exit_codes_match_error_taxonomy() {
    let tmp = tempfile::tempdir().unwrap();

    // Config error: rounds = 0.
    let bad = tmp.path().join("bad.toml");
    std::fs::write(
        &bad,
        write_config(tmp.path(), 5, 3, 1)
            .to_str()
            .map(|p| std::fs::read_to_string(p).unwrap())
            .unwrap()
            .replace("rounds = 3", "rounds = 0"),
    )
    .unwrap();
    let status = bin()
        .args(["simulate", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(tmp.path().join("runs"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // Missing config file is also a config error.
    let status = bin()
        .args(["simulate", "--config", "/nonexistent/config.toml"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // Artifact error: analyzing a run that does not exist.
    let status = bin()
        .args(["analyze", "--run", "no-such-run", "--root"])
        .arg(tmp.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));

    // Usage/config error: report with no runs.
    let status = bin().args(["report", "--runs", ""]).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // Threshold outside [0,1] is a config error.
    let config = write_config(tmp.path(), 4, 2, 3);
    let out = tmp.path().join("runs");
    let status = bin()
        .args(["simulate", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let run_id = std::fs::read_dir(&out)
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .file_name();
    let status = bin()
        .args(["analyze", "--run"])
        .arg(run_id)
        .arg("--root")
        .arg(&out)
        .args(["--thresholds", "1.5"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn simulate_twice_without_force_is_artifact_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), 4, 2, 9);
    let out = tmp.path().join("runs");
    let opts = SimulateOptions {
        config_path: config,
        out_root: out,
        overrides: Overrides::default(),
        run_id: None,
        force: false,
    };
    simulate(&opts).unwrap();
    let err = simulate(&opts).unwrap_err();
    assert_eq!(err.exit_code(), 4);
}

/// Wraps the scripted policy but severs the transport at the start of a
/// given round, before consuming any agent randomness for it.
struct FailAtRound {
    inner: ScriptedPolicy,
    fail_round: u32,
    armed: bool,
}

impl Policy for FailAtRound {
    fn name(&self) -> &'static str {
        "fail-at-round"
    }

    fn plan(
        &mut self,
        persona: &Persona,
        ctx: &PlanContext,
        attempt: u32,
        rng: &mut rand_chacha::ChaCha12Rng,
    ) -> Result<ActionPlan, PolicyError> {
        if self.armed && ctx.round == self.fail_round {
            return Err(PolicyError::Transport("induced outage".into()));
        }
        self.inner.plan(persona, ctx, attempt, rng)
    }

    fn vote(
        &mut self,
        persona: &Persona,
        items: &[VoteItem],
        rng: &mut rand_chacha::ChaCha12Rng,
    ) -> Result<Vec<VoteDecision>, PolicyError> {
        self.inner.vote(persona, items, rng)
    }

    fn rate_ties(
        &mut self,
        persona: &Persona,
        ctx: &TieRatingContext,
        attempt: u32,
        rng: &mut rand_chacha::ChaCha12Rng,
    ) -> Result<Option<Vec<TieRating>>, PolicyError> {
        self.inner.rate_ties(persona, ctx, attempt, rng)
    }
}

#[test]
fn resume_continues_to_an_identical_log() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), 5, 4, 21);

    // Reference: an uninterrupted run.
    let full_out = tmp.path().join("full");
    let manifest = simulate(&SimulateOptions {
        config_path: config.clone(),
        out_root: full_out.clone(),
        overrides: Overrides::default(),
        run_id: None,
        force: false,
    })
    .unwrap();
    let full_log = std::fs::read(full_out.join(&manifest.run_id).join("events.jsonl")).unwrap();

    // Interrupted at round 3, then resumed with the scripted policy.
    let broken_out = tmp.path().join("broken");
    let mut failing = FailAtRound {
        inner: ScriptedPolicy::new(ScriptedParams::default()),
        fail_round: 3,
        armed: true,
    };
    let err = simulate_with(
        &SimulateOptions {
            config_path: config,
            out_root: broken_out.clone(),
            overrides: Overrides::default(),
            run_id: None,
            force: false,
        },
        &mut failing,
    )
    .unwrap_err();
    assert_eq!(err.exit_code(), 3, "transport outage surfaces as exit 3");

    let run_dir = broken_out.join(&manifest.run_id);
    assert!(run_dir.join("checkpoint.json").exists());
    let mut scripted = ScriptedPolicy::new(ScriptedParams::default());
    let resumed = resume_with(&run_dir, &mut scripted).unwrap();
    assert_eq!(resumed.run_id, manifest.run_id);

    let resumed_log = std::fs::read(run_dir.join("events.jsonl")).unwrap();
    assert_eq!(
        full_log, resumed_log,
        "resumed run does not match the uninterrupted run"
    );
    let full_rewards = std::fs::read(full_out.join(&manifest.run_id).join("rewards.csv")).unwrap();
    let resumed_rewards = std::fs::read(run_dir.join("rewards.csv")).unwrap();
    assert_eq!(full_rewards, resumed_rewards);
}

#[test]
fn sweep_produces_replicated_report() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), 5, 3, 100);
    let out = tmp.path().join("runs");
    let summary = sweep(&SweepOptions {
        config_path: config,
        out_root: out.clone(),
        replications: 3,
        thresholds: vec![0.3, 0.6],
        overrides: Overrides::default(),
    })
    .unwrap();
    assert_eq!(summary.manifests.len(), 3);
    let seeds: Vec<u64> = summary.manifests.iter().map(|m| m.config.seed).collect();
    assert_eq!(seeds, vec![100, 101, 102]);

    // Bands cover three replications.
    let rewards_csv =
        std::fs::read_to_string(summary.report_dir.join("rewards_by_policy.csv")).unwrap();
    let mut saw_band = false;
    for line in rewards_csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[6], "3", "band rows aggregate three runs: {line}");
        let (lo, mean, hi): (f64, f64, f64) = (
            cells[3].parse().unwrap(),
            cells[4].parse().unwrap(),
            cells[5].parse().unwrap(),
        );
        assert!(lo <= mean && mean <= hi);
        if hi > lo {
            saw_band = true;
        }
    }
    assert!(saw_band, "replications produced no variability at all");
    assert!(summary.report_dir.join("metrics_by_theta.csv").exists());
    assert!(summary.report_dir.join("degree_ccdf.csv").exists());
}

#[test]
fn single_run_report_band_collapses() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), 4, 2, 55);
    let out = tmp.path().join("runs");
    let manifest = simulate(&SimulateOptions {
        config_path: config,
        out_root: out.clone(),
        overrides: Overrides::default(),
        run_id: None,
        force: false,
    })
    .unwrap();
    let run_dir = out.join(&manifest.run_id);
    analyze(&AnalyzeOptions {
        run_dir: run_dir.clone(),
        thresholds: vec![0.5],
    })
    .unwrap();
    let report_dir = tmp.path().join("report");
    report(&ReportOptions {
        run_dirs: vec![run_dir],
        out_dir: report_dir.clone(),
    })
    .unwrap();
    let rewards_csv = std::fs::read_to_string(report_dir.join("rewards_by_policy.csv")).unwrap();
    for line in rewards_csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[3], cells[4], "lo == mean on a single run: {line}");
        assert_eq!(cells[4], cells[5], "mean == hi on a single run: {line}");
    }
}

#[test]
fn degenerate_threshold_yields_documented_values() {
    let tmp = tempfile::tempdir().unwrap();
    // One round: barely any tie weight accumulates, so theta = 1.0 gives an
    // empty binarized graph.
    let config = write_config(tmp.path(), 5, 1, 77);
    let out = tmp.path().join("runs");
    let manifest = simulate(&SimulateOptions {
        config_path: config,
        out_root: out.clone(),
        overrides: Overrides::default(),
        run_id: None,
        force: false,
    })
    .unwrap();
    let reports = analyze(&AnalyzeOptions {
        run_dir: out.join(&manifest.run_id),
        thresholds: vec![1.0],
    })
    .unwrap();
    let r = &reports[0].report;
    assert_eq!(r.edges, 0);
    assert_eq!(r.density, 0.0);
    assert!((r.lcc - 1.0 / 5.0).abs() < 1e-12);
    assert!(r.aspl.is_none(), "ASPL is flagged undefined");
    assert!(r.modularity.is_none());
}

#[test]
fn analyze_is_pure_over_run_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), 4, 2, 31);
    let out = tmp.path().join("runs");
    let manifest = simulate(&SimulateOptions {
        config_path: config,
        out_root: out.clone(),
        overrides: Overrides::default(),
        run_id: None,
        force: false,
    })
    .unwrap();
    let run_dir = out.join(&manifest.run_id);
    let before = std::fs::read(run_dir.join("events.jsonl")).unwrap();
    let first = analyze(&AnalyzeOptions {
        run_dir: run_dir.clone(),
        thresholds: vec![0.2, 0.8],
    })
    .unwrap();
    let second = analyze(&AnalyzeOptions {
        run_dir: run_dir.clone(),
        thresholds: vec![0.2, 0.8],
    })
    .unwrap();
    assert_eq!(first.len(), second.len());
    for (a, b) in first.iter().zip(&second) {
        assert_eq!(a.report, b.report);
    }
    let after = std::fs::read(run_dir.join("events.jsonl")).unwrap();
    assert_eq!(before, after, "analyze mutated run data");
}
