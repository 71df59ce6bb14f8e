//! Run execution: artifact layout, per-round persistence, checkpointing, and
//! resume.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use socsim_core::agents::{Policy, ScriptedPolicy};
use socsim_core::config::{PersonaSource, PolicyKind, SimConfig};
use socsim_core::events::{read_events, replay_final_ties, JsonlSink};
use socsim_core::gateway::{HttpTransport, LlmPolicy};
use socsim_core::persona::{bundled_personas, Persona, PersonaFile, PersonaRecord};
use socsim_core::sim::{RoundOutcome, SimState};
use socsim_core::ties::TieGraph;

use crate::config_file::{load_config, Overrides};
use crate::error::{CliError, CliResult};
use crate::manifest::{derive_run_id, now_unix, sha256_hex, RunManifest};

pub struct SimulateOptions {
    pub config_path: PathBuf,
    pub out_root: PathBuf,
    pub overrides: Overrides,
    pub run_id: Option<String>,
    pub force: bool,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    schema_version: String,
    state: SimState,
    events_lines: u64,
    rewards_rows: u64,
}

fn persona_records(config: &SimConfig) -> CliResult<Vec<PersonaRecord>> {
    let records = match &config.personas {
        PersonaSource::Bundled => bundled_personas(),
        PersonaSource::File(path) => PersonaFile::load(path).map_err(CliError::from)?.personas,
    };
    if records.len() < config.num_agents {
        return Err(CliError::config(format!(
            "persona source holds {} records, {} agents requested",
            records.len(),
            config.num_agents
        )));
    }
    let mut records = records;
    records.sort_by(|a, b| a.user.cmp(&b.user));
    records.truncate(config.num_agents);
    Ok(records)
}

pub fn build_policy(config: &SimConfig) -> CliResult<Box<dyn Policy>> {
    match config.policy {
        PolicyKind::Scripted => Ok(Box::new(ScriptedPolicy::new(config.scripted.clone()))),
        PolicyKind::Llm => {
            let transport = HttpTransport::from_config(&config.llm).map_err(CliError::from)?;
            Ok(Box::new(LlmPolicy::new(
                Box::new(transport),
                config.llm.clone(),
            )))
        }
    }
}

fn write_round_ties(run_dir: &Path, outcome: &RoundOutcome) -> CliResult<()> {
    let dir = run_dir.join("ties");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join(format!("round_{:03}.tsv", outcome.round));
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "src\tdst\tweight")?;
    let roster = outcome.ties.roster();
    for (f, t, w) in outcome.ties.pairs() {
        if w > 0.0 {
            writeln!(out, "{}\t{}\t{}", roster[f], roster[t], w)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_dense_matrix(path: &Path, ties: &TieGraph) -> CliResult<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let roster = ties.roster();
    let header: Vec<&str> = roster.iter().map(|u| u.as_str()).collect();
    writeln!(out, "src\\dst\t{}", header.join("\t"))?;
    for (f, from) in roster.iter().enumerate() {
        let row: Vec<String> = (0..roster.len())
            .map(|t| ties.weight_idx(f, t).to_string())
            .collect();
        writeln!(out, "{from}\t{}", row.join("\t"))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_dense_matrix(path: &Path) -> CliResult<TieGraph> {
    let file = File::open(path)
        .map_err(|e| CliError::artifact(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::artifact(format!("{}: empty matrix file", path.display())))??;
    let roster: Vec<socsim_core::UserId> = header
        .split('\t')
        .skip(1)
        .map(socsim_core::UserId::new)
        .collect();
    let mut graph = TieGraph::new(roster.clone());
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let from = socsim_core::UserId::new(parts.next().unwrap_or_default());
        let f = graph
            .index_of(&from)
            .ok_or_else(|| CliError::artifact(format!("unknown row user {from}")))?;
        for (t, cell) in parts.enumerate() {
            let w: f64 = cell
                .parse()
                .map_err(|e| CliError::artifact(format!("bad weight `{cell}`: {e}")))?;
            if f != t {
                graph.set_weight_idx(f, t, w);
            }
        }
    }
    Ok(graph)
}

struct RewardsCsv {
    writer: csv::Writer<File>,
    rows: u64,
}

impl RewardsCsv {
    fn create(path: &Path) -> CliResult<Self> {
        let mut writer = csv::Writer::from_writer(File::create(path)?);
        writer.write_record(["round", "user", "soc", "inf", "pre", "coord", "emo", "total"])?;
        writer.flush()?;
        Ok(RewardsCsv { writer, rows: 0 })
    }

    fn append_round(&mut self, outcome: &RoundOutcome) -> CliResult<()> {
        for (user, r) in &outcome.rewards {
            self.writer.write_record([
                outcome.round.to_string(),
                user.to_string(),
                r.soc.to_string(),
                r.inf.to_string(),
                r.pre.to_string(),
                r.coord.to_string(),
                r.emo.to_string(),
                r.total.to_string(),
            ])?;
            self.rows += 1;
        }
        self.writer.flush()?;
        Ok(())
    }
}

fn save_checkpoint(run_dir: &Path, state: &SimState, events_lines: u64, rewards_rows: u64) -> CliResult<()> {
    let checkpoint = Checkpoint {
        schema_version: socsim_core::SCHEMA_VERSION.to_string(),
        state: state.clone(),
        events_lines,
        rewards_rows,
    };
    let path = run_dir.join("checkpoint.json");
    std::fs::write(&path, serde_json::to_string(&checkpoint)?)?;
    Ok(())
}

/// Verifies that replaying the event log reproduces the persisted final
/// matrix.
pub fn check_log_consistency(run_dir: &Path, final_ties: &TieGraph) -> CliResult<()> {
    let events_path = run_dir.join("events.jsonl");
    let text = std::fs::read_to_string(&events_path)
        .map_err(|e| CliError::artifact(format!("cannot read {}: {e}", events_path.display())))?;
    let events = read_events(&text).map_err(CliError::from)?;
    let replayed = replay_final_ties(&events, final_ties.roster().to_vec());
    for (f, t, w) in final_ties.pairs() {
        let r = replayed.weight_idx(f, t);
        if (r - w).abs() > 1e-12 {
            return Err(CliError::artifact(format!(
                "event log replay mismatch at ({f},{t}): log {r} vs state {w}"
            )));
        }
    }
    Ok(())
}

/// Runs a configured simulation to completion, writing the event log,
/// per-round reward rows, per-round tie edge lists, the final dense matrix,
/// and a checkpoint after every round.
pub fn simulate(opts: &SimulateOptions) -> CliResult<RunManifest> {
    let (config, _) = load_config(&opts.config_path, &opts.overrides)?;
    let mut policy = build_policy(&config)?;
    simulate_with(opts, policy.as_mut())
}

/// `simulate` with an externally supplied policy (tests inject failing or
/// mock-backed policies through this).
pub fn simulate_with(opts: &SimulateOptions, policy: &mut dyn Policy) -> CliResult<RunManifest> {
    let (config, config_bytes) = load_config(&opts.config_path, &opts.overrides)?;
    let config_hash = sha256_hex(&config_bytes);
    let run_id = opts.run_id.clone().unwrap_or_else(|| derive_run_id(&config));

    let run_dir = opts.out_root.join(&run_id);
    if run_dir.exists() {
        if opts.force {
            std::fs::remove_dir_all(&run_dir)?;
        } else {
            return Err(CliError::artifact(format!(
                "run directory {} already exists (use --force to overwrite)",
                run_dir.display()
            )));
        }
    }
    std::fs::create_dir_all(&run_dir)?;

    let records = persona_records(&config)?;
    let persona_file = PersonaFile {
        schema_version: socsim_core::SCHEMA_VERSION.to_string(),
        personas: records.clone(),
    };
    std::fs::write(
        run_dir.join("personas.json"),
        serde_json::to_string_pretty(&persona_file)?,
    )?;

    let mut manifest = RunManifest::new(run_id.clone(), config.clone(), config_hash);
    manifest.save(&run_dir)?;

    let personas: Vec<Persona> = records.into_iter().map(Persona::from).collect();
    let mut state = SimState::new(&run_id, config.clone(), personas).map_err(CliError::from)?;

    let events_file = File::create(run_dir.join("events.jsonl"))?;
    let mut sink = JsonlSink::new(BufWriter::new(events_file));
    state.emit_run_start(&mut sink).map_err(CliError::from)?;
    let mut rewards = RewardsCsv::create(&run_dir.join("rewards.csv"))?;

    run_rounds(&run_dir, &mut state, policy, &mut sink, &mut rewards)?;

    finish_run(&run_dir, &state, &mut manifest)
}

/// Continues an interrupted run from its checkpoint. The event log is
/// truncated to the checkpointed prefix; nothing is replayed.
pub fn resume(run_dir: &Path) -> CliResult<RunManifest> {
    let manifest = RunManifest::load(run_dir)?;
    let mut policy = build_policy(&manifest.config)?;
    resume_with(run_dir, policy.as_mut())
}

/// `resume` with an externally supplied policy.
pub fn resume_with(run_dir: &Path, policy: &mut dyn Policy) -> CliResult<RunManifest> {
    let mut manifest = RunManifest::load(run_dir)?;
    let checkpoint_path = run_dir.join("checkpoint.json");
    let text = std::fs::read_to_string(&checkpoint_path).map_err(|e| {
        CliError::artifact(format!("cannot read {}: {e}", checkpoint_path.display()))
    })?;
    let checkpoint: Checkpoint = serde_json::from_str(&text)
        .map_err(|e| CliError::artifact(format!("{}: {e}", checkpoint_path.display())))?;
    let mut state = checkpoint.state;

    // Truncate artifacts to the checkpointed prefix.
    truncate_lines(&run_dir.join("events.jsonl"), checkpoint.events_lines)?;
    truncate_lines(&run_dir.join("rewards.csv"), checkpoint.rewards_rows + 1)?;

    let events_file = OpenOptions::new()
        .append(true)
        .open(run_dir.join("events.jsonl"))?;
    let mut sink = JsonlSink::new(BufWriter::new(events_file));
    sink.lines = checkpoint.events_lines;
    let rewards_file = OpenOptions::new()
        .append(true)
        .open(run_dir.join("rewards.csv"))?;
    let mut rewards = RewardsCsv {
        writer: csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(rewards_file),
        rows: checkpoint.rewards_rows,
    };

    run_rounds(run_dir, &mut state, policy, &mut sink, &mut rewards)?;
    finish_run(run_dir, &state, &mut manifest)
}

fn run_rounds(
    run_dir: &Path,
    state: &mut SimState,
    policy: &mut dyn Policy,
    sink: &mut JsonlSink<BufWriter<File>>,
    rewards: &mut RewardsCsv,
) -> CliResult<()> {
    while !state.is_finished() {
        let outcome = match state.run_round(policy, sink) {
            Ok(o) => o,
            Err(e) => {
                // The checkpoint of the previous round stands; surface the
                // failure after flushing what we have.
                sink.flush().ok();
                return Err(e.into());
            }
        };
        rewards.append_round(&outcome)?;
        write_round_ties(run_dir, &outcome)?;
        sink.flush().map_err(CliError::from)?;
        save_checkpoint(run_dir, state, sink.lines, rewards.rows)?;
    }
    Ok(())
}

fn finish_run(run_dir: &Path, state: &SimState, manifest: &mut RunManifest) -> CliResult<RunManifest> {
    write_dense_matrix(&run_dir.join("tie_matrix_final.tsv"), &state.ties)?;
    check_log_consistency(run_dir, &state.ties)?;
    manifest.finished_unix = Some(now_unix());
    manifest.save(run_dir)?;
    Ok(manifest.clone())
}

fn truncate_lines(path: &Path, keep: u64) -> CliResult<()> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::artifact(format!("cannot read {}: {e}", path.display())))?;
    let kept: Vec<&str> = text.lines().take(keep as usize).collect();
    let mut joined = kept.join("\n");
    if !joined.is_empty() {
        joined.push('\n');
    }
    std::fs::write(path, joined)?;
    Ok(())
}
