//! Experiment orchestration: run instance batches across seeds and modes,
//! produce heuristic call records and instance-run outcomes, and write
//! deterministic CSV/JSON reports.
//!
//! Seed realization: each seed applies a deterministic permutation of the
//! variable order before solving (documented in the report header). Time
//! figures are work-based seconds derived from simplex iteration counts,
//! so identical configurations yield byte-identical outputs.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::metrics::{
    calls_to_csv, runs_to_csv, summarize_calls, CallSummary, HeuristicCallRecord,
    InstanceRunRecord, RunMetrics,
};
use crate::model::{MilpModel, SparseRow};
use crate::neighborhood::NeighborhoodMode;
use crate::refgen::{run_relax_and_cut, RefGenConfig, RefGenStatus, ReferenceSet};
use crate::subsolver::{
    branch_and_bound, run_heuristic_call, CallGates, SubsolveStatus, WorkingLimits,
};
use crate::Result;

/// Seconds of reported "time" per simplex iteration.
const WORK_SECONDS_PER_ITERATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentMode {
    Rens,
    Mrens,
    /// Baseline: no heuristic calls, plain branch-and-bound statistics.
    Off,
}

impl std::fmt::Display for ExperimentMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExperimentMode::Rens => write!(f, "rens"),
            ExperimentMode::Mrens => write!(f, "mrens"),
            ExperimentMode::Off => write!(f, "off"),
        }
    }
}

impl std::str::FromStr for ExperimentMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rens" => Ok(ExperimentMode::Rens),
            "mrens" => Ok(ExperimentMode::Mrens),
            "off" => Ok(ExperimentMode::Off),
            other => Err(format!("unknown mode '{other}' (expected rens|mrens|off)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mode: ExperimentMode,
    pub seeds: Vec<u64>,
    /// Working limits of each heuristic sub-solve.
    pub limits: WorkingLimits,
    pub gates: CallGates,
    pub refgen: RefGenConfig,
    /// Node budget of the baseline full solve per instance-seed run.
    pub instance_node_limit: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: ExperimentMode::Mrens,
            seeds: vec![0, 1, 2, 3, 4],
            limits: WorkingLimits::default(),
            gates: CallGates::default(),
            refgen: RefGenConfig::default(),
            instance_node_limit: 100_000,
        }
    }
}

/// A named instance in a batch.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub model: MilpModel,
}

/// Deterministic per-seed permutation of the variable order.
pub fn permute_variables(model: &MilpModel, seed: u64) -> Result<MilpModel> {
    let n = model.num_vars();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perm.shuffle(&mut rng);
    // perm[k] = original index placed at position k
    let mut inverse = vec![0usize; n];
    for (k, &j) in perm.iter().enumerate() {
        inverse[j] = k;
    }
    let rows = model
        .rows()
        .iter()
        .map(|row| SparseRow::new(row.iter().map(|(j, a)| (inverse[j], a)).collect()))
        .collect();
    MilpModel::new(
        model.name.clone(),
        perm.iter().map(|&j| model.objective()[j]).collect(),
        rows,
        model.rhs().to_vec(),
        perm.iter().map(|&j| model.lower()[j]).collect(),
        perm.iter().map(|&j| model.upper()[j]).collect(),
        perm.iter().map(|&j| model.is_integer(j)).collect(),
    )?
    .with_names(
        perm.iter().map(|&j| model.var_names()[j].clone()).collect(),
        model.row_names().to_vec(),
    )
}

fn reference_incumbent(refs: &ReferenceSet) -> Option<f64> {
    refs.integral_found
        .iter()
        .map(|s| s.objective_value)
        .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v))))
}

/// Runs one instance-seed pair: reference generation, the heuristic call
/// (unless mode is off), then a baseline branch-and-bound seeded with the
/// best heuristic objective as a cutoff.
fn run_one(
    instance: &Instance,
    seed: u64,
    config: &ExperimentConfig,
) -> Result<(Option<HeuristicCallRecord>, InstanceRunRecord)> {
    let model = permute_variables(&instance.model, seed)?;
    let mode_str = config.mode.to_string();

    let mut call_record = None;
    let mut cutoff: Option<f64> = None;
    let mut heuristic_nodes = 0u64;
    let mut work_iterations = 0u64;

    if config.mode != ExperimentMode::Off && model.num_integers() > 0 {
        let refs = run_relax_and_cut(&model, &config.refgen)?;
        work_iterations += refs.lp_iterations;
        if refs.status == RefGenStatus::Ok && !refs.selected.is_empty() {
            let nb_mode = match config.mode {
                ExperimentMode::Rens => NeighborhoodMode::Rens,
                ExperimentMode::Mrens => NeighborhoodMode::Mrens,
                ExperimentMode::Off => unreachable!(),
            };
            let outcome =
                run_heuristic_call(&model, &refs, nb_mode, &config.limits, &config.gates)?;
            work_iterations += outcome.lp_iterations;
            heuristic_nodes += outcome.nodes;
            let incumbent_at_call = reference_incumbent(&refs);
            let objective = outcome.solution.as_ref().map(|s| s.objective_value);
            let best_found = match (objective, incumbent_at_call) {
                (Some(obj), Some(inc)) => obj < inc - 1e-9,
                (Some(_), None) => true,
                (None, _) => false,
            };
            cutoff = match (objective, incumbent_at_call) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (Some(a), None) => Some(a),
                (None, b) => b,
            };
            call_record = Some(HeuristicCallRecord {
                instance_id: instance.id.clone(),
                seed,
                mode: mode_str.clone(),
                executed: outcome.executed,
                solution_found: outcome.solution_found,
                best_found,
                fixing_rate: outcome.fixing_rate,
                nodes: outcome.nodes,
                wall_time: work_iterations as f64 * WORK_SECONDS_PER_ITERATION,
                objective,
            });
        }
    }

    let baseline_limits = WorkingLimits {
        node_limit: config.instance_node_limit,
        stalling_node_limit: u64::MAX,
        min_total_fixing_after_presolve: 0.0,
        time_limit: None,
    };
    let result = branch_and_bound(&model, &baseline_limits, cutoff)?;
    work_iterations += result.lp_iterations;
    let best_objective = match (&result.best_solution, cutoff) {
        (Some(s), Some(c)) => Some(s.objective_value.min(c)),
        (Some(s), None) => Some(s.objective_value),
        (None, c) => c,
    };
    let status = match result.status {
        SubsolveStatus::Optimal => "optimal",
        // a cutoff-pruned tree with no better point proves the heuristic
        // solution optimal
        SubsolveStatus::Infeasible if cutoff.is_some() => "optimal",
        SubsolveStatus::Infeasible => "infeasible",
        SubsolveStatus::FeasibleLimitHit | SubsolveStatus::AbortedFixingGate => "limit",
    };
    Ok((
        call_record,
        InstanceRunRecord {
            instance_id: instance.id.clone(),
            seed,
            mode: mode_str,
            status: status.to_string(),
            total_time: work_iterations as f64 * WORK_SECONDS_PER_ITERATION,
            total_nodes: result.nodes_processed + heuristic_nodes,
            best_objective,
        },
    ))
}

/// Runs the full batch: every instance with every seed. Per-instance
/// failures become recorded statuses and never abort the batch.
pub fn run_experiment(instances: &[Instance], config: &ExperimentConfig) -> RunMetrics {
    let mut call_records = Vec::new();
    let mut instance_runs = Vec::new();
    for instance in instances {
        for &seed in &config.seeds {
            match run_one(instance, seed, config) {
                Ok((call, run)) => {
                    call_records.extend(call);
                    instance_runs.push(run);
                }
                Err(e) => instance_runs.push(InstanceRunRecord {
                    instance_id: instance.id.clone(),
                    seed,
                    mode: config.mode.to_string(),
                    status: format!("error: {e}"),
                    total_time: 0.0,
                    total_nodes: 0,
                    best_objective: None,
                }),
            }
        }
    }
    call_records.sort_by(|a, b| (&a.instance_id, a.seed).cmp(&(&b.instance_id, b.seed)));
    instance_runs.sort_by(|a, b| (&a.instance_id, a.seed).cmp(&(&b.instance_id, b.seed)));
    let summary = summarize_calls(&call_records);
    RunMetrics {
        mode: config.mode.to_string(),
        call_records,
        instance_runs,
        summary,
    }
}

#[derive(Serialize)]
struct JsonSummary<'a> {
    mode: &'a str,
    seed_realization: &'a str,
    time_unit: &'a str,
    summary: &'a CallSummary,
    instance_runs: &'a [InstanceRunRecord],
}

/// Writes calls.csv, runs.csv, and summary.json into `out_dir`.
pub fn write_reports(metrics: &RunMetrics, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("calls.csv"), calls_to_csv(&metrics.call_records))?;
    std::fs::write(out_dir.join("runs.csv"), runs_to_csv(&metrics.instance_runs))?;
    let json = JsonSummary {
        mode: &metrics.mode,
        seed_realization: "deterministic variable-order permutation per seed",
        time_unit: "work-based seconds (simplex iterations x 1e-6)",
        summary: &metrics.summary,
        instance_runs: &metrics.instance_runs,
    };
    let mut text = serde_json::to_string_pretty(&json)
        .map_err(|e| crate::Error::contract(format!("json: {e}")))?;
    text.push('\n');
    std::fs::write(out_dir.join("summary.json"), text)?;
    Ok(())
}
