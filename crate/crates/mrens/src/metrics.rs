//! Call records, aggregate statistics, shifted geometric means, and
//! two-setting comparison tables, with deterministic CSV and JSON
//! rendering.
//!
//! Reported times are deterministic work-based seconds derived from
//! simplex iteration counts, not wall-clock measurements; identical runs
//! therefore produce byte-identical reports.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Outcome of one heuristic call within an instance-seed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicCallRecord {
    pub instance_id: String,
    pub seed: u64,
    pub mode: String,
    pub executed: bool,
    pub solution_found: bool,
    /// True when the found solution improved on every incumbent known at
    /// call time.
    pub best_found: bool,
    pub fixing_rate: f64,
    pub nodes: u64,
    /// Deterministic work-based seconds (simplex iterations x 1e-6).
    pub wall_time: f64,
    pub objective: Option<f64>,
}

impl HeuristicCallRecord {
    /// best_found => solution_found => executed.
    pub fn invariants_hold(&self) -> bool {
        (!self.best_found || self.solution_found) && (!self.solution_found || self.executed)
    }
}

/// Outcome of solving one instance-seed pair end to end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRunRecord {
    pub instance_id: String,
    pub seed: u64,
    pub mode: String,
    /// "optimal", "limit", or "infeasible".
    pub status: String,
    pub total_time: f64,
    pub total_nodes: u64,
    pub best_objective: Option<f64>,
}

impl InstanceRunRecord {
    pub fn solved(&self) -> bool {
        self.status == "optimal" || self.status == "infeasible"
    }
}

/// Per-mode aggregates over a call-record stream (a pure fold; re-running
/// it over the same records reproduces the same numbers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallSummary {
    pub calls: usize,
    pub executed_pct: f64,
    pub solution_found_pct: f64,
    pub best_found_pct: f64,
    pub mean_fixing_pct: f64,
}

pub fn summarize_calls(records: &[HeuristicCallRecord]) -> CallSummary {
    let calls = records.len();
    if calls == 0 {
        return CallSummary {
            calls: 0,
            executed_pct: 0.0,
            solution_found_pct: 0.0,
            best_found_pct: 0.0,
            mean_fixing_pct: 0.0,
        };
    }
    let pct = |count: usize| 100.0 * count as f64 / calls as f64;
    CallSummary {
        calls,
        executed_pct: pct(records.iter().filter(|r| r.executed).count()),
        solution_found_pct: pct(records.iter().filter(|r| r.solution_found).count()),
        best_found_pct: pct(records.iter().filter(|r| r.best_found).count()),
        mean_fixing_pct: 100.0 * records.iter().map(|r| r.fixing_rate).sum::<f64>()
            / calls as f64,
    }
}

/// Everything one experiment run produces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetrics {
    pub mode: String,
    pub call_records: Vec<HeuristicCallRecord>,
    pub instance_runs: Vec<InstanceRunRecord>,
    pub summary: CallSummary,
}

/// Shift used for time geometric means.
pub const TIME_SHIFT: f64 = 1.0;
/// Shift used for node-count geometric means.
pub const NODE_SHIFT: f64 = 100.0;

/// `exp(mean(log(v + shift))) - shift`.
pub fn shifted_geomean(values: &[f64], shift: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::contract("shifted_geomean of empty list"));
    }
    let mean_log =
        values.iter().map(|v| (v + shift).ln()).sum::<f64>() / values.len() as f64;
    Ok(mean_log.exp() - shift)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub label: String,
    pub instances: usize,
    pub a_solved: usize,
    pub a_time: f64,
    pub a_nodes: Option<f64>,
    pub b_solved: usize,
    pub b_time: f64,
    pub b_nodes: Option<f64>,
    /// a/b
    pub time_quotient: f64,
    pub nodes_quotient: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonTable {
    pub setting_a: String,
    pub setting_b: String,
    pub rows: Vec<ComparisonRow>,
}

fn call_stream_signature(records: &[HeuristicCallRecord]) -> Vec<(bool, bool, bool, u64, u64, Option<u64>)> {
    // mode and wall_time excluded: two settings always differ in those
    records
        .iter()
        .map(|r| {
            (
                r.executed,
                r.solution_found,
                r.best_found,
                (r.fixing_rate * 1e9).round() as u64,
                r.nodes,
                r.objective.map(|o| o.to_bits()),
            )
        })
        .collect()
}

/// Builds the all / both-solved / affected / affected-solved comparison
/// over two settings with the same instance-seed universe. "Affected"
/// means the pair's node counts or call-record streams differ between the
/// settings.
pub fn categorize_and_compare(a: &RunMetrics, b: &RunMetrics) -> Result<ComparisonTable> {
    let key = |r: &InstanceRunRecord| (r.instance_id.clone(), r.seed);
    let mut a_runs: Vec<&InstanceRunRecord> = a.instance_runs.iter().collect();
    let mut b_runs: Vec<&InstanceRunRecord> = b.instance_runs.iter().collect();
    a_runs.sort_by_key(|r| key(r));
    b_runs.sort_by_key(|r| key(r));
    if a_runs.len() != b_runs.len()
        || a_runs
            .iter()
            .zip(&b_runs)
            .any(|(x, y)| key(x) != key(y))
    {
        return Err(Error::contract("comparison universes differ"));
    }

    let calls_for = |m: &RunMetrics, k: &(String, u64)| -> Vec<HeuristicCallRecord> {
        m.call_records
            .iter()
            .filter(|c| c.instance_id == k.0 && c.seed == k.1)
            .cloned()
            .collect()
    };

    struct Pair {
        a_solved: bool,
        b_solved: bool,
        a_time: f64,
        b_time: f64,
        a_nodes: f64,
        b_nodes: f64,
        affected: bool,
    }
    let pairs: Vec<Pair> = a_runs
        .iter()
        .zip(&b_runs)
        .map(|(ra, rb)| {
            let k = key(ra);
            let affected = ra.total_nodes != rb.total_nodes
                || call_stream_signature(&calls_for(a, &k))
                    != call_stream_signature(&calls_for(b, &k));
            Pair {
                a_solved: ra.solved(),
                b_solved: rb.solved(),
                a_time: ra.total_time,
                b_time: rb.total_time,
                a_nodes: ra.total_nodes as f64,
                b_nodes: rb.total_nodes as f64,
                affected,
            }
        })
        .collect();

    let build_row = |label: &str, subset: Vec<&Pair>, with_nodes: bool| -> Result<ComparisonRow> {
        let n = subset.len();
        let a_solved = subset.iter().filter(|p| p.a_solved).count();
        let b_solved = subset.iter().filter(|p| p.b_solved).count();
        let (a_time, b_time, time_quotient) = if n == 0 {
            (0.0, 0.0, 1.0)
        } else {
            let at = shifted_geomean(&subset.iter().map(|p| p.a_time).collect::<Vec<_>>(), TIME_SHIFT)?;
            let bt = shifted_geomean(&subset.iter().map(|p| p.b_time).collect::<Vec<_>>(), TIME_SHIFT)?;
            let q = if bt + TIME_SHIFT != 0.0 { (at + TIME_SHIFT) / (bt + TIME_SHIFT) } else { 1.0 };
            (at, bt, q)
        };
        let (a_nodes, b_nodes, nodes_quotient) = if with_nodes && n > 0 {
            let an = shifted_geomean(&subset.iter().map(|p| p.a_nodes).collect::<Vec<_>>(), NODE_SHIFT)?;
            let bn = shifted_geomean(&subset.iter().map(|p| p.b_nodes).collect::<Vec<_>>(), NODE_SHIFT)?;
            (Some(an), Some(bn), Some((an + NODE_SHIFT) / (bn + NODE_SHIFT)))
        } else {
            (None, None, None)
        };
        Ok(ComparisonRow {
            label: label.to_string(),
            instances: n,
            a_solved,
            a_time,
            a_nodes,
            b_solved,
            b_time,
            b_nodes,
            time_quotient,
            nodes_quotient,
        })
    };

    let all: Vec<&Pair> = pairs.iter().collect();
    let both: Vec<&Pair> = pairs.iter().filter(|p| p.a_solved && p.b_solved).collect();
    let affected: Vec<&Pair> = pairs.iter().filter(|p| p.affected).collect();
    let affected_solved: Vec<&Pair> = pairs
        .iter()
        .filter(|p| p.affected && p.a_solved && p.b_solved)
        .collect();
    Ok(ComparisonTable {
        setting_a: a.mode.clone(),
        setting_b: b.mode.clone(),
        rows: vec![
            build_row("all", all, false)?,
            build_row("both-solved", both, true)?,
            build_row("affected", affected, false)?,
            build_row("affected-solved", affected_solved, true)?,
        ],
    })
}

/// Renders the comparison with two-decimal relative quotients.
pub fn format_comparison(table: &ComparisonTable) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<16} {:>9} | {:>6} {:>9} {:>9} | {:>6} {:>9} {:>9} | {:>5} {:>5}\n",
        "subset", "instances", "solved", "time", "nodes", "solved", "time", "nodes", "time", "nodes"
    ));
    for r in &table.rows {
        let fmt_nodes = |n: &Option<f64>| match n {
            Some(v) => format!("{v:.0}"),
            None => "-".to_string(),
        };
        let fmt_q = |q: &Option<f64>| match q {
            Some(v) => format!("{v:.2}"),
            None => "-".to_string(),
        };
        out.push_str(&format!(
            "{:<16} {:>9} | {:>6} {:>9.1} {:>9} | {:>6} {:>9.1} {:>9} | {:>5.2} {:>5}\n",
            r.label,
            r.instances,
            r.a_solved,
            r.a_time,
            fmt_nodes(&r.a_nodes),
            r.b_solved,
            r.b_time,
            fmt_nodes(&r.b_nodes),
            r.time_quotient,
            fmt_q(&r.nodes_quotient),
        ));
    }
    out
}

fn csv_opt(v: &Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.12}"),
        None => String::new(),
    }
}

/// One row per call record, fixed column order.
pub fn calls_to_csv(records: &[HeuristicCallRecord]) -> String {
    let mut out = String::from(
        "instance_id,seed,mode,executed,solution_found,best_found,fixing_rate,nodes,wall_time,objective\n",
    );
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.12},{},{:.9},{}\n",
            r.instance_id,
            r.seed,
            r.mode,
            r.executed,
            r.solution_found,
            r.best_found,
            r.fixing_rate,
            r.nodes,
            r.wall_time,
            csv_opt(&r.objective),
        ));
    }
    out
}

/// One row per instance-seed run, fixed column order.
pub fn runs_to_csv(runs: &[InstanceRunRecord]) -> String {
    let mut out =
        String::from("instance_id,seed,mode,status,total_time,total_nodes,best_objective\n");
    for r in runs {
        out.push_str(&format!(
            "{},{},{},{},{:.9},{},{}\n",
            r.instance_id,
            r.seed,
            r.mode,
            r.status,
            r.total_time,
            r.total_nodes,
            csv_opt(&r.best_objective),
        ));
    }
    out
}
