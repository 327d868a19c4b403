//! Sub-MILP solving: activity-based presolve, a deterministic best-bound
//! branch and bound with working limits (node limit, stalling node limit),
//! and the heuristic-call driver that wires neighborhood construction,
//! gates, presolve, and the sub-solve together.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::model::{is_integral, snap_int, MilpModel, Solution, SparseRow};
use crate::neighborhood::{
    build_submilp, execution_gate, fixing_rate, mrens_bounds, rens_bounds, NeighborhoodMode,
};
use crate::refgen::ReferenceSet;
use crate::simplex::{solve_lp, Basis, LpStatus, DEFAULT_ITERATION_LIMIT};
use crate::{Error, Result, FEAS_TOL, INT_TOL};

const IMPROVE_TOL: f64 = 1e-9;
const PRESOLVE_PASSES: usize = 10;
const BOUND_TIGHTEN_TOL: f64 = 1e-9;

/// Working limits of a heuristic sub-solve.
#[derive(Debug, Clone)]
pub struct WorkingLimits {
    pub node_limit: u64,
    /// Max nodes processed without improving the sub-MILP incumbent.
    pub stalling_node_limit: u64,
    pub min_total_fixing_after_presolve: f64,
    pub time_limit: Option<Duration>,
}

impl Default for WorkingLimits {
    fn default() -> Self {
        WorkingLimits {
            node_limit: 5000,
            stalling_node_limit: 500,
            min_total_fixing_after_presolve: 0.25,
            time_limit: None,
        }
    }
}

impl WorkingLimits {
    /// No limits and no fixing gate; used by oracle-equivalence tests.
    pub fn unlimited() -> Self {
        WorkingLimits {
            node_limit: u64::MAX,
            stalling_node_limit: u64::MAX,
            min_total_fixing_after_presolve: 0.0,
            time_limit: None,
        }
    }
}

/// Variable correspondence between an original model and its presolved
/// reduction.
#[derive(Debug, Clone)]
pub struct PresolveMap {
    /// Value per original variable when fixed and substituted out.
    pub fixed_values: Vec<Option<f64>>,
    /// Original index -> index in the reduced model.
    pub reduced_index: Vec<Option<usize>>,
}

impl PresolveMap {
    /// Lifts a reduced-space point back to the original variable space.
    pub fn lift(&self, reduced_x: &[f64]) -> Vec<f64> {
        self.fixed_values
            .iter()
            .zip(&self.reduced_index)
            .map(|(fixed, idx)| match (fixed, idx) {
                (Some(v), _) => *v,
                (None, Some(k)) => reduced_x[*k],
                (None, None) => unreachable!("unmapped variable"),
            })
            .collect()
    }
}

#[derive(Debug)]
pub enum PresolveOutcome {
    Reduced { model: MilpModel, map: PresolveMap },
    Infeasible,
}

#[derive(Debug)]
pub struct PresolveResult {
    pub outcome: PresolveOutcome,
    /// Fraction of ALL variables (integer and continuous) fixed, relative
    /// to the original variable count.
    pub fixed_fraction_total: f64,
}

/// Iterated activity-based bound propagation, integer bound rounding, and
/// substitution of fixed variables, to a fixed point or a pass cap.
pub fn presolve(model: &MilpModel) -> Result<PresolveResult> {
    let n = model.num_vars();
    let mut lower = model.lower().to_vec();
    let mut upper = model.upper().to_vec();

    for _ in 0..PRESOLVE_PASSES {
        let mut changed = false;
        for (row, &b) in model.rows().iter().zip(model.rhs()) {
            // max activity with count of infinite contributions
            let mut finite_max = 0.0;
            let mut inf_count = 0usize;
            for (j, a) in row.iter() {
                let contrib = if a > 0.0 { a * upper[j] } else { a * lower[j] };
                if contrib.is_finite() {
                    finite_max += contrib;
                } else {
                    inf_count += 1;
                }
            }
            if inf_count == 0 && finite_max < b - FEAS_TOL {
                return Ok(PresolveResult {
                    outcome: PresolveOutcome::Infeasible,
                    fixed_fraction_total: fixed_fraction(&lower, &upper, n),
                });
            }
            for (j, a) in row.iter() {
                let own_max = if a > 0.0 { a * upper[j] } else { a * lower[j] };
                let others_max = if inf_count == 0 {
                    finite_max - own_max
                } else if inf_count == 1 && !own_max.is_finite() {
                    finite_max
                } else {
                    continue;
                };
                // a_j x_j >= b - others_max
                let residual = b - others_max;
                if a > 0.0 {
                    let mut cand = residual / a;
                    if model.is_integer(j) {
                        cand = snap_int(cand, INT_TOL).ceil();
                    }
                    if cand > lower[j] + BOUND_TIGHTEN_TOL {
                        lower[j] = cand;
                        changed = true;
                    }
                } else {
                    let mut cand = residual / a;
                    if model.is_integer(j) {
                        cand = snap_int(cand, INT_TOL).floor();
                    }
                    if cand < upper[j] - BOUND_TIGHTEN_TOL {
                        upper[j] = cand;
                        changed = true;
                    }
                }
                if lower[j] > upper[j] + FEAS_TOL {
                    return Ok(PresolveResult {
                        outcome: PresolveOutcome::Infeasible,
                        fixed_fraction_total: fixed_fraction(&lower, &upper, n),
                    });
                }
            }
        }
        if !changed {
            break;
        }
    }

    // Substitute fixed variables out and rebuild the reduced model.
    let mut fixed_values: Vec<Option<f64>> = vec![None; n];
    let mut reduced_index: Vec<Option<usize>> = vec![None; n];
    let mut next = 0usize;
    for j in 0..n {
        if (upper[j] - lower[j]).abs() <= BOUND_TIGHTEN_TOL {
            let v = if model.is_integer(j) {
                lower[j].round()
            } else {
                lower[j]
            };
            fixed_values[j] = Some(v);
        } else {
            reduced_index[j] = Some(next);
            next += 1;
        }
    }
    let fixed_fraction_total = fixed_values.iter().flatten().count() as f64 / n.max(1) as f64;

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (row, &b) in model.rows().iter().zip(model.rhs()) {
        let mut entries = Vec::new();
        let mut b_new = b;
        for (j, a) in row.iter() {
            match fixed_values[j] {
                Some(v) => b_new -= a * v,
                None => entries.push((reduced_index[j].unwrap(), a)),
            }
        }
        if entries.is_empty() {
            if b_new > FEAS_TOL {
                return Ok(PresolveResult {
                    outcome: PresolveOutcome::Infeasible,
                    fixed_fraction_total,
                });
            }
            continue; // redundant row
        }
        rows.push(SparseRow::new(entries));
        rhs.push(b_new);
    }

    let keep: Vec<usize> = (0..n).filter(|&j| fixed_values[j].is_none()).collect();
    let reduced = MilpModel::new(
        format!("{}_presolved", model.name),
        keep.iter().map(|&j| model.objective()[j]).collect(),
        rows,
        rhs,
        keep.iter().map(|&j| lower[j]).collect(),
        keep.iter().map(|&j| upper[j]).collect(),
        keep.iter().map(|&j| model.is_integer(j)).collect(),
    )?;
    Ok(PresolveResult {
        outcome: PresolveOutcome::Reduced {
            model: reduced,
            map: PresolveMap {
                fixed_values,
                reduced_index,
            },
        },
        fixed_fraction_total,
    })
}

fn fixed_fraction(lower: &[f64], upper: &[f64], n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    lower
        .iter()
        .zip(upper)
        .filter(|(l, u)| (**u - **l).abs() <= BOUND_TIGHTEN_TOL)
        .count() as f64
        / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsolveStatus {
    Optimal,
    /// Node, stalling, or time limit reached before optimality was proven.
    FeasibleLimitHit,
    Infeasible,
    AbortedFixingGate,
}

#[derive(Debug)]
pub struct SubsolveResult {
    pub status: SubsolveStatus,
    pub best_solution: Option<Solution>,
    pub nodes_processed: u64,
    pub stall_nodes_at_end: u64,
    pub lp_iterations: u64,
}

struct Node {
    id: u64,
    bound: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
    basis: Option<Basis>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: invert so the lowest bound (then lowest id)
    // pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(other.id.cmp(&self.id))
    }
}

/// Best-bound branch and bound with most-fractional branching (lowest
/// index breaks fractionality ties, lowest node id breaks bound ties) and
/// parent-basis warm starts. Terminates at optimality or at a working
/// limit; `incumbent_cutoff`, when given, prunes like an incumbent of that
/// objective value.
pub fn branch_and_bound(
    model: &MilpModel,
    limits: &WorkingLimits,
    incumbent_cutoff: Option<f64>,
) -> Result<SubsolveResult> {
    let start = Instant::now();
    let integer_set = model.integer_indices();
    let n = model.num_vars();

    let mut best_obj = incumbent_cutoff.unwrap_or(f64::INFINITY);
    let mut incumbent: Option<Solution> = None;
    let mut heap = BinaryHeap::new();
    let mut next_id: u64 = 0;
    heap.push(Node {
        id: next_id,
        bound: f64::NEG_INFINITY,
        lower: model.lower().to_vec(),
        upper: model.upper().to_vec(),
        basis: None,
    });
    next_id += 1;

    let mut nodes_processed: u64 = 0;
    let mut stall: u64 = 0;
    let mut lp_iterations: u64 = 0;
    let mut limit_hit = false;

    while let Some(node) = heap.pop() {
        if node.bound >= best_obj - IMPROVE_TOL {
            continue; // bound pruning
        }
        if nodes_processed >= limits.node_limit
            || stall >= limits.stalling_node_limit
            || limits.time_limit.map_or(false, |t| start.elapsed() >= t)
        {
            limit_hit = true;
            break;
        }
        let node_model = match model.with_bounds(node.lower.clone(), node.upper.clone()) {
            Ok(m) => m,
            Err(_) => continue, // integer rounding emptied a domain
        };
        let sol = solve_lp(
            &node_model.lp_relaxation(),
            None,
            node.basis.as_ref(),
            DEFAULT_ITERATION_LIMIT,
        )?;
        lp_iterations += sol.iterations;
        nodes_processed += 1;
        stall += 1;
        match sol.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Err(Error::contract(
                    "branch_and_bound: unbounded node relaxation",
                ))
            }
            LpStatus::IterationLimit => continue,
            LpStatus::Optimal => {}
        }
        let lp_obj = sol.objective_value;
        if lp_obj >= best_obj - IMPROVE_TOL {
            continue;
        }
        let x = sol.structural(n);
        if is_integral(x, &integer_set, INT_TOL) {
            // strict improvement resets the stall counter
            if lp_obj < best_obj - IMPROVE_TOL {
                best_obj = lp_obj;
                let rounded: Vec<f64> = (0..n)
                    .map(|j| {
                        if model.is_integer(j) {
                            x[j].round()
                        } else {
                            x[j]
                        }
                    })
                    .collect();
                incumbent = Some(Solution::new(model, rounded)?);
                stall = 0;
            }
            continue;
        }
        // most fractional integer variable, lowest index on ties
        let mut branch_var = None;
        let mut best_frac = 0.0;
        for &j in &integer_set {
            let f = x[j] - x[j].floor();
            let score = f.min(1.0 - f);
            if score > INT_TOL && score > best_frac + 1e-12 {
                best_frac = score;
                branch_var = Some(j);
            }
        }
        let j = branch_var.expect("fractional variable must exist");
        let v = x[j];
        let mut down_upper = node.upper.clone();
        down_upper[j] = v.floor();
        let mut up_lower = node.lower.clone();
        up_lower[j] = v.ceil();
        heap.push(Node {
            id: next_id,
            bound: lp_obj,
            lower: node.lower.clone(),
            upper: down_upper,
            basis: Some(sol.basis.clone()),
        });
        next_id += 1;
        heap.push(Node {
            id: next_id,
            bound: lp_obj,
            lower: up_lower,
            upper: node.upper.clone(),
            basis: Some(sol.basis),
        });
        next_id += 1;
    }

    let status = if limit_hit {
        SubsolveStatus::FeasibleLimitHit
    } else if incumbent.is_some() {
        SubsolveStatus::Optimal
    } else {
        SubsolveStatus::Infeasible
    };
    Ok(SubsolveResult {
        status,
        best_solution: incumbent,
        nodes_processed,
        stall_nodes_at_end: stall,
        lp_iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallStatus {
    /// The integer-fixing execution gate failed; no sub-solve attempted.
    NotExecuted,
    /// The total-fixing gate failed after presolve; no sub-solve attempted.
    AbortedFixingGate,
    /// Presolve or the sub-solve proved the sub-MILP infeasible.
    SubmilpInfeasible,
    SolutionFound,
    /// Sub-solve ended at a limit without a feasible solution.
    NoSolutionFound,
}

/// Per-call outcome of one heuristic invocation.
#[derive(Debug)]
pub struct HeuristicCallOutcome {
    pub executed: bool,
    pub solution_found: bool,
    /// Best solution lifted to the original variable space and verified
    /// feasible for the original model.
    pub solution: Option<Solution>,
    pub fixing_rate: f64,
    pub nodes: u64,
    pub lp_iterations: u64,
    pub status: CallStatus,
}

/// Gate parameters of a heuristic call.
#[derive(Debug, Clone)]
pub struct CallGates {
    /// Minimum fraction of integer variables fixed for execution.
    pub min_int_fixing: f64,
}

impl Default for CallGates {
    fn default() -> Self {
        CallGates {
            min_int_fixing: 0.5,
        }
    }
}

/// One heuristic call: build RENS or MRENS bounds from the references,
/// check the integer-fixing execution gate, presolve the sub-MILP, check
/// the total-fixing gate, branch and bound, and lift any solution back to
/// the original space with a feasibility verification.
pub fn run_heuristic_call(
    model: &MilpModel,
    refs: &ReferenceSet,
    mode: NeighborhoodMode,
    limits: &WorkingLimits,
    gates: &CallGates,
) -> Result<HeuristicCallOutcome> {
    if refs.selected.is_empty() {
        return Err(Error::contract("run_heuristic_call: empty reference set"));
    }
    let bounds = match mode {
        NeighborhoodMode::Rens => rens_bounds(model, &refs.selected[0])?,
        NeighborhoodMode::Mrens => mrens_bounds(model, &refs.selected)?,
    };
    let rate = fixing_rate(&bounds, model);
    if !execution_gate(&bounds, model, gates.min_int_fixing) {
        return Ok(HeuristicCallOutcome {
            executed: false,
            solution_found: false,
            solution: None,
            fixing_rate: rate,
            nodes: 0,
            lp_iterations: 0,
            status: CallStatus::NotExecuted,
        });
    }
    let sub = build_submilp(model, &bounds)?;
    let pres = presolve(&sub)?;
    let (reduced, map) = match pres.outcome {
        PresolveOutcome::Infeasible => {
            return Ok(HeuristicCallOutcome {
                executed: true,
                solution_found: false,
                solution: None,
                fixing_rate: rate,
                nodes: 0,
                lp_iterations: 0,
                status: CallStatus::SubmilpInfeasible,
            });
        }
        PresolveOutcome::Reduced { model, map } => (model, map),
    };
    if pres.fixed_fraction_total < limits.min_total_fixing_after_presolve {
        return Ok(HeuristicCallOutcome {
            executed: true,
            solution_found: false,
            solution: None,
            fixing_rate: rate,
            nodes: 0,
            lp_iterations: 0,
            status: CallStatus::AbortedFixingGate,
        });
    }
    let result = branch_and_bound(&reduced, limits, None)?;
    let mut solution = None;
    if let Some(best) = &result.best_solution {
        let lifted = map.lift(&best.values);
        if model.check_feasible(&lifted, FEAS_TOL)? {
            solution = Some(Solution::new(model, lifted)?);
        } else {
            debug_assert!(false, "lifted sub-MILP solution infeasible for original");
        }
    }
    let status = match (&solution, result.status) {
        (Some(_), _) => CallStatus::SolutionFound,
        (None, SubsolveStatus::Infeasible) => CallStatus::SubmilpInfeasible,
        (None, _) => CallStatus::NoSolutionFound,
    };
    Ok(HeuristicCallOutcome {
        executed: true,
        solution_found: solution.is_some(),
        solution,
        fixing_rate: rate,
        nodes: result.nodes_processed,
        lp_iterations: result.lp_iterations,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refgen::RefGenStatus;

    fn model(
        obj: Vec<f64>,
        rows: Vec<Vec<f64>>,
        rhs: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        integer: Vec<bool>,
    ) -> MilpModel {
        MilpModel::new(
            "t",
            obj,
            rows.iter().map(|r| SparseRow::from_dense(r)).collect(),
            rhs,
            lower,
            upper,
            integer,
        )
        .unwrap()
    }

    #[test]
    fn presolve_forces_cover_row() {
        // x1 + x2 >= 2 with x in [0,1]^2: both forced to 1
        let m = model(
            vec![0.0, 0.0],
            vec![vec![1.0, 1.0]],
            vec![2.0],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![true, true],
        );
        let r = presolve(&m).unwrap();
        assert_eq!(r.fixed_fraction_total, 1.0);
        match r.outcome {
            PresolveOutcome::Reduced { model, map } => {
                assert_eq!(model.num_vars(), 0);
                assert_eq!(map.lift(&[]), vec![1.0, 1.0]);
            }
            PresolveOutcome::Infeasible => panic!("expected reduction"),
        }
    }

    #[test]
    fn presolve_fixpoint_without_tightening() {
        let m = model(
            vec![0.0, 0.0],
            vec![vec![1.0, 1.0]],
            vec![1.0],
            vec![0.0, 3.0],
            vec![1.0, 3.0],
            vec![true, true],
        );
        let r = presolve(&m).unwrap();
        // x2 already fixed by input bounds, x1 stays free in [0,1]
        assert_eq!(r.fixed_fraction_total, 0.5);
    }

    #[test]
    fn presolve_detects_infeasibility() {
        let m = model(
            vec![0.0],
            vec![vec![1.0]],
            vec![2.0],
            vec![0.0],
            vec![1.0],
            vec![true],
        );
        let r = presolve(&m).unwrap();
        assert!(matches!(r.outcome, PresolveOutcome::Infeasible));
    }

    #[test]
    fn knapsack_optimum() {
        // min -(5x1+4x2+3x3) s.t. 2x1+3x2+x3 <= 5, x binary -> -9 at (1,1,0)
        let m = model(
            vec![-5.0, -4.0, -3.0],
            vec![vec![-2.0, -3.0, -1.0]],
            vec![-5.0],
            vec![0.0; 3],
            vec![1.0; 3],
            vec![true; 3],
        );
        let r = branch_and_bound(&m, &WorkingLimits::unlimited(), None).unwrap();
        assert_eq!(r.status, SubsolveStatus::Optimal);
        let s = r.best_solution.unwrap();
        assert!((s.objective_value - (-9.0)).abs() < 1e-9);
        assert_eq!(s.values, vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn infeasible_submilp() {
        let m = model(
            vec![0.0, 0.0],
            vec![vec![1.0, 1.0]],
            vec![3.0],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![true, true],
        );
        let r = branch_and_bound(&m, &WorkingLimits::unlimited(), None).unwrap();
        assert_eq!(r.status, SubsolveStatus::Infeasible);
        assert!(r.best_solution.is_none());
    }

    #[test]
    fn stalling_limit_semantics() {
        // Root LP is integral (incumbent at node 1, stall resets to 0);
        // with stalling_node_limit = 1 the search stops within 2 nodes.
        let m = model(
            vec![1.0, 1.0],
            vec![vec![1.0, 1.0]],
            vec![1.0],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![true, true],
        );
        let limits = WorkingLimits {
            stalling_node_limit: 1,
            ..WorkingLimits::unlimited()
        };
        let r = branch_and_bound(&m, &limits, None).unwrap();
        assert!(r.nodes_processed <= 2);
        assert!(r.best_solution.is_some());
    }

    #[test]
    fn node_limit_is_respected() {
        // A deep knapsack tree under a hard node cap.
        let n = 10;
        let obj: Vec<f64> = (0..n).map(|i| -((i + 3) as f64).ln()).collect();
        let row: Vec<f64> = (0..n).map(|i| -((i % 4 + 1) as f64 + 0.5)).collect();
        let m = model(
            obj,
            vec![row],
            vec![-9.1],
            vec![0.0; n],
            vec![1.0; n],
            vec![true; n],
        );
        // the full tree needs 37 nodes; cap below that
        let limits = WorkingLimits {
            node_limit: 20,
            ..WorkingLimits::unlimited()
        };
        let r = branch_and_bound(&m, &limits, None).unwrap();
        assert_eq!(r.nodes_processed, 20);
        assert_eq!(r.status, SubsolveStatus::FeasibleLimitHit);
    }

    fn manual_refs(selected: Vec<Vec<f64>>) -> ReferenceSet {
        ReferenceSet {
            all_solutions: selected.clone(),
            selected,
            integral_found: vec![],
            status: RefGenStatus::Ok,
            best_dual_value: f64::NEG_INFINITY,
            lp_iterations: 0,
        }
    }

    #[test]
    fn gate_failure_skips_subsolve() {
        let m = model(
            vec![0.0, 0.0],
            vec![],
            vec![],
            vec![0.0, 0.0],
            vec![5.0, 5.0],
            vec![true, true],
        );
        let refs = manual_refs(vec![vec![0.5, 1.5]]); // nothing fixed
        let out = run_heuristic_call(
            &m,
            &refs,
            NeighborhoodMode::Rens,
            &WorkingLimits::default(),
            &CallGates::default(),
        )
        .unwrap();
        assert!(!out.executed);
        assert_eq!(out.status, CallStatus::NotExecuted);
        assert_eq!(out.nodes, 0);
    }

    #[test]
    fn rens_infeasible_but_mrens_succeeds() {
        // 2x2 + x1 = 3 as two >= rows; integer solutions (1,1) and (3,0).
        // Reference x^0 = (0, 1.5) fixes x1 = 0 and boxes x2 into [1,2]:
        // RENS sub-MILP infeasible. References spreading to (3,0) widen the
        // MRENS box enough to contain feasible points.
        let m = model(
            vec![0.0, 0.0],
            vec![vec![1.0, 2.0], vec![-1.0, -2.0]],
            vec![3.0, -3.0],
            vec![0.0, 0.0],
            vec![3.0, 3.0],
            vec![true, true],
        );
        let refs = manual_refs(vec![
            vec![0.0, 1.5],
            vec![1.5, 0.75],
            vec![3.0, 0.0],
        ]);
        let gates = CallGates {
            min_int_fixing: 0.0,
        };
        let limits = WorkingLimits {
            min_total_fixing_after_presolve: 0.0,
            ..WorkingLimits::default()
        };
        let rens = run_heuristic_call(&m, &refs, NeighborhoodMode::Rens, &limits, &gates).unwrap();
        assert!(rens.executed);
        assert!(!rens.solution_found);
        let mrens =
            run_heuristic_call(&m, &refs, NeighborhoodMode::Mrens, &limits, &gates).unwrap();
        assert!(mrens.executed);
        assert!(mrens.solution_found);
        let s = mrens.solution.unwrap();
        assert!(m.check_feasible(&s.values, 1e-9).unwrap());
    }
}
