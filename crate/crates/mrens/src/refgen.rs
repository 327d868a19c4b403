//! Relax-and-cut reference generation: iteratively separate GMI cuts at the
//! current LP optimum, price them into the objective with Lagrangian
//! multipliers, and re-solve the LP over the unchanged feasible region. The
//! fractional optima collected along the way become the reference solutions
//! for neighborhood construction; integral optima are captured as feasible
//! solutions of the MILP.

use crate::gmi::{cut_violation, generate_gmi_round, GmiCut};
use crate::model::{is_integral, MilpModel, Solution};
use crate::simplex::{solve_lp, Basis, LpStatus, DEFAULT_ITERATION_LIMIT};
use crate::{Error, Result, INT_TOL};

/// Two recorded solutions closer than this in the infinity norm are
/// treated as duplicates.
const DUP_TOL: f64 = 1e-9;
/// Multiplier convergence threshold for early termination.
const LAMBDA_CONV_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct RefGenConfig {
    pub max_iterations: usize,
    pub cuts_per_round: usize,
    pub mu0: f64,
    pub lp_iteration_limit: u64,
}

impl Default for RefGenConfig {
    fn default() -> Self {
        RefGenConfig {
            max_iterations: 20,
            cuts_per_round: crate::gmi::DEFAULT_CUTS_PER_ROUND,
            mu0: 1.0,
            lp_iteration_limit: DEFAULT_ITERATION_LIMIT,
        }
    }
}

/// Multiplier state of the subgradient loop.
#[derive(Debug, Clone)]
pub struct LagrangianState {
    pub cut_pool: Vec<GmiCut>,
    pub multipliers: Vec<f64>,
    pub best_dual_value: f64,
    /// Objective of the best integral solution seen, +inf when none.
    pub incumbent_primal_value: f64,
    pub step_parameter: f64,
    iteration: usize,
    non_improve_streak: usize,
}

impl LagrangianState {
    pub fn new(mu0: f64) -> Self {
        LagrangianState {
            cut_pool: Vec::new(),
            multipliers: Vec::new(),
            best_dual_value: f64::NEG_INFINITY,
            incumbent_primal_value: f64::INFINITY,
            step_parameter: mu0,
            iteration: 0,
            non_improve_streak: 0,
        }
    }

    pub fn add_cuts(&mut self, cuts: Vec<GmiCut>) {
        self.multipliers.extend(std::iter::repeat(0.0).take(cuts.len()));
        self.cut_pool.extend(cuts);
    }
}

/// Effective objective `c - sum_i lambda_i gamma^i` plus the separately
/// tracked constant `sum_i lambda_i gamma0^i` (the constant is excluded
/// from LP solves and added back for dual-value reporting).
pub fn lagrangian_objective(
    c: &[f64],
    cut_pool: &[GmiCut],
    multipliers: &[f64],
) -> Result<(Vec<f64>, f64)> {
    if multipliers.len() != cut_pool.len() {
        return Err(Error::contract("multiplier/cut count mismatch"));
    }
    if multipliers.iter().any(|&l| l < 0.0) {
        return Err(Error::contract("negative Lagrangian multiplier"));
    }
    let mut eff = c.to_vec();
    let mut constant = 0.0;
    for (cut, &lambda) in cut_pool.iter().zip(multipliers) {
        if lambda == 0.0 {
            continue;
        }
        for (j, g) in cut.coefficients.iter() {
            eff[j] -= lambda * g;
        }
        constant += lambda * cut.rhs;
    }
    Ok((eff, constant))
}

/// Projected subgradient step at the LP optimum `x` of the current
/// Lagrangian objective: `lambda_i <- max(0, lambda_i + t * violation_i)`
/// with a Polyak step when a finite primal bound exists, else a diminishing
/// step. The dual value at `x` is recorded; the step parameter is halved
/// after 3 consecutive non-improvements.
pub fn update_multipliers(state: &mut LagrangianState, c: &[f64], x: &[f64]) -> Result<()> {
    let violations: Vec<f64> = state
        .cut_pool
        .iter()
        .map(|cut| cut_violation(cut, x))
        .collect();
    let cx: f64 = c.iter().zip(x).map(|(a, b)| a * b).sum();
    let dual_value = cx
        + state
            .multipliers
            .iter()
            .zip(&violations)
            .map(|(l, v)| l * v)
            .sum::<f64>();
    if dual_value > state.best_dual_value + 1e-12 {
        state.best_dual_value = dual_value;
        state.non_improve_streak = 0;
    } else {
        state.non_improve_streak += 1;
        if state.non_improve_streak >= 3 {
            state.step_parameter *= 0.5;
            state.non_improve_streak = 0;
        }
    }
    let norm_sq: f64 = violations.iter().map(|v| v * v).sum();
    state.iteration += 1;
    if norm_sq == 0.0 {
        return Ok(()); // all cuts tight; multipliers unchanged
    }
    let step = if state.incumbent_primal_value.is_finite()
        && state.incumbent_primal_value > dual_value
    {
        state.step_parameter * (state.incumbent_primal_value - dual_value) / norm_sq
    } else {
        state.step_parameter / state.iteration as f64
    };
    for (lambda, v) in state.multipliers.iter_mut().zip(&violations) {
        *lambda = (*lambda + step * v).max(0.0);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefGenStatus {
    Ok,
    RelaxationInfeasible,
    RelaxationUnbounded,
    SolveLimit,
}

/// The ordered reference solutions produced by the relax-and-cut loop.
#[derive(Debug, Clone)]
pub struct ReferenceSet {
    /// All recorded LP optima (structural parts), duplicates suppressed.
    pub all_solutions: Vec<Vec<f64>>,
    /// The first solution plus the last two, deduplicated; at most 3.
    pub selected: Vec<Vec<f64>>,
    /// Integral solutions captured en route (feasible for the MILP).
    pub integral_found: Vec<Solution>,
    pub status: RefGenStatus,
    pub best_dual_value: f64,
    /// Simplex iterations spent over all LP solves, for work accounting.
    pub lp_iterations: u64,
}

impl ReferenceSet {
    fn empty(status: RefGenStatus, lp_iterations: u64) -> Self {
        ReferenceSet {
            all_solutions: Vec::new(),
            selected: Vec::new(),
            integral_found: Vec::new(),
            status,
            best_dual_value: f64::NEG_INFINITY,
            lp_iterations,
        }
    }
}

/// First-plus-last-two selection with value deduplication.
pub fn select_references(all: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut picked: Vec<&Vec<f64>> = Vec::new();
    let k = all.len();
    let mut idx: Vec<usize> = vec![0];
    if k >= 2 {
        idx.push(k - 2);
    }
    if k >= 1 {
        idx.push(k - 1);
    }
    idx.sort_unstable();
    idx.dedup();
    for i in idx {
        let cand = &all[i];
        let dup = picked.iter().any(|p| {
            p.iter()
                .zip(cand.iter())
                .all(|(a, b)| (a - b).abs() <= DUP_TOL)
        });
        if !dup {
            picked.push(cand);
        }
    }
    picked.into_iter().cloned().collect()
}

/// Runs the five-step relax-and-cut loop on a MILP: solve the original LP
/// relaxation for the first reference, then up to `max_iterations` rounds
/// of GMI separation, multiplier updates, and warm-started re-solves with
/// the Lagrangian objective over the original feasible region. Stops early
/// when the latest optimum is integral or when no new cut is found and the
/// multipliers have converged.
pub fn run_relax_and_cut(model: &MilpModel, config: &RefGenConfig) -> Result<ReferenceSet> {
    if model.num_integers() == 0 {
        return Err(Error::contract("run_relax_and_cut: model has no integer variables"));
    }
    let relaxed = model.lp_relaxation();
    let c = model.objective();
    let integer_set = model.integer_indices();
    let n = model.num_vars();

    let mut sol = solve_lp(&relaxed, None, None, config.lp_iteration_limit)?;
    let mut lp_iterations = sol.iterations;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Ok(ReferenceSet::empty(RefGenStatus::RelaxationInfeasible, lp_iterations))
        }
        LpStatus::Unbounded => {
            return Ok(ReferenceSet::empty(RefGenStatus::RelaxationUnbounded, lp_iterations))
        }
        LpStatus::IterationLimit => {
            return Ok(ReferenceSet::empty(RefGenStatus::SolveLimit, lp_iterations))
        }
    }

    let mut all_solutions: Vec<Vec<f64>> = vec![sol.structural(n).to_vec()];
    let mut integral_found: Vec<Solution> = Vec::new();
    let mut state = LagrangianState::new(config.mu0);
    state.best_dual_value = sol.objective_value;

    let record_integral =
        |x: &[f64], found: &mut Vec<Solution>, state: &mut LagrangianState| -> Result<()> {
            let s = Solution::new(model, x.to_vec())?;
            state.incumbent_primal_value = state.incumbent_primal_value.min(s.objective_value);
            found.push(s);
            Ok(())
        };

    if is_integral(sol.structural(n), &integer_set, INT_TOL) {
        record_integral(sol.structural(n), &mut integral_found, &mut state)?;
    } else {
        let mut warm: Basis = sol.basis.clone();
        for _ in 0..config.max_iterations {
            let cuts = generate_gmi_round(model, &sol, config.cuts_per_round)?;
            let found_new = !cuts.is_empty();
            let lambda_before = state.multipliers.clone();
            state.add_cuts(cuts);
            let current_x = sol.structural(n).to_vec();
            update_multipliers(&mut state, c, &current_x)?;
            if !found_new {
                let delta = state
                    .multipliers
                    .iter()
                    .zip(lambda_before.iter().chain(std::iter::repeat(&0.0)))
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                if delta < LAMBDA_CONV_TOL {
                    break;
                }
            }
            let (eff_obj, constant) =
                lagrangian_objective(c, &state.cut_pool, &state.multipliers)?;
            let next = solve_lp(&relaxed, Some(&eff_obj), Some(&warm), config.lp_iteration_limit)?;
            lp_iterations += next.iterations;
            if next.status != LpStatus::Optimal {
                break;
            }
            state.best_dual_value = state
                .best_dual_value
                .max(next.objective_value + constant);
            sol = next;
            warm = sol.basis.clone();
            let x = sol.structural(n).to_vec();
            let is_dup = all_solutions.last().map_or(false, |last| {
                last.iter().zip(&x).all(|(a, b)| (a - b).abs() <= DUP_TOL)
            });
            if !is_dup {
                all_solutions.push(x.clone());
            }
            if is_integral(&x, &integer_set, INT_TOL) {
                record_integral(&x, &mut integral_found, &mut state)?;
                break;
            }
        }
    }

    let selected = select_references(&all_solutions);
    Ok(ReferenceSet {
        all_solutions,
        selected,
        integral_found,
        status: RefGenStatus::Ok,
        best_dual_value: state.best_dual_value,
        lp_iterations,
    })
}
