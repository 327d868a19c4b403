//! Bounded-variable primal simplex over the slack-augmented system
//! `Ax - s = b`, `s >= 0`. Maintains a dense explicit basis inverse with
//! periodic refactorization, which is adequate at the instance sizes this
//! crate targets.
//!
//! The solver produces basic optimal solutions with per-variable basis
//! status, so callers can extract simplex tableau rows (for cut separation)
//! and warm-start re-solves after objective changes.

use crate::model::MilpModel;
use crate::{Error, Result, FEAS_TOL, RC_TOL};

/// Refactorize the basis inverse every this many pivots.
const REFACTOR_EVERY: u64 = 100;
/// Engage Bland's rule after this many pivots without objective improvement.
const STALL_PIVOTS: u64 = 1000;
/// Default hard iteration cap.
pub const DEFAULT_ITERATION_LIMIT: u64 = 50_000;

const PIVOT_TOL: f64 = 1e-9;
const SINGULAR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    Free,
}

/// A simplex basis over the `n + m` structural-plus-slack variables.
#[derive(Debug, Clone)]
pub struct Basis {
    /// Status per variable, structurals first, then one slack per row.
    pub status: Vec<VarStatus>,
    /// Tableau row index -> basic variable index.
    pub basic_order: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Outcome of one LP solve.
#[derive(Debug, Clone)]
pub struct LpSolution {
    /// Values for all `n + m` variables (structurals then slacks).
    pub x: Vec<f64>,
    /// Effective objective value over the structural variables.
    pub objective_value: f64,
    pub basis: Basis,
    pub status: LpStatus,
    pub iterations: u64,
    /// True when a supplied warm basis was actually used.
    pub used_warm_start: bool,
}

impl LpSolution {
    /// Structural part of the solution vector.
    pub fn structural(&self, n: usize) -> &[f64] {
        &self.x[..n]
    }
}

/// One tableau row of a basic solution: the identity
/// `x_B(r) + sum_j coeff_j * t_j = rhs` over the polytope, where `t_j` is
/// the nonbasic variable's shift from its active bound (`x_j - l_j` at
/// lower, `u_j - x_j` at upper, `x_j` for free nonbasics) and `rhs` is the
/// basic variable's current value.
#[derive(Debug, Clone)]
pub struct TableauRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// Single-use solver instance; create one per solve.
pub struct SimplexSolver {
    n: usize,
    m: usize,
    /// Column-major constraint matrix incl. slacks (and artificials in
    /// phase 1): cols[j] = list of (row, coefficient).
    cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    obj: Vec<f64>,
    rhs: Vec<f64>,
    status: Vec<VarStatus>,
    basic: Vec<usize>,
    binv: Vec<f64>,
    x: Vec<f64>,
    iterations: u64,
    iteration_limit: u64,
    /// Count of warm-start attempts that fell back to a cold start.
    pub warm_start_fallbacks: u64,
}

/// Solves the LP relaxation of `model` (which must carry no integrality
/// marks). `objective_override`, when present, replaces the structural
/// objective; `warm_basis` is used as the starting basis when it is
/// structurally compatible and primal feasible, otherwise the solver
/// silently falls back to a fresh phase-1 start.
pub fn solve_lp(
    model: &MilpModel,
    objective_override: Option<&[f64]>,
    warm_basis: Option<&Basis>,
    iteration_limit: u64,
) -> Result<LpSolution> {
    if model.num_integers() > 0 {
        return Err(Error::contract("solve_lp: relax the model first"));
    }
    let obj = match objective_override {
        Some(c) => {
            if c.len() != model.num_vars() {
                return Err(Error::contract("objective override length mismatch"));
            }
            c.to_vec()
        }
        None => model.objective().to_vec(),
    };
    let mut solver = SimplexSolver::new(model, &obj, iteration_limit);
    Ok(solver.solve(warm_basis))
}

impl SimplexSolver {
    fn new(model: &MilpModel, objective: &[f64], iteration_limit: u64) -> Self {
        let n = model.num_vars();
        let m = model.num_rows();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + m];
        for (i, row) in model.rows().iter().enumerate() {
            for (j, a) in row.iter() {
                cols[j].push((i, a));
            }
        }
        for i in 0..m {
            cols[n + i].push((i, -1.0));
        }
        let mut lower = model.lower().to_vec();
        let mut upper = model.upper().to_vec();
        lower.extend(std::iter::repeat(0.0).take(m));
        upper.extend(std::iter::repeat(f64::INFINITY).take(m));
        let mut obj = objective.to_vec();
        obj.extend(std::iter::repeat(0.0).take(m));
        SimplexSolver {
            n,
            m,
            cols,
            lower,
            upper,
            obj,
            rhs: model.rhs().to_vec(),
            status: vec![VarStatus::AtLower; n + m],
            basic: Vec::new(),
            binv: Vec::new(),
            x: vec![0.0; n + m],
            iterations: 0,
            iteration_limit,
            warm_start_fallbacks: 0,
        }
    }

    fn solve(&mut self, warm: Option<&Basis>) -> LpSolution {
        let mut used_warm = false;
        if let Some(basis) = warm {
            if self.try_install_warm(basis) {
                used_warm = true;
            } else {
                self.warm_start_fallbacks += 1;
            }
        }
        if !used_warm {
            if let Some(status) = self.phase_one() {
                return self.finish(status, used_warm);
            }
        }
        let phase2_obj = self.obj.clone();
        let status = self.optimize(&phase2_obj);
        self.finish(status, used_warm)
    }

    fn finish(&mut self, status: LpStatus, used_warm: bool) -> LpSolution {
        let objective_value: f64 = (0..self.n).map(|j| self.obj[j] * self.x[j]).sum();
        let nv = self.n + self.m;
        LpSolution {
            x: self.x[..nv].to_vec(),
            objective_value,
            basis: Basis {
                status: self.status[..nv].to_vec(),
                basic_order: self.basic.clone(),
            },
            status,
            iterations: self.iterations,
            used_warm_start: used_warm,
        }
    }

    fn default_nonbasic_status(&self, j: usize) -> VarStatus {
        if self.lower[j].is_finite() {
            VarStatus::AtLower
        } else if self.upper[j].is_finite() {
            VarStatus::AtUpper
        } else {
            VarStatus::Free
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            VarStatus::AtLower => self.lower[j],
            VarStatus::AtUpper => self.upper[j],
            VarStatus::Free => 0.0,
            VarStatus::Basic => unreachable!(),
        }
    }

    /// Attempts to install a warm basis; returns false (leaving the solver
    /// untouched enough for a cold start) when the basis is structurally
    /// incompatible, singular, or primal infeasible under current bounds.
    fn try_install_warm(&mut self, basis: &Basis) -> bool {
        let nv = self.n + self.m;
        if basis.status.len() != nv || basis.basic_order.len() != self.m {
            return false;
        }
        let mut seen = vec![false; nv];
        for &j in &basis.basic_order {
            if j >= nv || seen[j] || basis.status[j] != VarStatus::Basic {
                return false;
            }
            seen[j] = true;
        }
        if basis.status.iter().filter(|&&s| s == VarStatus::Basic).count() != self.m {
            return false;
        }
        let mut status = basis.status.clone();
        // Bound changes since the basis was recorded may invalidate a
        // nonbasic status; clamp to the nearest finite bound.
        for j in 0..nv {
            status[j] = match status[j] {
                VarStatus::Basic => VarStatus::Basic,
                VarStatus::AtLower if self.lower[j].is_finite() => VarStatus::AtLower,
                VarStatus::AtUpper if self.upper[j].is_finite() => VarStatus::AtUpper,
                VarStatus::AtLower | VarStatus::AtUpper | VarStatus::Free => {
                    self.default_nonbasic_status(j)
                }
            };
        }
        let saved_status = std::mem::replace(&mut self.status, status);
        let saved_basic = std::mem::replace(&mut self.basic, basis.basic_order.clone());
        if !self.refactorize() {
            self.status = saved_status;
            self.basic = saved_basic;
            return false;
        }
        self.recompute_x();
        for (r, &j) in self.basic.iter().enumerate() {
            let _ = r;
            if self.x[j] < self.lower[j] - FEAS_TOL || self.x[j] > self.upper[j] + FEAS_TOL {
                self.status = saved_status;
                self.basic = saved_basic;
                return false;
            }
        }
        true
    }

    /// Phase 1: slack basis where feasible, artificials on violated rows,
    /// minimize the sum of artificials. Returns Some(status) when the solve
    /// ends here (infeasible or limit), None when a feasible basis is ready.
    fn phase_one(&mut self) -> Option<LpStatus> {
        let nv = self.n + self.m;
        for j in 0..self.n {
            self.status[j] = self.default_nonbasic_status(j);
            self.x[j] = self.nonbasic_value(j);
        }
        let mut residual = self.rhs.clone();
        for j in 0..self.n {
            for &(i, a) in &self.cols[j] {
                residual[i] -= a * self.x[j];
            }
        }
        self.basic = Vec::with_capacity(self.m);
        let mut artificials = Vec::new();
        for i in 0..self.m {
            let slack = self.n + i;
            if residual[i] <= 0.0 {
                // a.x >= b already: slack basic at a.x - b >= 0
                self.status[slack] = VarStatus::Basic;
                self.basic.push(slack);
                self.x[slack] = -residual[i];
            } else {
                self.status[slack] = VarStatus::AtLower;
                self.x[slack] = 0.0;
                let art = self.cols.len();
                self.cols.push(vec![(i, 1.0)]);
                self.lower.push(0.0);
                self.upper.push(f64::INFINITY);
                self.obj.push(0.0);
                self.status.push(VarStatus::Basic);
                self.x.push(residual[i]);
                self.basic.push(art);
                artificials.push(art);
            }
        }
        // initial B is diagonal with -1 (slack) / +1 (artificial) entries
        let ok = self.refactorize();
        debug_assert!(ok);
        if !artificials.is_empty() {
            let mut phase1_obj = vec![0.0; self.cols.len()];
            for &a in &artificials {
                phase1_obj[a] = 1.0;
            }
            match self.optimize(&phase1_obj) {
                LpStatus::Optimal => {}
                LpStatus::IterationLimit => return Some(LpStatus::IterationLimit),
                _ => return Some(LpStatus::Infeasible),
            }
            let infeasibility: f64 = artificials.iter().map(|&a| self.x[a]).sum();
            if infeasibility > FEAS_TOL {
                return Some(LpStatus::Infeasible);
            }
            self.evict_basic_artificials(nv);
            // Pin artificials at zero for phase 2.
            for &a in &artificials {
                self.lower[a] = 0.0;
                self.upper[a] = 0.0;
                if self.status[a] != VarStatus::Basic {
                    self.status[a] = VarStatus::AtLower;
                    self.x[a] = 0.0;
                }
            }
        }
        None
    }

    /// Pivot zero-valued basic artificials out of the basis where a
    /// non-artificial replacement column exists; redundant rows keep their
    /// artificial pinned at zero.
    fn evict_basic_artificials(&mut self, nv: usize) {
        for r in 0..self.m {
            if self.basic[r] < nv {
                continue;
            }
            let brow: Vec<f64> = (0..self.m).map(|k| self.binv[r * self.m + k]).collect();
            let mut replacement = None;
            for j in 0..nv {
                if self.status[j] == VarStatus::Basic {
                    continue;
                }
                let alpha_rj: f64 = self.cols[j].iter().map(|&(i, a)| brow[i] * a).sum();
                if alpha_rj.abs() > 1e-7 {
                    replacement = Some(j);
                    break;
                }
            }
            if let Some(j) = replacement {
                let alpha = self.ftran(j);
                self.pivot_update(r, j, &alpha);
                let old = std::mem::replace(&mut self.basic[r], j);
                self.status[old] = VarStatus::AtLower;
                self.x[old] = 0.0;
                self.status[j] = VarStatus::Basic;
                // degenerate swap: values unchanged
            }
        }
    }

    /// Primal simplex iterations under the given objective (over all
    /// current columns). Assumes a primal feasible basis.
    fn optimize(&mut self, obj: &[f64]) -> LpStatus {
        let mut bland = false;
        let mut stall: u64 = 0;
        let mut best_obj = f64::INFINITY;
        let mut since_refactor: u64 = 0;
        loop {
            if self.iterations >= self.iteration_limit {
                return LpStatus::IterationLimit;
            }
            let current: f64 = (0..self.cols.len()).map(|j| obj[j] * self.x[j]).sum();
            if current < best_obj - 1e-12 {
                best_obj = current;
                stall = 0;
            } else {
                stall += 1;
                if stall > STALL_PIVOTS {
                    bland = true;
                }
            }
            let y = self.dual_prices(obj);
            let entering = self.price(obj, &y, bland);
            let (enter, dir) = match entering {
                Some(e) => e,
                None => return LpStatus::Optimal,
            };
            self.iterations += 1;
            let alpha = self.ftran(enter);
            // Ratio test: entering moves by t >= 0 in direction dir,
            // basics change by -dir * alpha * t.
            let own_range = self.upper[enter] - self.lower[enter];
            let mut t_max = if own_range.is_finite() { own_range } else { f64::INFINITY };
            let mut leaving: Option<(usize, bool)> = None; // (row, hit_upper)
            for r in 0..self.m {
                let d = -dir * alpha[r];
                if d.abs() <= PIVOT_TOL {
                    continue;
                }
                let bj = self.basic[r];
                let (limit, hit_upper) = if d > 0.0 {
                    ((self.upper[bj] - self.x[bj]) / d, true)
                } else {
                    ((self.x[bj] - self.lower[bj]) / (-d), false)
                };
                if !limit.is_finite() {
                    continue;
                }
                let limit = limit.max(0.0);
                let better = match leaving {
                    None => limit < t_max - 1e-10,
                    Some((lr, _)) => {
                        limit < t_max - 1e-10
                            || (limit < t_max + 1e-10 && bj < self.basic[lr])
                    }
                };
                if better {
                    t_max = limit.min(t_max);
                    leaving = Some((r, hit_upper));
                } else if leaving.is_none() && limit <= t_max {
                    t_max = limit;
                    leaving = Some((r, hit_upper));
                }
            }
            if !t_max.is_finite() {
                return LpStatus::Unbounded;
            }
            match leaving {
                None => {
                    // Bound flip: entering runs to its opposite bound.
                    let t = t_max;
                    self.apply_step(enter, dir, t, &alpha);
                    self.status[enter] = if dir > 0.0 {
                        VarStatus::AtUpper
                    } else {
                        VarStatus::AtLower
                    };
                    self.x[enter] = self.nonbasic_value(enter);
                }
                Some((r, hit_upper)) => {
                    let t = t_max.max(0.0);
                    self.apply_step(enter, dir, t, &alpha);
                    let leave = self.basic[r];
                    self.status[leave] = if hit_upper {
                        VarStatus::AtUpper
                    } else {
                        VarStatus::AtLower
                    };
                    self.x[leave] = self.nonbasic_value(leave);
                    self.status[enter] = VarStatus::Basic;
                    self.basic[r] = enter;
                    self.pivot_update(r, enter, &alpha);
                    since_refactor += 1;
                    if since_refactor >= REFACTOR_EVERY {
                        since_refactor = 0;
                        if self.refactorize() {
                            self.recompute_x();
                        }
                    }
                }
            }
        }
    }

    fn apply_step(&mut self, enter: usize, dir: f64, t: f64, alpha: &[f64]) {
        if t == 0.0 {
            return;
        }
        self.x[enter] += dir * t;
        for r in 0..self.m {
            let bj = self.basic[r];
            self.x[bj] -= dir * alpha[r] * t;
        }
    }

    /// y = c_B' B^-1
    fn dual_prices(&self, obj: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (r, &bj) in self.basic.iter().enumerate() {
            let c = obj[bj];
            if c != 0.0 {
                for k in 0..self.m {
                    y[k] += c * self.binv[r * self.m + k];
                }
            }
        }
        y
    }

    /// Picks the entering variable: most-negative effective reduced cost,
    /// or lowest eligible index under Bland's rule. Returns (index, dir).
    fn price(&self, obj: &[f64], y: &[f64], bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None; // (j, dir, score)
        for j in 0..self.cols.len() {
            let st = self.status[j];
            if st == VarStatus::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let d: f64 = obj[j] - self.cols[j].iter().map(|&(i, a)| y[i] * a).sum::<f64>();
            let dir = match st {
                VarStatus::AtLower if d < -RC_TOL => 1.0,
                VarStatus::AtUpper if d > RC_TOL => -1.0,
                VarStatus::Free if d < -RC_TOL => 1.0,
                VarStatus::Free if d > RC_TOL => -1.0,
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            let score = d.abs();
            match best {
                Some((_, _, s)) if s >= score => {}
                _ => best = Some((j, dir, score)),
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// alpha = B^-1 W_j
    fn ftran(&self, j: usize) -> Vec<f64> {
        let mut alpha = vec![0.0; self.m];
        for &(i, a) in &self.cols[j] {
            for r in 0..self.m {
                alpha[r] += self.binv[r * self.m + i] * a;
            }
        }
        alpha
    }

    /// Elementary row update of the explicit inverse after a pivot in row r.
    fn pivot_update(&mut self, r: usize, _enter: usize, alpha: &[f64]) {
        let p = alpha[r];
        debug_assert!(p.abs() > SINGULAR_TOL);
        for k in 0..self.m {
            self.binv[r * self.m + k] /= p;
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = alpha[i];
            if f != 0.0 {
                for k in 0..self.m {
                    self.binv[i * self.m + k] -= f * self.binv[r * self.m + k];
                }
            }
        }
    }

    /// Rebuilds B^-1 from the basic columns. Returns false when singular.
    fn refactorize(&mut self) -> bool {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        for (c, &bj) in self.basic.iter().enumerate() {
            for &(i, a) in &self.cols[bj] {
                b[i * m + c] = a;
            }
        }
        match invert_dense(&b, m) {
            Some(inv) => {
                self.binv = inv;
                true
            }
            None => false,
        }
    }

    /// x_B = B^-1 (b - N x_N)
    fn recompute_x(&mut self) {
        let mut resid = self.rhs.clone();
        for j in 0..self.cols.len() {
            if self.status[j] != VarStatus::Basic {
                self.x[j] = self.nonbasic_value(j);
                if self.x[j] != 0.0 {
                    for &(i, a) in &self.cols[j] {
                        resid[i] -= a * self.x[j];
                    }
                }
            }
        }
        for r in 0..self.m {
            let mut v = 0.0;
            for k in 0..self.m {
                v += self.binv[r * self.m + k] * resid[k];
            }
            self.x[self.basic[r]] = v;
        }
    }
}

fn identity(m: usize) -> Vec<f64> {
    let mut id = vec![0.0; m * m];
    for i in 0..m {
        id[i * m + i] = 1.0;
    }
    id
}

/// Gauss-Jordan inverse with partial pivoting; None when singular.
fn invert_dense(a: &[f64], m: usize) -> Option<Vec<f64>> {
    let mut work = a.to_vec();
    let mut inv = identity(m);
    for col in 0..m {
        let mut piv = col;
        let mut best = work[col * m + col].abs();
        for r in col + 1..m {
            let v = work[r * m + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < SINGULAR_TOL {
            return None;
        }
        if piv != col {
            for k in 0..m {
                work.swap(col * m + k, piv * m + k);
                inv.swap(col * m + k, piv * m + k);
            }
        }
        let p = work[col * m + col];
        for k in 0..m {
            work[col * m + k] /= p;
            inv[col * m + k] /= p;
        }
        for r in 0..m {
            if r == col {
                continue;
            }
            let f = work[r * m + col];
            if f != 0.0 {
                for k in 0..m {
                    work[r * m + k] -= f * work[col * m + k];
                    inv[r * m + k] -= f * inv[col * m + k];
                }
            }
        }
    }
    Some(inv)
}

/// Extracts tableau row `basic_row` of an optimal basic solution: the
/// coefficients over nonbasic variables in bound-shift space and the basic
/// variable's value as right-hand side (see [`TableauRow`]).
pub fn tableau_row(model: &MilpModel, sol: &LpSolution, basic_row: usize) -> Result<TableauRow> {
    if sol.status != LpStatus::Optimal {
        return Err(Error::contract("tableau_row: solution is not optimal"));
    }
    let n = model.num_vars();
    let m = model.num_rows();
    if basic_row >= m {
        return Err(Error::contract("tableau_row: row out of range"));
    }
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + m];
    for (i, row) in model.rows().iter().enumerate() {
        for (j, a) in row.iter() {
            cols[j].push((i, a));
        }
    }
    for i in 0..m {
        cols[n + i].push((i, -1.0));
    }
    let mut b = vec![0.0; m * m];
    for (c, &bj) in sol.basis.basic_order.iter().enumerate() {
        for &(i, a) in &cols[bj] {
            b[i * m + c] = a;
        }
    }
    let binv = invert_dense(&b, m)
        .ok_or_else(|| Error::contract("tableau_row: singular basis"))?;
    let brow: Vec<f64> = (0..m).map(|k| binv[basic_row * m + k]).collect();
    let mut coeffs = Vec::new();
    for j in 0..n + m {
        let st = sol.basis.status[j];
        if st == VarStatus::Basic {
            continue;
        }
        let alpha: f64 = cols[j].iter().map(|&(i, a)| brow[i] * a).sum();
        let signed = if st == VarStatus::AtUpper { -alpha } else { alpha };
        if signed.abs() > 1e-11 {
            coeffs.push((j, signed));
        }
    }
    Ok(TableauRow {
        coeffs,
        rhs: sol.x[sol.basis.basic_order[basic_row]],
    })
}
