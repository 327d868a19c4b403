//! RENS and MRENS sub-MILP neighborhoods: per-integer-variable interval
//! bounds derived from one or several LP-feasible reference solutions,
//! plus the integer-fixing execution gate.

use crate::model::{snap_int, MilpModel};
use crate::{Error, Result, FEAS_TOL, INT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborhoodMode {
    Rens,
    Mrens,
}

impl std::fmt::Display for NeighborhoodMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NeighborhoodMode::Rens => write!(f, "rens"),
            NeighborhoodMode::Mrens => write!(f, "mrens"),
        }
    }
}

/// Interval bounds over the integer variables of a model.
#[derive(Debug, Clone)]
pub struct NeighborhoodBounds {
    /// The integer variable indices, ascending; parallel to the bounds.
    pub indices: Vec<usize>,
    pub var_lower: Vec<f64>,
    pub var_upper: Vec<f64>,
    pub fixed_count: usize,
    pub mode: NeighborhoodMode,
}

fn validate_reference(model: &MilpModel, x: &[f64]) -> Result<()> {
    if x.len() != model.num_vars() {
        return Err(Error::contract("reference: dimension mismatch"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::contract("reference contains non-finite values"));
    }
    if !model.lp_relaxation().check_feasible(x, FEAS_TOL)? {
        return Err(Error::contract("reference is not LP-feasible"));
    }
    Ok(())
}

fn finish(
    model: &MilpModel,
    indices: Vec<usize>,
    mut lower: Vec<f64>,
    mut upper: Vec<f64>,
    mode: NeighborhoodMode,
) -> Result<NeighborhoodBounds> {
    for (k, &j) in indices.iter().enumerate() {
        lower[k] = lower[k].max(model.lower()[j]);
        upper[k] = upper[k].min(model.upper()[j]);
        if lower[k] > upper[k] {
            return Err(Error::contract(format!(
                "empty neighborhood interval for variable {j}"
            )));
        }
    }
    let fixed_count = indices
        .iter()
        .enumerate()
        .filter(|&(k, _)| lower[k] == upper[k])
        .count();
    Ok(NeighborhoodBounds {
        indices,
        var_lower: lower,
        var_upper: upper,
        fixed_count,
        mode,
    })
}

/// RENS bounds from a single fractional reference: `[floor(x0_j),
/// ceil(x0_j)]` per integer variable, intersected with the model bounds.
/// Integral reference values (within tolerance) fix the variable.
pub fn rens_bounds(model: &MilpModel, x0: &[f64]) -> Result<NeighborhoodBounds> {
    validate_reference(model, x0)?;
    let indices = model.integer_indices();
    let mut lower = Vec::with_capacity(indices.len());
    let mut upper = Vec::with_capacity(indices.len());
    for &j in &indices {
        let v = snap_int(x0[j], INT_TOL);
        lower.push(v.floor());
        upper.push(v.ceil());
    }
    finish(model, indices, lower, upper, NeighborhoodMode::Rens)
}

/// MRENS bounds from up to three references. Per integer variable with
/// per-reference minimum `a` and maximum `b` (integer-snapped): spread
/// `b - a >= 1.0` gives the inward interval `[ceil(a), floor(b)]`, spread
/// `< 1.0` the outward interval `[floor(a), ceil(b)]`; both intersected
/// with the model bounds.
pub fn mrens_bounds(model: &MilpModel, refs: &[Vec<f64>]) -> Result<NeighborhoodBounds> {
    if refs.is_empty() {
        return Err(Error::contract("mrens_bounds: no references"));
    }
    if refs.len() > 3 {
        return Err(Error::contract("mrens_bounds: more than three references"));
    }
    for r in refs {
        validate_reference(model, r)?;
    }
    let indices = model.integer_indices();
    let mut lower = Vec::with_capacity(indices.len());
    let mut upper = Vec::with_capacity(indices.len());
    for &j in &indices {
        let mut vmin = f64::INFINITY;
        let mut vmax = f64::NEG_INFINITY;
        for r in refs {
            let v = snap_int(r[j], INT_TOL);
            vmin = vmin.min(v);
            vmax = vmax.max(v);
        }
        if vmax - vmin >= 1.0 {
            lower.push(vmin.ceil());
            upper.push(vmax.floor());
        } else {
            lower.push(vmin.floor());
            upper.push(vmax.ceil());
        }
    }
    finish(model, indices, lower, upper, NeighborhoodMode::Mrens)
}

/// Fraction of integer variables fixed to a point; 1.0 when the model has
/// no integer variables.
pub fn fixing_rate(bounds: &NeighborhoodBounds, model: &MilpModel) -> f64 {
    let n_int = model.num_integers();
    if n_int == 0 {
        return 1.0;
    }
    bounds.fixed_count as f64 / n_int as f64
}

/// True iff the integer fixing rate meets the threshold (inclusive).
pub fn execution_gate(
    bounds: &NeighborhoodBounds,
    model: &MilpModel,
    min_int_fixing: f64,
) -> bool {
    fixing_rate(bounds, model) >= min_int_fixing
}

/// Copy of the model with integer-variable bounds replaced by the
/// neighborhood intervals; rows and continuous variables untouched.
pub fn build_submilp(model: &MilpModel, bounds: &NeighborhoodBounds) -> Result<MilpModel> {
    let mut lower = model.lower().to_vec();
    let mut upper = model.upper().to_vec();
    for (k, &j) in bounds.indices.iter().enumerate() {
        lower[j] = bounds.var_lower[k];
        upper[j] = bounds.var_upper[k];
    }
    model.with_bounds(lower, upper)
}
