//! Gomory mixed-integer cut separation from simplex tableau rows.
//!
//! Cuts are derived in bound-shift space from rows whose basic variable is
//! an integer structural variable at a fractional value, then substituted
//! back into original variable space (slack contributions expanded through
//! their defining rows). All cuts read `gamma' x >= gamma_0`.

use crate::model::{MilpModel, SparseRow};
use crate::simplex::{tableau_row, LpSolution, LpStatus, VarStatus};
use crate::{Error, Result, SEP_TOL};

/// Rows whose basic value has fractionality min(f0, 1-f0) at or below this
/// are skipped: near-integral rows produce numerically poisonous cuts.
pub const FRACTIONALITY_MIN: f64 = 1e-4;
/// At most this many cuts per separation round, ranked by fractionality.
pub const DEFAULT_CUTS_PER_ROUND: usize = 10;

const COEF_DROP_TOL: f64 = 1e-10;
const MAX_DYNAMISM: f64 = 1e8;

/// One GMI cut in original (structural) variable space.
#[derive(Debug, Clone)]
pub struct GmiCut {
    pub coefficients: SparseRow,
    pub rhs: f64,
    /// Index of the fractional basic integer variable the cut came from.
    pub source_var: usize,
    /// Violation at the fractional point the cut separates.
    pub violation_at_source: f64,
}

/// `gamma_0 - gamma' x`; positive means violated.
pub fn cut_violation(cut: &GmiCut, x: &[f64]) -> f64 {
    cut.rhs - cut.coefficients.dot(x)
}

fn frac(v: f64) -> f64 {
    v - v.floor()
}

/// Generates one round of GMI cuts at an optimal LP solution of the
/// relaxation of `model`. Returns an empty list when no tableau row
/// qualifies.
pub fn generate_gmi_round(
    model: &MilpModel,
    sol: &LpSolution,
    max_cuts: usize,
) -> Result<Vec<GmiCut>> {
    if sol.status != LpStatus::Optimal {
        return Err(Error::contract("generate_gmi_round: solution not optimal"));
    }
    let n = model.num_vars();
    let mut candidates: Vec<(f64, usize)> = Vec::new();
    for (r, &bj) in sol.basis.basic_order.iter().enumerate() {
        if bj >= n || !model.is_integer(bj) {
            continue;
        }
        let f0 = frac(sol.x[bj]);
        if f0.min(1.0 - f0) > FRACTIONALITY_MIN {
            candidates.push((f0.min(1.0 - f0), r));
        }
    }
    // strongest fractionality first, row index breaks ties
    candidates.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    candidates.truncate(max_cuts);

    let mut cuts = Vec::new();
    for (_, r) in candidates {
        if let Some(cut) = derive_cut(model, sol, r)? {
            cuts.push(cut);
        }
    }
    Ok(cuts)
}

fn derive_cut(model: &MilpModel, sol: &LpSolution, row_idx: usize) -> Result<Option<GmiCut>> {
    let n = model.num_vars();
    let source_var = sol.basis.basic_order[row_idx];
    let row = tableau_row(model, sol, row_idx)?;
    let f0 = frac(row.rhs);
    if f0.min(1.0 - f0) <= FRACTIONALITY_MIN {
        return Ok(None);
    }

    // GMI coefficients over nonbasic bound shifts, normalized to rhs 1.
    let mut dense = vec![0.0; n];
    let mut rhs = 1.0;
    for &(j, a) in &row.coeffs {
        let gamma = if j < n && model.is_integer(j) {
            let fj = frac(a);
            if fj <= f0 {
                fj / f0
            } else {
                (1.0 - fj) / (1.0 - f0)
            }
        } else if a >= 0.0 {
            a / f0
        } else {
            -a / (1.0 - f0)
        };
        if gamma == 0.0 {
            continue;
        }
        if j < n {
            match sol.basis.status[j] {
                VarStatus::AtLower => {
                    dense[j] += gamma;
                    rhs += gamma * model.lower()[j];
                }
                VarStatus::AtUpper => {
                    dense[j] -= gamma;
                    rhs -= gamma * model.upper()[j];
                }
                VarStatus::Free => dense[j] += gamma,
                VarStatus::Basic => unreachable!("nonbasic expected"),
            }
        } else {
            // slack shift equals the slack itself: a_i.x - b_i
            let i = j - n;
            for (k, v) in model.rows()[i].iter() {
                dense[k] += gamma * v;
            }
            rhs += gamma * model.rhs()[i];
        }
    }

    for v in dense.iter_mut() {
        if v.abs() < COEF_DROP_TOL {
            *v = 0.0;
        }
    }
    let coefficients = SparseRow::from_dense(&dense);
    if coefficients.is_empty() {
        return Ok(None);
    }
    let max_abs = coefficients.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let min_abs = coefficients
        .values
        .iter()
        .fold(f64::INFINITY, |a, v| a.min(v.abs()));
    if max_abs / min_abs > MAX_DYNAMISM {
        return Ok(None);
    }
    let cut = GmiCut {
        violation_at_source: rhs - coefficients.dot(&sol.x[..n]),
        coefficients,
        rhs,
        source_var,
    };
    if cut.violation_at_source < SEP_TOL {
        return Ok(None);
    }
    Ok(Some(cut))
}
