//! MILP problem data: objective, constraint rows in `Ax >= b` orientation,
//! variable bounds with infinity sentinels, and integrality marks.

use crate::{Error, Result, INT_TOL, OBJ_TOL};

/// One constraint row, stored sparse with strictly increasing column
/// indices and no explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseRow {
    /// Builds a row from unordered (index, value) pairs. Duplicate indices
    /// are summed, zero entries dropped.
    pub fn new(mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut indices = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        for (idx, val) in entries {
            if let (Some(last), Some(lv)) = (indices.last(), values.last_mut()) {
                if *last == idx {
                    *lv += val;
                    continue;
                }
            }
            indices.push(idx);
            values.push(val);
        }
        let mut row = SparseRow { indices, values };
        row.drop_zeros();
        row
    }

    pub fn from_dense(dense: &[f64]) -> Self {
        let entries = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .collect();
        SparseRow::new(entries)
    }

    fn drop_zeros(&mut self) {
        let mut i = 0;
        while i < self.values.len() {
            if self.values[i] == 0.0 {
                self.indices.remove(i);
                self.values.remove(i);
            } else {
                i += 1;
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.iter().map(|(j, a)| a * x[j]).sum()
    }

    pub fn scaled(&self, factor: f64) -> SparseRow {
        SparseRow {
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// The MILP `min c'x  s.t.  Ax >= b, l <= x <= u, x_j integral for j in I`.
///
/// Immutable after construction. Infinite bounds are `f64::INFINITY` /
/// `f64::NEG_INFINITY`, never large finite numbers. Integer variables with
/// finite bounds have their bounds rounded inward to integers at
/// construction.
#[derive(Debug, Clone)]
pub struct MilpModel {
    pub name: String,
    objective: Vec<f64>,
    rows: Vec<SparseRow>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    integer: Vec<bool>,
    var_names: Vec<String>,
    row_names: Vec<String>,
}

impl MilpModel {
    pub fn new(
        name: impl Into<String>,
        objective: Vec<f64>,
        rows: Vec<SparseRow>,
        rhs: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        integer: Vec<bool>,
    ) -> Result<Self> {
        let n = objective.len();
        if lower.len() != n || upper.len() != n || integer.len() != n {
            return Err(Error::contract("model vector lengths disagree"));
        }
        if rows.len() != rhs.len() {
            return Err(Error::contract("row/rhs count mismatch"));
        }
        for row in &rows {
            if row.indices.iter().any(|&j| j >= n) {
                return Err(Error::contract("row references column out of range"));
            }
        }
        let mut lower = lower;
        let mut upper = upper;
        for j in 0..n {
            if lower[j].is_nan() || upper[j].is_nan() {
                return Err(Error::contract("NaN bound"));
            }
            if lower[j] > upper[j] {
                return Err(Error::contract(format!(
                    "variable {j}: lower bound exceeds upper bound"
                )));
            }
            if integer[j] {
                if lower[j].is_finite() {
                    lower[j] = snap_int(lower[j], INT_TOL).ceil();
                }
                if upper[j].is_finite() {
                    upper[j] = snap_int(upper[j], INT_TOL).floor();
                }
                if lower[j] > upper[j] {
                    return Err(Error::contract(format!(
                        "variable {j}: integer bound rounding empties the domain"
                    )));
                }
            }
        }
        let var_names = (0..n).map(|j| format!("x{j}")).collect();
        let row_names = (0..rows.len()).map(|i| format!("r{i}")).collect();
        Ok(MilpModel {
            name: name.into(),
            objective,
            rows,
            rhs,
            lower,
            upper,
            integer,
            var_names,
            row_names,
        })
    }

    pub fn with_names(mut self, var_names: Vec<String>, row_names: Vec<String>) -> Result<Self> {
        if var_names.len() != self.num_vars() || row_names.len() != self.num_rows() {
            return Err(Error::contract("name vector lengths disagree"));
        }
        self.var_names = var_names;
        self.row_names = row_names;
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_integer(&self, j: usize) -> bool {
        self.integer[j]
    }

    pub fn integer_flags(&self) -> &[bool] {
        &self.integer
    }

    /// Indices of the integer variables, ascending.
    pub fn integer_indices(&self) -> Vec<usize> {
        (0..self.num_vars()).filter(|&j| self.integer[j]).collect()
    }

    pub fn num_integers(&self) -> usize {
        self.integer.iter().filter(|&&b| b).count()
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn row_names(&self) -> &[String] {
        &self.row_names
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// The LP relaxation: the same model with all integrality marks dropped.
    pub fn lp_relaxation(&self) -> MilpModel {
        let mut relaxed = self.clone();
        relaxed.integer.iter_mut().for_each(|b| *b = false);
        relaxed
    }

    /// Returns a copy with replacement bounds. Integer bounds are re-rounded
    /// by the constructor path.
    pub fn with_bounds(&self, lower: Vec<f64>, upper: Vec<f64>) -> Result<MilpModel> {
        MilpModel::new(
            self.name.clone(),
            self.objective.clone(),
            self.rows.clone(),
            self.rhs.clone(),
            lower,
            upper,
            self.integer.clone(),
        )
        .and_then(|m| m.with_names(self.var_names.clone(), self.row_names.clone()))
    }

    /// True iff `x` satisfies every row within `tol`, every bound within
    /// `tol`, and every integer variable is within the integrality tolerance
    /// of an integer.
    pub fn check_feasible(&self, x: &[f64], tol: f64) -> Result<bool> {
        if x.len() != self.num_vars() {
            return Err(Error::contract("check_feasible: dimension mismatch"));
        }
        for (row, &b) in self.rows.iter().zip(&self.rhs) {
            if row.dot(x) < b - tol {
                return Ok(false);
            }
        }
        for j in 0..self.num_vars() {
            if x[j] < self.lower[j] - tol || x[j] > self.upper[j] + tol {
                return Ok(false);
            }
            if self.integer[j] && (x[j] - x[j].round()).abs() > INT_TOL {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// True iff every indexed entry of `x` is within `tol` of an integer.
pub fn is_integral(x: &[f64], integer_set: &[usize], tol: f64) -> bool {
    integer_set
        .iter()
        .all(|&j| (x[j] - x[j].round()).abs() <= tol)
}

/// Rounds `v` to the nearest integer when it is within `tol` of one.
pub fn snap_int(v: f64, tol: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= tol {
        r
    } else {
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    Fractional,
    Integral,
}

/// A solution vector together with its objective value.
#[derive(Debug, Clone)]
pub struct Solution {
    pub values: Vec<f64>,
    pub objective_value: f64,
    pub kind: SolutionKind,
}

impl Solution {
    /// Classifies the point against the model's integer set and checks the
    /// objective for consistency.
    pub fn new(model: &MilpModel, values: Vec<f64>) -> Result<Self> {
        if values.len() != model.num_vars() {
            return Err(Error::contract("solution: dimension mismatch"));
        }
        let objective_value = model.objective_value(&values);
        let kind = if is_integral(&values, &model.integer_indices(), INT_TOL) {
            SolutionKind::Integral
        } else {
            SolutionKind::Fractional
        };
        debug_assert!((objective_value - model.objective_value(&values)).abs() <= OBJ_TOL);
        Ok(Solution {
            values,
            objective_value,
            kind,
        })
    }
}
