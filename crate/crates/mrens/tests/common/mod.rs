//! Independent test oracles: brute-force enumeration over bounded integer
//! boxes and LP optimization by vertex enumeration. Nothing here touches
//! the simplex or branch-and-bound implementation paths under test.

#![allow(dead_code)]

use mrens::model::{MilpModel, SparseRow};
use rand::prelude::*;

/// All feasible integer points of a bounded pure-integer model, by direct
/// enumeration of the integer box.
pub fn enumerate_feasible_points(model: &MilpModel) -> Vec<Vec<f64>> {
    let n = model.num_vars();
    assert!(
        (0..n).all(|j| model.is_integer(j)),
        "enumeration oracle requires a pure-integer model"
    );
    assert!(
        (0..n).all(|j| model.lower()[j].is_finite() && model.upper()[j].is_finite()),
        "enumeration oracle requires finite bounds"
    );
    let lows: Vec<i64> = model.lower().iter().map(|&l| l.round() as i64).collect();
    let highs: Vec<i64> = model.upper().iter().map(|&u| u.round() as i64).collect();
    let mut feasible = Vec::new();
    let mut current: Vec<i64> = lows.clone();
    'outer: loop {
        let x: Vec<f64> = current.iter().map(|&v| v as f64).collect();
        let ok = model
            .rows()
            .iter()
            .zip(model.rhs())
            .all(|(row, &b)| row.dot(&x) >= b - 1e-9);
        if ok {
            feasible.push(x);
        }
        // mixed-radix increment
        for j in 0..n {
            if current[j] < highs[j] {
                current[j] += 1;
                continue 'outer;
            }
            current[j] = lows[j];
        }
        break;
    }
    feasible
}

/// Exact optimum of a bounded pure-integer model by brute force.
pub fn brute_force_optimum(model: &MilpModel) -> Option<(f64, Vec<f64>)> {
    enumerate_feasible_points(model)
        .into_iter()
        .map(|x| (model.objective_value(&x), x))
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

/// Solves a dense square linear system by Gaussian elimination with
/// partial pivoting; None when singular.
fn solve_dense(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].abs();
        for r in col + 1..n {
            if m[r * n + col].abs() > best {
                best = m[r * n + col].abs();
                piv = r;
            }
        }
        if best < 1e-10 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            rhs.swap(col, piv);
        }
        for r in col + 1..n {
            let f = m[r * n + col] / m[col * n + col];
            if f != 0.0 {
                for k in col..n {
                    m[r * n + k] -= f * m[col * n + k];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut v = rhs[r];
        for k in r + 1..n {
            v -= m[r * n + k] * x[k];
        }
        x[r] = v / m[r * n + r];
    }
    Some(x)
}

/// Minimum objective of a box-bounded LP by enumerating all candidate
/// vertices (every choice of n active constraints among rows and finite
/// bounds). Returns None when no feasible vertex exists. Requires finite
/// bounds on all variables so the optimum is attained at a vertex.
pub fn vertex_enumeration_lp(model: &MilpModel) -> Option<f64> {
    let n = model.num_vars();
    assert!(
        (0..n).all(|j| model.lower()[j].is_finite() && model.upper()[j].is_finite()),
        "vertex oracle requires a bounded box"
    );
    // candidate hyperplanes: (dense normal, rhs)
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for (row, &b) in model.rows().iter().zip(model.rhs()) {
        let mut dense = vec![0.0; n];
        for (j, a) in row.iter() {
            dense[j] = a;
        }
        planes.push((dense, b));
    }
    for j in 0..n {
        let mut unit = vec![0.0; n];
        unit[j] = 1.0;
        planes.push((unit.clone(), model.lower()[j]));
        planes.push((unit, model.upper()[j]));
    }
    let k = planes.len();
    let mut best: Option<f64> = None;
    let mut combo: Vec<usize> = (0..n).collect();
    if k < n {
        return None;
    }
    loop {
        let mut a = vec![0.0; n * n];
        let mut b = vec![0.0; n];
        for (r, &p) in combo.iter().enumerate() {
            a[r * n..(r + 1) * n].copy_from_slice(&planes[p].0);
            b[r] = planes[p].1;
        }
        if let Some(x) = solve_dense(&a, &b, n) {
            let feasible = model
                .rows()
                .iter()
                .zip(model.rhs())
                .all(|(row, &rb)| row.dot(&x) >= rb - 1e-7)
                && (0..n).all(|j| {
                    x[j] >= model.lower()[j] - 1e-7 && x[j] <= model.upper()[j] + 1e-7
                });
            if feasible {
                let obj = model.objective_value(&x);
                best = Some(best.map_or(obj, |cur: f64| cur.min(obj)));
            }
        }
        // next combination of size n out of k
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if combo[i] != i + k - n {
                combo[i] += 1;
                for j in i + 1..n {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Random bounded pure-integer model with small coefficients.
pub fn random_pure_integer_model(rng: &mut impl Rng, max_vars: usize, max_rows: usize) -> MilpModel {
    let n = rng.gen_range(2..=max_vars);
    let m = rng.gen_range(1..=max_rows);
    let rows: Vec<SparseRow> = (0..m)
        .map(|_| {
            SparseRow::from_dense(
                &(0..n)
                    .map(|_| rng.gen_range(-4..5) as f64)
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let rhs: Vec<f64> = (0..m).map(|_| rng.gen_range(-6..4) as f64).collect();
    let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-5..6) as f64).collect();
    let upper: Vec<f64> = (0..n).map(|_| rng.gen_range(1..4) as f64).collect();
    MilpModel::new(
        "rand-int",
        objective,
        rows,
        rhs,
        vec![0.0; n],
        upper,
        vec![true; n],
    )
    .unwrap()
}

/// Random bounded-box LP with small integer data.
pub fn random_bounded_lp(rng: &mut impl Rng, max_vars: usize, max_rows: usize) -> MilpModel {
    let n = rng.gen_range(2..=max_vars);
    let m = rng.gen_range(1..=max_rows);
    let rows: Vec<SparseRow> = (0..m)
        .map(|_| {
            SparseRow::from_dense(
                &(0..n)
                    .map(|_| rng.gen_range(-3..4) as f64)
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let rhs: Vec<f64> = (0..m).map(|_| rng.gen_range(-8..3) as f64).collect();
    let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-5..6) as f64).collect();
    let lower: Vec<f64> = (0..n).map(|_| rng.gen_range(-2..1) as f64).collect();
    let upper: Vec<f64> = lower.iter().map(|&l| l + rng.gen_range(1..6) as f64).collect();
    MilpModel::new("rand-lp", objective, rows, rhs, lower, upper, vec![false; n]).unwrap()
}
