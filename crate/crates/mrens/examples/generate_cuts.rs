//! Separate one round of Gomory mixed-integer cuts at a fractional LP
//! optimum and show that each cut keeps every feasible integer point.

use mrens::gmi::{cut_violation, generate_gmi_round, DEFAULT_CUTS_PER_ROUND};
use mrens::model::{MilpModel, SparseRow};
use mrens::simplex::{solve_lp, DEFAULT_ITERATION_LIMIT};

fn main() {
    // max x1 + x2  s.t.  3 x1 + 2 x2 <= 6,  x1 + 3 x2 <= 4, x integer in [0,3]^2
    let model = MilpModel::new(
        "demo-cuts",
        vec![-1.0, -1.0],
        vec![
            SparseRow::from_dense(&[-3.0, -2.0]),
            SparseRow::from_dense(&[-1.0, -3.0]),
        ],
        vec![-6.0, -4.0],
        vec![0.0, 0.0],
        vec![3.0, 3.0],
        vec![true, true],
    )
    .unwrap();

    let sol = solve_lp(&model.lp_relaxation(), None, None, DEFAULT_ITERATION_LIMIT).unwrap();
    let x = sol.structural(model.num_vars());
    println!("fractional LP optimum: {x:?} (objective {})", sol.objective_value);

    let cuts = generate_gmi_round(&model, &sol, DEFAULT_CUTS_PER_ROUND).unwrap();
    for (i, cut) in cuts.iter().enumerate() {
        println!(
            "cut {i}: {:?} >= {:.6}  (violation at optimum {:.6})",
            cut.coefficients, cut.rhs, cut.violation_at_source
        );
        for x1 in 0..=3 {
            for x2 in 0..=3 {
                let p = [x1 as f64, x2 as f64];
                if model.check_feasible(&p, 1e-9).unwrap() {
                    assert!(cut_violation(cut, &p) <= 1e-8, "cut removed {p:?}");
                }
            }
        }
    }
    println!("all {} cuts valid for every feasible integer point", cuts.len());
}
