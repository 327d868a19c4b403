//! Solve a small bounded LP with the primal simplex and print the vertex.
//!
//! Rows are stored in `Ax >= b` orientation, so the two "<=" capacity
//! constraints below appear negated.

use mrens::model::{MilpModel, SparseRow};
use mrens::simplex::{solve_lp, DEFAULT_ITERATION_LIMIT};

fn main() {
    // max x1 + 2 x2  s.t.  3 x1 + 2 x2 <= 12,  x1 + 2 x2 <= 6,  x in [0,4]^2
    let model = MilpModel::new(
        "demo-lp",
        vec![-1.0, -2.0],
        vec![
            SparseRow::from_dense(&[-3.0, -2.0]),
            SparseRow::from_dense(&[-1.0, -2.0]),
        ],
        vec![-12.0, -6.0],
        vec![0.0, 0.0],
        vec![4.0, 4.0],
        vec![false, false],
    )
    .unwrap();

    let sol = solve_lp(&model, None, None, DEFAULT_ITERATION_LIMIT).unwrap();
    let x = sol.structural(model.num_vars());
    println!("status      : {:?}", sol.status);
    println!("objective   : {}", sol.objective_value);
    println!("solution    : {x:?}");
    println!("iterations  : {}", sol.iterations);
}
