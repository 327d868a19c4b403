//! Run the relax-and-cut loop and print the reference solutions it
//! collects: each iteration separates GMI cuts at the current LP optimum,
//! prices them into the objective with Lagrangian multipliers, and
//! re-solves over the unchanged feasible region.

use mrens::model::{MilpModel, SparseRow};
use mrens::refgen::{run_relax_and_cut, RefGenConfig};

fn main() {
    let model = MilpModel::new(
        "demo-refs",
        vec![-5.0, -4.0, -3.0, -2.0],
        vec![
            SparseRow::from_dense(&[-2.0, -3.0, -1.0, -2.0]),
            SparseRow::from_dense(&[-4.0, -1.0, -2.0, -1.0]),
        ],
        vec![-7.0, -6.0],
        vec![0.0; 4],
        vec![2.0; 4],
        vec![true; 4],
    )
    .unwrap();

    let refs = run_relax_and_cut(&model, &RefGenConfig::default()).unwrap();
    println!("status            : {:?}", refs.status);
    println!("recorded optima   : {}", refs.all_solutions.len());
    for (i, x) in refs.all_solutions.iter().enumerate() {
        println!("  x^{i} = {x:?}");
    }
    println!("selected references ({}):", refs.selected.len());
    for x in &refs.selected {
        println!("  {x:?}");
    }
    println!("best dual bound   : {}", refs.best_dual_value);
    println!("integral captured : {}", refs.integral_found.len());
}
