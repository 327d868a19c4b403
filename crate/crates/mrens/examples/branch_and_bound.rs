//! Solve a knapsack sub-MILP with presolve and branch and bound under
//! working limits, then re-solve without limits to compare.

use mrens::model::{MilpModel, SparseRow};
use mrens::subsolver::{branch_and_bound, presolve, PresolveOutcome, WorkingLimits};

fn main() {
    // subset-sum knapsack with a flat LP bound: deliberately deep tree
    let n = 8;
    let weights: Vec<f64> = (0..n).map(|i| (2 * i + 3) as f64).collect();
    let capacity = weights.iter().sum::<f64>() / 2.0 + 0.5;
    let model = MilpModel::new(
        "deep-knapsack",
        weights.iter().map(|w| -w).collect(),
        vec![SparseRow::from_dense(
            &weights.iter().map(|w| -w).collect::<Vec<_>>(),
        )],
        vec![-capacity],
        vec![0.0; n],
        vec![1.0; n],
        vec![true; n],
    )
    .unwrap();

    let pres = presolve(&model).unwrap();
    println!("presolve fixed fraction: {:.2}", pres.fixed_fraction_total);
    let reduced = match pres.outcome {
        PresolveOutcome::Reduced { model, .. } => model,
        PresolveOutcome::Infeasible => {
            println!("presolve proved infeasibility");
            return;
        }
    };

    let capped = branch_and_bound(
        &reduced,
        &WorkingLimits {
            node_limit: 50,
            ..WorkingLimits::unlimited()
        },
        None,
    )
    .unwrap();
    println!(
        "node limit 50 : status {:?}, nodes {}, best {:?}",
        capped.status,
        capped.nodes_processed,
        capped.best_solution.as_ref().map(|s| s.objective_value)
    );

    let full = branch_and_bound(&reduced, &WorkingLimits::unlimited(), None).unwrap();
    println!(
        "unlimited     : status {:?}, nodes {}, best {:?}",
        full.status,
        full.nodes_processed,
        full.best_solution.as_ref().map(|s| s.objective_value)
    );
}
