//! End-to-end acceptance suite. Each test checks one advertised guarantee
//! at its stated tolerance against the independent oracles in
//! `common` and prints one pass line on success.

mod common;

use common::{
    brute_force_optimum, enumerate_feasible_points, random_bounded_lp, random_pure_integer_model,
    vertex_enumeration_lp,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use mrens::gmi::{cut_violation, generate_gmi_round, DEFAULT_CUTS_PER_ROUND};
use mrens::harness::{run_experiment, write_reports, ExperimentConfig, ExperimentMode, Instance};
use mrens::metrics::{
    categorize_and_compare, format_comparison, shifted_geomean, summarize_calls, TIME_SHIFT,
};
use mrens::model::{MilpModel, SparseRow};
use mrens::neighborhood::{build_submilp, mrens_bounds, rens_bounds, NeighborhoodMode};
use mrens::refgen::{run_relax_and_cut, RefGenConfig, RefGenStatus, ReferenceSet};
use mrens::simplex::{solve_lp, LpStatus, DEFAULT_ITERATION_LIMIT};
use mrens::subsolver::{
    branch_and_bound, run_heuristic_call, CallGates, SubsolveStatus, WorkingLimits,
};

fn boxed_integer_model(lower: Vec<f64>, upper: Vec<f64>) -> MilpModel {
    let n = lower.len();
    MilpModel::new("box", vec![0.0; n], vec![], vec![], lower, upper, vec![true; n]).unwrap()
}

#[test]
fn criterion_01_single_reference_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=6);
        let lower: Vec<f64> = (0..n).map(|_| rng.gen_range(-5..1) as f64).collect();
        let upper: Vec<f64> = lower
            .iter()
            .map(|&l| l + rng.gen_range(1..8) as f64)
            .collect();
        let model = boxed_integer_model(lower.clone(), upper.clone());
        let x0: Vec<f64> = (0..n)
            .map(|j| rng.gen_range(lower[j]..=upper[j]))
            .collect();
        let r = rens_bounds(&model, &x0).unwrap();
        let m = mrens_bounds(&model, std::slice::from_ref(&x0)).unwrap();
        assert_eq!(r.indices, m.indices);
        assert_eq!(r.var_lower, m.var_lower, "lower bounds differ at {x0:?}");
        assert_eq!(r.var_upper, m.var_upper, "upper bounds differ at {x0:?}");
        assert_eq!(r.fixed_count, m.fixed_count);
    }
    println!("[acceptance] criterion 1 (single-reference equivalence, 10000 draws): pass");
}

#[test]
fn criterion_02_interval_rule_fidelity() {
    // (references, expected interval); model bounds are a wide [-10, 10]
    let cases: Vec<(Vec<f64>, (f64, f64))> = vec![
        (vec![1.2, 2.2], (2.0, 2.0)),
        (vec![2.3, 2.7], (2.0, 3.0)),
        (vec![0.5, 0.5], (0.0, 1.0)),
        (vec![1.0, 1.0], (1.0, 1.0)),
        (vec![1.0, 2.0], (1.0, 2.0)),
        (vec![1.0, 1.5], (1.0, 2.0)),
        (vec![0.2, 3.8], (1.0, 3.0)),
        (vec![-1.5, -0.5], (-1.0, -1.0)),
        (vec![-2.3, -1.9], (-3.0, -1.0)),
        (vec![2.9999999, 3.0000001], (3.0, 3.0)),
        (vec![1.9999999, 2.5], (2.0, 3.0)),
        (vec![0.0, 1.0000001], (0.0, 1.0)),
        (vec![1.5, 2.5], (2.0, 2.0)),
        (vec![1.5, 2.4999], (1.0, 3.0)),
        (vec![0.3, 0.7], (0.0, 1.0)),
        (vec![4.2, 4.2], (4.0, 5.0)),
        (vec![-0.5, 0.5], (0.0, 0.0)),
        (vec![2.0, 4.0], (2.0, 4.0)),
        (vec![2.1, 4.9], (3.0, 4.0)),
        (vec![5.5, 5.6], (5.0, 6.0)),
        (vec![-4.7, -4.6], (-5.0, -4.0)),
        (vec![0.9999999, 1.0000001], (1.0, 1.0)),
        (vec![1.2, 1.7, 2.2], (2.0, 2.0)),
        (vec![2.3, 2.5, 2.7], (2.0, 3.0)),
    ];
    assert!(cases.len() >= 20);
    let model = boxed_integer_model(vec![-10.0], vec![10.0]);
    for (refs, (lo, hi)) in &cases {
        let references: Vec<Vec<f64>> = refs.iter().map(|&v| vec![v]).collect();
        let b = mrens_bounds(&model, &references).unwrap();
        assert_eq!(
            (b.var_lower[0], b.var_upper[0]),
            (*lo, *hi),
            "references {refs:?}"
        );
    }
    println!(
        "[acceptance] criterion 2 (interval rule fidelity, {} table cases): pass",
        cases.len()
    );
}

#[test]
fn criterion_03_gmi_validity_and_separation() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut cuts_checked = 0usize;
    for trial in 0..50 {
        let model = random_pure_integer_model(&mut rng, 5, 4);
        let sol = solve_lp(&model.lp_relaxation(), None, None, DEFAULT_ITERATION_LIMIT).unwrap();
        if sol.status != LpStatus::Optimal {
            continue;
        }
        let cuts = generate_gmi_round(&model, &sol, DEFAULT_CUTS_PER_ROUND).unwrap();
        if cuts.is_empty() {
            continue;
        }
        let feasible = enumerate_feasible_points(&model);
        let x_frac = sol.structural(model.num_vars());
        for cut in &cuts {
            assert!(
                cut_violation(cut, x_frac) >= 1e-6,
                "trial {trial}: cut not separating at the fractional optimum"
            );
            for point in &feasible {
                assert!(
                    cut_violation(cut, point) <= 1e-8,
                    "trial {trial}: cut {cut:?} cuts off feasible point {point:?}"
                );
            }
            cuts_checked += 1;
        }
    }
    assert!(cuts_checked >= 20, "too few cuts exercised: {cuts_checked}");
    println!(
        "[acceptance] criterion 3 (GMI validity and separation, {cuts_checked} cuts over 50 models): pass"
    );
}

#[test]
fn criterion_04_lp_oracle_and_warm_starts() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut optima = 0usize;
    for trial in 0..200 {
        let model = random_bounded_lp(&mut rng, 6, 4);
        let sol = solve_lp(&model, None, None, DEFAULT_ITERATION_LIMIT).unwrap();
        match vertex_enumeration_lp(&model) {
            None => assert_eq!(
                sol.status,
                LpStatus::Infeasible,
                "trial {trial}: oracle says infeasible"
            ),
            Some(oracle) => {
                assert_eq!(sol.status, LpStatus::Optimal, "trial {trial}");
                assert!(
                    (sol.objective_value - oracle).abs() <= 1e-6,
                    "trial {trial}: simplex {} vs oracle {oracle}",
                    sol.objective_value
                );
                optima += 1;
                // warm-started re-solve under a perturbed objective agrees
                // with a cold solve
                let new_obj: Vec<f64> = model
                    .objective()
                    .iter()
                    .map(|&c| c + rng.gen_range(-2..3) as f64)
                    .collect();
                let warm = solve_lp(
                    &model,
                    Some(&new_obj),
                    Some(&sol.basis),
                    DEFAULT_ITERATION_LIMIT,
                )
                .unwrap();
                let cold = solve_lp(&model, Some(&new_obj), None, DEFAULT_ITERATION_LIMIT).unwrap();
                assert_eq!(warm.status, cold.status, "trial {trial}");
                if cold.status == LpStatus::Optimal {
                    assert!(
                        (warm.objective_value - cold.objective_value).abs() <= 1e-6,
                        "trial {trial}: warm {} vs cold {}",
                        warm.objective_value,
                        cold.objective_value
                    );
                }
            }
        }
    }
    assert!(optima >= 100, "too few feasible LPs: {optima}");
    println!(
        "[acceptance] criterion 4 (LP vertex-oracle equivalence + warm starts, 200 LPs): pass"
    );
}

#[test]
fn criterion_05_lagrangian_dual_validity() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut checked = 0usize;
    while checked < 20 {
        let model = random_pure_integer_model(&mut rng, 4, 3);
        let Some((z_star, _)) = brute_force_optimum(&model) else {
            continue;
        };
        let refs = run_relax_and_cut(&model, &RefGenConfig::default()).unwrap();
        if refs.status != RefGenStatus::Ok {
            continue;
        }
        // best_dual_value is the max over all per-iteration dual values, so
        // the bound holding for it holds for every iteration
        assert!(
            refs.best_dual_value <= z_star + 1e-6,
            "dual {} exceeds optimum {z_star}",
            refs.best_dual_value
        );
        let relaxation = model.lp_relaxation();
        for x in &refs.all_solutions {
            assert!(
                relaxation.check_feasible(x, 1e-6).unwrap(),
                "reference violates the original rows/bounds: {x:?}"
            );
        }
        checked += 1;
    }
    println!(
        "[acceptance] criterion 5 (Lagrangian dual bound + feasible-region preservation, 20 models): pass"
    );
}

#[test]
fn criterion_06_branch_and_bound_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for trial in 0..100 {
        // up to 6 variables with domains of at most 4 values each: at most
        // 4^6 points, i.e. 12 binary-equivalent variables
        let model = random_pure_integer_model(&mut rng, 6, 4);
        let oracle = brute_force_optimum(&model);
        let result = branch_and_bound(&model, &WorkingLimits::unlimited(), None).unwrap();
        match oracle {
            None => assert_eq!(
                result.status,
                SubsolveStatus::Infeasible,
                "trial {trial}: oracle says infeasible"
            ),
            Some((z_star, _)) => {
                assert_eq!(result.status, SubsolveStatus::Optimal, "trial {trial}");
                let got = result.best_solution.unwrap().objective_value;
                assert!(
                    (got - z_star).abs() <= 1e-6,
                    "trial {trial}: solver {got} vs oracle {z_star}"
                );
            }
        }
    }
    println!("[acceptance] criterion 6 (branch-and-bound oracle equivalence, 100 models): pass");
}

#[test]
fn criterion_07_working_limit_semantics() {
    // a subset-sum knapsack with an unreachable capacity: the LP bound is
    // flat, pruning is weak, and the full best-bound tree is deep
    let n = 8;
    let weights: Vec<f64> = (0..n).map(|i| (2 * i + 3) as f64).collect();
    let capacity = weights.iter().sum::<f64>() / 2.0 + 0.5;
    let model = MilpModel::new(
        "deep",
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

    let full = branch_and_bound(&model, &WorkingLimits::unlimited(), None).unwrap();
    assert_eq!(full.status, SubsolveStatus::Optimal);
    let total_nodes = full.nodes_processed;
    assert!(total_nodes > 50, "tree too shallow: {total_nodes} nodes");

    // termination precisely at the node limit
    let capped = branch_and_bound(
        &model,
        &WorkingLimits {
            node_limit: 50,
            ..WorkingLimits::unlimited()
        },
        None,
    )
    .unwrap();
    assert_eq!(capped.nodes_processed, 50);
    assert_eq!(capped.status, SubsolveStatus::FeasibleLimitHit);

    // a stalling limit of 1 stops almost immediately on this fractional root
    let stall_one = branch_and_bound(
        &model,
        &WorkingLimits {
            stalling_node_limit: 1,
            ..WorkingLimits::unlimited()
        },
        None,
    )
    .unwrap();
    assert_eq!(stall_one.status, SubsolveStatus::FeasibleLimitHit);
    assert!(stall_one.nodes_processed <= 2);

    // reset-on-improvement: some stalling limit below the total node count
    // still reaches proven optimality, which is only possible if incumbent
    // improvements reset the counter along the way
    let mut reset_seen = false;
    for stall_limit in (1..total_nodes).rev() {
        let r = branch_and_bound(
            &model,
            &WorkingLimits {
                stalling_node_limit: stall_limit,
                ..WorkingLimits::unlimited()
            },
            None,
        )
        .unwrap();
        if r.status == SubsolveStatus::Optimal {
            assert!(
                r.nodes_processed > stall_limit,
                "limit {stall_limit} never binding, pick a smaller one"
            );
            reset_seen = true;
            break;
        }
    }
    assert!(reset_seen, "no stalling limit demonstrated a counter reset");
    println!("[acceptance] criterion 7 (node-limit and stall-reset semantics): pass");
}

#[test]
fn criterion_08_rens_infeasible_mrens_feasible_family() {
    // family: x1 + 2 x2 = k (two >= rows) over integer [0, k]^2 for odd k.
    // The reference (0, k/2) fixes x1 = 0, which forces 2 x2 = k: no
    // integer solution, so the single-reference sub-MILP is infeasible.
    // Spreading references widen the intervals enough to contain feasible
    // points.
    for k in [3_i64, 5, 7] {
        let kf = k as f64;
        let model = MilpModel::new(
            format!("family{k}"),
            vec![0.0, 0.0],
            vec![
                SparseRow::from_dense(&[1.0, 2.0]),
                SparseRow::from_dense(&[-1.0, -2.0]),
            ],
            vec![kf, -kf],
            vec![0.0, 0.0],
            vec![kf, kf],
            vec![true, true],
        )
        .unwrap();
        let references = vec![
            vec![0.0, kf / 2.0],
            vec![kf / 2.0, kf / 4.0],
            vec![kf, 0.0],
        ];

        // enumeration check of both claims
        let rens = rens_bounds(&model, &references[0]).unwrap();
        let rens_sub = build_submilp(&model, &rens).unwrap();
        assert!(
            enumerate_feasible_points(&rens_sub).is_empty(),
            "k={k}: single-reference sub-MILP unexpectedly feasible"
        );
        let mrens = mrens_bounds(&model, &references).unwrap();
        let mrens_sub = build_submilp(&model, &mrens).unwrap();
        assert!(
            !enumerate_feasible_points(&mrens_sub).is_empty(),
            "k={k}: multi-reference sub-MILP unexpectedly infeasible"
        );

        // the full heuristic call agrees
        let refs = ReferenceSet {
            all_solutions: references.clone(),
            selected: references,
            integral_found: vec![],
            status: RefGenStatus::Ok,
            best_dual_value: f64::NEG_INFINITY,
            lp_iterations: 0,
        };
        let gates = CallGates { min_int_fixing: 0.0 };
        let limits = WorkingLimits {
            min_total_fixing_after_presolve: 0.0,
            ..WorkingLimits::default()
        };
        let r = run_heuristic_call(&model, &refs, NeighborhoodMode::Rens, &limits, &gates).unwrap();
        assert!(r.executed && !r.solution_found, "k={k}");
        let m =
            run_heuristic_call(&model, &refs, NeighborhoodMode::Mrens, &limits, &gates).unwrap();
        assert!(m.executed && m.solution_found, "k={k}");
        assert!(model
            .check_feasible(&m.solution.unwrap().values, 1e-9)
            .unwrap());
    }
    println!(
        "[acceptance] criterion 8 (single-reference infeasible, multi-reference feasible family): pass"
    );
}

fn demo_instances() -> Vec<Instance> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    ["knap6.mps", "mixed4.mps"]
        .iter()
        .map(|f| {
            let text = std::fs::read_to_string(dir.join(f)).unwrap();
            Instance {
                id: f.trim_end_matches(".mps").to_string(),
                model: mrens::mps::parse_mps(&text).unwrap(),
            }
        })
        .collect()
}

#[test]
fn criterion_09_reporting_fidelity() {
    // the per-call summary regenerates exactly from raw records
    let instances = demo_instances();
    let config = ExperimentConfig::default();
    let metrics = run_experiment(&instances, &config);
    assert_eq!(metrics.summary, summarize_calls(&metrics.call_records));

    // the comparison table regenerates exactly from raw run records
    let baseline = run_experiment(
        &instances,
        &ExperimentConfig {
            mode: ExperimentMode::Off,
            ..ExperimentConfig::default()
        },
    );
    let t1 = categorize_and_compare(&metrics, &baseline).unwrap();
    let t2 = categorize_and_compare(&metrics, &baseline).unwrap();
    assert_eq!(format_comparison(&t1), format_comparison(&t2));

    // stated aggregation identity
    let g = shifted_geomean(&[1.0, 9.0], TIME_SHIFT).unwrap();
    assert!((g - (20.0f64.sqrt() - 1.0)).abs() <= 1e-9);

    // two-decimal quotient style
    for row in &t1.rows {
        let rendered = format!("{:.2}", row.time_quotient);
        assert!(format_comparison(&t1).contains(&rendered));
    }
    println!("[acceptance] criterion 9 (reporting fidelity and aggregation identities): pass");
}

#[test]
fn criterion_10_end_to_end_determinism() {
    let instances = demo_instances();
    let config = ExperimentConfig::default();
    let m1 = run_experiment(&instances, &config);
    let m2 = run_experiment(&instances, &config);
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    write_reports(&m1, d1.path()).unwrap();
    write_reports(&m2, d2.path()).unwrap();
    for f in ["calls.csv", "runs.csv", "summary.json"] {
        let a = std::fs::read(d1.path().join(f)).unwrap();
        let b = std::fs::read(d2.path().join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between identical runs");
        assert!(!a.is_empty());
    }
    println!("[acceptance] criterion 10 (byte-identical reports across identical runs): pass");
}
