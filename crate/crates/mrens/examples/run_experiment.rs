//! Run the full experiment harness on the bundled MPS instances under
//! three settings and print a comparison table of the two heuristic modes.

use std::path::Path;

use mrens::harness::{run_experiment, write_reports, ExperimentConfig, ExperimentMode, Instance};
use mrens::metrics::{categorize_and_compare, format_comparison};
use mrens::mps::parse_mps;

fn load_instances() -> Vec<Instance> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    ["knap6.mps", "mixed4.mps", "parity5.mps"]
        .iter()
        .map(|f| {
            let text = std::fs::read_to_string(dir.join(f)).unwrap();
            Instance {
                id: f.trim_end_matches(".mps").to_string(),
                model: parse_mps(&text).unwrap(),
            }
        })
        .collect()
}

fn main() {
    let instances = load_instances();
    let config_for = |mode| ExperimentConfig {
        mode,
        ..ExperimentConfig::default()
    };

    let rens = run_experiment(&instances, &config_for(ExperimentMode::Rens));
    let mrens = run_experiment(&instances, &config_for(ExperimentMode::Mrens));

    for metrics in [&rens, &mrens] {
        let s = &metrics.summary;
        println!(
            "mode={:<6} calls={} executed={:.1}% found={:.1}% best={:.1}% avg-fixed={:.1}%",
            metrics.mode, s.calls, s.executed_pct, s.solution_found_pct, s.best_found_pct,
            s.mean_fixing_pct
        );
    }

    let table = categorize_and_compare(&mrens, &rens).unwrap();
    println!("\nmrens (left) vs rens (right):");
    print!("{}", format_comparison(&table));

    let out = Path::new("target").join("experiment-reports");
    write_reports(&mrens, &out).unwrap();
    println!("\nreports written to {}", out.display());
}
