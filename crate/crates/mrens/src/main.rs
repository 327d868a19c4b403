//! Thin CLI over the experiment harness: parse MPS instances, run a batch
//! across seeds, and write CSV/JSON reports.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use mrens::harness::{run_experiment, write_reports, ExperimentConfig, ExperimentMode, Instance};
use mrens::mps::parse_mps;
use mrens::refgen::RefGenConfig;
use mrens::subsolver::{CallGates, WorkingLimits};

#[derive(Parser)]
#[command(name = "mrens", about = "MILP primal-heuristic experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve MPS instances across seeds and report heuristic metrics.
    Solve(SolveArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// MPS instance files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Heuristic setting.
    #[arg(long, default_value = "mrens")]
    mode: ExperimentMode,
    /// Comma-separated seed list.
    #[arg(long, default_value = "0,1,2,3,4", value_delimiter = ',')]
    seeds: Vec<u64>,
    /// Sub-solve node limit.
    #[arg(long, default_value_t = 5000)]
    node_limit: u64,
    /// Sub-solve stalling node limit.
    #[arg(long, default_value_t = 500)]
    stall_limit: u64,
    /// Minimum integer fixing rate for heuristic execution.
    #[arg(long, default_value_t = 0.5)]
    min_int_fixing: f64,
    /// Minimum total fixing rate after presolve.
    #[arg(long, default_value_t = 0.25)]
    min_total_fixing: f64,
    /// Relax-and-cut iterations for reference generation.
    #[arg(long, default_value_t = 20)]
    refgen_iters: usize,
    /// Sub-solve time limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Baseline full-solve node budget per instance run.
    #[arg(long, default_value_t = 100_000)]
    instance_node_limit: u64,
    /// Output directory for calls.csv, runs.csv, summary.json.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Solve(args) = cli.command;

    let mut instances = Vec::new();
    for path in &args.files {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                return ExitCode::from(2);
            }
        };
        match parse_mps(&text) {
            Ok(model) => instances.push(Instance {
                id: path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string()),
                model,
            }),
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
    }

    let config = ExperimentConfig {
        mode: args.mode,
        seeds: args.seeds,
        limits: WorkingLimits {
            node_limit: args.node_limit,
            stalling_node_limit: args.stall_limit,
            min_total_fixing_after_presolve: args.min_total_fixing,
            time_limit: args.time_limit.map(Duration::from_secs_f64),
        },
        gates: CallGates {
            min_int_fixing: args.min_int_fixing,
        },
        refgen: RefGenConfig {
            max_iterations: args.refgen_iters,
            ..RefGenConfig::default()
        },
        instance_node_limit: args.instance_node_limit,
    };

    let metrics = run_experiment(&instances, &config);
    if let Err(e) = write_reports(&metrics, &args.out) {
        eprintln!("failed to write reports: {e}");
        return ExitCode::FAILURE;
    }
    println!(
        "mode={} calls={} executed={:.1}% found={:.1}% best={:.1}% avg-fixed={:.1}%",
        metrics.mode,
        metrics.summary.calls,
        metrics.summary.executed_pct,
        metrics.summary.solution_found_pct,
        metrics.summary.best_found_pct,
        metrics.summary.mean_fixing_pct,
    );
    println!("reports written to {}", args.out.display());
    ExitCode::SUCCESS
}
