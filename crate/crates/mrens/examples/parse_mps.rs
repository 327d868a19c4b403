//! Parse an MPS file, print the model's shape, and round-trip it through
//! the writer.

use std::path::Path;

use mrens::mps::{parse_mps, write_mps};

fn main() {
    let path = std::env::args().nth(1).map(std::path::PathBuf::from).unwrap_or_else(|| {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/mixed4.mps")
    });
    let text = std::fs::read_to_string(&path).unwrap();
    let model = match parse_mps(&text) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            std::process::exit(2);
        }
    };
    println!("name      : {}", model.name);
    println!("variables : {} ({} integer)", model.num_vars(), model.num_integers());
    println!("rows      : {} (normalized to Ax >= b)", model.num_rows());
    for (j, name) in model.var_names().iter().enumerate() {
        println!(
            "  {:<8} in [{}, {}]{}",
            name,
            model.lower()[j],
            model.upper()[j],
            if model.is_integer(j) { " integer" } else { "" }
        );
    }
    let rewritten = write_mps(&model);
    let reparsed = parse_mps(&rewritten).unwrap();
    println!(
        "round-trip: {} vars, {} rows, identical shape: {}",
        reparsed.num_vars(),
        reparsed.num_rows(),
        reparsed.num_vars() == model.num_vars() && reparsed.num_rows() == model.num_rows()
    );
}
