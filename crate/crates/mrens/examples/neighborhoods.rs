//! Build single-reference and multi-reference neighborhoods from the same
//! reference set and compare the resulting integer intervals and fixing
//! rates.

use mrens::model::MilpModel;
use mrens::neighborhood::{fixing_rate, mrens_bounds, rens_bounds};

fn main() {
    let model = MilpModel::new(
        "demo-box",
        vec![0.0; 4],
        vec![],
        vec![],
        vec![0.0; 4],
        vec![5.0; 4],
        vec![true; 4],
    )
    .unwrap();

    let references = vec![
        vec![1.2, 2.3, 0.5, 4.0],
        vec![2.2, 2.7, 0.5, 4.0],
        vec![1.7, 2.5, 0.5, 4.0],
    ];

    let single = rens_bounds(&model, &references[0]).unwrap();
    let multi = mrens_bounds(&model, &references).unwrap();

    println!("variable  single-ref        multi-ref");
    for k in 0..4 {
        println!(
            "x{}        [{}, {}]            [{}, {}]",
            k, single.var_lower[k], single.var_upper[k], multi.var_lower[k], multi.var_upper[k]
        );
    }
    println!(
        "fixing rate: single {:.2}, multi {:.2}",
        fixing_rate(&single, &model),
        fixing_rate(&multi, &model)
    );
}
