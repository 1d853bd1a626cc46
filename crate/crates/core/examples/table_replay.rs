//! Aggregates the bundled per-trial reference table: means, paired
//! improvements, coverage and per-view quartiles.

use floor_occupancy::eval::{
    coverage_curve, load_table_pairs, paired_delta, quartiles, summarize_table,
};
use floor_occupancy::prelude::*;

fn main() -> Result<()> {
    let pairs = load_table_pairs(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/table2.csv"))?;
    let d = paired_delta(&pairs.iter().map(|p| (p.dbf, p.proposed)).collect::<Vec<_>>())?;
    println!("{} trials: mean dbf {:.3}, mean proposed {:.3}", pairs.len(), d.mean_baseline, d.mean_proposed);
    println!("proposed >= dbf in {}/{}", d.improved_or_equal, pairs.len());
    for row in summarize_table(&pairs).iter().filter(|r| r.scope == "Overall") {
        println!("subject {}: {:.2} -> {:.2}", row.subject, row.dbf, row.proposed);
    }
    let taus = [0.5, 0.7, 0.9, 1.0];
    let dbf: Vec<f64> = pairs.iter().map(|p| p.dbf).collect();
    let prop: Vec<f64> = pairs.iter().map(|p| p.proposed).collect();
    for (a, b) in coverage_curve(&dbf, &taus)?.iter().zip(coverage_curve(&prop, &taus)?) {
        println!("coverage at τ = {:.1}: dbf {:.3}, proposed {:.3}", a.tau, a.coverage, b.coverage);
    }
    for view in ["TV", "Window"] {
        let q = quartiles(&pairs.iter().filter(|p| p.view == view).map(|p| p.proposed).collect::<Vec<_>>())?;
        println!("{view}: proposed median {:.2} (IQR {:.2}-{:.2})", q.median, q.q1, q.q3);
    }
    Ok(())
}
