//! Tunes both pipelines on the synthetic clutter benchmark and compares
//! their frame-positive rates and empty-room false-alarm rates.
//!
//! cargo run --release --example clutter_benchmark

use floor_occupancy::bench::{tune, ClutterBenchmark, ScoredSet};
use floor_occupancy::eval::{frame_fpr, frame_positive_rate, k_grid, DEFAULT_FPR_CAP};
use floor_occupancy::prelude::*;

fn main() -> Result<()> {
    let cfg = RadarConfig::default();
    let geom = ArrayGeometry::for_config(&cfg);
    let bench = ClutterBenchmark::default();
    let occupied = bench.occupied(&cfg)?;
    let tuning_empty = bench.clutter_only(&cfg, 0..10, 1)?;
    let held_out = bench.clutter_only(&cfg, 10..20, 2)?;
    let ks = k_grid(0.5, 12.0, 0.1)?;

    let mut rates = Vec::new();
    for method in [Method::Dbf, Method::Capon] {
        let manifest = RunManifest::for_method(method);
        let occ = ScoredSet::build(&cfg, &geom, &manifest, &occupied)?;
        let emp = ScoredSet::build(&cfg, &geom, &manifest, &tuning_empty)?;
        let test = ScoredSet::build(&cfg, &geom, &manifest, &held_out)?;
        let op = tune(&[&occ, &emp], &ks, DEFAULT_FPR_CAP)?.best;
        let r: Vec<f64> = occ
            .records(op.k)
            .iter()
            .map(frame_positive_rate)
            .collect::<Result<_>>()?;
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        let fpr = frame_fpr(&emp.counts(op.k))?;
        let held = frame_fpr(&test.counts(op.k))?;
        println!(
            "{method:>5}: k = {:.1}  macro-F1 = {:.3}  mean rate = {mean:.3}  empty-room FPR = {fpr:.3}  held-out FPR = {held:.3}",
            op.k, op.macro_f1
        );
        rates.push(r);
    }
    let wins = rates[0].iter().zip(&rates[1]).filter(|(d, c)| c >= d).count();
    println!("capon >= dbf in {wins}/{} scenes", rates[0].len());
    Ok(())
}
