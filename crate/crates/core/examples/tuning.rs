//! Sweeps the CFAR scale for one method over a small occupied/empty scene
//! set and reports the operating point under the FPR cap.

use floor_occupancy::bench::{tune, ClutterBenchmark, ScoredSet};
use floor_occupancy::eval::{k_grid, DEFAULT_FPR_CAP};
use floor_occupancy::prelude::*;

fn main() -> Result<()> {
    let method: Method = std::env::args().nth(1).unwrap_or_else(|| "capon".into()).parse()?;
    let cfg = RadarConfig::default();
    let geom = ArrayGeometry::for_config(&cfg);
    let bench = ClutterBenchmark {
        n_scenes: 6,
        n_frames: 20,
        ..ClutterBenchmark::default()
    };
    let mut scenes = bench.occupied(&cfg)?;
    scenes.extend(bench.clutter_only(&cfg, 0..6, 1)?);
    let set = ScoredSet::build(&cfg, &geom, &RunManifest::for_method(method), &scenes)?;
    let result = tune(&[&set], &k_grid(0.5, 12.0, 0.5)?, DEFAULT_FPR_CAP)?;
    println!("   k   macro-F1   FPR    TPR");
    for p in &result.curve {
        println!("{:5.1}  {:7.3}  {:5.3}  {:5.3}{}", p.k, p.macro_f1, p.fpr, p.tpr, if p.k == result.best.k { "  <- selected" } else { "" });
    }
    Ok(())
}
