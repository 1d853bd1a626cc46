//! Temporal integration of per-frame hits into a long-lie alarm.

use floor_occupancy::prelude::*;

fn main() -> Result<()> {
    // 60 s at 10 frames/s: the subject is detected in 85 % of frames from 10 s on
    let hits: Vec<bool> = (0..600).map(|i| i >= 100 && i % 20 >= 3).collect();
    let report = temporal_alarm(&hits, 20.0, 0.8, 10.0)?;
    println!("window {} frames, {} hits required", report.window, report.required_hits);
    for (first, last) in &report.intervals {
        println!("alarm from {:.1} s to {:.1} s", *first as f64 / 10.0, *last as f64 / 10.0);
    }
    Ok(())
}
