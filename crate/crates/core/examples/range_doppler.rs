//! Range and Doppler FFTs of one synthetic frame containing two reflectors.

use floor_occupancy::prelude::*;
use floor_occupancy::sim::ReflectorSpec;

fn main() -> Result<()> {
    let cfg = RadarConfig::default();
    let geom = ArrayGeometry::for_config(&cfg);
    let dr = range_resolution(&cfg)?;
    let mut scene = SceneSpec::empty(1, 1, 0.1);
    for (bin, amp) in [(7.0, 1.0), (19.0, 0.5)] {
        scene.clutter.push(ReflectorSpec {
            range_m: bin * dr,
            azimuth: 0.0,
            elevation: 0.0,
            amplitude: amp,
            fluctuation: 0.0,
        });
    }
    let frame = Synthesizer::new(&scene, &cfg, &geom)?.frame(0)?;
    let rd = process_frame(&frame, &cfg, WindowSpec::default())?;
    let zero = cfg.doppler_zero_index();
    println!("zero-Doppler magnitude on receiver 0:");
    for r in 0..rd.num_range_bins {
        let m = rd.get(0, r, zero).norm();
        println!("{:5.2} m  {:9.1}  {}", r as f64 * dr, m, "#".repeat((m / 100.0) as usize));
    }
    println!("strongest cell (range bin, Doppler bin): {:?}", rd.argmax(0));
    Ok(())
}
