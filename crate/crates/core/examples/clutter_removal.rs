//! The exponential clutter filter removes a static reflector while a target
//! with millimetre micro-motion survives.

use floor_occupancy::prelude::*;
use floor_occupancy::sim::{ReflectorSpec, TargetSpec};

fn main() -> Result<()> {
    let cfg = RadarConfig::default();
    let geom = ArrayGeometry::for_config(&cfg);
    let dr = range_resolution(&cfg)?;
    let (target_bin, wall_bin) = (10, 20);
    let mut scene = SceneSpec::empty(3, 30, 0.0);
    scene.targets.push(TargetSpec {
        range_m: target_bin as f64 * dr,
        azimuth: 0.0,
        elevation: 0.0,
        amplitude: 1.0,
        micro_motion_amplitude_m: 1e-3,
        micro_motion_rate_hz: 0.25,
        micro_motion_phase: 0.0,
    });
    scene.clutter.push(ReflectorSpec {
        range_m: wall_bin as f64 * dr,
        azimuth: 0.3,
        elevation: 0.0,
        amplitude: 10.0,
        fluctuation: 0.0,
    });
    let synth = Synthesizer::new(&scene, &cfg, &geom)?;
    let frontend = Frontend::new(&cfg, WindowSpec::default())?;
    let mut mti = ClutterState::new((cfg.num_rx, cfg.num_range_bins(), cfg.chirps_per_frame), 0.01)?;
    let zero = cfg.doppler_zero_index();
    println!("frame  target-in  target-out  wall-in  wall-out");
    for f in synth.frames() {
        let f = f?;
        let rd = frontend.process(&f)?;
        let y = mti.step(&rd)?;
        println!(
            "{:5}  {:9.1}  {:10.3}  {:7.1}  {:8.2e}",
            f.frame_index,
            rd.get(0, target_bin, zero).norm(),
            y.get(0, target_bin, zero).norm(),
            rd.get(0, wall_bin, zero).norm(),
            y.get(0, wall_bin, zero).norm()
        );
    }
    Ok(())
}
