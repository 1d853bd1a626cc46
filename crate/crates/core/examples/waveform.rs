//! Derived waveform quantities of the default radar configuration.

use floor_occupancy::prelude::*;
use floor_occupancy::radar::{beat_frequency, chirp_slope};

fn main() -> Result<()> {
    let cfg = RadarConfig::default();
    cfg.validate()?;
    let slope = chirp_slope(&cfg)?;
    println!("carrier        {:.1} GHz (λ = {:.2} mm)", cfg.center_frequency / 1e9, cfg.wavelength() * 1e3);
    println!("chirp slope    {:.3e} Hz/s", slope);
    println!("range bin      {:.4} m", range_resolution(&cfg)?);
    println!("max range      {:.3} m over {} bins", max_range(&cfg)?, cfg.num_range_bins());
    println!("v_max          {:.2} m/s", cfg.wavelength() / (4.0 * cfg.chirp_repetition_interval));
    for r in [1.0, 3.0, 6.0] {
        println!("beat at {r} m   {:.1} kHz", beat_frequency(slope, r)? / 1e3);
    }
    Ok(())
}
