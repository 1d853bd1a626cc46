//! DBF and Capon azimuth profiles at the range of a single target.

use floor_occupancy::bench::localization_scene;
use floor_occupancy::prelude::*;

fn main() -> Result<()> {
    let cfg = RadarConfig::default();
    let geom = ArrayGeometry::for_config(&cfg);
    let (scene, rb, az) = localization_scene(5, &cfg, 20.0, 3)?;
    let synth = Synthesizer::new(&scene, &cfg, &geom)?;
    println!("target at range bin {rb}, azimuth {az}°");
    let mut rows = Vec::new();
    for method in [Method::Dbf, Method::Capon] {
        let manifest = RunManifest::for_method(method);
        let mut p = Pipeline::new(&cfg, &geom, &manifest)?;
        let mut map = None;
        for f in synth.frames() {
            map = Some(p.range_azimuth(&f?)?);
        }
        let mut map = map.expect("scene has frames");
        map.normalize_max();
        let (r, a) = map.argmax();
        println!("{method:>5}: peak at range bin {r}, azimuth {:.0}°", p.axes().azimuth_rad(a).to_degrees());
        rows.push(map.row(rb).to_vec());
    }
    println!("\nazimuth   dbf     capon");
    for i in (0..rows[0].len()).step_by(5) {
        println!("{:6.0}°  {:.3}   {:.3}", -60.0 + i as f64, rows[0][i], rows[1][i]);
    }
    Ok(())
}
