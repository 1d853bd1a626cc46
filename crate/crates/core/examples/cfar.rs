//! CA-CFAR on a noise map with a few planted peaks, before and after
//! connected-component suppression.

use floor_occupancy::cfar::Suppression;
use floor_occupancy::prelude::*;
use rand::{Rng, SeedableRng};

fn main() -> Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let mut map = RangeAzimuthMap::zeros(32, 121, Method::Dbf);
    for p in map.power.iter_mut() {
        *p = -(1.0 - rng.random::<f64>()).ln();
    }
    for (r, a) in [(8, 30), (8, 31), (9, 30), (20, 90)] {
        map.set(r, a, 40.0);
    }
    for k in [1.4, 2.4, 4.0, 8.0] {
        let cfg = CfarConfig::default().with_k(k);
        let raw = ca_cfar_2d(&map, &cfg)?;
        let kept = suppress(&raw, Suppression::ConnectedMax);
        println!("k = {k:3.1}: {:4} raw detections, {:3} after suppression", raw.len(), kept.len());
    }
    let cfg = CfarConfig::default();
    println!(
        "exponential-noise false-alarm rate at k = {} with {} training cells: {:.4}",
        cfg.k,
        cfg.num_training(),
        cfg.exponential_pfa()
    );
    Ok(())
}
