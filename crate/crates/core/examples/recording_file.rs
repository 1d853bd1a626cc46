//! Writes a synthetic recording to disk and reads it back.

use floor_occupancy::io::{read_recording, write_recording, RecordingReader};
use floor_occupancy::prelude::*;

fn main() -> Result<()> {
    let scene: SceneSpec = floor_occupancy::io::read_json(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/scenes/single_target.json"
    ))?;
    let cfg = RadarConfig::default();
    let geom = ArrayGeometry::for_config(&cfg);
    let rec = synthesize_recording(&scene, &cfg, &geom)?;
    let path = std::env::temp_dir().join("floor_occupancy_example.rec");
    write_recording(&path, &rec)?;
    let reader = RecordingReader::open(&path)?;
    println!("{}: {} bytes", path.display(), std::fs::metadata(&path)?.len());
    println!("header: {}", String::from_utf8_lossy(reader.header_bytes()).chars().take(160).collect::<String>());
    let back = read_recording(&path)?;
    let worst = rec
        .frames
        .iter()
        .zip(&back.frames)
        .flat_map(|(a, b)| a.samples.iter().zip(&b.samples).map(|(x, y)| (x - y).norm() / x.norm().max(1.0)))
        .fold(0.0, f64::max);
    println!("{} frames read back, worst relative f32 quantization error {worst:.2e}", back.frames.len());
    std::fs::remove_file(&path)?;
    Ok(())
}
