//! Reproducible synthetic scene sets and in-memory scoring helpers used by
//! the examples and the acceptance suite.
//!
//! The clutter benchmark places one strong, slowly fluctuating reflector a
//! fixed number of range bins from each quasi-static target. Clutter-only
//! companions reuse the same layouts with the target removed and its box kept
//! as a region of interest, so a false alarm means a detection where a
//! subject could lie.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cfar::GroundTruthBox;
use crate::error::{Error, Result};
use crate::eval::{sweep_k, ConfusionCounts, SweepResult, TrialRecord};
use crate::io::RunManifest;
use crate::pipeline::{Pipeline, ScoredMaps};
use crate::ra::{MapAxes, Method, RangeAzimuthMap};
use crate::radar::{range_resolution, ArrayGeometry, FrameCube, RadarConfig};
use crate::sim::{amplitude_for_snr_db, ReflectorSpec, SceneSpec, Synthesizer, TargetSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ClutterBenchmark {
    pub seed: u64,
    pub n_scenes: usize,
    pub n_frames: usize,
    pub noise_std: f64,
    pub target_snr_db: f64,
    pub clutter_snr_db: f64,
    pub clutter_fluctuation: f64,
    /// Range offset of the reflector from the target, in bins.
    pub clutter_range_offset_bins: usize,
    /// Azimuth offset of the reflector, drawn uniformly with a random sign.
    pub clutter_azimuth_offset_deg: (f64, f64),
    /// Target range bins are drawn from this half-open interval.
    pub target_range_bins: (usize, usize),
    pub target_max_azimuth_deg: f64,
    pub micro_motion_amplitude_m: f64,
}

impl Default for ClutterBenchmark {
    fn default() -> Self {
        Self {
            seed: 7,
            n_scenes: 20,
            n_frames: 40,
            noise_std: 1.0,
            target_snr_db: 20.0,
            clutter_snr_db: 30.0,
            clutter_fluctuation: 0.1,
            clutter_range_offset_bins: 2,
            clutter_azimuth_offset_deg: (10.0, 25.0),
            target_range_bins: (8, 24),
            target_max_azimuth_deg: 40.0,
            micro_motion_amplitude_m: 1e-3,
        }
    }
}

impl ClutterBenchmark {
    /// Occupied scenes, one target and one reflector each.
    pub fn occupied(&self, cfg: &RadarConfig) -> Result<Vec<SceneSpec>> {
        let dr = range_resolution(cfg)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut scenes = Vec::with_capacity(self.n_scenes);
        for i in 0..self.n_scenes {
            let rb = rng.random_range(self.target_range_bins.0..self.target_range_bins.1) as f64;
            let az: f64 = rng.random_range(-self.target_max_azimuth_deg..=self.target_max_azimuth_deg);
            let (lo, hi) = self.clutter_azimuth_offset_deg;
            let daz = rng.random_range(lo..=hi) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let dr_bins = self.clutter_range_offset_bins as f64 * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let phase: f64 = rng.random_range(0.0..360.0);
            let mut s = SceneSpec::empty(self.seed.wrapping_mul(1000).wrapping_add(i as u64), self.n_frames, self.noise_std);
            s.subject_id = format!("B{:02}", i);
            s.view_tag = "bench".into();
            s.location_tag = format!("L{:02}", i);
            s.targets.push(TargetSpec {
                range_m: rb * dr,
                azimuth: az.to_radians(),
                elevation: 0.0,
                amplitude: amplitude_for_snr_db(self.target_snr_db, self.noise_std),
                micro_motion_amplitude_m: self.micro_motion_amplitude_m,
                micro_motion_rate_hz: 0.25,
                micro_motion_phase: phase.to_radians(),
            });
            s.clutter.push(ReflectorSpec {
                range_m: (rb + dr_bins) * dr,
                azimuth: (az + daz).clamp(-60.0, 60.0).to_radians(),
                elevation: 0.0,
                amplitude: amplitude_for_snr_db(self.clutter_snr_db, self.noise_std),
                fluctuation: self.clutter_fluctuation,
            });
            scenes.push(s);
        }
        Ok(scenes)
    }

    /// Clutter-only recordings built from the layouts `layouts` of
    /// [`ClutterBenchmark::occupied`]; `salt` separates their noise streams.
    pub fn clutter_only(&self, cfg: &RadarConfig, layouts: std::ops::Range<usize>, salt: u64) -> Result<Vec<SceneSpec>> {
        let occupied = self.occupied(cfg)?;
        Ok(occupied[layouts]
            .iter()
            .map(|s| {
                let mut e = s.clone();
                e.seed = s.seed ^ salt.rotate_left(32);
                e.roi_candidates = s.truth_boxes();
                e.targets.clear();
                e
            })
            .collect())
    }
}

/// A single target at a random grid-aligned position, for localization checks.
pub fn localization_scene(seed: u64, cfg: &RadarConfig, snr_db: f64, n_frames: usize) -> Result<(SceneSpec, usize, f64)> {
    let dr = range_resolution(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rb = rng.random_range(4..28usize);
    let az_deg = rng.random_range(-50..=50i32) as f64;
    let noise = 1.0;
    let mut s = SceneSpec::empty(seed, n_frames, noise);
    s.targets.push(TargetSpec {
        range_m: rb as f64 * dr,
        azimuth: az_deg.to_radians(),
        elevation: 0.0,
        amplitude: amplitude_for_snr_db(snr_db, noise),
        micro_motion_amplitude_m: 1e-3,
        micro_motion_rate_hz: 0.25,
        micro_motion_phase: rng.random_range(0.0..std::f64::consts::TAU),
    });
    Ok((s, rb, az_deg))
}

/// Mean of the per-frame range-azimuth maps of one recording, starting from
/// a cleared clutter estimate.
pub fn recording_map(pipeline: &mut Pipeline, frames: impl IntoIterator<Item = Result<FrameCube>>) -> Result<RangeAzimuthMap> {
    pipeline.reset();
    let mut acc: Option<RangeAzimuthMap> = None;
    let mut n = 0usize;
    for f in frames {
        let map = pipeline.range_azimuth(&f?)?;
        n += 1;
        match acc.as_mut() {
            None => acc = Some(map),
            Some(a) => a.power.iter_mut().zip(&map.power).for_each(|(x, y)| *x += y),
        }
    }
    let mut acc = acc.ok_or_else(|| Error::InvalidArgument("recording has no frames".into()))?;
    acc.power.iter_mut().for_each(|p| *p /= n as f64);
    Ok(acc)
}

/// A scene processed once, ready to be scored at any `k`.
pub struct ScoredTrial {
    pub scene: SceneSpec,
    pub maps: ScoredMaps,
    pub boxes: Vec<GroundTruthBox>,
}

pub struct ScoredSet {
    pub method: Method,
    pub manifest: RunManifest,
    pub axes: MapAxes,
    pub trials: Vec<ScoredTrial>,
}

impl ScoredSet {
    pub fn build(cfg: &RadarConfig, geom: &ArrayGeometry, manifest: &RunManifest, scenes: &[SceneSpec]) -> Result<Self> {
        let mut pipeline = Pipeline::new(cfg, geom, manifest)?;
        let mut trials = Vec::with_capacity(scenes.len());
        for s in scenes {
            let synth = Synthesizer::new(s, cfg, geom)?;
            let maps = ScoredMaps::build(&mut pipeline, synth.frames())?;
            let meta = synth.meta();
            trials.push(ScoredTrial {
                scene: s.clone(),
                maps,
                boxes: meta.scoring_boxes().to_vec(),
            });
        }
        Ok(Self {
            method: manifest.method,
            manifest: manifest.clone(),
            axes: pipeline.axes().clone(),
            trials,
        })
    }

    pub fn records(&self, k: f64) -> Vec<TrialRecord> {
        self.trials
            .iter()
            .map(|t| TrialRecord {
                subject_id: t.scene.subject_id.clone(),
                view_tag: t.scene.view_tag.clone(),
                location_tag: t.scene.location_tag.clone(),
                method: self.method,
                label: t.scene.label(),
                flags: t.maps.flags(k, self.manifest.suppression, &t.boxes, &self.axes),
            })
            .collect()
    }

    pub fn counts(&self, k: f64) -> ConfusionCounts {
        self.records(k).iter().map(TrialRecord::counts).sum()
    }
}

/// Sweeps `ks` over the union of `sets` under an FPR cap.
pub fn tune(sets: &[&ScoredSet], ks: &[f64], fpr_cap: f64) -> Result<SweepResult> {
    let points: Vec<(f64, ConfusionCounts)> = ks
        .iter()
        .map(|&k| (k, sets.iter().map(|s| s.counts(k)).sum()))
        .collect();
    sweep_k(&points, fpr_cap)
}
