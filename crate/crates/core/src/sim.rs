//! Synthetic SIMO FMCW scenes: point targets with slow sinusoidal range
//! jitter, static clutter reflectors and complex white noise.
//!
//! Each scatterer adds `A · v_m · exp(j(2π f_b(r) n / f_s + 4π r / λ))` to
//! receiver `m`, chirp `c`, sample `n`, with `r = r(t)` evaluated at the
//! chirp start `t = frame / frame_rate + c · T_rep`. Random draws come from a
//! ChaCha stream keyed by `(seed, frame, stream)`, so any frame can be
//! regenerated on its own.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cfar::{degrees, GroundTruthBox, DEFAULT_BOX_HALF_AZIMUTH_DEG, DEFAULT_BOX_HALF_RANGE_M};
use crate::dbf::{weight_vector, weight_vector_from_axis};
use crate::error::{Error, Result};
use crate::radar::{chirp_slope, max_range, ArrayGeometry, FrameCube, RadarConfig, SPEED_OF_LIGHT};

fn default_micro_amplitude() -> f64 {
    1e-3
}

fn default_micro_rate() -> f64 {
    0.25
}

fn default_half_range() -> f64 {
    DEFAULT_BOX_HALF_RANGE_M
}

fn default_half_azimuth() -> f64 {
    DEFAULT_BOX_HALF_AZIMUTH_DEG.to_radians()
}

/// A quasi-static subject modelled as one scatterer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub range_m: f64,
    #[serde(rename = "azimuth_deg", with = "degrees")]
    pub azimuth: f64,
    #[serde(rename = "elevation_deg", with = "degrees", default)]
    pub elevation: f64,
    pub amplitude: f64,
    #[serde(default = "default_micro_amplitude")]
    pub micro_motion_amplitude_m: f64,
    #[serde(default = "default_micro_rate")]
    pub micro_motion_rate_hz: f64,
    #[serde(rename = "micro_motion_phase_deg", with = "degrees", default)]
    pub micro_motion_phase: f64,
}

/// A static reflector. `fluctuation` is the standard deviation of a
/// per-frame complex gain perturbation (0 means perfectly static).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReflectorSpec {
    pub range_m: f64,
    #[serde(rename = "azimuth_deg", with = "degrees")]
    pub azimuth: f64,
    #[serde(rename = "elevation_deg", with = "degrees", default)]
    pub elevation: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub fluctuation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    #[serde(default)]
    pub targets: Vec<TargetSpec>,
    #[serde(default)]
    pub clutter: Vec<ReflectorSpec>,
    pub noise_std: f64,
    pub seed: u64,
    pub n_frames: usize,
    #[serde(default)]
    pub subject_id: String,
    #[serde(default)]
    pub view_tag: String,
    #[serde(default)]
    pub location_tag: String,
    #[serde(default = "default_half_range")]
    pub box_half_range_m: f64,
    #[serde(rename = "box_half_azimuth_deg", with = "degrees", default = "default_half_azimuth")]
    pub box_half_azimuth: f64,
    /// Candidate subject locations for this view, scored on empty recordings.
    #[serde(default)]
    pub roi_candidates: Vec<GroundTruthBox>,
}

impl SceneSpec {
    pub fn empty(seed: u64, n_frames: usize, noise_std: f64) -> Self {
        Self {
            targets: Vec::new(),
            clutter: Vec::new(),
            noise_std,
            seed,
            n_frames,
            subject_id: String::new(),
            view_tag: String::new(),
            location_tag: String::new(),
            box_half_range_m: DEFAULT_BOX_HALF_RANGE_M,
            box_half_azimuth: default_half_azimuth(),
            roi_candidates: Vec::new(),
        }
    }

    pub fn label(&self) -> Label {
        if self.targets.is_empty() {
            Label::Empty
        } else {
            Label::Occupied
        }
    }

    pub fn validate(&self, cfg: &RadarConfig, max_azimuth: f64) -> Result<()> {
        let r_max = max_range(cfg)?;
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(Error::InvalidConfig(format!("noise_std must be >= 0, got {}", self.noise_std)));
        }
        let check = |range: f64, extent: f64, az: f64, amp: f64, what: &str| -> Result<()> {
            if ![range, extent, az, amp].iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite("scene"));
            }
            if range - extent <= 0.0 || range + extent >= r_max {
                return Err(Error::OutOfRange {
                    range_m: range,
                    max_range_m: r_max,
                });
            }
            if amp < 0.0 {
                return Err(Error::InvalidConfig(format!("{what} amplitude must be >= 0, got {amp}")));
            }
            if az.abs() > max_azimuth + 1e-12 {
                return Err(Error::InvalidConfig(format!(
                    "{what} azimuth {:.3}° exceeds the grid limit {:.3}°",
                    az.to_degrees(),
                    max_azimuth.to_degrees()
                )));
            }
            Ok(())
        };
        for t in &self.targets {
            check(t.range_m, t.micro_motion_amplitude_m.abs(), t.azimuth, t.amplitude, "target")?;
        }
        for c in &self.clutter {
            check(c.range_m, 0.0, c.azimuth, c.amplitude, "clutter")?;
            if !(c.fluctuation.is_finite() && c.fluctuation >= 0.0) {
                return Err(Error::InvalidConfig(format!("fluctuation must be >= 0, got {}", c.fluctuation)));
            }
        }
        if self.box_half_range_m <= 0.0 || self.box_half_azimuth <= 0.0 {
            return Err(Error::InvalidConfig("truth box half extents must be > 0".into()));
        }
        for b in &self.roi_candidates {
            b.validate()?;
        }
        Ok(())
    }

    /// Scoring boxes centred on the targets' rest positions.
    pub fn truth_boxes(&self) -> Vec<GroundTruthBox> {
        self.targets
            .iter()
            .map(|t| GroundTruthBox {
                center_range_m: t.range_m,
                center_azimuth: t.azimuth,
                half_range_m: self.box_half_range_m,
                half_azimuth: self.box_half_azimuth,
                view_tag: self.view_tag.clone(),
                location_tag: self.location_tag.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Occupied,
    Empty,
}

/// Per-sample amplitude that gives `snr_db` against complex noise of
/// standard deviation `noise_std`.
pub fn amplitude_for_snr_db(snr_db: f64, noise_std: f64) -> f64 {
    noise_std * 10f64.powf(snr_db / 20.0)
}

/// Unit-modulus arrival phases, the conjugate of the DBF weights.
pub fn arrival_vector(azimuth: f64, elevation: f64, geom: &ArrayGeometry) -> Vec<Complex64> {
    weight_vector(azimuth, elevation, geom).into_iter().map(|w| w.conj()).collect()
}

/// [`arrival_vector`] with azimuth measured from the array x axis.
pub fn arrival_vector_from_axis(azimuth_from_axis: f64, elevation: f64, geom: &ArrayGeometry) -> Vec<Complex64> {
    weight_vector_from_axis(azimuth_from_axis, elevation, geom)
        .into_iter()
        .map(|w| w.conj())
        .collect()
}

const NOISE_STREAM: u64 = u64::MAX;

/// Counter-based generator for one `(seed, frame, stream)` triple.
pub fn stream_rng(seed: u64, frame: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&frame.to_le_bytes());
    key[16..24].copy_from_slice(&stream.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

struct Scatterer {
    range_m: f64,
    micro_amplitude: f64,
    micro_rate: f64,
    micro_phase: f64,
    gain: Complex64,
    arrival: Vec<Complex64>,
}

/// Frame generator with the per-scene constants resolved once.
#[derive(Debug, Clone)]
pub struct Synthesizer {
    scene: SceneSpec,
    cfg: RadarConfig,
    geom: ArrayGeometry,
    slope: f64,
    max_range: f64,
}

impl Synthesizer {
    pub fn new(scene: &SceneSpec, cfg: &RadarConfig, geom: &ArrayGeometry) -> Result<Self> {
        cfg.validate()?;
        geom.validate(cfg)?;
        scene.validate(cfg, std::f64::consts::FRAC_PI_2)?;
        Ok(Self {
            scene: scene.clone(),
            cfg: *cfg,
            geom: geom.clone(),
            slope: chirp_slope(cfg)?,
            max_range: max_range(cfg)?,
        })
    }

    pub fn scene(&self) -> &SceneSpec {
        &self.scene
    }

    fn scatterers(&self, frame_idx: u64) -> Vec<Scatterer> {
        let mut out = Vec::with_capacity(self.scene.targets.len() + self.scene.clutter.len());
        for t in &self.scene.targets {
            out.push(Scatterer {
                range_m: t.range_m,
                micro_amplitude: t.micro_motion_amplitude_m,
                micro_rate: t.micro_motion_rate_hz,
                micro_phase: t.micro_motion_phase,
                gain: Complex64::new(t.amplitude, 0.0),
                arrival: arrival_vector(t.azimuth, t.elevation, &self.geom),
            });
        }
        for (i, c) in self.scene.clutter.iter().enumerate() {
            let mut gain = Complex64::new(c.amplitude, 0.0);
            if c.fluctuation > 0.0 {
                let mut rng = stream_rng(self.scene.seed, frame_idx, i as u64);
                gain *= Complex64::new(1.0, 0.0) + complex_normal(&mut rng) * c.fluctuation;
            }
            out.push(Scatterer {
                range_m: c.range_m,
                micro_amplitude: 0.0,
                micro_rate: 0.0,
                micro_phase: 0.0,
                gain,
                arrival: arrival_vector(c.azimuth, c.elevation, &self.geom),
            });
        }
        out
    }

    pub fn frame(&self, frame_idx: u64) -> Result<FrameCube> {
        let cfg = &self.cfg;
        let mut cube = FrameCube::zeros(cfg, frame_idx);
        let lambda = cfg.wavelength();
        let fs = cfg.sample_rate();
        let t0 = frame_idx as f64 / cfg.frame_rate;
        for s in self.scatterers(frame_idx) {
            if s.gain == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..cfg.chirps_per_frame {
                let t = t0 + c as f64 * cfg.chirp_repetition_interval;
                let r = s.range_m + s.micro_amplitude * (2.0 * PI * s.micro_rate * t + s.micro_phase).sin();
                if r <= 0.0 || r >= self.max_range {
                    return Err(Error::OutOfRange {
                        range_m: r,
                        max_range_m: self.max_range,
                    });
                }
                let fb = 2.0 * self.slope * r / SPEED_OF_LIGHT;
                let carrier = 4.0 * PI * r / lambda;
                let step = 2.0 * PI * fb / fs;
                for (m, v) in s.arrival.iter().enumerate() {
                    let a = s.gain * v;
                    let start = cube.index(m, c, 0);
                    for (n, x) in cube.samples[start..start + cfg.samples_per_chirp].iter_mut().enumerate() {
                        *x += a * Complex64::from_polar(1.0, step * n as f64 + carrier);
                    }
                }
            }
        }
        if self.scene.noise_std > 0.0 {
            let mut rng = stream_rng(self.scene.seed, frame_idx, NOISE_STREAM);
            let sigma = self.scene.noise_std;
            for x in &mut cube.samples {
                *x += complex_normal(&mut rng) * sigma;
            }
        }
        Ok(cube)
    }

    pub fn frames(&self) -> impl Iterator<Item = Result<FrameCube>> + '_ {
        (0..self.scene.n_frames as u64).map(move |i| self.frame(i))
    }

    pub fn meta(&self) -> RecordingMeta {
        RecordingMeta {
            config: self.cfg,
            geometry: self.geom.clone(),
            label: self.scene.label(),
            truth: self.scene.truth_boxes(),
            roi_candidates: self.scene.roi_candidates.clone(),
            seed: self.scene.seed,
            n_frames: self.scene.n_frames,
            subject_id: self.scene.subject_id.clone(),
            view_tag: self.scene.view_tag.clone(),
            location_tag: self.scene.location_tag.clone(),
        }
    }
}

/// Everything about a recording except the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingMeta {
    pub config: RadarConfig,
    pub geometry: ArrayGeometry,
    pub label: Label,
    pub truth: Vec<GroundTruthBox>,
    #[serde(default)]
    pub roi_candidates: Vec<GroundTruthBox>,
    pub seed: u64,
    pub n_frames: usize,
    #[serde(default)]
    pub subject_id: String,
    #[serde(default)]
    pub view_tag: String,
    #[serde(default)]
    pub location_tag: String,
}

impl RecordingMeta {
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        self.geometry.validate(&self.config)?;
        if (self.label == Label::Empty) != self.truth.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "label {:?} inconsistent with {} truth boxes",
                self.label,
                self.truth.len()
            )));
        }
        for b in self.truth.iter().chain(&self.roi_candidates) {
            b.validate()?;
        }
        Ok(())
    }

    /// Boxes scored for false positives on an empty recording.
    pub fn scoring_boxes(&self) -> &[GroundTruthBox] {
        match self.label {
            Label::Occupied => &self.truth,
            Label::Empty => &self.roi_candidates,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub meta: RecordingMeta,
    pub frames: Vec<FrameCube>,
}

pub fn synthesize_frame(
    scene: &SceneSpec,
    cfg: &RadarConfig,
    geom: &ArrayGeometry,
    frame_idx: u64,
) -> Result<FrameCube> {
    Synthesizer::new(scene, cfg, geom)?.frame(frame_idx)
}

pub fn synthesize_recording(scene: &SceneSpec, cfg: &RadarConfig, geom: &ArrayGeometry) -> Result<Recording> {
    let synth = Synthesizer::new(scene, cfg, geom)?;
    let frames = synth.frames().collect::<Result<Vec<_>>>()?;
    Ok(Recording {
        meta: synth.meta(),
        frames,
    })
}
