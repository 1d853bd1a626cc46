//! Waveform configuration, receiver geometry and the closed-form FMCW
//! relations (chirp slope, beat frequency, range resolution, max range).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Maximum unambiguous radial speed used to derive the default chirp
/// repetition interval (m/s).
pub const DEFAULT_MAX_SPEED: f64 = 3.0;

/// FMCW waveform and frame parameters. All quantities are SI.
///
/// The defaults describe a 60 GHz, 500 MHz sweep with 128 chirps of 64
/// samples on three receivers at 10 frames per second. The chirp
/// repetition interval is `λ / (4 · 3 m/s)` so that the maximum
/// unambiguous speed is 3 m/s, and the chirp duration equals it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarConfig {
    pub center_frequency: f64,
    pub bandwidth: f64,
    pub chirp_duration: f64,
    pub frame_rate: f64,
    pub chirps_per_frame: usize,
    pub samples_per_chirp: usize,
    pub num_rx: usize,
    pub chirp_repetition_interval: f64,
}

impl Default for RadarConfig {
    fn default() -> Self {
        let center_frequency = 60.0e9;
        let wavelength = SPEED_OF_LIGHT / center_frequency;
        let repetition = wavelength / (4.0 * DEFAULT_MAX_SPEED);
        Self {
            center_frequency,
            bandwidth: 500.0e6,
            chirp_duration: repetition,
            frame_rate: 10.0,
            chirps_per_frame: 128,
            samples_per_chirp: 64,
            num_rx: 3,
            chirp_repetition_interval: repetition,
        }
    }
}

impl RadarConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("center_frequency", self.center_frequency),
            ("bandwidth", self.bandwidth),
            ("chirp_duration", self.chirp_duration),
            ("frame_rate", self.frame_rate),
            ("chirp_repetition_interval", self.chirp_repetition_interval),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be finite and > 0, got {value}")));
            }
        }
        if self.chirps_per_frame < 2 {
            return Err(Error::InvalidConfig(format!(
                "chirps_per_frame must be >= 2, got {}",
                self.chirps_per_frame
            )));
        }
        if self.samples_per_chirp < 2 || self.samples_per_chirp % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "samples_per_chirp must be even and >= 2, got {}",
                self.samples_per_chirp
            )));
        }
        if self.num_rx < 2 {
            return Err(Error::InvalidConfig(format!("num_rx must be >= 2, got {}", self.num_rx)));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.center_frequency
    }

    /// Number of usable range bins (the lower half of the fast-time spectrum).
    pub fn num_range_bins(&self) -> usize {
        self.samples_per_chirp / 2
    }

    /// Fast-time sample rate. Chosen so that range bin `i` sits exactly at
    /// `i · Δr`.
    pub fn sample_rate(&self) -> f64 {
        self.samples_per_chirp as f64 / self.chirp_duration
    }

    /// Doppler bin holding zero velocity after spectrum centering.
    pub fn doppler_zero_index(&self) -> usize {
        self.chirps_per_frame / 2
    }

    pub fn frame_period(&self) -> f64 {
        1.0 / self.frame_rate
    }

    /// Number of complex samples in one frame.
    pub fn frame_len(&self) -> usize {
        self.num_rx * self.chirps_per_frame * self.samples_per_chirp
    }
}

/// Chirp slope `B / T_c` in Hz/s.
pub fn chirp_slope(cfg: &RadarConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(cfg.bandwidth / cfg.chirp_duration)
}

/// Beat frequency `S · 2r / c` of a point scatterer at `range` metres.
pub fn beat_frequency(slope: f64, range: f64) -> Result<f64> {
    if !(range >= 0.0) || !range.is_finite() {
        return Err(Error::InvalidArgument(format!("range must be finite and >= 0, got {range}")));
    }
    Ok(slope * 2.0 * range / SPEED_OF_LIGHT)
}

/// Range resolution `c / 2B`.
pub fn range_resolution(cfg: &RadarConfig) -> Result<f64> {
    if !(cfg.bandwidth > 0.0) {
        return Err(Error::InvalidConfig(format!("bandwidth must be > 0, got {}", cfg.bandwidth)));
    }
    Ok(SPEED_OF_LIGHT / (2.0 * cfg.bandwidth))
}

/// Largest range covered by the kept half of the range spectrum.
pub fn max_range(cfg: &RadarConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(cfg.num_range_bins() as f64 * range_resolution(cfg)?)
}

/// Receiver positions relative to the reference receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayGeometry {
    pub wavelength: f64,
    /// `(d_x, d_y)` per receiver, metres.
    pub element_offsets: Vec<[f64; 2]>,
    /// `[reference, partner]`: the two receivers spanning the azimuth baseline.
    pub azimuth_pair: [usize; 2],
}

impl ArrayGeometry {
    /// L-shaped three-receiver layout: receiver 0 sits `λ/2` along x, receiver
    /// 1 sits `λ/2` along y and receiver 2 is the phase reference. Receivers
    /// beyond the third continue the x baseline in `λ/2` steps.
    pub fn for_config(cfg: &RadarConfig) -> Self {
        let lambda = cfg.wavelength();
        let half = lambda / 2.0;
        let mut element_offsets = vec![[half, 0.0], [0.0, half], [0.0, 0.0]];
        if cfg.num_rx < 3 {
            element_offsets = vec![[0.0, 0.0], [half, 0.0]];
            return Self {
                wavelength: lambda,
                element_offsets,
                azimuth_pair: [0, 1],
            };
        }
        for extra in 3..cfg.num_rx {
            element_offsets.push([half * (extra - 1) as f64, 0.0]);
        }
        Self {
            wavelength: lambda,
            element_offsets,
            azimuth_pair: [2, 0],
        }
    }

    pub fn num_rx(&self) -> usize {
        self.element_offsets.len()
    }

    pub fn validate(&self, cfg: &RadarConfig) -> Result<()> {
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(Error::InvalidConfig(format!("wavelength must be > 0, got {}", self.wavelength)));
        }
        if self.element_offsets.len() != cfg.num_rx {
            return Err(mismatch("element_offsets", cfg.num_rx, self.element_offsets.len()));
        }
        if self.element_offsets.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("element_offsets"));
        }
        let [a, b] = self.azimuth_pair;
        if a == b || a >= cfg.num_rx || b >= cfg.num_rx {
            return Err(Error::InvalidConfig(format!(
                "azimuth_pair {:?} must be two distinct receivers below {}",
                self.azimuth_pair, cfg.num_rx
            )));
        }
        Ok(())
    }

    /// Spacing of the azimuth baseline along x, metres.
    pub fn azimuth_baseline(&self) -> f64 {
        let [a, b] = self.azimuth_pair;
        self.element_offsets[b][0] - self.element_offsets[a][0]
    }
}

/// One frame of complex baseband samples, indexed `[rx][chirp][sample]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameCube {
    pub samples: Vec<Complex64>,
    pub num_rx: usize,
    pub num_chirps: usize,
    pub num_samples: usize,
    pub frame_index: u64,
    pub timestamp: f64,
}

impl FrameCube {
    pub fn zeros(cfg: &RadarConfig, frame_index: u64) -> Self {
        Self {
            samples: vec![Complex64::new(0.0, 0.0); cfg.frame_len()],
            num_rx: cfg.num_rx,
            num_chirps: cfg.chirps_per_frame,
            num_samples: cfg.samples_per_chirp,
            frame_index,
            timestamp: frame_index as f64 / cfg.frame_rate,
        }
    }

    #[inline]
    pub fn index(&self, rx: usize, chirp: usize, sample: usize) -> usize {
        (rx * self.num_chirps + chirp) * self.num_samples + sample
    }

    pub fn get(&self, rx: usize, chirp: usize, sample: usize) -> Complex64 {
        self.samples[self.index(rx, chirp, sample)]
    }

    /// Fast-time samples of one chirp on one receiver.
    pub fn chirp(&self, rx: usize, chirp: usize) -> &[Complex64] {
        let start = self.index(rx, chirp, 0);
        &self.samples[start..start + self.num_samples]
    }

    pub fn check_dims(&self, cfg: &RadarConfig) -> Result<()> {
        let expected = (cfg.num_rx, cfg.chirps_per_frame, cfg.samples_per_chirp);
        let actual = (self.num_rx, self.num_chirps, self.num_samples);
        if expected != actual || self.samples.len() != cfg.frame_len() {
            return Err(mismatch("frame cube", format!("{expected:?}"), format!("{actual:?}")));
        }
        if self.samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("frame cube"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn chirp_slope_examples() {
        let mut cfg = RadarConfig::default();
        cfg.bandwidth = 1.0;
        cfg.chirp_duration = 1.0;
        assert_eq!(chirp_slope(&cfg).unwrap(), 1.0);

        cfg.bandwidth = 500e6;
        cfg.chirp_duration = 500e-6;
        assert!(rel(chirp_slope(&cfg).unwrap(), 1.0e12) < 1e-15);

        cfg.bandwidth = 0.0;
        assert!(matches!(chirp_slope(&cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn beat_frequency_examples() {
        assert_eq!(beat_frequency(1e12, 0.0).unwrap(), 0.0);
        assert!((beat_frequency(1e12, 1.5).unwrap() - 1.0007e4).abs() < 0.5);
        assert!(((beat_frequency(1e12, 9.6).unwrap() - 6.404e4) / 6.404e4).abs() < 1e-3);
        assert!(beat_frequency(1e12, -0.1).is_err());
    }

    #[test]
    fn beat_frequency_of_max_range_is_last_kept_bin() {
        // Bin spacing is 1/T_c, so 9.6 m lands on the N/2 boundary that
        // closes the kept half of the spectrum.
        let mut cfg = RadarConfig::default();
        cfg.chirp_duration = 500e-6;
        let slope = chirp_slope(&cfg).unwrap();
        let fb = beat_frequency(slope, 9.6).unwrap();
        let bin = fb * cfg.chirp_duration;
        assert!((bin - 32.0).abs() < 0.05, "bin {bin}");
        let edge = max_range(&cfg).unwrap();
        assert!((edge - 9.6).abs() / 9.6 < 0.01);
    }

    #[test]
    fn range_resolution_examples() {
        let mut cfg = RadarConfig::default();
        let dr = range_resolution(&cfg).unwrap();
        assert!((dr - 0.2998).abs() < 1e-4);
        assert!(rel(dr, 0.30) < 0.01);
        cfg.bandwidth = SPEED_OF_LIGHT / 2.0;
        assert!((range_resolution(&cfg).unwrap() - 1.0).abs() < 1e-15);
        cfg.bandwidth = 1e9;
        assert!((range_resolution(&cfg).unwrap() - 0.1499).abs() < 1e-4);
    }

    #[test]
    fn max_range_examples() {
        let mut cfg = RadarConfig::default();
        let r = max_range(&cfg).unwrap();
        assert!((r - 9.59).abs() < 0.01);
        assert!(rel(r, 9.6) < 0.01);

        cfg.samples_per_chirp = 2;
        cfg.bandwidth = SPEED_OF_LIGHT / 2.0;
        assert!((max_range(&cfg).unwrap() - 1.0).abs() < 1e-15);

        cfg.samples_per_chirp = 64;
        cfg.bandwidth = 1e9;
        assert!((max_range(&cfg).unwrap() - 4.797).abs() < 1e-3);
    }

    #[test]
    fn default_config_matches_waveform_table() {
        let cfg = RadarConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.chirps_per_frame, 128);
        assert_eq!(cfg.samples_per_chirp, 64);
        assert_eq!(cfg.num_rx, 3);
        assert_eq!(cfg.frame_rate, 10.0);
        // v_max = λ / (4 T_rep)
        let vmax = cfg.wavelength() / (4.0 * cfg.chirp_repetition_interval);
        assert!((vmax - 3.0).abs() < 1e-12);
        assert!((cfg.chirp_repetition_interval - 416.7e-6).abs() < 1e-6);
    }

    #[test]
    fn config_validation_rejects_degenerate_arrays() {
        let mut cfg = RadarConfig::default();
        cfg.num_rx = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = RadarConfig::default();
        cfg.chirps_per_frame = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = RadarConfig::default();
        cfg.frame_rate = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_uses_field_names() {
        let cfg = RadarConfig::default();
        let json = serde_json::to_value(cfg).unwrap();
        for key in [
            "center_frequency",
            "bandwidth",
            "chirp_duration",
            "frame_rate",
            "chirps_per_frame",
            "samples_per_chirp",
            "num_rx",
            "chirp_repetition_interval",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        let back: RadarConfig = serde_json::from_value(json).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn default_geometry_has_half_wavelength_baselines() {
        let cfg = RadarConfig::default();
        let geom = ArrayGeometry::for_config(&cfg);
        geom.validate(&cfg).unwrap();
        assert!((geom.azimuth_baseline() - cfg.wavelength() / 2.0).abs() < 1e-18);
        assert!((geom.element_offsets[1][1] - cfg.wavelength() / 2.0).abs() < 1e-18);

        let mut bad = geom.clone();
        bad.azimuth_pair = [1, 1];
        assert!(bad.validate(&cfg).is_err());
        bad.azimuth_pair = [0, 3];
        assert!(bad.validate(&cfg).is_err());
    }

    proptest! {
        #[test]
        fn fmcw_relations_are_homogeneous(scale in 0.1f64..10.0, range in 0.0f64..9.0) {
            let cfg = RadarConfig::default();
            let mut scaled = cfg;
            scaled.bandwidth *= scale;
            let s0 = chirp_slope(&cfg).unwrap();
            prop_assert!(rel(chirp_slope(&scaled).unwrap(), scale * s0) < 1e-12);
            let dr0 = range_resolution(&cfg).unwrap();
            prop_assert!(rel(range_resolution(&scaled).unwrap(), dr0 / scale) < 1e-12);

            let mut slower = cfg;
            slower.chirp_duration *= scale;
            prop_assert!(rel(chirp_slope(&slower).unwrap(), s0 / scale) < 1e-12);

            let fb = beat_frequency(s0, range).unwrap();
            let fb_scaled = beat_frequency(s0, range * scale).unwrap();
            prop_assert!((fb_scaled - scale * fb).abs() <= 1e-9 * fb_scaled.abs().max(1.0));
            let fb_slope = beat_frequency(s0 * scale, range).unwrap();
            prop_assert!((fb_slope - scale * fb).abs() <= 1e-9 * fb_slope.abs().max(1.0));
        }
    }
}
