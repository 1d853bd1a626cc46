//! Range and Doppler FFTs turning raw frames into per-receiver complex
//! range-Doppler maps.
//!
//! Forward transforms are unnormalized. Only the lower half of the fast-time
//! spectrum is kept, and the slow-time spectrum is rotated so that zero
//! Doppler lands on bin `N_chirp / 2`. No magnitude is taken anywhere, so the
//! inter-receiver phase survives for beamforming.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Result};
use crate::radar::{FrameCube, RadarConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    Rectangular,
    Hann,
}

impl Window {
    /// Periodic window coefficients of length `n`.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => (0..n)
                .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / n as f64).cos()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub fast_time_window: Window,
    pub slow_time_window: Window,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            fast_time_window: Window::Hann,
            slow_time_window: Window::Hann,
        }
    }
}

impl WindowSpec {
    pub fn rectangular() -> Self {
        Self {
            fast_time_window: Window::Rectangular,
            slow_time_window: Window::Rectangular,
        }
    }
}

/// Range spectra per receiver and chirp, indexed `[rx][chirp][range_bin]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfiles {
    pub values: Vec<Complex64>,
    pub num_rx: usize,
    pub num_chirps: usize,
    pub num_range_bins: usize,
    pub frame_index: u64,
}

impl RangeProfiles {
    #[inline]
    pub fn get(&self, rx: usize, chirp: usize, range_bin: usize) -> Complex64 {
        self.values[(rx * self.num_chirps + chirp) * self.num_range_bins + range_bin]
    }
}

/// Complex range-Doppler maps, indexed `[rx][range_bin][doppler_bin]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDopplerCube {
    pub values: Vec<Complex64>,
    pub num_rx: usize,
    pub num_range_bins: usize,
    pub num_doppler_bins: usize,
    pub doppler_zero_index: usize,
    pub frame_index: u64,
}

impl RangeDopplerCube {
    pub fn zeros(num_rx: usize, num_range_bins: usize, num_doppler_bins: usize) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); num_rx * num_range_bins * num_doppler_bins],
            num_rx,
            num_range_bins,
            num_doppler_bins,
            doppler_zero_index: num_doppler_bins / 2,
            frame_index: 0,
        }
    }

    #[inline]
    pub fn index(&self, rx: usize, range_bin: usize, doppler_bin: usize) -> usize {
        (rx * self.num_range_bins + range_bin) * self.num_doppler_bins + doppler_bin
    }

    #[inline]
    pub fn get(&self, rx: usize, range_bin: usize, doppler_bin: usize) -> Complex64 {
        self.values[self.index(rx, range_bin, doppler_bin)]
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.num_rx, self.num_range_bins, self.num_doppler_bins)
    }

    /// Per-receiver energy `Σ |X|²`.
    pub fn energy(&self, rx: usize) -> f64 {
        let n = self.num_range_bins * self.num_doppler_bins;
        self.values[rx * n..(rx + 1) * n].iter().map(|z| z.norm_sqr()).sum()
    }

    /// Index of the largest-magnitude cell on one receiver as `(range, doppler)`.
    pub fn argmax(&self, rx: usize) -> (usize, usize) {
        let mut best = (0, 0);
        let mut best_val = f64::NEG_INFINITY;
        for r in 0..self.num_range_bins {
            for d in 0..self.num_doppler_bins {
                let v = self.get(rx, r, d).norm_sqr();
                if v > best_val {
                    best_val = v;
                    best = (r, d);
                }
            }
        }
        best
    }
}

/// Range/Doppler FFT stage with cached plans and window coefficients.
pub struct Frontend {
    cfg: RadarConfig,
    fast_window: Vec<f64>,
    slow_window: Vec<f64>,
    range_fft: Arc<dyn Fft<f64>>,
    doppler_fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Frontend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Frontend").field("cfg", &self.cfg).finish_non_exhaustive()
    }
}

impl Frontend {
    pub fn new(cfg: &RadarConfig, windows: WindowSpec) -> Result<Self> {
        cfg.validate()?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            cfg: *cfg,
            fast_window: windows.fast_time_window.coefficients(cfg.samples_per_chirp),
            slow_window: windows.slow_time_window.coefficients(cfg.chirps_per_frame),
            range_fft: planner.plan_fft_forward(cfg.samples_per_chirp),
            doppler_fft: planner.plan_fft_forward(cfg.chirps_per_frame),
        })
    }

    pub fn range_fft(&self, frame: &FrameCube) -> Result<RangeProfiles> {
        frame.check_dims(&self.cfg)?;
        let n = self.cfg.samples_per_chirp;
        let keep = self.cfg.num_range_bins();
        let mut values = Vec::with_capacity(frame.num_rx * frame.num_chirps * keep);
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.range_fft.get_inplace_scratch_len()];
        for rx in 0..frame.num_rx {
            for chirp in 0..frame.num_chirps {
                for ((b, &x), &w) in buf.iter_mut().zip(frame.chirp(rx, chirp)).zip(&self.fast_window) {
                    *b = x * w;
                }
                self.range_fft.process_with_scratch(&mut buf, &mut scratch);
                values.extend_from_slice(&buf[..keep]);
            }
        }
        Ok(RangeProfiles {
            values,
            num_rx: frame.num_rx,
            num_chirps: frame.num_chirps,
            num_range_bins: keep,
            frame_index: frame.frame_index,
        })
    }

    pub fn doppler_fft(&self, profiles: &RangeProfiles) -> Result<RangeDopplerCube> {
        let expected = (self.cfg.num_rx, self.cfg.chirps_per_frame, self.cfg.num_range_bins());
        let actual = (profiles.num_rx, profiles.num_chirps, profiles.num_range_bins);
        if expected != actual || profiles.values.len() != actual.0 * actual.1 * actual.2 {
            return Err(mismatch("range profiles", format!("{expected:?}"), format!("{actual:?}")));
        }
        let n = profiles.num_chirps;
        let half = n / 2;
        let mut cube = RangeDopplerCube::zeros(profiles.num_rx, profiles.num_range_bins, n);
        cube.frame_index = profiles.frame_index;
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.doppler_fft.get_inplace_scratch_len()];
        for rx in 0..profiles.num_rx {
            for r in 0..profiles.num_range_bins {
                for (chirp, b) in buf.iter_mut().enumerate() {
                    *b = profiles.get(rx, chirp, r) * self.slow_window[chirp];
                }
                self.doppler_fft.process_with_scratch(&mut buf, &mut scratch);
                let base = cube.index(rx, r, 0);
                let row = &mut cube.values[base..base + n];
                // fftshift: FFT bin 0 goes to the centre.
                for (k, &v) in buf.iter().enumerate() {
                    row[(k + half) % n] = v;
                }
            }
        }
        Ok(cube)
    }

    pub fn process(&self, frame: &FrameCube) -> Result<RangeDopplerCube> {
        self.doppler_fft(&self.range_fft(frame)?)
    }
}

pub fn range_fft(frame: &FrameCube, cfg: &RadarConfig, windows: WindowSpec) -> Result<RangeProfiles> {
    Frontend::new(cfg, windows)?.range_fft(frame)
}

pub fn doppler_fft(profiles: &RangeProfiles, cfg: &RadarConfig, windows: WindowSpec) -> Result<RangeDopplerCube> {
    Frontend::new(cfg, windows)?.doppler_fft(profiles)
}

pub fn process_frame(frame: &FrameCube, cfg: &RadarConfig, windows: WindowSpec) -> Result<RangeDopplerCube> {
    Frontend::new(cfg, windows)?.process(frame)
}
