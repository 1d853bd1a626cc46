//! Range-azimuth maps and the look-angle / Doppler-window plumbing shared by
//! both beamformers.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::RangeDopplerCube;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dbf,
    Capon,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Dbf => "dbf",
            Method::Capon => "capon",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dbf" => Ok(Method::Dbf),
            "capon" | "mvdr" | "proposed" => Ok(Method::Capon),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

/// Look angles in radians. Azimuth is measured from boresight.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringGrid {
    pub azimuth_angles: Vec<f64>,
    pub elevation_angles: Vec<f64>,
}

impl SteeringGrid {
    pub fn new(azimuth_angles: Vec<f64>, elevation_angles: Vec<f64>) -> Result<Self> {
        let grid = Self {
            azimuth_angles,
            elevation_angles,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Uniform azimuth grid over `±max_deg` with `step_deg` spacing.
    pub fn uniform_deg(max_deg: f64, step_deg: f64, elevations_deg: &[f64]) -> Result<Self> {
        if !(step_deg > 0.0 && max_deg > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "azimuth grid needs positive extent and step, got ±{max_deg}° / {step_deg}°"
            )));
        }
        let half = (max_deg / step_deg).round() as i64;
        let azimuth = (-half..=half).map(|i| (i as f64 * step_deg).to_radians()).collect();
        let elevation = elevations_deg.iter().map(|e| e.to_radians()).collect();
        Self::new(azimuth, elevation)
    }

    pub fn validate(&self) -> Result<()> {
        let az = &self.azimuth_angles;
        if az.len() < 2 {
            return Err(Error::InvalidArgument("azimuth grid needs at least 2 angles".into()));
        }
        if self.elevation_angles.is_empty() {
            return Err(Error::InvalidArgument("elevation grid is empty".into()));
        }
        for axis in [az, &self.elevation_angles] {
            if axis.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("steering grid"));
            }
            if axis.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidArgument("steering grid must be strictly increasing".into()));
            }
        }
        if !az.iter().any(|a| a.abs() < 1e-12) {
            return Err(Error::InvalidArgument("azimuth grid must contain 0".into()));
        }
        if az.iter().any(|a| a.abs() > std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidArgument("azimuth grid must stay within ±90°".into()));
        }
        Ok(())
    }

    pub fn num_azimuth(&self) -> usize {
        self.azimuth_angles.len()
    }

    pub fn num_elevation(&self) -> usize {
        self.elevation_angles.len()
    }

    /// Index of the grid azimuth closest to `angle`.
    pub fn nearest_azimuth(&self, angle: f64) -> usize {
        self.azimuth_angles
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - angle).abs().total_cmp(&(b.1 - angle).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// Serializable description of a [`SteeringGrid`], degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub azimuth_max_deg: f64,
    pub azimuth_step_deg: f64,
    pub elevations_deg: Vec<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            azimuth_max_deg: 60.0,
            azimuth_step_deg: 1.0,
            elevations_deg: vec![-10.0, 0.0, 10.0],
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<SteeringGrid> {
        SteeringGrid::uniform_deg(self.azimuth_max_deg, self.azimuth_step_deg, &self.elevations_deg)
    }
}

/// Doppler bins aggregated as snapshots (Capon) or integrated
/// non-coherently (DBF).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DopplerWindow {
    bins: Vec<usize>,
}

impl DopplerWindow {
    /// `half_width` bins either side of `center`, checked against the cube size.
    pub fn around(center: usize, half_width: usize, num_bins: usize) -> Result<Self> {
        let lo = center as isize - half_width as isize;
        let hi = center as isize + half_width as isize;
        Self::from_signed((lo..=hi).collect(), num_bins)
    }

    /// `count` bins centred on zero Doppler; even counts extend one bin lower.
    pub fn centered(cube: &RangeDopplerCube, count: usize) -> Result<Self> {
        Self::centered_on(cube.doppler_zero_index, count, cube.num_doppler_bins)
    }

    pub fn centered_on(zero_index: usize, count: usize, num_bins: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument("Doppler window is empty".into()));
        }
        let lo = zero_index as isize - (count / 2) as isize;
        Self::from_signed((lo..lo + count as isize).collect(), num_bins)
    }

    pub fn from_bins(bins: Vec<usize>, num_bins: usize) -> Result<Self> {
        Self::from_signed(bins.into_iter().map(|b| b as isize).collect(), num_bins)
    }

    fn from_signed(bins: Vec<isize>, num_bins: usize) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::InvalidArgument("Doppler window is empty".into()));
        }
        if bins.iter().any(|&b| b < 0 || b as usize >= num_bins) {
            return Err(Error::DopplerWindowOutOfRange { bins, num_bins });
        }
        Ok(Self {
            bins: bins.into_iter().map(|b| b as usize).collect(),
        })
    }

    pub fn bins(&self) -> &[usize] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub(crate) fn check(&self, num_bins: usize) -> Result<()> {
        if self.bins.iter().any(|&b| b >= num_bins) {
            return Err(Error::DopplerWindowOutOfRange {
                bins: self.bins.iter().map(|&b| b as isize).collect(),
                num_bins,
            });
        }
        Ok(())
    }
}

/// Non-negative power over `[range_bin][azimuth_bin]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeAzimuthMap {
    pub power: Vec<f64>,
    pub num_range_bins: usize,
    pub num_azimuth_bins: usize,
    pub frame_index: u64,
    pub method: Method,
}

impl RangeAzimuthMap {
    pub fn zeros(num_range_bins: usize, num_azimuth_bins: usize, method: Method) -> Self {
        Self {
            power: vec![0.0; num_range_bins * num_azimuth_bins],
            num_range_bins,
            num_azimuth_bins,
            frame_index: 0,
            method,
        }
    }

    #[inline]
    pub fn get(&self, range_bin: usize, azimuth_bin: usize) -> f64 {
        self.power[range_bin * self.num_azimuth_bins + azimuth_bin]
    }

    #[inline]
    pub fn set(&mut self, range_bin: usize, azimuth_bin: usize, value: f64) {
        self.power[range_bin * self.num_azimuth_bins + azimuth_bin] = value;
    }

    pub fn row(&self, range_bin: usize) -> &[f64] {
        let start = range_bin * self.num_azimuth_bins;
        &self.power[start..start + self.num_azimuth_bins]
    }

    /// `(range_bin, azimuth_bin)` of the largest cell.
    pub fn argmax(&self) -> (usize, usize) {
        let idx = self
            .power
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        (idx / self.num_azimuth_bins, idx % self.num_azimuth_bins)
    }

    pub fn validate(&self) -> Result<()> {
        if self.power.len() != self.num_range_bins * self.num_azimuth_bins {
            return Err(crate::error::mismatch(
                "range-azimuth map",
                self.num_range_bins * self.num_azimuth_bins,
                self.power.len(),
            ));
        }
        if self.power.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("range-azimuth map"));
        }
        if self.power.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidArgument("range-azimuth map has negative power".into()));
        }
        Ok(())
    }

    /// Divides by the map maximum; all-zero maps are left alone.
    pub fn normalize_max(&mut self) {
        let max = self.power.iter().copied().fold(0.0, f64::max);
        if max > 0.0 {
            self.power.iter_mut().for_each(|p| *p /= max);
        }
    }
}

/// Physical coordinates of map cells.
#[derive(Debug, Clone, PartialEq)]
pub struct MapAxes {
    pub range_resolution: f64,
    pub azimuth_angles: Vec<f64>,
}

impl MapAxes {
    pub fn new(range_resolution: f64, grid: &SteeringGrid) -> Self {
        Self {
            range_resolution,
            azimuth_angles: grid.azimuth_angles.clone(),
        }
    }

    pub fn range_m(&self, range_bin: usize) -> f64 {
        range_bin as f64 * self.range_resolution
    }

    pub fn azimuth_rad(&self, azimuth_bin: usize) -> f64 {
        self.azimuth_angles[azimuth_bin]
    }
}

/// Moving average over the last `frames` range-azimuth maps.
#[derive(Debug, Clone)]
pub struct MapSmoother {
    frames: usize,
    history: VecDeque<RangeAzimuthMap>,
}

impl MapSmoother {
    pub fn new(frames: usize) -> Result<Self> {
        if frames == 0 {
            return Err(Error::InvalidArgument("smoothing window must be >= 1 frame".into()));
        }
        Ok(Self {
            frames,
            history: VecDeque::with_capacity(frames),
        })
    }

    pub fn push(&mut self, map: RangeAzimuthMap) -> RangeAzimuthMap {
        if self.history.len() == self.frames {
            self.history.pop_front();
        }
        self.history.push_back(map);
        let newest = self.history.back().expect("just pushed");
        let mut out = newest.clone();
        let n = self.history.len() as f64;
        for (i, p) in out.power.iter_mut().enumerate() {
            *p = self.history.iter().map(|m| m.power[i]).sum::<f64>() / n;
        }
        out
    }
}
