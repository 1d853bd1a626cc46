//! Two-dimensional cell-averaging CFAR on range-azimuth maps, detection
//! suppression and ground-truth box hit testing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ra::{MapAxes, RangeAzimuthMap};

/// How cells near the map border are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgePolicy {
    /// Clip the window to the map and average over the cells that remain.
    #[default]
    ShrinkWindow,
    /// Skip any cell whose full window does not fit.
    SkipCell,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CfarConfig {
    /// `(range, azimuth)` guard cells per side.
    pub guard_cells: [usize; 2],
    /// `(range, azimuth)` training cells per side.
    pub training_cells: [usize; 2],
    pub k: f64,
    #[serde(default)]
    pub edge_policy: EdgePolicy,
}

impl Default for CfarConfig {
    fn default() -> Self {
        Self {
            guard_cells: [2, 2],
            training_cells: [4, 4],
            k: 1.4,
            edge_policy: EdgePolicy::ShrinkWindow,
        }
    }
}

impl CfarConfig {
    pub fn with_k(self, k: f64) -> Self {
        Self { k, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.training_cells.iter().any(|&t| t == 0) {
            return Err(Error::InvalidConfig("CFAR needs at least one training cell per side".into()));
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(Error::InvalidConfig(format!("CFAR k must be > 0, got {}", self.k)));
        }
        Ok(())
    }

    /// Training cells around an interior cell.
    pub fn num_training(&self) -> usize {
        let outer = |g: usize, t: usize| 2 * (g + t) + 1;
        outer(self.guard_cells[0], self.training_cells[0]) * outer(self.guard_cells[1], self.training_cells[1])
            - (2 * self.guard_cells[0] + 1) * (2 * self.guard_cells[1] + 1)
    }

    /// False-alarm probability on unit-mean exponential noise for an interior cell.
    pub fn exponential_pfa(&self) -> f64 {
        let n = self.num_training() as f64;
        (1.0 + self.k / n).powf(-n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub range_bin: usize,
    pub azimuth_bin: usize,
    pub power: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DetectionSet {
    pub detections: Vec<Detection>,
    pub frame_index: u64,
    /// Cells not evaluated because their training ring was empty or clipped.
    pub skipped_cells: usize,
}

impl DetectionSet {
    pub fn len(&self) -> usize {
        self.detections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detections.is_empty()
    }

    /// Row-major boolean mask over the map.
    pub fn mask(&self, num_range_bins: usize, num_azimuth_bins: usize) -> Vec<bool> {
        let mut mask = vec![false; num_range_bins * num_azimuth_bins];
        for d in &self.detections {
            mask[d.range_bin * num_azimuth_bins + d.azimuth_bin] = true;
        }
        mask
    }
}

/// Training-ring means for every cell, independent of `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CfarStats {
    /// `None` for skipped cells.
    pub means: Vec<Option<f64>>,
    pub num_range_bins: usize,
    pub num_azimuth_bins: usize,
}

pub fn training_means(map: &RangeAzimuthMap, cfg: &CfarConfig) -> Result<CfarStats> {
    cfg.validate()?;
    map.validate()?;
    let (nr, na) = (map.num_range_bins, map.num_azimuth_bins);
    let [gr, ga] = cfg.guard_cells.map(|g| g as isize);
    let [tr, ta] = cfg.training_cells.map(|t| t as isize);
    let (or, oa) = (gr + tr, ga + ta);
    let mut means = Vec::with_capacity(nr * na);
    for r in 0..nr as isize {
        for a in 0..na as isize {
            let clipped = r - or < 0 || a - oa < 0 || r + or >= nr as isize || a + oa >= na as isize;
            if clipped && cfg.edge_policy == EdgePolicy::SkipCell {
                means.push(None);
                continue;
            }
            let (r_lo, r_hi) = ((r - or).max(0), (r + or).min(nr as isize - 1));
            let (a_lo, a_hi) = ((a - oa).max(0), (a + oa).min(na as isize - 1));
            let mut sum = 0.0;
            let mut count = 0usize;
            for rr in r_lo..=r_hi {
                let row = map.row(rr as usize);
                let in_guard_rows = (rr - r).abs() <= gr;
                for aa in a_lo..=a_hi {
                    if in_guard_rows && (aa - a).abs() <= ga {
                        continue;
                    }
                    sum += row[aa as usize];
                    count += 1;
                }
            }
            means.push((count > 0).then(|| sum / count as f64));
        }
    }
    Ok(CfarStats {
        means,
        num_range_bins: nr,
        num_azimuth_bins: na,
    })
}

/// Thresholds precomputed statistics at sensitivity `k`.
pub fn detect_with_stats(map: &RangeAzimuthMap, stats: &CfarStats, k: f64) -> DetectionSet {
    let mut set = DetectionSet {
        frame_index: map.frame_index,
        ..DetectionSet::default()
    };
    for (i, (&power, mean)) in map.power.iter().zip(&stats.means).enumerate() {
        let Some(mean) = mean else {
            set.skipped_cells += 1;
            continue;
        };
        let threshold = k * mean;
        if power > threshold {
            set.detections.push(Detection {
                range_bin: i / stats.num_azimuth_bins,
                azimuth_bin: i % stats.num_azimuth_bins,
                power,
                threshold,
            });
        }
    }
    set
}

pub fn ca_cfar_2d(map: &RangeAzimuthMap, cfg: &CfarConfig) -> Result<DetectionSet> {
    let stats = training_means(map, cfg)?;
    Ok(detect_with_stats(map, &stats, cfg.k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suppression {
    /// Keep the strongest cell of each 8-connected group.
    #[default]
    ConnectedMax,
    Identity,
}

pub fn suppress(dets: &DetectionSet, policy: Suppression) -> DetectionSet {
    if policy == Suppression::Identity || dets.detections.len() <= 1 {
        return dets.clone();
    }
    let cells: std::collections::HashMap<(usize, usize), usize> = dets
        .detections
        .iter()
        .enumerate()
        .map(|(i, d)| ((d.range_bin, d.azimuth_bin), i))
        .collect();
    let mut group = vec![usize::MAX; dets.detections.len()];
    let mut kept = Vec::new();
    for start in 0..dets.detections.len() {
        if group[start] != usize::MAX {
            continue;
        }
        group[start] = start;
        let mut stack = vec![start];
        let mut best = start;
        while let Some(i) = stack.pop() {
            let d = &dets.detections[i];
            if d.power > dets.detections[best].power {
                best = i;
            }
            for dr in -1isize..=1 {
                for da in -1isize..=1 {
                    let (r, a) = (d.range_bin as isize + dr, d.azimuth_bin as isize + da);
                    if r < 0 || a < 0 {
                        continue;
                    }
                    if let Some(&j) = cells.get(&(r as usize, a as usize)) {
                        if group[j] == usize::MAX {
                            group[j] = start;
                            stack.push(j);
                        }
                    }
                }
            }
        }
        kept.push(best);
    }
    kept.sort_unstable();
    DetectionSet {
        detections: kept.into_iter().map(|i| dets.detections[i]).collect(),
        frame_index: dets.frame_index,
        skipped_cells: dets.skipped_cells,
    }
}

pub const DEFAULT_BOX_HALF_RANGE_M: f64 = 0.45;
pub const DEFAULT_BOX_HALF_AZIMUTH_DEG: f64 = 10.0;

/// Scoring box `[r₀ ± Δr] × [θ₀ ± Δθ]`. Angles are radians in memory and
/// degrees on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthBox {
    pub center_range_m: f64,
    #[serde(rename = "center_azimuth_deg", with = "degrees")]
    pub center_azimuth: f64,
    pub half_range_m: f64,
    #[serde(rename = "half_azimuth_deg", with = "degrees")]
    pub half_azimuth: f64,
    #[serde(default)]
    pub view_tag: String,
    #[serde(default)]
    pub location_tag: String,
}

impl GroundTruthBox {
    pub fn around(center_range_m: f64, center_azimuth: f64) -> Self {
        Self {
            center_range_m,
            center_azimuth,
            half_range_m: DEFAULT_BOX_HALF_RANGE_M,
            half_azimuth: DEFAULT_BOX_HALF_AZIMUTH_DEG.to_radians(),
            view_tag: String::new(),
            location_tag: String::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.center_range_m, self.center_azimuth, self.half_range_m, self.half_azimuth];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ground-truth box"));
        }
        if self.half_range_m <= 0.0 || self.half_azimuth <= 0.0 {
            return Err(Error::InvalidConfig("ground-truth box half extents must be > 0".into()));
        }
        Ok(())
    }

    pub fn contains(&self, range_m: f64, azimuth: f64) -> bool {
        const SLACK: f64 = 1e-9;
        (range_m - self.center_range_m).abs() <= self.half_range_m + SLACK
            && (azimuth - self.center_azimuth).abs() <= self.half_azimuth + SLACK
    }
}

pub fn hit_test(dets: &DetectionSet, b: &GroundTruthBox, axes: &MapAxes) -> bool {
    dets.detections
        .iter()
        .any(|d| b.contains(axes.range_m(d.range_bin), axes.azimuth_rad(d.azimuth_bin)))
}

/// True if any detection falls inside any of the boxes.
pub fn hits_any(dets: &DetectionSet, boxes: &[GroundTruthBox], axes: &MapAxes) -> bool {
    boxes.iter().any(|b| hit_test(dets, b, axes))
}

/// Radians in memory, degrees on disk. Degrees are rounded to 1e-9 so a
/// write-read-write cycle is byte-stable.
pub(crate) mod degrees {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn to_file(rad: f64) -> f64 {
        (rad.to_degrees() * 1e9).round() / 1e9
    }

    pub fn serialize<S: Serializer>(rad: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(to_file(*rad))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(f64::deserialize(d)?.to_radians())
    }
}
