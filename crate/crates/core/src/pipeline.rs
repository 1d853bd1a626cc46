//! End-to-end processing of a frame stream: range/Doppler FFTs, MTI, a
//! range-azimuth beamformer, CA-CFAR and suppression.

use crate::capon::CaponProcessor;
use crate::cfar::{detect_with_stats, hits_any, suppress, training_means, CfarStats, DetectionSet, GroundTruthBox};
use crate::dbf::{dbf_map, dbf_weights, DbfWeights};
use crate::error::Result;
use crate::frontend::{Frontend, RangeDopplerCube};
use crate::io::RunManifest;
use crate::mti::ClutterState;
use crate::ra::{DopplerWindow, MapAxes, MapSmoother, Method, RangeAzimuthMap, SteeringGrid};
use crate::radar::{range_resolution, ArrayGeometry, FrameCube, RadarConfig};

enum Beamformer {
    Dbf { weights: DbfWeights, window: DopplerWindow },
    Capon(CaponProcessor),
}

/// Stateful per-recording processor. The MTI estimate starts from zero and
/// is cleared by [`Pipeline::reset`].
pub struct Pipeline {
    cfg: RadarConfig,
    manifest: RunManifest,
    frontend: Frontend,
    mti: ClutterState,
    beamformer: Beamformer,
    axes: MapAxes,
    smoother: Option<MapSmoother>,
    clamped_cells: usize,
}

/// Everything produced for one frame.
#[derive(Debug, Clone)]
pub struct FrameOutput {
    pub map: RangeAzimuthMap,
    pub raw: DetectionSet,
    pub detections: DetectionSet,
}

impl Pipeline {
    pub fn new(cfg: &RadarConfig, geom: &ArrayGeometry, manifest: &RunManifest) -> Result<Self> {
        cfg.validate()?;
        geom.validate(cfg)?;
        manifest.validate()?;
        let grid: SteeringGrid = manifest.grid.build()?;
        let window = DopplerWindow::centered_on(cfg.doppler_zero_index(), manifest.doppler_bins, cfg.chirps_per_frame)?;
        let beamformer = match manifest.method {
            Method::Dbf => Beamformer::Dbf {
                weights: dbf_weights(&grid, geom),
                window,
            },
            Method::Capon => Beamformer::Capon(CaponProcessor::new(&grid, geom, manifest.capon_channels, window)),
        };
        Ok(Self {
            cfg: *cfg,
            manifest: manifest.clone(),
            frontend: Frontend::new(cfg, manifest.windows)?,
            mti: ClutterState::new(
                (cfg.num_rx, cfg.num_range_bins(), cfg.chirps_per_frame),
                manifest.mti_alpha,
            )?,
            beamformer,
            axes: MapAxes::new(range_resolution(cfg)?, &grid),
            smoother: manifest.smoothing_frames.map(MapSmoother::new).transpose()?,
            clamped_cells: 0,
        })
    }

    pub fn axes(&self) -> &MapAxes {
        &self.axes
    }

    pub fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    /// Capon cells clamped so far.
    pub fn clamped_cells(&self) -> usize {
        self.clamped_cells
    }

    pub fn reset(&mut self) {
        self.mti.reset();
        if let Some(n) = self.manifest.smoothing_frames {
            self.smoother = Some(MapSmoother::new(n).expect("validated"));
        }
        self.clamped_cells = 0;
    }

    /// Range-Doppler cube after clutter removal.
    pub fn clutter_filtered(&mut self, frame: &FrameCube) -> Result<RangeDopplerCube> {
        frame.check_dims(&self.cfg)?;
        let rd = self.frontend.process(frame)?;
        self.mti.step(&rd)
    }

    pub fn range_azimuth(&mut self, frame: &FrameCube) -> Result<RangeAzimuthMap> {
        let rd = self.clutter_filtered(frame)?;
        let mut map = match &self.beamformer {
            Beamformer::Dbf { weights, window } => dbf_map(&rd, weights, window)?,
            Beamformer::Capon(p) => {
                let (map, diag) = p.map(&rd)?;
                self.clamped_cells += diag.clamped_cells;
                map
            }
        };
        if let Some(s) = &mut self.smoother {
            map = s.push(map);
        }
        if self.manifest.normalize_maps {
            map.normalize_max();
        }
        Ok(map)
    }

    pub fn detect(&self, map: &RangeAzimuthMap) -> Result<(DetectionSet, DetectionSet)> {
        let stats = training_means(map, &self.manifest.cfar)?;
        let raw = detect_with_stats(map, &stats, self.manifest.cfar.k);
        let kept = suppress(&raw, self.manifest.suppression);
        Ok((raw, kept))
    }

    pub fn process(&mut self, frame: &FrameCube) -> Result<FrameOutput> {
        let map = self.range_azimuth(frame)?;
        let (raw, detections) = self.detect(&map)?;
        Ok(FrameOutput { map, raw, detections })
    }
}

/// Range-azimuth maps with their CFAR statistics, ready to be scored at
/// many `k` values.
pub struct ScoredMaps {
    pub maps: Vec<RangeAzimuthMap>,
    pub stats: Vec<CfarStats>,
}

impl ScoredMaps {
    pub fn build(pipeline: &mut Pipeline, frames: impl IntoIterator<Item = Result<FrameCube>>) -> Result<Self> {
        pipeline.reset();
        let mut maps = Vec::new();
        let mut stats = Vec::new();
        for f in frames {
            let map = pipeline.range_azimuth(&f?)?;
            stats.push(training_means(&map, &pipeline.manifest.cfar)?);
            maps.push(map);
        }
        Ok(Self { maps, stats })
    }

    /// Post-suppression detections of every frame at sensitivity `k`.
    pub fn detections(&self, k: f64, policy: crate::cfar::Suppression) -> Vec<DetectionSet> {
        self.maps
            .iter()
            .zip(&self.stats)
            .map(|(m, s)| suppress(&detect_with_stats(m, s, k), policy))
            .collect()
    }

    /// Per-frame flags: does any surviving detection fall inside `boxes`?
    pub fn flags(&self, k: f64, policy: crate::cfar::Suppression, boxes: &[GroundTruthBox], axes: &MapAxes) -> Vec<bool> {
        self.detections(k, policy).iter().map(|d| hits_any(d, boxes, axes)).collect()
    }
}
