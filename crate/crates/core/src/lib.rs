//! Quasi-static floor-occupancy detection from FMCW SIMO radar frames.
//!
//! Frames flow through range and Doppler FFTs ([`frontend`]), exponential
//! clutter removal ([`mti`]), a range-azimuth beamformer (phase-and-sum
//! [`dbf`] or adaptive [`capon`]) and a two-dimensional CA-CFAR detector
//! ([`cfar`]). [`sim`] synthesizes scenes with ground truth, [`eval`] scores
//! detections and tunes the CFAR scale, and [`io`] holds the file formats
//! used by the command-line tool.
//!
//! ```
//! use floor_occupancy::prelude::*;
//!
//! let cfg = RadarConfig::default();
//! let dr = range_resolution(&cfg).unwrap();
//! assert!((dr - 0.3).abs() < 1e-3);
//! ```

pub mod bench;
pub mod capon;
pub mod cfar;
pub mod cli;
pub mod dbf;
pub mod error;
pub mod eval;
pub mod frontend;
pub mod io;
pub mod linalg;
pub mod mti;
pub mod pipeline;
pub mod ra;
pub mod radar;
pub mod sim;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::capon::{CaponProcessor, ChannelSelection};
    pub use crate::cfar::{ca_cfar_2d, hit_test, suppress, CfarConfig, DetectionSet, EdgePolicy, GroundTruthBox, Suppression};
    pub use crate::dbf::{dbf_map, dbf_weights};
    pub use crate::error::{Error, Result};
    pub use crate::eval::{sweep_k, temporal_alarm, ConfusionCounts, OperatingPoint, TrialRecord};
    pub use crate::frontend::{process_frame, Frontend, RangeDopplerCube, WindowSpec};
    pub use crate::io::RunManifest;
    pub use crate::mti::ClutterState;
    pub use crate::pipeline::Pipeline;
    pub use crate::ra::{DopplerWindow, GridConfig, MapAxes, Method, RangeAzimuthMap, SteeringGrid};
    pub use crate::radar::{max_range, range_resolution, ArrayGeometry, FrameCube, RadarConfig};
    pub use crate::sim::{synthesize_recording, Label, SceneSpec, Synthesizer};
}
