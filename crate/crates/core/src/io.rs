//! Recording files, run manifests and the CSV/JSON artifacts written by the
//! command-line tool.
//!
//! A recording file is the 4-byte magic `RREC`, a little-endian `u32`
//! header length, a JSON header and then the payload: `f32` little-endian
//! `(re, im)` pairs laid out `[frame][rx][chirp][sample]`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::capon::ChannelSelection;
use crate::cfar::{CfarConfig, DetectionSet, Suppression};
use crate::error::{Error, Result};
use crate::eval::TrialRecord;
use crate::frontend::WindowSpec;
use crate::mti::DEFAULT_ALPHA;
use crate::ra::{GridConfig, MapAxes, Method, RangeAzimuthMap};
use crate::radar::FrameCube;
use crate::sim::{Recording, RecordingMeta};

pub const MAGIC: &[u8; 4] = b"RREC";
pub const FORMAT_VERSION: u32 = 1;
const BYTES_PER_SAMPLE: u64 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingHeader {
    pub format_version: u32,
    #[serde(flatten)]
    pub meta: RecordingMeta,
}

impl RecordingHeader {
    pub fn new(meta: RecordingMeta) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            meta,
        }
    }

    pub fn payload_len(&self) -> u64 {
        self.meta.n_frames as u64 * self.meta.config.frame_len() as u64 * BYTES_PER_SAMPLE
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        Ok(serde_json::to_vec(self)?)
    }
}

/// Streams frames into a recording file.
pub struct RecordingWriter {
    out: BufWriter<File>,
    header: RecordingHeader,
    written: usize,
    buf: Vec<u8>,
}

impl RecordingWriter {
    pub fn create(path: impl AsRef<Path>, meta: &RecordingMeta) -> Result<Self> {
        meta.validate()?;
        let header = RecordingHeader::new(meta.clone());
        let json = header.to_bytes()?;
        let len = u32::try_from(json.len()).map_err(|_| Error::Format("header too large".into()))?;
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(MAGIC)?;
        out.write_all(&len.to_le_bytes())?;
        out.write_all(&json)?;
        Ok(Self {
            out,
            header,
            written: 0,
            buf: Vec::new(),
        })
    }

    pub fn write_frame(&mut self, frame: &FrameCube) -> Result<()> {
        frame.check_dims(&self.header.meta.config)?;
        if self.written >= self.header.meta.n_frames {
            return Err(Error::Format(format!(
                "header declares {} frames, refusing to write more",
                self.header.meta.n_frames
            )));
        }
        self.buf.clear();
        for z in &frame.samples {
            self.buf.extend_from_slice(&(z.re as f32).to_le_bytes());
            self.buf.extend_from_slice(&(z.im as f32).to_le_bytes());
        }
        self.out.write_all(&self.buf)?;
        self.written += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        if self.written != self.header.meta.n_frames {
            return Err(Error::Format(format!(
                "wrote {} frames, header declares {}",
                self.written, self.header.meta.n_frames
            )));
        }
        self.out.flush()?;
        Ok(())
    }
}

pub fn write_recording(path: impl AsRef<Path>, rec: &Recording) -> Result<()> {
    let mut w = RecordingWriter::create(path, &rec.meta)?;
    for f in &rec.frames {
        w.write_frame(f)?;
    }
    w.finish()
}

/// Random-access reader over a recording file.
pub struct RecordingReader {
    file: BufReader<File>,
    header: RecordingHeader,
    header_bytes: Vec<u8>,
    payload_offset: u64,
}

impl RecordingReader {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let mut file = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        file.read_exact(&mut magic)
            .map_err(|_| Error::Format("file too short for magic".into()))?;
        if &magic != MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let mut len = [0u8; 4];
        file.read_exact(&mut len)
            .map_err(|_| Error::Format("file too short for header length".into()))?;
        let len = u32::from_le_bytes(len) as usize;
        let mut header_bytes = vec![0u8; len];
        file.read_exact(&mut header_bytes)
            .map_err(|_| Error::Format("truncated header".into()))?;
        let header: RecordingHeader = parse_json_bytes(&header_bytes, "recording header")?;
        if header.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format_version {}", header.format_version)));
        }
        header.meta.validate()?;
        let payload_offset = 8 + len as u64;
        let total = file.get_ref().metadata()?.len();
        let actual = total.saturating_sub(payload_offset);
        if actual != header.payload_len() {
            return Err(Error::PayloadLength {
                expected: header.payload_len(),
                actual,
            });
        }
        Ok(Self {
            file,
            header,
            header_bytes,
            payload_offset,
        })
    }

    pub fn header(&self) -> &RecordingHeader {
        &self.header
    }

    pub fn meta(&self) -> &RecordingMeta {
        &self.header.meta
    }

    /// Header JSON exactly as stored.
    pub fn header_bytes(&self) -> &[u8] {
        &self.header_bytes
    }

    pub fn n_frames(&self) -> usize {
        self.header.meta.n_frames
    }

    pub fn read_frame(&mut self, index: usize) -> Result<FrameCube> {
        let cfg = self.header.meta.config;
        if index >= self.n_frames() {
            return Err(Error::InvalidArgument(format!("frame {index} of {}", self.n_frames())));
        }
        let frame_bytes = cfg.frame_len() as u64 * BYTES_PER_SAMPLE;
        self.file
            .seek(SeekFrom::Start(self.payload_offset + index as u64 * frame_bytes))?;
        let mut raw = vec![0u8; frame_bytes as usize];
        self.file.read_exact(&mut raw)?;
        let mut frame = FrameCube::zeros(&cfg, index as u64);
        for (z, chunk) in frame.samples.iter_mut().zip(raw.chunks_exact(8)) {
            let re = f32::from_le_bytes(chunk[..4].try_into().expect("4 bytes"));
            let im = f32::from_le_bytes(chunk[4..].try_into().expect("4 bytes"));
            *z = Complex64::new(re as f64, im as f64);
        }
        Ok(frame)
    }

    pub fn read_all(mut self) -> Result<Recording> {
        let frames = (0..self.n_frames()).map(|i| self.read_frame(i)).collect::<Result<Vec<_>>>()?;
        Ok(Recording {
            meta: self.header.meta,
            frames,
        })
    }
}

pub fn read_recording(path: impl AsRef<Path>) -> Result<Recording> {
    RecordingReader::open(path)?.read_all()
}

/// Parses JSON, reporting the offending field path on schema errors.
pub fn parse_json_bytes<T: DeserializeOwned>(bytes: &[u8], what: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Schema {
        path: format!("{what}: {}", e.path()),
        source: e.into_inner(),
    })
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    parse_json_bytes(&bytes, &path.display().to_string())
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes)?;
    Ok(())
}

fn default_doppler_bins() -> usize {
    5
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

/// Where `process` writes its artifacts, relative to `--out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub detections: PathBuf,
    /// Optional little-endian `f64` dump of every range-azimuth map.
    #[serde(default)]
    pub ra_maps: Option<PathBuf>,
}

impl Default for OutputPaths {
    fn default() -> Self {
        Self {
            detections: PathBuf::from("detections.csv"),
            ra_maps: None,
        }
    }
}

/// Frozen processing choices for one run, including the per-method `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub method: Method,
    #[serde(default)]
    pub cfar: CfarConfig,
    #[serde(default)]
    pub grid: GridConfig,
    /// Near-zero Doppler bins used per range bin.
    #[serde(default = "default_doppler_bins")]
    pub doppler_bins: usize,
    #[serde(default = "default_alpha")]
    pub mti_alpha: f64,
    #[serde(default)]
    pub windows: WindowSpec,
    #[serde(default)]
    pub suppression: Suppression,
    #[serde(default)]
    pub capon_channels: ChannelSelection,
    #[serde(default)]
    pub outputs: OutputPaths,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Moving average over this many range-azimuth maps; off when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing_frames: Option<usize>,
    /// Scale every range-azimuth map to a maximum of 1.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalize_maps: bool,
}

impl RunManifest {
    /// Defaults for `method`, with the method's reference operating point.
    pub fn for_method(method: Method) -> Self {
        let k = match method {
            Method::Dbf => 1.4,
            Method::Capon => 2.4,
        };
        Self {
            method,
            cfar: CfarConfig::default().with_k(k),
            grid: GridConfig::default(),
            doppler_bins: default_doppler_bins(),
            mti_alpha: DEFAULT_ALPHA,
            windows: WindowSpec::default(),
            suppression: Suppression::default(),
            capon_channels: ChannelSelection::default(),
            outputs: OutputPaths::default(),
            seed: None,
            smoothing_frames: None,
            normalize_maps: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cfar.validate()?;
        self.grid.build()?;
        if self.doppler_bins == 0 {
            return Err(Error::InvalidConfig("doppler_bins must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.mti_alpha) {
            return Err(Error::InvalidConfig(format!("mti_alpha must lie in [0, 1], got {}", self.mti_alpha)));
        }
        if self.smoothing_frames == Some(0) {
            return Err(Error::InvalidConfig("smoothing_frames must be >= 1".into()));
        }
        Ok(())
    }
}

/// One row of the detections CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionRow {
    pub frame_index: u64,
    pub range_bin: usize,
    pub azimuth_bin: usize,
    pub range_m: f64,
    pub azimuth_deg: f64,
    pub power: f64,
    pub threshold: f64,
}

pub fn detection_rows(set: &DetectionSet, axes: &MapAxes) -> Vec<DetectionRow> {
    set.detections
        .iter()
        .map(|d| DetectionRow {
            frame_index: set.frame_index,
            range_bin: d.range_bin,
            azimuth_bin: d.azimuth_bin,
            range_m: axes.range_m(d.range_bin),
            azimuth_deg: axes.azimuth_rad(d.azimuth_bin).to_degrees(),
            power: d.power,
            threshold: d.threshold,
        })
        .collect()
}

pub fn write_csv<T: Serialize>(path: impl AsRef<Path>, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a CSV that carries a header even when `rows` is empty.
pub fn write_csv_with_header<T: Serialize>(path: impl AsRef<Path>, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub const DETECTION_COLUMNS: [&str; 7] = [
    "frame_index",
    "range_bin",
    "azimuth_bin",
    "range_m",
    "azimuth_deg",
    "power",
    "threshold",
];

pub fn read_csv<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_path(path)?;
    Ok(rdr.deserialize().collect::<std::result::Result<Vec<T>, _>>()?)
}

/// Appends one map as little-endian `f64` values.
pub fn write_map<W: Write>(out: &mut W, map: &RangeAzimuthMap) -> Result<()> {
    for p in &map.power {
        out.write_all(&p.to_le_bytes())?;
    }
    Ok(())
}

/// Sidecar written next to a detections CSV so it can be scored later.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub method: Method,
    pub k: f64,
    pub recording: RecordingMeta,
    pub range_resolution: f64,
    #[serde(with = "deg_vec")]
    pub azimuth_angles: Vec<f64>,
}

mod deg_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let deg: Vec<f64> = v.iter().map(|&r| crate::cfar::degrees::to_file(r)).collect();
        deg.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<f64>::deserialize(d)?.into_iter().map(f64::to_radians).collect())
    }
}

/// Per-trial metrics as written to `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub subject_id: String,
    pub view_tag: String,
    pub location_tag: String,
    pub method: Method,
    pub label: crate::sim::Label,
    /// Absent for replayed tables that only carry rates.
    #[serde(default)]
    pub frames: Option<usize>,
    #[serde(default)]
    pub positives: Option<usize>,
    /// Frame-positive rate on occupied trials, frame FPR on empty ones.
    pub rate: f64,
}

impl TrialMetrics {
    pub fn from_trial(t: &TrialRecord) -> Result<Self> {
        if t.flags.is_empty() {
            return Err(Error::Empty("trial has no frames".into()));
        }
        Ok(Self {
            subject_id: t.subject_id.clone(),
            view_tag: t.view_tag.clone(),
            location_tag: t.location_tag.clone(),
            method: t.method,
            label: t.label,
            frames: Some(t.flags.len()),
            positives: Some(t.positives()),
            rate: t.positives() as f64 / t.flags.len() as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsFile {
    pub trials: Vec<TrialMetrics>,
    pub summary: MetricsSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub mean_rate_dbf: Option<f64>,
    pub mean_rate_capon: Option<f64>,
    pub fpr_dbf: Option<f64>,
    pub fpr_capon: Option<f64>,
}
