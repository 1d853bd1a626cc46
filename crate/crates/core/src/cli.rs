//! Command-line surface: `simulate`, `process`, `tune`, `evaluate`, `report`.
//!
//! Failures print `{"error":{"kind":…,"message":…}}` on stderr and exit
//! with a nonzero status.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::cfar::GroundTruthBox;
use crate::error::{Error, Result};
use crate::eval::{
    coverage_curve, default_tau_grid, k_grid, load_table_pairs, paired_delta, sweep_k, viewpoint_stats,
    ConfusionCounts, RateRecord, TableRow, TrialRecord, DEFAULT_FPR_CAP,
};
use crate::io::{
    detection_rows, read_csv, read_json, write_csv, write_csv_with_header, write_json, write_map, DetectionRow,
    MetricsFile, MetricsSummary, RecordingReader, RecordingWriter, RunInfo, RunManifest, TrialMetrics,
    DETECTION_COLUMNS,
};
use crate::pipeline::{Pipeline, ScoredMaps};
use crate::ra::Method;
use crate::radar::{range_resolution, ArrayGeometry, RadarConfig};
use crate::sim::{Label, SceneSpec, Synthesizer};

#[derive(Debug, Parser)]
#[command(name = "floor-occupancy", version, about = "Floor-occupancy radar simulation, processing and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a recording from a scene description.
    Simulate {
        #[arg(long)]
        scene: PathBuf,
        /// Radar configuration JSON; defaults to the built-in configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the scene seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the detection pipeline over a recording.
    Process {
        recording: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        method: Option<Method>,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep the CFAR scale over labelled recordings under an FPR cap.
    Tune {
        #[arg(required = true)]
        recordings: Vec<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        method: Option<Method>,
        #[arg(long, default_value_t = DEFAULT_FPR_CAP)]
        fpr_cap: f64,
        /// `start:stop:step`
        #[arg(long, default_value = "0.5:12.0:0.1")]
        k_grid: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score detections against ground truth, or replay a per-trial table.
    Evaluate {
        /// Detection CSVs written by `process` (each with its `.json` sidecar).
        detections: Vec<PathBuf>,
        /// Per-trial table CSV (`view,location,subject,dbf,proposed`) to replay.
        #[arg(long, conflicts_with = "detections")]
        table: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit plot data from one or more metrics files.
    Report {
        #[arg(required = true)]
        metrics: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

pub fn error_json(kind: &str, message: String) -> String {
    serde_json::to_string(&ErrorReport {
        error: ErrorBody { kind, message },
    })
    .expect("error report serializes")
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprintln!("{}", error_json("usage", e.render().to_string().trim().to_string()));
            return 2;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), e.to_string()));
            1
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate {
            scene,
            config,
            seed,
            out,
        } => simulate(&scene, config.as_deref(), seed, &out),
        Command::Process {
            recording,
            manifest,
            method,
            k,
            out,
        } => process(&recording, &load_manifest(manifest.as_deref(), method, k)?, &out),
        Command::Tune {
            recordings,
            manifest,
            method,
            fpr_cap,
            k_grid: grid,
            out,
        } => tune(&recordings, &load_manifest(manifest.as_deref(), method, None)?, fpr_cap, &grid, &out),
        Command::Evaluate { detections, table, out } => match table {
            Some(t) => evaluate_table(&t, &out),
            None => evaluate(&detections, &out),
        },
        Command::Report { metrics, out } => report(&metrics, &out),
    }
}

fn load_manifest(path: Option<&Path>, method: Option<Method>, k: Option<f64>) -> Result<RunManifest> {
    let mut m = match (path, method) {
        (Some(p), _) => read_json::<RunManifest>(p)?,
        (None, Some(method)) => RunManifest::for_method(method),
        (None, None) => return Err(Error::InvalidArgument("need --manifest or --method".into())),
    };
    if let Some(method) = method {
        if path.is_some() && method != m.method && k.is_none() {
            // the manifest's k belongs to its own method
            m.cfar.k = RunManifest::for_method(method).cfar.k;
        }
        m.method = method;
    }
    if let Some(k) = k {
        m.cfar.k = k;
    }
    m.validate()?;
    Ok(m)
}

fn create_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    Ok(())
}

pub fn simulate(scene: &Path, config: Option<&Path>, seed: Option<u64>, out: &Path) -> Result<()> {
    let mut scene: SceneSpec = read_json(scene)?;
    if let Some(seed) = seed {
        scene.seed = seed;
    }
    let cfg: RadarConfig = match config {
        Some(p) => read_json(p)?,
        None => RadarConfig::default(),
    };
    cfg.validate()?;
    let geom = ArrayGeometry::for_config(&cfg);
    let synth = Synthesizer::new(&scene, &cfg, &geom)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    let mut w = RecordingWriter::create(out, &synth.meta())?;
    for f in synth.frames() {
        w.write_frame(&f?)?;
    }
    w.finish()
}

pub fn process(recording: &Path, manifest: &RunManifest, out: &Path) -> Result<()> {
    let mut reader = RecordingReader::open(recording)?;
    let meta = reader.meta().clone();
    let mut pipeline = Pipeline::new(&meta.config, &meta.geometry, manifest)?;
    create_dir(out)?;
    let mut maps = match &manifest.outputs.ra_maps {
        Some(p) => Some(BufWriter::new(File::create(out.join(p))?)),
        None => None,
    };
    let mut rows: Vec<DetectionRow> = Vec::new();
    for i in 0..reader.n_frames() {
        let frame = reader.read_frame(i)?;
        let output = pipeline.process(&frame)?;
        rows.extend(detection_rows(&output.detections, pipeline.axes()));
        if let Some(w) = maps.as_mut() {
            write_map(w, &output.map)?;
        }
    }
    if let Some(mut w) = maps {
        std::io::Write::flush(&mut w)?;
    }
    let det_path = out.join(&manifest.outputs.detections);
    write_csv_with_header(&det_path, &DETECTION_COLUMNS, &rows)?;
    write_json(
        det_path.with_extension("json"),
        &RunInfo {
            method: manifest.method,
            k: manifest.cfar.k,
            recording: meta.clone(),
            range_resolution: range_resolution(&meta.config)?,
            azimuth_angles: pipeline.axes().azimuth_angles.clone(),
        },
    )
}

#[derive(Debug, Serialize)]
struct TuneOutput {
    method: Method,
    #[serde(flatten)]
    result: crate::eval::SweepResult,
}

#[derive(Debug, Serialize)]
struct SweepRow {
    k: f64,
    macro_f1: f64,
    fpr: f64,
    tpr: f64,
    feasible: bool,
}

fn parse_k_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::InvalidArgument(format!("k grid {s:?}: {e}")))?;
    match nums.as_slice() {
        [start, stop, step] => k_grid(*start, *stop, *step),
        _ => Err(Error::InvalidArgument(format!("k grid must be start:stop:step, got {s:?}"))),
    }
}

/// Confusion counts per `k` over a set of recordings.
pub fn sweep_counts(recordings: &[PathBuf], manifest: &RunManifest, ks: &[f64]) -> Result<Vec<(f64, ConfusionCounts)>> {
    let mut totals = vec![ConfusionCounts::default(); ks.len()];
    for path in recordings {
        let mut reader = RecordingReader::open(path)?;
        let meta = reader.meta().clone();
        let mut pipeline = Pipeline::new(&meta.config, &meta.geometry, manifest)?;
        let n = reader.n_frames();
        let scored = ScoredMaps::build(&mut pipeline, (0..n).map(|i| reader.read_frame(i)))?;
        for (total, &k) in totals.iter_mut().zip(ks) {
            let flags = scored.flags(k, manifest.suppression, meta.scoring_boxes(), pipeline.axes());
            let trial = TrialRecord {
                subject_id: meta.subject_id.clone(),
                view_tag: meta.view_tag.clone(),
                location_tag: meta.location_tag.clone(),
                method: manifest.method,
                label: meta.label,
                flags,
            };
            *total = *total + trial.counts();
        }
    }
    Ok(ks.iter().copied().zip(totals).collect())
}

pub fn tune(recordings: &[PathBuf], manifest: &RunManifest, fpr_cap: f64, grid: &str, out: &Path) -> Result<()> {
    let ks = parse_k_grid(grid)?;
    let points = sweep_counts(recordings, manifest, &ks)?;
    create_dir(out)?;
    let result = sweep_k(&points, fpr_cap);
    let curve = match &result {
        Ok(r) => r.curve.clone(),
        Err(Error::NoFeasibleK { curve, .. }) => curve.clone(),
        Err(_) => Vec::new(),
    };
    let rows: Vec<SweepRow> = curve
        .iter()
        .map(|p| SweepRow {
            k: p.k,
            macro_f1: p.macro_f1,
            fpr: p.fpr,
            tpr: p.tpr,
            feasible: p.feasible,
        })
        .collect();
    write_csv_with_header(out.join("sweep.csv"), &["k", "macro_f1", "fpr", "tpr", "feasible"], &rows)?;
    let result = result?;
    write_json(
        out.join("operating_point.json"),
        &TuneOutput {
            method: manifest.method,
            result,
        },
    )
}

/// Rebuilds a trial's per-frame flags from a detections CSV and its sidecar.
pub fn trial_from_detections(path: &Path) -> Result<TrialRecord> {
    let info: RunInfo = read_json(path.with_extension("json"))?;
    let rows: Vec<DetectionRow> = read_csv(path)?;
    let boxes: &[GroundTruthBox] = info.recording.scoring_boxes();
    let n = info.recording.n_frames;
    let mut flags = vec![false; n];
    for r in &rows {
        let i = r.frame_index as usize;
        if i >= n {
            return Err(Error::InvalidArgument(format!(
                "{}: frame {i} beyond the recording's {n} frames",
                path.display()
            )));
        }
        let az = r.azimuth_deg.to_radians();
        if boxes.iter().any(|b| b.contains(r.range_m, az)) {
            flags[i] = true;
        }
    }
    Ok(TrialRecord {
        subject_id: info.recording.subject_id.clone(),
        view_tag: info.recording.view_tag.clone(),
        location_tag: info.recording.location_tag.clone(),
        method: info.method,
        label: info.recording.label,
        flags,
    })
}

fn summarize(trials: &[TrialMetrics]) -> MetricsSummary {
    let mean = |method: Method| {
        let v: Vec<f64> = trials
            .iter()
            .filter(|t| t.method == method && t.label == Label::Occupied)
            .map(|t| t.rate)
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    };
    let fpr = |method: Method| {
        let (fp, n) = trials
            .iter()
            .filter(|t| t.method == method && t.label == Label::Empty)
            .fold((0usize, 0usize), |(fp, n), t| (fp + t.positives.unwrap_or(0), n + t.frames.unwrap_or(0)));
        (n > 0).then(|| fp as f64 / n as f64)
    };
    MetricsSummary {
        mean_rate_dbf: mean(Method::Dbf),
        mean_rate_capon: mean(Method::Capon),
        fpr_dbf: fpr(Method::Dbf),
        fpr_capon: fpr(Method::Capon),
    }
}

fn write_metrics(trials: Vec<TrialMetrics>, out: &Path) -> Result<()> {
    create_dir(out)?;
    let table: Vec<TableRow> = trials
        .iter()
        .filter(|t| t.label == Label::Occupied)
        .map(|t| TableRow {
            view: t.view_tag.clone(),
            location: t.location_tag.clone(),
            subject: t.subject_id.clone(),
            method: t.method,
            rate: t.rate,
        })
        .collect();
    write_csv_with_header(out.join("table.csv"), &["view", "location", "subject", "method", "rate"], &table)?;
    let summary = summarize(&trials);
    write_json(out.join("metrics.json"), &MetricsFile { trials, summary })
}

pub fn evaluate(detections: &[PathBuf], out: &Path) -> Result<()> {
    if detections.is_empty() {
        return Err(Error::Empty("no detection files given".into()));
    }
    let trials = detections
        .iter()
        .map(|p| TrialMetrics::from_trial(&trial_from_detections(p)?))
        .collect::<Result<Vec<_>>>()?;
    write_metrics(trials, out)
}

pub fn evaluate_table(table: &Path, out: &Path) -> Result<()> {
    let pairs = load_table_pairs(table)?;
    if pairs.is_empty() {
        return Err(Error::Empty(format!("{} has no rows", table.display())));
    }
    let mut trials = Vec::with_capacity(2 * pairs.len());
    for p in &pairs {
        for (method, rate) in [(Method::Dbf, p.dbf), (Method::Capon, p.proposed)] {
            trials.push(TrialMetrics {
                subject_id: p.subject.to_string(),
                view_tag: p.view.clone(),
                location_tag: p.location.clone(),
                method,
                label: Label::Occupied,
                frames: None,
                positives: None,
                rate,
            });
        }
    }
    write_metrics(trials, out)
}

#[derive(Debug, Serialize)]
struct CoverageRow {
    tau: f64,
    coverage_dbf: Option<f64>,
    coverage_capon: Option<f64>,
}

#[derive(Debug, Serialize)]
struct DeltaRow {
    rank: usize,
    subject: String,
    view: String,
    location: String,
    dbf: f64,
    capon: f64,
    delta: f64,
}

#[derive(Debug, Serialize)]
struct QuartileRow {
    view: String,
    method: Method,
    n: usize,
    min: f64,
    q1: f64,
    median: f64,
    q3: f64,
    max: f64,
}

#[derive(Debug, Serialize)]
struct ReportSummary {
    trials: usize,
    pairs: usize,
    improved_or_equal: Option<usize>,
    fraction_improved_or_equal: Option<f64>,
    mean_dbf: Option<f64>,
    mean_capon: Option<f64>,
}

pub fn report(metrics: &[PathBuf], out: &Path) -> Result<()> {
    let mut trials: Vec<TrialMetrics> = Vec::new();
    for p in metrics {
        trials.extend(read_json::<MetricsFile>(p)?.trials);
    }
    let occupied: Vec<&TrialMetrics> = trials.iter().filter(|t| t.label == Label::Occupied).collect();
    if occupied.is_empty() {
        return Err(Error::Empty("metrics contain no occupied trials".into()));
    }
    create_dir(out)?;

    let rates = |m: Method| -> Vec<f64> { occupied.iter().filter(|t| t.method == m).map(|t| t.rate).collect() };
    let taus = default_tau_grid();
    let cov = |m: Method| -> Result<Option<Vec<f64>>> {
        let r = rates(m);
        if r.is_empty() {
            return Ok(None);
        }
        Ok(Some(coverage_curve(&r, &taus)?.into_iter().map(|c| c.coverage).collect()))
    };
    let (cd, cc) = (cov(Method::Dbf)?, cov(Method::Capon)?);
    let rows: Vec<CoverageRow> = taus
        .iter()
        .enumerate()
        .map(|(i, &tau)| CoverageRow {
            tau,
            coverage_dbf: cd.as_ref().map(|v| v[i]),
            coverage_capon: cc.as_ref().map(|v| v[i]),
        })
        .collect();
    write_csv(out.join("coverage.csv"), &rows)?;

    let mut pairs: BTreeMap<(String, String, String), [Option<f64>; 2]> = BTreeMap::new();
    for t in &occupied {
        let slot = match t.method {
            Method::Dbf => 0,
            Method::Capon => 1,
        };
        pairs
            .entry((t.subject_id.clone(), t.view_tag.clone(), t.location_tag.clone()))
            .or_default()[slot] = Some(t.rate);
    }
    let mut deltas: Vec<DeltaRow> = pairs
        .into_iter()
        .filter_map(|((subject, view, location), p)| match p {
            [Some(dbf), Some(capon)] => Some(DeltaRow {
                rank: 0,
                subject,
                view,
                location,
                dbf,
                capon,
                delta: capon - dbf,
            }),
            _ => None,
        })
        .collect();
    deltas.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    deltas.iter_mut().enumerate().for_each(|(i, d)| d.rank = i + 1);
    write_csv_with_header(
        out.join("paired_deltas.csv"),
        &["rank", "subject", "view", "location", "dbf", "capon", "delta"],
        &deltas,
    )?;
    let summary = if deltas.is_empty() {
        None
    } else {
        Some(paired_delta(&deltas.iter().map(|d| (d.dbf, d.capon)).collect::<Vec<_>>())?)
    };

    let records: Vec<RateRecord> = occupied
        .iter()
        .map(|t| RateRecord {
            subject_id: t.subject_id.clone(),
            view_tag: t.view_tag.clone(),
            location_tag: t.location_tag.clone(),
            method: t.method,
            rate: t.rate,
        })
        .collect();
    let quart: Vec<QuartileRow> = viewpoint_stats(&records)?
        .into_iter()
        .map(|((view, method), q)| QuartileRow {
            view,
            method,
            n: q.n,
            min: q.min,
            q1: q.q1,
            median: q.median,
            q3: q.q3,
            max: q.max,
        })
        .collect();
    write_csv(out.join("viewpoint_quartiles.csv"), &quart)?;

    write_json(
        out.join("report.json"),
        &ReportSummary {
            trials: occupied.len(),
            pairs: deltas.len(),
            improved_or_equal: summary.as_ref().map(|s| s.improved_or_equal),
            fraction_improved_or_equal: summary.as_ref().map(|s| s.fraction_improved_or_equal),
            mean_dbf: summary.as_ref().map(|s| s.mean_baseline),
            mean_capon: summary.as_ref().map(|s| s.mean_proposed),
        },
    )
}
