//! Frame-level scoring, CFAR sensitivity tuning, trial aggregation and the
//! temporal alarm rule.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ra::Method;
use crate::sim::Label;

/// Default frame-level false-positive-rate cap used for tuning.
pub const DEFAULT_FPR_CAP: f64 = 0.1;

/// Per-frame outcomes of one trial. For occupied trials a flag is a hit
/// inside the truth box; for empty trials it is a detection inside the
/// candidate ROI union.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub subject_id: String,
    pub view_tag: String,
    pub location_tag: String,
    pub method: Method,
    pub label: Label,
    pub flags: Vec<bool>,
}

impl TrialRecord {
    pub fn positives(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn counts(&self) -> ConfusionCounts {
        let pos = self.positives() as u64;
        let neg = self.flags.len() as u64 - pos;
        match self.label {
            Label::Occupied => ConfusionCounts {
                tp: pos,
                fn_: neg,
                ..Default::default()
            },
            Label::Empty => ConfusionCounts {
                fp: pos,
                tn: neg,
                ..Default::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// True-positive rate, 0 without positive frames.
    pub fn tpr(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }
}

impl std::ops::Add for ConfusionCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            tn: self.tn + o.tn,
            fn_: self.fn_ + o.fn_,
        }
    }
}

impl std::iter::Sum for ConfusionCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), |a, b| a + b)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn frame_positive_rate(trial: &TrialRecord) -> Result<f64> {
    if trial.label != Label::Occupied {
        return Err(Error::InvalidArgument("frame-positive rate needs an occupied trial".into()));
    }
    if trial.flags.is_empty() {
        return Err(Error::Empty("trial has no frames".into()));
    }
    Ok(trial.positives() as f64 / trial.flags.len() as f64)
}

pub fn frame_fpr(counts: &ConfusionCounts) -> Result<f64> {
    if counts.fp + counts.tn == 0 {
        return Err(Error::Empty("no negative frames".into()));
    }
    Ok(counts.fp as f64 / (counts.fp + counts.tn) as f64)
}

/// Mean of the occupied-class and empty-class F1 scores.
pub fn macro_f1(counts: &ConfusionCounts) -> Result<f64> {
    if counts.total() == 0 {
        return Err(Error::Empty("all confusion counts are zero".into()));
    }
    let f1 = |hit: u64, miss_a: u64, miss_b: u64| ratio(2 * hit, 2 * hit + miss_a + miss_b);
    let pos = f1(counts.tp, counts.fp, counts.fn_);
    let neg = f1(counts.tn, counts.fn_, counts.fp);
    Ok(0.5 * (pos + neg))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub k: f64,
    pub macro_f1: f64,
    pub fpr: f64,
    pub tpr: f64,
    pub feasible: bool,
}

impl OperatingPoint {
    pub fn from_counts(k: f64, counts: &ConfusionCounts, fpr_cap: f64) -> Result<Self> {
        let fpr = frame_fpr(counts)?;
        Ok(Self {
            k,
            macro_f1: macro_f1(counts)?,
            fpr,
            tpr: counts.tpr(),
            feasible: fpr <= fpr_cap,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub best: OperatingPoint,
    pub curve: Vec<OperatingPoint>,
    pub fpr_cap: f64,
}

/// Picks the feasible `k` with the highest macro-F1, preferring larger `k`
/// on ties.
pub fn sweep_k(points: &[(f64, ConfusionCounts)], fpr_cap: f64) -> Result<SweepResult> {
    if points.is_empty() {
        return Err(Error::Empty("k grid".into()));
    }
    if points.iter().any(|(_, c)| c.tp + c.fn_ == 0 || c.fp + c.tn == 0) {
        return Err(Error::InvalidArgument("every k needs both occupied and empty frames".into()));
    }
    let mut curve = points
        .iter()
        .map(|(k, c)| OperatingPoint::from_counts(*k, c, fpr_cap))
        .collect::<Result<Vec<_>>>()?;
    curve.sort_by(|a, b| a.k.total_cmp(&b.k));
    let best = curve
        .iter()
        .filter(|p| p.feasible)
        .max_by(|a, b| a.macro_f1.total_cmp(&b.macro_f1).then(a.k.total_cmp(&b.k)))
        .copied();
    match best {
        Some(best) => Ok(SweepResult { best, curve, fpr_cap }),
        None => Err(Error::NoFeasibleK { fpr_cap, curve }),
    }
}

/// Evenly spaced grid `start, start + step, …` up to and including `stop`.
pub fn k_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && stop >= start && start > 0.0) {
        return Err(Error::InvalidArgument(format!("bad k grid {start}..{stop} step {step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveragePoint {
    pub tau: f64,
    pub coverage: f64,
}

pub fn coverage_curve(rates: &[f64], taus: &[f64]) -> Result<Vec<CoveragePoint>> {
    if rates.is_empty() {
        return Err(Error::Empty("coverage needs at least one trial".into()));
    }
    Ok(taus
        .iter()
        .map(|&tau| CoveragePoint {
            tau,
            coverage: rates.iter().filter(|&&r| r >= tau).count() as f64 / rates.len() as f64,
        })
        .collect())
}

/// `0, 0.01, …, 1`.
pub fn default_tau_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedDelta {
    /// `proposed − baseline`, ascending.
    pub deltas: Vec<f64>,
    pub improved_or_equal: usize,
    pub fraction_improved_or_equal: f64,
    pub mean_baseline: f64,
    pub mean_proposed: f64,
}

pub fn paired_delta(pairs: &[(f64, f64)]) -> Result<PairedDelta> {
    if pairs.is_empty() {
        return Err(Error::Empty("no trial pairs".into()));
    }
    let n = pairs.len() as f64;
    let mut deltas: Vec<f64> = pairs.iter().map(|(b, p)| p - b).collect();
    deltas.sort_by(f64::total_cmp);
    let improved = pairs.iter().filter(|(b, p)| p >= b).count();
    Ok(PairedDelta {
        deltas,
        improved_or_equal: improved,
        fraction_improved_or_equal: improved as f64 / n,
        mean_baseline: pairs.iter().map(|p| p.0).sum::<f64>() / n,
        mean_proposed: pairs.iter().map(|p| p.1).sum::<f64>() / n,
    })
}

/// Pairs up baseline and Capon rates from the same (subject, view, location).
pub fn pair_trials(trials: &[TrialRecord]) -> Result<Vec<(f64, f64)>> {
    let mut by_key: BTreeMap<(String, String, String), [Option<f64>; 2]> = BTreeMap::new();
    for t in trials.iter().filter(|t| t.label == Label::Occupied) {
        let key = (t.subject_id.clone(), t.view_tag.clone(), t.location_tag.clone());
        let slot = match t.method {
            Method::Dbf => 0,
            Method::Capon => 1,
        };
        by_key.entry(key).or_default()[slot] = Some(frame_positive_rate(t)?);
    }
    let mut out = Vec::with_capacity(by_key.len());
    for (key, pair) in by_key {
        match pair {
            [Some(b), Some(p)] => out.push((b, p)),
            _ => return Err(Error::InvalidArgument(format!("trial {key:?} is missing one method"))),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Five-number summary with linear interpolation between order statistics.
pub fn quartiles(values: &[f64]) -> Result<Quartiles> {
    if values.is_empty() {
        return Err(Error::Empty("quartiles of an empty group".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let at = |q: f64| {
        let pos = q * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
    };
    Ok(Quartiles {
        n: v.len(),
        min: v[0],
        q1: at(0.25),
        median: at(0.5),
        q3: at(0.75),
        max: v[v.len() - 1],
    })
}

/// A single trial rate tagged for grouping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRecord {
    pub subject_id: String,
    pub view_tag: String,
    pub location_tag: String,
    pub method: Method,
    pub rate: f64,
}

impl RateRecord {
    pub fn from_trial(t: &TrialRecord) -> Result<Self> {
        Ok(Self {
            subject_id: t.subject_id.clone(),
            view_tag: t.view_tag.clone(),
            location_tag: t.location_tag.clone(),
            method: t.method,
            rate: frame_positive_rate(t)?,
        })
    }
}

/// Quartiles per `(view, method)`.
pub fn viewpoint_stats(records: &[RateRecord]) -> Result<BTreeMap<(String, Method), Quartiles>> {
    if records.is_empty() {
        return Err(Error::Empty("no trials to group".into()));
    }
    let mut groups: BTreeMap<(String, Method), Vec<f64>> = BTreeMap::new();
    for r in records {
        groups.entry((r.view_tag.clone(), r.method)).or_default().push(r.rate);
    }
    groups.into_iter().map(|(k, v)| Ok((k, quartiles(&v)?))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlarmReport {
    pub window: usize,
    pub required_hits: usize,
    /// Per-frame alarm state; frames before the first full window are inactive.
    pub active: Vec<bool>,
    /// Inclusive `(first, last)` frame of each alarm interval.
    pub intervals: Vec<(usize, usize)>,
}

/// Raises an alarm at frame `i` when at least `fraction · W` of the frames in
/// `(i − W, i]` are hits, with `W = round(window_seconds · frame_rate)`.
pub fn temporal_alarm(hits: &[bool], window_seconds: f64, fraction: f64, frame_rate: f64) -> Result<AlarmReport> {
    let w = (window_seconds * frame_rate).round();
    if !(w >= 1.0) || !w.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "alarm window of {window_seconds} s at {frame_rate} Hz is shorter than one frame"
        )));
    }
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!("alarm fraction must lie in [0, 1], got {fraction}")));
    }
    let w = w as usize;
    if hits.len() < w {
        return Err(Error::StreamTooShort { len: hits.len(), window: w });
    }
    let required = ((fraction * w as f64) - 1e-9).ceil().max(0.0) as usize;
    let mut active = vec![false; hits.len()];
    let mut count = hits[..w - 1].iter().filter(|&&h| h).count();
    for i in w - 1..hits.len() {
        count += hits[i] as usize;
        if i >= w {
            count -= hits[i - w] as usize;
        }
        active[i] = count >= required;
    }
    let mut intervals = Vec::new();
    let mut start = None;
    for (i, &a) in active.iter().enumerate() {
        match (a, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                intervals.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        intervals.push((s, active.len() - 1));
    }
    Ok(AlarmReport {
        window: w,
        required_hits: required,
        active,
        intervals,
    })
}

/// Round half up to two decimals, tolerant of binary representation error.
pub fn round_half_up_2dp(x: f64) -> f64 {
    ((x * 100.0) + 0.5 + 1e-9).floor() / 100.0
}

/// One cell pair of the per-trial reference table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablePair {
    pub view: String,
    pub location: String,
    pub subject: u32,
    pub dbf: f64,
    pub proposed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSummaryRow {
    /// View tag, or `Overall`.
    pub scope: String,
    pub subject: u32,
    pub dbf: f64,
    pub proposed: f64,
}

pub fn load_table_pairs(path: impl AsRef<Path>) -> Result<Vec<TablePair>> {
    let mut rdr = csv::Reader::from_path(path)?;
    Ok(rdr.deserialize().collect::<std::result::Result<Vec<TablePair>, _>>()?)
}

pub fn load_table_summary(path: impl AsRef<Path>) -> Result<Vec<TableSummaryRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    Ok(rdr.deserialize().collect::<std::result::Result<Vec<TableSummaryRow>, _>>()?)
}

/// Per-view and overall subject means, rounded half up to two decimals.
pub fn summarize_table(pairs: &[TablePair]) -> Vec<TableSummaryRow> {
    let mut views: Vec<String> = Vec::new();
    for p in pairs {
        if !views.contains(&p.view) {
            views.push(p.view.clone());
        }
    }
    let subjects: std::collections::BTreeSet<u32> = pairs.iter().map(|p| p.subject).collect();
    let mean_row = |scope: &str, subject: u32, filter: &dyn Fn(&TablePair) -> bool| {
        let sel: Vec<&TablePair> = pairs.iter().filter(|p| p.subject == subject && filter(p)).collect();
        let n = sel.len() as f64;
        TableSummaryRow {
            scope: scope.to_string(),
            subject,
            dbf: round_half_up_2dp(sel.iter().map(|p| p.dbf).sum::<f64>() / n),
            proposed: round_half_up_2dp(sel.iter().map(|p| p.proposed).sum::<f64>() / n),
        }
    };
    let mut rows = Vec::new();
    for v in &views {
        for &s in &subjects {
            rows.push(mean_row(v, s, &|p: &TablePair| &p.view == v));
        }
    }
    for &s in &subjects {
        rows.push(mean_row("Overall", s, &|_| true));
    }
    rows
}

/// Layout of the per-trial table: one row per trial and method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub view: String,
    pub location: String,
    pub subject: String,
    pub method: Method,
    pub rate: f64,
}
