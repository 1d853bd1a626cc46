use std::ffi::OsStr;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

use floor_occupancy::io::{read_csv, read_json, DetectionRow, MetricsFile, RecordingHeader, RecordingReader};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_floor-occupancy"))
}

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn run<S: AsRef<OsStr>>(args: &[S]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok<S: AsRef<OsStr>>(args: &[S]) {
    let o = run(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn error_of(o: &Output) -> (String, String) {
    assert!(!o.status.success());
    let v: Value = serde_json::from_slice(o.stderr.trim_ascii()).expect("stderr is JSON");
    (
        v["error"]["kind"].as_str().unwrap().to_string(),
        v["error"]["message"].as_str().unwrap().to_string(),
    )
}

fn simulate(scene: &Path, out: &Path) {
    ok(&[OsStr::new("simulate"), OsStr::new("--scene"), scene.as_os_str(), OsStr::new("--out"), out.as_os_str()]);
}

fn sha(path: &Path) -> Vec<u8> {
    Sha256::digest(std::fs::read(path).unwrap()).to_vec()
}

#[test]
fn usage_errors_are_json_with_exit_2() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_of(&o).0, "usage");
    let o = run(&["process", "x.rec", "--out", "o", "--method", "music"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(run(&["--help"]).status.success());
}

#[test]
fn runtime_errors_are_json_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[OsStr::new("simulate"), OsStr::new("--scene"), OsStr::new("/no/such/scene.json"), OsStr::new("--out"), dir.path().join("a.rec").as_os_str()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_of(&o).0, "io");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"targets":[{"range_m":"far","azimuth_deg":0,"amplitude":1}],"noise_std":1,"seed":1,"n_frames":2}"#).unwrap();
    let o = run(&[OsStr::new("simulate"), OsStr::new("--scene"), bad.as_os_str(), OsStr::new("--out"), dir.path().join("b.rec").as_os_str()]);
    let (kind, msg) = error_of(&o);
    assert_eq!(kind, "schema");
    assert!(msg.contains("targets[0].range_m"), "{msg}");

    let o = run(&[OsStr::new("process"), dir.path().join("missing.rec").as_os_str(), OsStr::new("--out"), dir.path().as_os_str()]);
    assert_eq!(error_of(&o).0, "invalid_argument");
}

#[test]
fn simulate_is_deterministic_and_header_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.rec"), dir.path().join("b.rec"));
    let scene = fixture("scenes/single_target.json");
    simulate(&scene, &a);
    simulate(&scene, &b);
    assert_eq!(sha(&a), sha(&b));

    let c = dir.path().join("c.rec");
    ok(&[OsStr::new("simulate"), OsStr::new("--scene"), scene.as_os_str(), OsStr::new("--seed"), OsStr::new("5"), OsStr::new("--out"), c.as_os_str()]);
    assert_ne!(sha(&a), sha(&c));

    let reader = RecordingReader::open(&a).unwrap();
    let again = RecordingHeader::new(reader.meta().clone()).to_bytes().unwrap();
    assert_eq!(again, reader.header_bytes());
    assert_eq!(reader.n_frames(), 50);
    let len = std::fs::metadata(&a).unwrap().len();
    let payload = 50u64 * 3 * 128 * 64 * 8;
    assert_eq!(len, 4 + 4 + reader.header_bytes().len() as u64 + payload);
}

#[test]
fn corrupted_payload_reports_both_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("s.rec");
    simulate(&fixture("scenes/empty_room.json"), &rec);
    let f = std::fs::OpenOptions::new().write(true).open(&rec).unwrap();
    let len = f.metadata().unwrap().len();
    f.set_len(len - 8).unwrap();
    let o = run(&[OsStr::new("process"), rec.as_os_str(), OsStr::new("--method"), OsStr::new("dbf"), OsStr::new("--out"), dir.path().join("o").as_os_str()]);
    let (kind, msg) = error_of(&o);
    assert_eq!(kind, "payload_length");
    let expected = 50u64 * 3 * 128 * 64 * 8;
    assert!(msg.contains(&expected.to_string()) && msg.contains(&(expected - 8).to_string()), "{msg}");
}

#[test]
fn process_single_target_and_empty_room() {
    let dir = tempfile::tempdir().unwrap();
    let (st, er) = (dir.path().join("st.rec"), dir.path().join("er.rec"));
    simulate(&fixture("scenes/single_target.json"), &st);
    simulate(&fixture("scenes/empty_room.json"), &er);

    let out = dir.path().join("capon");
    ok(&[OsStr::new("process"), st.as_os_str(), OsStr::new("--manifest"), fixture("manifests/capon.json").as_os_str(), OsStr::new("--out"), out.as_os_str()]);
    let ev = dir.path().join("ev");
    ok(&[OsStr::new("evaluate"), out.join("detections.csv").as_os_str(), OsStr::new("--out"), ev.as_os_str()]);
    let metrics: MetricsFile = read_json(ev.join("metrics.json")).unwrap();
    assert_eq!(metrics.trials.len(), 1);
    assert!(metrics.trials[0].rate >= 0.9, "{}", metrics.trials[0].rate);

    // k values selected by the clutter benchmark sweep
    for (method, k) in [("dbf", "3.8"), ("capon", "7.2")] {
        let out = dir.path().join(format!("empty_{method}"));
        ok(&[OsStr::new("process"), er.as_os_str(), OsStr::new("--method"), OsStr::new(method), OsStr::new("--k"), OsStr::new(k), OsStr::new("--out"), out.as_os_str()]);
        let rows: Vec<DetectionRow> = read_csv(out.join("detections.csv")).unwrap();
        assert!(rows.is_empty(), "{method}: {} detections", rows.len());
        let info: Value = read_json(out.join("detections.json")).unwrap();
        assert_eq!(info["method"], method);
    }
}

#[test]
fn tune_writes_sweep_and_operating_point() {
    let dir = tempfile::tempdir().unwrap();
    let (st, er) = (dir.path().join("st.rec"), dir.path().join("er.rec"));
    simulate(&fixture("scenes/single_target.json"), &st);
    simulate(&fixture("scenes/empty_room.json"), &er);
    let out = dir.path().join("tune");
    ok(&[OsStr::new("tune"), st.as_os_str(), er.as_os_str(), OsStr::new("--method"), OsStr::new("dbf"), OsStr::new("--k-grid"), OsStr::new("1:6:1"), OsStr::new("--fpr-cap"), OsStr::new("0.1"), OsStr::new("--out"), out.as_os_str()]);
    let sweep = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().next(), Some("k,macro_f1,fpr,tpr,feasible"));
    assert_eq!(sweep.lines().count(), 7);
    let op: Value = read_json(out.join("operating_point.json")).unwrap();
    assert_eq!(op["method"], "dbf");
    assert!(op["best"]["fpr"].as_f64().unwrap() <= 0.1);

    let o = run(&[OsStr::new("tune"), st.as_os_str(), OsStr::new("--method"), OsStr::new("dbf"), OsStr::new("--out"), out.as_os_str()]);
    assert_eq!(error_of(&o).0, "invalid_argument");
}

#[test]
fn table_replay_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let ev = dir.path().join("ev");
    ok(&[OsStr::new("evaluate"), OsStr::new("--table"), fixture("table2.csv").as_os_str(), OsStr::new("--out"), ev.as_os_str()]);
    let table = std::fs::read_to_string(ev.join("table.csv")).unwrap();
    assert_eq!(table.lines().next(), Some("view,location,subject,method,rate"));
    assert_eq!(table.lines().count(), 141);

    let rep = dir.path().join("rep");
    ok(&[OsStr::new("report"), ev.join("metrics.json").as_os_str(), OsStr::new("--out"), rep.as_os_str()]);
    let deltas = std::fs::read_to_string(rep.join("paired_deltas.csv")).unwrap();
    assert_eq!(deltas.lines().count(), 71);
    let d: Vec<f64> = deltas.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!(d.windows(2).all(|w| w[0] <= w[1]));
    let coverage = std::fs::read_to_string(rep.join("coverage.csv")).unwrap();
    assert!(coverage.lines().any(|l| l == "0.0,1.0,1.0"), "{coverage}");
    let summary: Value = read_json(rep.join("report.json")).unwrap();
    assert_eq!(summary["pairs"], 70);
    assert_eq!(summary["improved_or_equal"], 69);

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"trials":[],"summary":{"mean_rate_dbf":null,"mean_rate_capon":null,"fpr_dbf":null,"fpr_capon":null}}"#).unwrap();
    let o = run(&[OsStr::new("report"), empty.as_os_str(), OsStr::new("--out"), rep.as_os_str()]);
    assert_eq!(error_of(&o).0, "empty_input");
}
