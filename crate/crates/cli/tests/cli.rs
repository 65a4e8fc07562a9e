use std::path::Path;
use std::process::{Command, Output};

use infoshot_core::{load_features, BudgetSpec};
use serde_json::Value;

fn infoshot(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infoshot"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn synth_small(dir: &Path) {
    let o = infoshot(dir, &["synth", "--out-dir", "s", "--seed", "3", "--count", "4", "--frames", "240", "--dim", "32"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn sample_writes_keyframes_for_rate_budget() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path());
    let o = infoshot(dir.path(), &["sample", "--features", "s/syn_0000.isf", "--rate", "0.5", "--out", "k.json"]);
    assert!(o.status.success(), "{}", stderr(&o));

    let seq = load_features(&dir.path().join("s/syn_0000.isf"), None).unwrap();
    let k = BudgetSpec::Rate(0.5).resolve(seq.frame_count(), seq.fps()).unwrap();
    assert_eq!(k, 5);
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("k.json")).unwrap()).unwrap();
    assert_eq!(json["budget"], 5);
    let frames = json["frames"].as_array().unwrap();
    assert!(!frames.is_empty() && frames.len() <= 5);
    for f in frames {
        assert!(f["index"].as_u64().unwrap() < 240);
        assert!(["common", "unique"].contains(&f["role"].as_str().unwrap()));
    }
    let line = stdout(&o);
    assert!(line.starts_with("T=240 K=5 M'="), "{line}");
    assert!(line.trim_end().ends_with(&format!("|K|={}", frames.len())));
}

#[test]
fn zero_count_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path());
    let o = infoshot(dir.path(), &["sample", "--features", "s/syn_0000.isf", "--count", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("budget must be positive"));
}

#[test]
fn topk_needs_scores() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path());
    let o = infoshot(dir.path(), &["sample", "--method", "topk", "--features", "s/syn_0000.isf", "--count", "5"]);
    assert_eq!(o.status.code(), Some(2));

    let scores: String = (0..240).map(|i| format!("{}\n", (i * 37) % 240)).collect();
    std::fs::write(dir.path().join("scores.csv"), scores).unwrap();
    let o = infoshot(
        dir.path(),
        &["sample", "--method", "topk", "--features", "s/syn_0000.isf", "--count", "3", "--scores", "scores.csv", "--out", "t.json"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    let idx: Vec<u64> = json["frames"].as_array().unwrap().iter().map(|f| f["index"].as_u64().unwrap()).collect();
    // (i * 37) % 240 peaks at 239, 238, 237 for i = 227, 214, 201.
    assert_eq!(idx, vec![201, 214, 227]);
}

#[test]
fn missing_budget_and_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = infoshot(dir.path(), &["sample", "--features", "nope.isf"]);
    assert_eq!(o.status.code(), Some(2));
    let o = infoshot(dir.path(), &["sample", "--features", "nope.isf", "--count", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn csv_features_need_fps() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (0..12).map(|i| if i < 6 { "1,0\n" } else { "0,1\n" }).collect();
    std::fs::write(dir.path().join("v.csv"), rows).unwrap();
    let o = infoshot(dir.path(), &["sample", "--features", "v.csv", "--count", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = infoshot(
        dir.path(),
        &["sample", "--features", "v.csv", "--fps", "24", "--count", "2", "--partition-out", "p.json"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "T=12 K=2 M'=1 |K|=2");
}

#[test]
fn synth_tiny_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let o = infoshot(dir.path(), &["synth", "--out-dir", "t", "--seed", "0", "--count", "1", "--frames", "10", "--shots", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let seq = load_features(&dir.path().join("t/syn_0000.isf"), None).unwrap();
    assert_eq!(seq.frame_count(), 10);
    let truth: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("t/syn_0000.truth.json")).unwrap()).unwrap();
    assert_eq!(truth["boundaries"].as_array().unwrap().len(), 0);
    assert_eq!(truth["events"].as_array().unwrap().len(), 1);
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("t/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["videos"][0]["id"], "syn_0000");
    assert_eq!(manifest["config"]["frames"], 10);
}

#[test]
fn synth_into_unwritable_path_fails() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("file"), "x").unwrap();
    let o = infoshot(dir.path(), &["synth", "--out-dir", "file/sub", "--count", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eval_table_and_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path());
    let o = infoshot(
        dir.path(),
        &["eval", "--manifest", "s/manifest.json", "--rate", "0.1", "--methods", "infoshot,uniform", "--report", "r.json"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0].split_whitespace().collect::<Vec<_>>(), ["method", "R", "ER", "CR", "Dist"]);
    assert!(lines[1].starts_with("infoshot") && lines[2].starts_with("uniform"));
    assert_eq!(lines[1].split_whitespace().count(), 5);

    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["budget"]["rate"], 0.1);
    let methods = report["methods"].as_array().unwrap();
    assert_eq!(methods.len(), 2);
    for m in methods {
        for key in ["frame_recall", "event_recall", "complete_coverage"] {
            let v = &m[key];
            assert!(v.is_null() || (0.0..=1.0).contains(&v.as_f64().unwrap()), "{key}");
        }
        assert!(m["distortion"].as_f64().unwrap() >= 0.0);
        let rows = m["per_video"].as_array().unwrap();
        assert_eq!(rows.len(), 4);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row["video_id"], format!("syn_{i:04}"));
            for key in ["K", "sampled", "events_total", "events_hit"] {
                assert!(row[key].is_u64(), "{key}");
            }
            assert!(row["hit"].is_boolean());
            assert!(row["dist"].is_f64());
        }
    }
    let csv = std::fs::read_to_string(dir.path().join("r.uniform.csv")).unwrap();
    let mut csv_lines = csv.lines();
    assert_eq!(csv_lines.next(), Some("video_id,K,hit,events_total,events_hit,dist"));
    assert_eq!(csv_lines.count(), 4);
}

#[test]
fn eval_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path());
    let o = infoshot(dir.path(), &["eval", "--manifest", "s/manifest.json", "--rate", "0.1", "--methods", "infoshot,bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"));
    let o = infoshot(dir.path(), &["eval", "--manifest", "missing.json", "--count", "3"]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_file(dir.path().join("s/syn_0002.isf")).unwrap();
    let o = infoshot(dir.path(), &["eval", "--manifest", "s/manifest.json", "--count", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn convert_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path());
    let o = infoshot(dir.path(), &["convert", "--input", "s/syn_0001.isf", "--output", "v.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = infoshot(dir.path(), &["convert", "--input", "v.csv", "--fps", "24", "--output", "v.isf"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let a = load_features(&dir.path().join("s/syn_0001.isf"), None).unwrap();
    let b = load_features(&dir.path().join("v.isf"), None).unwrap();
    assert_eq!(a, b);
}
