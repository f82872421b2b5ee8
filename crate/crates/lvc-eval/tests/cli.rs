//! Command-line contract: exit codes, byte-deterministic outputs, and the
//! behavior of the grid/window/consolidation flags.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_lvc-eval")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn lvc-eval")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process terminated by signal")
}

/// Parse manifest.json and drop the timestamp field.
fn manifest_body(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["manifest"].to_string()
}

#[test]
fn eval_offline_identity_reports_hundreds() {
    let dir = tempfile::tempdir().unwrap();
    // predictions identical to the (split) ground truth at the same spans
    let gt = r#"{"v": {"duration": 10.0, "timestamps": [[0.0, 4.0], [5.0, 9.0]],
                 "sentences": ["a man runs", "a dog barks"]}}"#;
    let preds = r#"{"results": {"v": [
        {"sentence": "a man runs", "timestamp": [0.0, 4.0], "score": 0.9},
        {"sentence": "a dog barks", "timestamp": [5.0, 9.0], "score": 0.8}]}}"#;
    let gt_path = dir.path().join("gt.json");
    let pred_path = dir.path().join("preds.json");
    fs::write(&gt_path, gt).unwrap();
    fs::write(&pred_path, preds).unwrap();
    let out = dir.path().join("out");
    let output = run(&[
        "eval-offline",
        gt_path.to_str().unwrap(),
        pred_path.to_str().unwrap(),
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "{output:?}");
    let csv = fs::read_to_string(out.join("offline_report.csv")).unwrap();
    assert!(csv.starts_with("metric,iou_0.3,iou_0.5,iou_0.7,iou_0.9,avg\n"));
    assert!(csv.contains("recall,100.000000,100.000000,100.000000,100.000000,100.000000"));
    assert!(csv.contains("precision,100.000000,100.000000,100.000000,100.000000,100.000000"));
    assert!(csv.contains("caption_rouge_l,100.000000"));
    assert!(out.join("offline_report.json").exists());
    assert!(out.join("manifest.json").exists());
}

#[test]
fn malformed_input_exits_2_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    let out = dir.path().join("out");
    let output = run(&[
        "eval-offline",
        bad.to_str().unwrap(),
        bad.to_str().unwrap(),
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 2);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("parse error"), "{stderr}");
    assert!(!out.exists(), "failed run must not leave partial outputs");
}

#[test]
fn unknown_scorer_exits_4() {
    let output = run(&[
        "eval-offline",
        "gt.json",
        "preds.json",
        "out",
        "--scorer",
        "cider",
    ]);
    assert_eq!(exit_code(&output), 4);
}

#[test]
fn unknown_flag_exits_4_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let output = run(&[
        "eval-live",
        "gt.json",
        "preds.json",
        out.to_str().unwrap(),
        "--frobnicate",
    ]);
    assert_eq!(exit_code(&output), 4);
    assert!(!out.exists());
}

#[test]
fn disjoint_id_sets_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let gt_path = dir.path().join("gt.json");
    let pred_path = dir.path().join("preds.json");
    fs::write(
        &gt_path,
        r#"{"v_a": {"duration": 10.0, "timestamps": [[0.0, 4.0]], "sentences": ["a man runs"]}}"#,
    )
    .unwrap();
    fs::write(
        &pred_path,
        r#"{"results": {"v_b": [{"sentence": "a man runs", "timestamp": [0.0, 4.0], "score": 0.9}]}}"#,
    )
    .unwrap();
    for command in ["eval-offline", "eval-live"] {
        let out = dir.path().join(format!("out_{command}"));
        let output = run(&[
            command,
            gt_path.to_str().unwrap(),
            pred_path.to_str().unwrap(),
            out.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&output), 3, "{command}: {output:?}");
    }
}

#[test]
fn eval_live_outputs_are_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let gt = fixture("ground_truth.json");
    let preds = fixture("predictions.json");
    let args = |out: &Path| {
        vec![
            "eval-live".to_string(),
            gt.to_str().unwrap().to_string(),
            preds.to_str().unwrap().to_string(),
            out.to_str().unwrap().to_string(),
            "--dt".into(),
            "120".into(),
            "--scorer".into(),
            "meteor-lite".into(),
        ]
    };
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let output = Command::new(bin()).args(args(out)).output().unwrap();
        assert_eq!(exit_code(&output), 0, "{output:?}");
    }
    for name in ["summary.csv", "summary.json"] {
        assert_eq!(
            fs::read(out_a.join(name)).unwrap(),
            fs::read(out_b.join(name)).unwrap(),
            "{name}"
        );
    }
    for entry in fs::read_dir(out_a.join("series")).unwrap() {
        let entry = entry.unwrap();
        assert_eq!(
            fs::read(entry.path()).unwrap(),
            fs::read(out_b.join("series").join(entry.file_name())).unwrap()
        );
    }
    // manifest may differ only in its timestamp field
    assert_eq!(
        manifest_body(&out_a.join("manifest.json")),
        manifest_body(&out_b.join("manifest.json"))
    );
}

#[test]
fn eval_live_on_perfect_synthetic_stream_reports_reference_fraction() {
    use lvc_eval::data::{SegmentGrid, TimedCaption, VideoAnnotation};
    use std::collections::BTreeMap;

    let grid = SegmentGrid::from_frames(120, 30.0).unwrap();
    let ann = VideoAnnotation {
        video_id: "v_one".into(),
        duration_s: 32.0,
        events: vec![TimedCaption {
            start_s: 2.0,
            end_s: 18.0,
            sentence: "a man washes a car".into(),
            confidence: None,
        }],
    };
    let preds = lvc_eval::stream::synth_stream(&ann, &grid, 1.0, 0.0, 5, &[]);
    let mut gt_map = BTreeMap::new();
    gt_map.insert(ann.video_id.clone(), ann.clone());
    let mut pred_map = BTreeMap::new();
    pred_map.insert(ann.video_id.clone(), preds);

    let dir = tempfile::tempdir().unwrap();
    let gt_path = dir.path().join("gt.json");
    let pred_path = dir.path().join("preds.json");
    fs::write(&gt_path, lvc_eval::report::write_ground_truth(&gt_map)).unwrap();
    fs::write(&pred_path, lvc_eval::report::write_predictions(&pred_map)).unwrap();
    let out = dir.path().join("out");
    let output = run(&[
        "eval-live",
        gt_path.to_str().unwrap(),
        pred_path.to_str().unwrap(),
        out.to_str().unwrap(),
        "--dt",
        "120",
        "--scorer",
        "rouge-l",
    ]);
    assert_eq!(exit_code(&output), 0, "{output:?}");

    // gamma is 1 on reference-bearing segments and 0 elsewhere, so the
    // summary LS is 100 times the mean of the per-segment reference shares
    let k = grid.segment_count(ann.duration_s);
    let ref_flags: Vec<bool> = (1..=k)
        .map(|n| !lvc_eval::temporal::refs_for_segment(&ann, &grid, n).is_empty())
        .collect();
    let mut running = 0.0;
    let mut expected = 0.0;
    for (i, &has) in ref_flags.iter().enumerate() {
        if has {
            running += 1.0;
        }
        expected += running / (i + 1) as f64;
    }
    expected = 100.0 * expected / k as f64;

    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let ls_line = summary.lines().find(|l| l.starts_with("ls,")).unwrap();
    let ls_value: f64 = ls_line.rsplit(',').next().unwrap().parse().unwrap();
    assert!((ls_value - expected).abs() < 1e-4, "ls {ls_value} vs expected {expected}");
}

#[test]
fn eval_live_default_sweep_emits_six_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let output = run(&[
        "eval-live",
        fixture("ground_truth.json").to_str().unwrap(),
        fixture("predictions.json").to_str().unwrap(),
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "{output:?}");
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let header = summary.lines().next().unwrap();
    assert_eq!(header, "variant,scorer,dt_24,dt_48,dt_72,dt_96,dt_120,dt_150");
    assert_eq!(summary.lines().count(), 5); // header + ls/wls/hls/hwls
}

fn series_columns(path: &Path) -> Vec<(f64, f64, f64, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            (
                cells[4].parse().unwrap(), // ls
                cells[5].parse().unwrap(), // wls
                cells[6].parse().unwrap(), // hls
                cells[7].parse().unwrap(), // hwls
            )
        })
        .collect()
}

#[test]
fn huge_window_collapses_history_columns_onto_ls() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let output = run(&[
        "eval-live",
        fixture("ground_truth.json").to_str().unwrap(),
        fixture("predictions.json").to_str().unwrap(),
        out.to_str().unwrap(),
        "--dt",
        "120",
        "--window",
        "1000000",
        "--norm",
        "paper-k",
    ]);
    assert_eq!(exit_code(&output), 0, "{output:?}");
    for entry in fs::read_dir(out.join("series")).unwrap() {
        for (ls, wls, hls, hwls) in series_columns(&entry.unwrap().path()) {
            assert_eq!(ls, hls);
            assert_eq!(wls, hwls);
        }
    }
}

#[test]
fn normalization_mode_touches_only_history_columns() {
    let dir = tempfile::tempdir().unwrap();
    let common = [
        "--dt", "120", "--window", "3",
    ];
    let mut outs = Vec::new();
    for norm in ["paper-k", "effective-window"] {
        let out = dir.path().join(norm);
        let mut args = vec![
            "eval-live".to_string(),
            fixture("ground_truth.json").to_str().unwrap().to_string(),
            fixture("predictions.json").to_str().unwrap().to_string(),
            out.to_str().unwrap().to_string(),
        ];
        args.extend(common.iter().map(|s| s.to_string()));
        args.push("--norm".into());
        args.push(norm.into());
        let output = Command::new(bin()).args(&args).output().unwrap();
        assert_eq!(exit_code(&output), 0, "{output:?}");
        outs.push(out);
    }
    let mut hls_differs = false;
    for entry in fs::read_dir(outs[0].join("series")).unwrap() {
        let entry = entry.unwrap();
        let paper = series_columns(&entry.path());
        let effective = series_columns(&outs[1].join("series").join(entry.file_name()));
        for (a, b) in paper.iter().zip(&effective) {
            assert_eq!(a.0, b.0, "ls must not depend on the normalization mode");
            assert_eq!(a.1, b.1, "wls must not depend on the normalization mode");
            if a.2 != b.2 {
                hls_differs = true;
            }
        }
    }
    assert!(hls_differs, "normalization modes should disagree somewhere");
}

#[test]
fn split_annotations_chunks_and_idempotence() {
    let dir = tempfile::tempdir().unwrap();
    let gt_path = dir.path().join("gt.json");
    fs::write(
        &gt_path,
        r#"{"v": {"duration": 80.0, "timestamps": [[10.0, 70.0]], "sentences": ["a man talks"]}}"#,
    )
    .unwrap();
    let once = dir.path().join("split.json");
    let output = run(&[
        "split-annotations",
        gt_path.to_str().unwrap(),
        once.to_str().unwrap(),
        "--dt",
        "150",
    ]);
    assert_eq!(exit_code(&output), 0, "{output:?}");
    let split_text = fs::read_to_string(&once).unwrap();
    let (videos, _) = lvc_eval::data::parse_ground_truth(split_text.as_bytes()).unwrap();
    assert_eq!(videos["v"].events.len(), 12);

    // re-running on its own output reproduces the file byte for byte
    let twice = dir.path().join("split2.json");
    let output = run(&[
        "split-annotations",
        once.to_str().unwrap(),
        twice.to_str().unwrap(),
        "--dt",
        "150",
    ]);
    assert_eq!(exit_code(&output), 0);
    assert_eq!(split_text, fs::read_to_string(&twice).unwrap());

    // a grid wider than every event leaves a normalized file unchanged
    let wide = dir.path().join("wide.json");
    let output = run(&[
        "split-annotations",
        once.to_str().unwrap(),
        wide.to_str().unwrap(),
        "--dt",
        "150000",
    ]);
    assert_eq!(exit_code(&output), 0);
    assert_eq!(split_text, fs::read_to_string(&wide).unwrap());
}

#[test]
fn replay_audit_clean_run_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let output = run(&[
        "replay-audit",
        out.to_str().unwrap(),
        "--pred",
        fixture("predictions.json").to_str().unwrap(),
        "--dt",
        "120",
        "--memory",
        "3",
        "--gt",
        fixture("ground_truth.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "{output:?}");
    assert!(out.join("v_kayak.emissions.jsonl").exists());
    let audit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("audit.json")).unwrap()).unwrap();
    // advisory timeliness entries are allowed on a clean run
    for entry in audit.as_array().unwrap() {
        assert_eq!(entry["advisory"], serde_json::Value::Bool(true), "{entry}");
    }
}

#[test]
fn replay_audit_consolidation_never_grows_emissions() {
    let dir = tempfile::tempdir().unwrap();
    let raw_dir = dir.path().join("raw");
    let merged_dir = dir.path().join("merged");
    for (out, extra) in [(&raw_dir, None), (&merged_dir, Some("--consolidate"))] {
        let mut args = vec![
            "replay-audit".to_string(),
            out.to_str().unwrap().to_string(),
            "--pred".into(),
            fixture("predictions.json").to_str().unwrap().to_string(),
            "--dt".into(),
            "120".into(),
            "--memory".into(),
            "3".into(),
        ];
        if let Some(flag) = extra {
            args.push(flag.into());
        }
        let output = Command::new(bin()).args(&args).output().unwrap();
        assert_eq!(exit_code(&output), 0, "{output:?}");
    }
    for entry in fs::read_dir(&raw_dir).unwrap() {
        let entry = entry.unwrap();
        let name = entry.file_name();
        if !name.to_string_lossy().ends_with(".jsonl") {
            continue;
        }
        let raw = lvc_eval::stream::parse_emission_log(&fs::read(entry.path()).unwrap()).unwrap();
        let merged =
            lvc_eval::stream::parse_emission_log(&fs::read(merged_dir.join(&name)).unwrap()).unwrap();
        for (a, b) in raw.emissions.iter().zip(&merged.emissions) {
            assert!(b.tuples.len() <= a.tuples.len());
        }
    }
}

#[test]
fn audit_only_mode_flags_injected_breach_with_exit_5() {
    let dir = tempfile::tempdir().unwrap();
    // first produce a clean log
    let clean = dir.path().join("clean");
    let output = run(&[
        "replay-audit",
        clean.to_str().unwrap(),
        "--pred",
        fixture("predictions.json").to_str().unwrap(),
        "--dt",
        "120",
    ]);
    assert_eq!(exit_code(&output), 0, "{output:?}");
    let log_path = clean.join("v_dog.emissions.jsonl");
    let mut log = lvc_eval::stream::parse_emission_log(&fs::read(&log_path).unwrap()).unwrap();
    let t = log.emissions[0].emission_time_s;
    log.emissions[0].tuples[0].end_s = t + 1.0;
    let bad_path = dir.path().join("bad.jsonl");
    fs::write(&bad_path, lvc_eval::stream::emission_log_to_jsonl(&log)).unwrap();

    let out = dir.path().join("audited");
    let output = run(&[
        "replay-audit",
        out.to_str().unwrap(),
        "--log",
        bad_path.to_str().unwrap(),
        "--dt",
        "120",
    ]);
    assert_eq!(exit_code(&output), 5, "{output:?}");
    let audit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("audit.json")).unwrap()).unwrap();
    let entries = audit.as_array().unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0]["kind"], "CAUSALITY");
    assert_eq!(entries[0]["step"], 1);
}

#[test]
fn replay_audit_requires_exactly_one_input() {
    let output = run(&["replay-audit", "out", "--dt", "120"]);
    assert_eq!(exit_code(&output), 4);
}

#[test]
fn single_grid_commands_require_an_explicit_dt() {
    let dir = tempfile::tempdir().unwrap();
    let gt_path = dir.path().join("gt.json");
    fs::write(
        &gt_path,
        r#"{"v": {"duration": 10.0, "timestamps": [[0.0, 4.0]], "sentences": ["a man runs"]}}"#,
    )
    .unwrap();
    let out = dir.path().join("split.json");
    let output = run(&[
        "split-annotations",
        gt_path.to_str().unwrap(),
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 4);
    assert!(!out.exists());
    // seconds mode is an accepted alternative
    let output = run(&[
        "split-annotations",
        gt_path.to_str().unwrap(),
        out.to_str().unwrap(),
        "--dt-seconds",
        "5.0",
    ]);
    assert_eq!(exit_code(&output), 0, "{output:?}");
}
