//! Deterministic report emission: fixed 6-decimal formatting, stable key
//! ordering, and the run manifest embedded in or referenced by every output.

use crate::data::{PredictionSet, SegmentGrid, VideoAnnotation};
use crate::live::{LiveScoreSeries, LiveSummary, ReportScale, WindowNormalization};
use crate::offline::OfflineReport;
use crate::stream::Violation;
use crate::text::ScorerKind;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

/// Fixed decimal formatting used by every emitted file.
pub fn fmt6(value: f64) -> String {
    let v = if value == 0.0 { 0.0 } else { value };
    format!("{v:.6}")
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("string to json")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

/// Reproducibility record for one command invocation. The timestamp lives in
/// its own field so every other output byte is identical across reruns.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    /// Configuration echo, stable key order.
    pub config: BTreeMap<String, String>,
    /// (path, sha256) of every input file.
    pub inputs: Vec<(String, String)>,
    pub unix_timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str) -> RunManifest {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: BTreeMap::new(),
            inputs: Vec::new(),
            unix_timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.to_string(), value.to_string());
    }

    pub fn add_input(&mut self, path: &str, bytes: &[u8]) {
        self.inputs.push((path.to_string(), sha256_hex(bytes)));
    }

    fn body_json(&self) -> String {
        let mut out = String::from("{");
        out.push_str(&format!("\"tool_version\":{}", json_str(&self.tool_version)));
        out.push_str(&format!(",\"command\":{}", json_str(&self.command)));
        out.push_str(",\"config\":{");
        for (i, (k, v)) in self.config.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("{}:{}", json_str(k), json_str(v)));
        }
        out.push_str("},\"inputs\":[");
        for (i, (path, digest)) in self.inputs.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "{{\"path\":{},\"sha256\":{}}}",
                json_str(path),
                json_str(digest)
            ));
        }
        out.push_str("]}");
        out
    }

    /// Timestamp-free form, embedded in other outputs.
    pub fn embedded_json(&self) -> String {
        self.body_json()
    }

    /// Full manifest file contents, timestamp isolated in its own field.
    pub fn to_json(&self) -> String {
        let body = self.body_json();
        format!(
            "{{\"unix_timestamp\":{},\"manifest\":{}}}\n",
            self.unix_timestamp, body
        )
    }
}

// ---------------------------------------------------------------------------
// Corpus files
// ---------------------------------------------------------------------------

/// Serialize annotations in the ground-truth file schema, byte-deterministic.
pub fn write_ground_truth(videos: &BTreeMap<String, VideoAnnotation>) -> String {
    let mut out = String::from("{");
    for (i, (id, ann)) in videos.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("{}:{{\"duration\":{}", json_str(id), fmt6(ann.duration_s)));
        out.push_str(",\"timestamps\":[");
        for (j, ev) in ann.events.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("[{},{}]", fmt6(ev.start_s), fmt6(ev.end_s)));
        }
        out.push_str("],\"sentences\":[");
        for (j, ev) in ann.events.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&json_str(&ev.sentence));
        }
        out.push_str("]}");
    }
    out.push_str("}\n");
    out
}

/// Serialize predictions in the submission file schema, byte-deterministic.
pub fn write_predictions(videos: &BTreeMap<String, PredictionSet>) -> String {
    let mut out = String::from("{\"results\":{");
    for (i, (id, preds)) in videos.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("{}:[", json_str(id)));
        for (j, ev) in preds.events.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "{{\"sentence\":{},\"timestamp\":[{},{}],\"score\":{}}}",
                json_str(&ev.sentence),
                fmt6(ev.start_s),
                fmt6(ev.end_s),
                fmt6(ev.confidence_or_default())
            ));
        }
        out.push(']');
    }
    out.push_str("}}\n");
    out
}

// ---------------------------------------------------------------------------
// Live-score files
// ---------------------------------------------------------------------------

/// Per-video series CSV, unit scale: the data behind the temporal-evolution
/// plots.
pub fn live_series_csv(series: &LiveScoreSeries) -> String {
    let mut out = String::from("segment_index,t_prime_s,gamma,fp,ls,wls,hls,hwls\n");
    for row in &series.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.segment_index,
            fmt6(row.t_prime_s),
            fmt6(row.gamma),
            row.fp_count,
            fmt6(row.ls),
            fmt6(row.wls),
            fmt6(row.hls),
            fmt6(row.hwls),
        ));
    }
    out
}

pub const LIVE_VARIANTS: [&str; 4] = ["ls", "wls", "hls", "hwls"];

fn variant_value(summary: &LiveSummary, variant: &str) -> f64 {
    match variant {
        "ls" => summary.ls,
        "wls" => summary.wls,
        "hls" => summary.hls,
        "hwls" => summary.hwls,
        _ => unreachable!("unknown variant"),
    }
}

/// Corpus summary CSV: one row per variant, one column per Δt value.
pub fn live_summary_csv(
    scorer: ScorerKind,
    dt_frames: &[u32],
    summaries: &BTreeMap<u32, LiveSummary>,
    scale: ReportScale,
) -> String {
    let mut out = String::from("variant,scorer");
    for dt in dt_frames {
        out.push_str(&format!(",dt_{dt}"));
    }
    out.push('\n');
    for variant in LIVE_VARIANTS {
        out.push_str(&format!("{variant},{scorer}"));
        for dt in dt_frames {
            let value = variant_value(&summaries[dt], variant) * scale.factor();
            out.push_str(&format!(",{}", fmt6(value)));
        }
        out.push('\n');
    }
    out
}

/// Corpus summary JSON with the embedded manifest.
#[allow(clippy::too_many_arguments)]
pub fn live_summary_json(
    manifest: &RunManifest,
    scorer: ScorerKind,
    window: usize,
    normalization: WindowNormalization,
    scale: ReportScale,
    fps: f64,
    dt_frames: &[u32],
    summaries: &BTreeMap<u32, LiveSummary>,
    video_count: usize,
) -> String {
    let mut out = String::from("{");
    out.push_str(&format!("\"manifest\":{}", manifest.embedded_json()));
    out.push_str(&format!(",\"scorer\":{}", json_str(scorer.name())));
    out.push_str(&format!(",\"window\":{window}"));
    out.push_str(&format!(",\"normalization\":{}", json_str(normalization.name())));
    out.push_str(&format!(",\"scale\":{}", json_str(scale.name())));
    out.push_str(&format!(",\"fps\":{}", fmt6(fps)));
    out.push_str(&format!(",\"videos\":{video_count}"));
    out.push_str(",\"delta_t_frames\":[");
    for (i, dt) in dt_frames.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&dt.to_string());
    }
    out.push_str("],\"rows\":[");
    let mut first = true;
    for variant in LIVE_VARIANTS {
        if !first {
            out.push(',');
        }
        first = false;
        out.push_str(&format!("{{\"variant\":{},\"values\":[", json_str(variant)));
        for (i, dt) in dt_frames.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&fmt6(variant_value(&summaries[dt], variant) * scale.factor()));
        }
        out.push_str("]}");
    }
    out.push_str("]}\n");
    out
}

// ---------------------------------------------------------------------------
// Offline files
// ---------------------------------------------------------------------------

/// Offline report CSV: recall and precision per threshold plus averages,
/// then one caption row per scorer.
pub fn offline_report_csv(report: &OfflineReport) -> String {
    let mut out = String::from("metric");
    for tau in &report.thresholds {
        out.push_str(&format!(",iou_{tau}"));
    }
    out.push_str(",avg\n");
    let row = |name: &str, values: &[f64], avg: f64| {
        let mut line = name.to_string();
        for v in values {
            line.push_str(&format!(",{}", fmt6(*v)));
        }
        line.push_str(&format!(",{}\n", fmt6(avg)));
        line
    };
    out.push_str(&row("recall", &report.recall, report.recall_avg));
    out.push_str(&row("precision", &report.precision, report.precision_avg));
    for (kind, cap) in &report.captions {
        out.push_str(&row(
            &format!("caption_{}", kind.name().replace('-', "_")),
            &cap.per_threshold,
            cap.average,
        ));
    }
    out
}

/// Offline report JSON with the embedded manifest.
pub fn offline_report_json(manifest: &RunManifest, report: &OfflineReport, flags: &[String]) -> String {
    let list = |values: &[f64]| -> String {
        let items: Vec<String> = values.iter().map(|v| fmt6(*v)).collect();
        format!("[{}]", items.join(","))
    };
    let mut out = String::from("{");
    out.push_str(&format!("\"manifest\":{}", manifest.embedded_json()));
    out.push_str(&format!(",\"thresholds\":{}", list(&report.thresholds)));
    out.push_str(&format!(",\"recall\":{}", list(&report.recall)));
    out.push_str(&format!(",\"recall_avg\":{}", fmt6(report.recall_avg)));
    out.push_str(&format!(",\"precision\":{}", list(&report.precision)));
    out.push_str(&format!(",\"precision_avg\":{}", fmt6(report.precision_avg)));
    out.push_str(",\"captions\":{");
    for (i, (kind, cap)) in report.captions.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "{}:{{\"per_threshold\":{},\"avg\":{}}}",
            json_str(kind.name()),
            list(&cap.per_threshold),
            fmt6(cap.average)
        ));
    }
    out.push_str("},\"empty_predictions\":");
    out.push_str(if report.empty_predictions { "true" } else { "false" });
    out.push_str(",\"flags\":[");
    for (i, flag) in flags.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&json_str(flag));
    }
    out.push_str("]}\n");
    out
}

// ---------------------------------------------------------------------------
// Audit report
// ---------------------------------------------------------------------------

/// Audit report: a JSON list of {kind, step, tuple, detail} entries.
pub fn audit_report_json(violations: &[Violation]) -> String {
    let mut out = String::from("[");
    for (i, v) in violations.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let tuple = match &v.tuple {
            Some(t) => format!(
                "{{\"s\":{},\"e\":{},\"sentence\":{},\"score\":{}}}",
                fmt6(t.start_s),
                fmt6(t.end_s),
                json_str(&t.sentence),
                fmt6(t.confidence_or_default())
            ),
            None => "null".to_string(),
        };
        out.push_str(&format!(
            "{{\"kind\":{},\"step\":{},\"tuple\":{},\"detail\":{},\"advisory\":{}}}",
            json_str(v.kind.name()),
            v.step,
            tuple,
            json_str(&v.detail),
            v.advisory
        ));
    }
    out.push_str("]\n");
    out
}

/// File-name-safe form of a video id.
pub fn sanitize_id(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Series file name for one video at one Δt.
pub fn series_file_name(video_id: &str, grid: &SegmentGrid) -> String {
    format!("{}_dt{}.csv", sanitize_id(video_id), grid.delta_t_frames())
}
