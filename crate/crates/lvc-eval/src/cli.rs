//! Command-line interface: ingestion, evaluation, splitting, replay and
//! audit wired together behind a stable exit-code contract.
//!
//! Exit codes: 0 success, 2 parse error, 3 id-set mismatch, 4 usage error,
//! 5 audit violations (for CI use).

use crate::data::{parse_ground_truth, parse_predictions, PredictionSet, SegmentGrid, VideoAnnotation};
use crate::error::{Error, Result};
use crate::live::{
    corpus_summary, evaluate_live, GammaAggregation, LiveScoreConfig, LiveSummary, ReportScale,
    WindowNormalization,
};
use crate::offline::{aggregate_reports, evaluate_offline_video, DEFAULT_IOU_THRESHOLDS};
use crate::report::{
    audit_report_json, live_series_csv, live_summary_csv, live_summary_json, offline_report_csv,
    offline_report_json, sanitize_id, series_file_name, write_ground_truth, RunManifest,
};
use crate::stream::{audit_causality, emission_log_to_jsonl, parse_emission_log, replay, ReplayConfig, Violation};
use crate::temporal::split_annotations;
use crate::text::ScorerKind;
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "lvc-eval",
    version,
    about = "Online evaluation toolkit for live dense video captioning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Segment length in frames; may be repeated to sweep several values.
    #[arg(long = "dt", value_name = "FRAMES")]
    dt_frames: Vec<u32>,

    /// Segment length in seconds, for non-30fps corpora.
    #[arg(long = "dt-seconds", value_name = "SECONDS", conflicts_with = "dt_frames")]
    dt_seconds: Option<f64>,

    /// Frame rate used to convert frame counts to seconds.
    #[arg(long, default_value_t = SegmentGrid::DEFAULT_FPS)]
    fps: f64,
}

impl GridArgs {
    /// Resolve to a list of grids; an empty --dt falls back to the standard
    /// sweep (24, 48, 72, 96, 120, 150 frames).
    fn grids(&self) -> Result<Vec<SegmentGrid>> {
        if let Some(seconds) = self.dt_seconds {
            return Ok(vec![SegmentGrid::from_seconds(seconds, self.fps)?]);
        }
        let frames: Vec<u32> = if self.dt_frames.is_empty() {
            SegmentGrid::DEFAULT_DELTA_T_FRAMES.to_vec()
        } else {
            self.dt_frames.clone()
        };
        frames
            .into_iter()
            .map(|f| SegmentGrid::from_frames(f, self.fps))
            .collect()
    }

    /// Single-grid commands require exactly one explicit Δt.
    fn single_grid(&self) -> Result<SegmentGrid> {
        if self.dt_seconds.is_none() && self.dt_frames.len() != 1 {
            return Err(Error::Config(
                "this command takes exactly one --dt (or --dt-seconds) value".into(),
            ));
        }
        Ok(self.grids()?[0])
    }
}

#[derive(Subcommand)]
enum Command {
    /// Offline localization and caption scoring across IoU thresholds.
    EvalOffline {
        gt_path: PathBuf,
        pred_path: PathBuf,
        out_dir: PathBuf,
        /// Scorer to report; may be repeated. Defaults to all three.
        #[arg(long = "scorer")]
        scorers: Vec<ScorerKind>,
        #[arg(long, env = "LVC_BENCH_JOBS", default_value_t = 1)]
        jobs: usize,
    },
    /// Live-score series and summaries over a prediction stream.
    EvalLive {
        gt_path: PathBuf,
        pred_path: PathBuf,
        out_dir: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "rouge-l")]
        scorer: ScorerKind,
        /// History window length in segments.
        #[arg(long, default_value_t = 5)]
        window: usize,
        /// Denominator for the history-window variants.
        #[arg(long = "norm", default_value = "paper-k")]
        normalization: WindowNormalization,
        /// Scale of summary outputs.
        #[arg(long, default_value = "percent")]
        scale: ReportScale,
        /// Per-segment score aggregation.
        #[arg(long = "gamma", default_value = "per-ref-max", value_parser = parse_aggregation)]
        aggregation: GammaAggregation,
        #[arg(long, env = "LVC_BENCH_JOBS", default_value_t = 1)]
        jobs: usize,
    },
    /// Split ground-truth events along the segment grid.
    SplitAnnotations {
        gt_path: PathBuf,
        out_path: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Replay a prediction file as a causal stream and audit the log.
    ReplayAudit {
        out_dir: PathBuf,
        /// Prediction file to replay.
        #[arg(long = "pred", value_name = "FILE")]
        pred_path: Option<PathBuf>,
        /// Audit an existing emission log instead of replaying.
        #[arg(long = "log", value_name = "FILE", conflicts_with = "pred_path")]
        log_path: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
        /// Number of recent segments kept in memory while replaying.
        #[arg(long, default_value_t = 1)]
        memory: usize,
        /// Consolidate the working set before each emission.
        #[arg(long)]
        consolidate: bool,
        /// Ground truth for advisory timeliness checks.
        #[arg(long = "gt", value_name = "FILE")]
        gt_path: Option<PathBuf>,
    },
}

fn parse_aggregation(s: &str) -> std::result::Result<GammaAggregation, String> {
    match s.to_lowercase().replace('_', "-").as_str() {
        "per-ref-max" | "per-reference-max" => Ok(GammaAggregation::PerReferenceMax),
        "all-pairs-mean" => Ok(GammaAggregation::AllPairsMean),
        other => Err(format!("unknown gamma aggregation '{other}'")),
    }
}

/// Run the CLI on the given argument list and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 4,
            };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::EvalOffline { gt_path, pred_path, out_dir, scorers, jobs } => {
            cmd_eval_offline(&gt_path, &pred_path, &out_dir, &scorers, jobs)
        }
        Command::EvalLive {
            gt_path,
            pred_path,
            out_dir,
            grid,
            scorer,
            window,
            normalization,
            scale,
            aggregation,
            jobs,
        } => cmd_eval_live(
            &gt_path, &pred_path, &out_dir, &grid, scorer, window, normalization, scale, aggregation, jobs,
        ),
        Command::SplitAnnotations { gt_path, out_path, grid } => {
            cmd_split_annotations(&gt_path, &out_path, &grid)
        }
        Command::ReplayAudit {
            out_dir,
            pred_path,
            log_path,
            grid,
            memory,
            consolidate,
            gt_path,
        } => cmd_replay_audit(
            &out_dir,
            pred_path.as_deref(),
            log_path.as_deref(),
            &grid,
            memory,
            consolidate,
            gt_path.as_deref(),
        ),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

/// Split work across up to `jobs` threads, preserving item order in the
/// result so output bytes do not depend on the thread count.
fn fan_out<T, R, F>(items: Vec<T>, jobs: usize, work: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let jobs = jobs.max(1);
    if jobs == 1 || items.len() <= 1 {
        return items.into_iter().map(work).collect();
    }
    let chunk_size = items.len().div_ceil(jobs);
    let mut chunks: Vec<Vec<T>> = Vec::new();
    let mut current = Vec::with_capacity(chunk_size);
    for item in items {
        current.push(item);
        if current.len() == chunk_size {
            chunks.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        chunks.push(current);
    }
    let work = &work;
    std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|chunk| scope.spawn(move || chunk.into_iter().map(work).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

fn print_warnings(warnings: &[String]) {
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
}

/// Check id overlap between predictions and annotations; prediction-only ids
/// are flagged, fully disjoint sets are an error.
fn check_ids(
    preds: &BTreeMap<String, PredictionSet>,
    anns: &BTreeMap<String, VideoAnnotation>,
) -> Result<Vec<String>> {
    let mut flags = Vec::new();
    if !preds.is_empty() && anns.keys().all(|id| !preds.contains_key(id)) {
        return Err(Error::IdMismatch(
            "prediction and annotation corpora share no video ids".into(),
        ));
    }
    for id in preds.keys() {
        if !anns.contains_key(id) {
            flags.push(format!("predicted video '{id}' is not annotated; skipped"));
        }
    }
    for id in anns.keys() {
        if !preds.contains_key(id) {
            flags.push(format!("no predictions for annotated video '{id}'"));
        }
    }
    Ok(flags)
}

fn cmd_eval_offline(
    gt_path: &Path,
    pred_path: &Path,
    out_dir: &Path,
    scorers: &[ScorerKind],
    jobs: usize,
) -> Result<i32> {
    let kinds: Vec<ScorerKind> = if scorers.is_empty() {
        ScorerKind::ALL.to_vec()
    } else {
        scorers.to_vec()
    };
    let gt_bytes = read_file(gt_path)?;
    let pred_bytes = read_file(pred_path)?;
    let (anns, gt_warnings) = parse_ground_truth(&gt_bytes)?;
    let (preds, pred_warnings) = parse_predictions(&pred_bytes)?;
    print_warnings(&gt_warnings);
    print_warnings(&pred_warnings);

    if anns.is_empty() {
        return Err(Error::IdMismatch("annotation corpus is empty".into()));
    }
    let flags = check_ids(&preds, &anns)?;
    print_warnings(&flags);
    let items: Vec<(&String, &VideoAnnotation)> = anns.iter().collect();
    let preds_ref = &preds;
    let kinds_ref = &kinds;
    let reports = fan_out(items, jobs, move |(id, ann)| {
        let fallback = PredictionSet::empty(id.clone());
        let video_preds = preds_ref.get(id).unwrap_or(&fallback);
        evaluate_offline_video(video_preds, ann, &DEFAULT_IOU_THRESHOLDS, kinds_ref)
    });
    let report = aggregate_reports(&reports, &DEFAULT_IOU_THRESHOLDS, &kinds);

    let mut manifest = RunManifest::new("eval-offline");
    manifest.set("thresholds", "0.3,0.5,0.7,0.9");
    manifest.set(
        "scorers",
        kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(","),
    );
    manifest.add_input(&gt_path.display().to_string(), &gt_bytes);
    manifest.add_input(&pred_path.display().to_string(), &pred_bytes);

    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("offline_report.csv"), offline_report_csv(&report))?;
    fs::write(
        out_dir.join("offline_report.json"),
        offline_report_json(&manifest, &report, &flags),
    )?;
    fs::write(out_dir.join("manifest.json"), manifest.to_json())?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval_live(
    gt_path: &Path,
    pred_path: &Path,
    out_dir: &Path,
    grid_args: &GridArgs,
    scorer: ScorerKind,
    window: usize,
    normalization: WindowNormalization,
    scale: ReportScale,
    aggregation: GammaAggregation,
    jobs: usize,
) -> Result<i32> {
    let grids = grid_args.grids()?;
    if window == 0 {
        return Err(Error::Config("history window must be at least 1 segment".into()));
    }
    let gt_bytes = read_file(gt_path)?;
    let pred_bytes = read_file(pred_path)?;
    let (anns, gt_warnings) = parse_ground_truth(&gt_bytes)?;
    let (preds, pred_warnings) = parse_predictions(&pred_bytes)?;
    print_warnings(&gt_warnings);
    print_warnings(&pred_warnings);
    let flags = check_ids(&preds, &anns)?;
    print_warnings(&flags);

    let series_dir = out_dir.join("series");
    fs::create_dir_all(&series_dir)?;

    let mut summaries: BTreeMap<u32, LiveSummary> = BTreeMap::new();
    let dt_frames: Vec<u32> = grids.iter().map(|g| g.delta_t_frames()).collect();
    for grid in &grids {
        let mut config = LiveScoreConfig::new(*grid, scorer, window)?;
        config.normalization = normalization;
        config.scale = scale;
        config.aggregation = aggregation;
        let items: Vec<(&String, &VideoAnnotation)> = anns.iter().collect();
        let config_ref = &config;
        let preds_ref = &preds;
        let results = fan_out(items, jobs, move |(id, ann)| {
            let fallback = PredictionSet::empty(id.clone());
            let video_preds = preds_ref.get(id).unwrap_or(&fallback);
            evaluate_live(video_preds, ann, config_ref).map(|series| {
                let csv = live_series_csv(&series);
                (id.clone(), csv, series.summary, series.out_of_grid_predictions)
            })
        });
        let mut video_summaries = Vec::with_capacity(results.len());
        for result in results {
            let (id, csv, summary, out_of_grid) = result?;
            if out_of_grid > 0 {
                eprintln!(
                    "warning: {out_of_grid} prediction(s) for '{id}' end after the evaluated timeline at dt={}",
                    grid.delta_t_frames()
                );
            }
            fs::write(series_dir.join(series_file_name(&id, grid)), csv)?;
            video_summaries.push(summary);
        }
        summaries.insert(grid.delta_t_frames(), corpus_summary(&video_summaries));
    }

    let mut manifest = RunManifest::new("eval-live");
    manifest.set(
        "dt_frames",
        dt_frames.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
    );
    manifest.set("fps", grid_args.fps);
    manifest.set("scorer", scorer.name());
    manifest.set("window", window);
    manifest.set("normalization", normalization.name());
    manifest.set("scale", scale.name());
    manifest.set("gamma_aggregation", format!("{aggregation:?}"));
    manifest.add_input(&gt_path.display().to_string(), &gt_bytes);
    manifest.add_input(&pred_path.display().to_string(), &pred_bytes);

    fs::write(
        out_dir.join("summary.csv"),
        live_summary_csv(scorer, &dt_frames, &summaries, scale),
    )?;
    fs::write(
        out_dir.join("summary.json"),
        live_summary_json(
            &manifest,
            scorer,
            window,
            normalization,
            scale,
            grid_args.fps,
            &dt_frames,
            &summaries,
            anns.len(),
        ),
    )?;
    fs::write(out_dir.join("manifest.json"), manifest.to_json())?;
    Ok(0)
}

fn cmd_split_annotations(gt_path: &Path, out_path: &Path, grid_args: &GridArgs) -> Result<i32> {
    let grid = grid_args.single_grid()?;
    let gt_bytes = read_file(gt_path)?;
    let (anns, warnings) = parse_ground_truth(&gt_bytes)?;
    print_warnings(&warnings);
    let split: BTreeMap<String, VideoAnnotation> = anns
        .iter()
        .map(|(id, ann)| (id.clone(), split_annotations(ann, &grid)))
        .collect();

    let mut manifest = RunManifest::new("split-annotations");
    manifest.set("dt_frames", grid.delta_t_frames());
    manifest.set("fps", grid.fps());
    manifest.add_input(&gt_path.display().to_string(), &gt_bytes);

    if let Some(parent) = out_path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(out_path, write_ground_truth(&split))?;
    let manifest_path = out_path.with_extension("manifest.json");
    fs::write(manifest_path, manifest.to_json())?;
    Ok(0)
}

fn cmd_replay_audit(
    out_dir: &Path,
    pred_path: Option<&Path>,
    log_path: Option<&Path>,
    grid_args: &GridArgs,
    memory: usize,
    consolidate: bool,
    gt_path: Option<&Path>,
) -> Result<i32> {
    let grid = grid_args.single_grid()?;
    let replay_config = ReplayConfig::new(grid, memory)?;
    let mut manifest = RunManifest::new("replay-audit");
    manifest.set("dt_frames", grid.delta_t_frames());
    manifest.set("fps", grid.fps());
    manifest.set("memory", memory);
    manifest.set("consolidate", consolidate);

    let anns = match gt_path {
        Some(path) => {
            let bytes = read_file(path)?;
            let (anns, warnings) = parse_ground_truth(&bytes)?;
            print_warnings(&warnings);
            manifest.add_input(&path.display().to_string(), &bytes);
            Some(anns)
        }
        None => None,
    };

    let mut entries: Vec<(Option<String>, Violation)> = Vec::new();
    match (pred_path, log_path) {
        (Some(pred_path), None) => {
            let pred_bytes = read_file(pred_path)?;
            let (preds, warnings) = parse_predictions(&pred_bytes)?;
            print_warnings(&warnings);
            manifest.add_input(&pred_path.display().to_string(), &pred_bytes);
            fs::create_dir_all(out_dir)?;
            for (id, set) in &preds {
                let log = replay(set, &replay_config, consolidate);
                let gt = anns.as_ref().and_then(|a| a.get(id));
                let violations = audit_causality(&log, &grid, gt)?;
                fs::write(
                    out_dir.join(format!("{}.emissions.jsonl", sanitize_id(id))),
                    emission_log_to_jsonl(&log),
                )?;
                entries.extend(violations.into_iter().map(|v| (Some(id.clone()), v)));
            }
        }
        (None, Some(log_path)) => {
            let log_bytes = read_file(log_path)?;
            let log = parse_emission_log(&log_bytes)?;
            manifest.add_input(&log_path.display().to_string(), &log_bytes);
            fs::create_dir_all(out_dir)?;
            // timeliness needs an unambiguous video; apply only when the
            // ground truth holds exactly one
            let gt = anns.as_ref().and_then(|a| {
                if a.len() == 1 {
                    a.values().next()
                } else {
                    if a.len() > 1 {
                        eprintln!("warning: --gt has multiple videos; timeliness check skipped in log mode");
                    }
                    None
                }
            });
            let violations = audit_causality(&log, &grid, gt)?;
            entries.extend(violations.into_iter().map(|v| (None, v)));
        }
        _ => {
            return Err(Error::Config(
                "replay-audit needs exactly one of --pred or --log".into(),
            ));
        }
    }

    fs::write(out_dir.join("audit.json"), audit_report_json_tagged(&entries))?;
    fs::write(out_dir.join("manifest.json"), manifest.to_json())?;
    let hard_violations = entries.iter().filter(|(_, v)| !v.advisory).count();
    for (video, violation) in &entries {
        let video = video.as_deref().unwrap_or("-");
        eprintln!(
            "{}{} at step {} [{video}]: {}",
            violation.kind.name(),
            if violation.advisory { " (advisory)" } else { "" },
            violation.step,
            violation.detail
        );
    }
    Ok(if hard_violations > 0 { 5 } else { 0 })
}

fn audit_report_json_tagged(entries: &[(Option<String>, Violation)]) -> String {
    let untagged: Vec<Violation> = entries.iter().map(|(_, v)| v.clone()).collect();
    if entries.iter().all(|(video, _)| video.is_none()) {
        return audit_report_json(&untagged);
    }
    // multi-video runs tag each entry with its video id
    let mut out = String::from("[");
    for (i, (video, violation)) in entries.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let single = audit_report_json(std::slice::from_ref(violation));
        let inner = single.trim().trim_start_matches('[').trim_end_matches(']');
        let video_field = match video {
            Some(id) => format!("\"video\":{},", serde_json::to_string(id).expect("string to json")),
            None => "\"video\":null,".to_string(),
        };
        out.push_str(&format!("{{{video_field}{}", &inner[1..]));
    }
    out.push_str("]\n");
    out
}
