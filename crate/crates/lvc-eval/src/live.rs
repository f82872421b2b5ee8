//! The live-score engine: per-segment caption quality, false-positive
//! counting, and the LS / wLS / hLS / hwLS series.
//!
//! All four series are computed in [0, 1] and scaled only at report time.
//! Segments are processed strictly in order; computing index n never reads
//! predictions emitted after t'_n, so the metric itself is causal.

use crate::data::{group_by_segment, PredictionSet, SegmentGrid, TimedCaption, VideoAnnotation};
use crate::error::{Error, Result};
use crate::temporal::refs_for_segment;
use crate::text::{score, tokenize, ScorerKind};
use serde::{Deserialize, Serialize};

/// How the caption scores of one segment are folded into its γ value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GammaAggregation {
    /// For each reference, the best score among temporally overlapping
    /// predictions; γ is the mean over references. Rewards one good caption
    /// per annotated event.
    #[default]
    PerReferenceMax,
    /// Mean over all temporally overlapping (prediction, reference) pairs.
    /// Provided for sensitivity studies.
    AllPairsMean,
}

/// Denominator convention for the history-window variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum WindowNormalization {
    /// Divide the windowed sums by the full segment count K, exactly as the
    /// hLS/hwLS formulas are written.
    #[default]
    PaperK,
    /// Divide by min(w, K) so a full window of perfect scores reads 1.0.
    EffectiveWindow,
}

impl WindowNormalization {
    pub fn name(&self) -> &'static str {
        match self {
            WindowNormalization::PaperK => "paper-k",
            WindowNormalization::EffectiveWindow => "effective-window",
        }
    }
}

impl std::str::FromStr for WindowNormalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().replace('_', "-").as_str() {
            "paper-k" | "paper" | "k" => Ok(WindowNormalization::PaperK),
            "effective-window" | "effective" | "window" => Ok(WindowNormalization::EffectiveWindow),
            other => Err(Error::Config(format!("unknown window normalization '{other}'"))),
        }
    }
}

/// Scale applied to summary outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ReportScale {
    Unit,
    #[default]
    Percent,
}

impl ReportScale {
    pub fn factor(&self) -> f64 {
        match self {
            ReportScale::Unit => 1.0,
            ReportScale::Percent => 100.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ReportScale::Unit => "unit",
            ReportScale::Percent => "percent",
        }
    }
}

impl std::str::FromStr for ReportScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "unit" => Ok(ReportScale::Unit),
            "percent" => Ok(ReportScale::Percent),
            other => Err(Error::Config(format!("unknown report scale '{other}'"))),
        }
    }
}

/// Full configuration of a live evaluation run.
#[derive(Debug, Clone)]
pub struct LiveScoreConfig {
    pub grid: SegmentGrid,
    pub scorer: ScorerKind,
    /// History window length in segments, w >= 1.
    pub window: usize,
    pub normalization: WindowNormalization,
    pub scale: ReportScale,
    pub aggregation: GammaAggregation,
}

impl LiveScoreConfig {
    pub fn new(grid: SegmentGrid, scorer: ScorerKind, window: usize) -> Result<LiveScoreConfig> {
        if window == 0 {
            return Err(Error::Config("history window must be at least 1 segment".into()));
        }
        Ok(LiveScoreConfig {
            grid,
            scorer,
            window,
            normalization: WindowNormalization::default(),
            scale: ReportScale::default(),
            aggregation: GammaAggregation::default(),
        })
    }
}

/// Per-segment γ score and false-positive count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentScore {
    pub gamma: f64,
    pub fp_count: usize,
    pub has_refs: bool,
}

/// γ and fp for every segment of one video, index 0 holding segment 1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GammaSeries {
    pub segments: Vec<SegmentScore>,
}

impl GammaSeries {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    fn gamma(&self, n: usize) -> f64 {
        self.segments[n - 1].gamma
    }

    fn fp(&self, n: usize) -> f64 {
        self.segments[n - 1].fp_count as f64
    }
}

/// One row of the live-score series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiveRow {
    pub segment_index: usize,
    pub t_prime_s: f64,
    pub gamma: f64,
    pub fp_count: usize,
    pub ls: f64,
    pub wls: f64,
    pub hls: f64,
    pub hwls: f64,
}

/// Mean of each variant over all segments, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LiveSummary {
    pub ls: f64,
    pub wls: f64,
    pub hls: f64,
    pub hwls: f64,
}

/// Time-indexed LS/wLS/hLS/hwLS values for one video.
#[derive(Debug, Clone, PartialEq)]
pub struct LiveScoreSeries {
    pub video_id: String,
    pub rows: Vec<LiveRow>,
    pub summary: LiveSummary,
    /// Predictions emitted after the last evaluation slot; they are outside
    /// the scored timeline.
    pub out_of_grid_predictions: usize,
}

/// Score one segment: γ from the configured aggregation, plus the number of
/// predictions overlapping no reference interval (a purely temporal
/// criterion; wrong text on a covered interval is penalized through γ).
pub fn gamma_for_segment(
    seg_preds: &[TimedCaption],
    seg_refs: &[TimedCaption],
    kind: ScorerKind,
    aggregation: GammaAggregation,
) -> (f64, usize) {
    let fp_count = seg_preds
        .iter()
        .filter(|p| !seg_refs.iter().any(|r| p.interval().overlaps(&r.interval())))
        .count();
    if seg_refs.is_empty() {
        return (0.0, fp_count);
    }
    let pred_tokens: Vec<_> = seg_preds.iter().map(|p| tokenize(&p.sentence)).collect();
    let gamma = match aggregation {
        GammaAggregation::PerReferenceMax => {
            let mut total = 0.0;
            for reference in seg_refs {
                let ref_tokens = vec![tokenize(&reference.sentence)];
                let best = seg_preds
                    .iter()
                    .zip(&pred_tokens)
                    .filter(|(p, _)| p.interval().overlaps(&reference.interval()))
                    .map(|(_, cand)| score(kind, cand, &ref_tokens))
                    .fold(0.0, f64::max);
                total += best;
            }
            total / seg_refs.len() as f64
        }
        GammaAggregation::AllPairsMean => {
            let mut total = 0.0;
            let mut pairs = 0usize;
            for reference in seg_refs {
                let ref_tokens = vec![tokenize(&reference.sentence)];
                for (p, cand) in seg_preds.iter().zip(&pred_tokens) {
                    if p.interval().overlaps(&reference.interval()) {
                        total += score(kind, cand, &ref_tokens);
                        pairs += 1;
                    }
                }
            }
            if pairs == 0 {
                0.0
            } else {
                total / pairs as f64
            }
        }
    };
    (gamma, fp_count)
}

/// LS(t'_n): running mean of γ over segments 1..=n.
pub fn ls_series(gammas: &GammaSeries) -> Vec<f64> {
    let mut out = Vec::with_capacity(gammas.len());
    let mut sum = 0.0;
    for n in 1..=gammas.len() {
        sum += gammas.gamma(n);
        out.push(sum / n as f64);
    }
    out
}

/// wLS(t'_n) = LS(t'_n) · e^(-β) with β the running mean of fp counts.
pub fn wls_series(gammas: &GammaSeries) -> Vec<f64> {
    let ls = ls_series(gammas);
    let mut out = Vec::with_capacity(gammas.len());
    let mut fp_sum = 0.0;
    for n in 1..=gammas.len() {
        fp_sum += gammas.fp(n);
        let beta = fp_sum / n as f64;
        out.push(ls[n - 1] * (-beta).exp());
    }
    out
}

fn window_start(n: usize, w: usize) -> usize {
    n.saturating_sub(w - 1).max(1)
}

fn window_denominator(n: usize, w: usize, norm: WindowNormalization) -> f64 {
    match norm {
        WindowNormalization::PaperK => n as f64,
        WindowNormalization::EffectiveWindow => w.min(n) as f64,
    }
}

/// hLS(t'_n): γ summed over the history window [n+1-w, n], divided by K
/// (as printed) or by the effective window length.
pub fn hls_series(gammas: &GammaSeries, w: usize, norm: WindowNormalization) -> Vec<f64> {
    assert!(w >= 1, "history window must be at least 1");
    (1..=gammas.len())
        .map(|n| {
            let sum: f64 = (window_start(n, w)..=n).map(|m| gammas.gamma(m)).sum();
            sum / window_denominator(n, w, norm)
        })
        .collect()
}

/// hwLS(t'_n) = hLS(t'_n) · e^(-β_w) with β_w the windowed fp sum under the
/// same denominator convention.
pub fn hwls_series(gammas: &GammaSeries, w: usize, norm: WindowNormalization) -> Vec<f64> {
    let hls = hls_series(gammas, w, norm);
    (1..=gammas.len())
        .map(|n| {
            let fp_sum: f64 = (window_start(n, w)..=n).map(|m| gammas.fp(m)).sum();
            let beta = fp_sum / window_denominator(n, w, norm);
            hls[n - 1] * (-beta).exp()
        })
        .collect()
}

/// Build the γ series for one video: predictions grouped by emission
/// segment, references selected by temporal overlap, one γ/fp pair per slot.
pub fn gamma_series(
    preds: &PredictionSet,
    ann: &VideoAnnotation,
    grid: &SegmentGrid,
    kind: ScorerKind,
    aggregation: GammaAggregation,
) -> Result<(GammaSeries, usize)> {
    if ann.duration_s <= 0.0 || ann.duration_s.is_nan() {
        return Err(Error::structural(
            format!("annotation '{}'", ann.video_id),
            "video duration must be positive".to_string(),
        ));
    }
    let segment_count = grid.segment_count(ann.duration_s);
    let buckets = group_by_segment(preds, grid, ann.duration_s)?;
    let out_of_grid = buckets
        .range(segment_count + 1..)
        .map(|(_, b)| b.len())
        .sum();
    let mut segments = Vec::with_capacity(segment_count);
    for n in 1..=segment_count {
        let empty = Vec::new();
        let seg_preds = buckets.get(&n).unwrap_or(&empty);
        let seg_refs = refs_for_segment(ann, grid, n);
        let (gamma, fp_count) = gamma_for_segment(seg_preds, &seg_refs, kind, aggregation);
        segments.push(SegmentScore {
            gamma,
            fp_count,
            has_refs: !seg_refs.is_empty(),
        });
    }
    Ok((GammaSeries { segments }, out_of_grid))
}

/// Mean of each variant over all segments.
pub fn summarize(rows: &[LiveRow]) -> LiveSummary {
    if rows.is_empty() {
        return LiveSummary::default();
    }
    let n = rows.len() as f64;
    LiveSummary {
        ls: rows.iter().map(|r| r.ls).sum::<f64>() / n,
        wls: rows.iter().map(|r| r.wls).sum::<f64>() / n,
        hls: rows.iter().map(|r| r.hls).sum::<f64>() / n,
        hwls: rows.iter().map(|r| r.hwls).sum::<f64>() / n,
    }
}

/// Corpus summary: uniform mean of per-video summaries.
pub fn corpus_summary(videos: &[LiveSummary]) -> LiveSummary {
    if videos.is_empty() {
        return LiveSummary::default();
    }
    let n = videos.len() as f64;
    LiveSummary {
        ls: videos.iter().map(|s| s.ls).sum::<f64>() / n,
        wls: videos.iter().map(|s| s.wls).sum::<f64>() / n,
        hls: videos.iter().map(|s| s.hls).sum::<f64>() / n,
        hwls: videos.iter().map(|s| s.hwls).sum::<f64>() / n,
    }
}

/// Evaluate one video's prediction stream against its annotation.
pub fn evaluate_live(
    preds: &PredictionSet,
    ann: &VideoAnnotation,
    config: &LiveScoreConfig,
) -> Result<LiveScoreSeries> {
    if config.window == 0 {
        return Err(Error::Config("history window must be at least 1 segment".into()));
    }
    let (gammas, out_of_grid) = gamma_series(preds, ann, &config.grid, config.scorer, config.aggregation)?;
    let ls = ls_series(&gammas);
    let wls = wls_series(&gammas);
    let hls = hls_series(&gammas, config.window, config.normalization);
    let hwls = hwls_series(&gammas, config.window, config.normalization);
    let rows: Vec<LiveRow> = gammas
        .segments
        .iter()
        .enumerate()
        .map(|(i, seg)| LiveRow {
            segment_index: i + 1,
            t_prime_s: config.grid.emission_time(i + 1),
            gamma: seg.gamma,
            fp_count: seg.fp_count,
            ls: ls[i],
            wls: wls[i],
            hls: hls[i],
            hwls: hwls[i],
        })
        .collect();
    let summary = summarize(&rows);
    Ok(LiveScoreSeries {
        video_id: ann.video_id.clone(),
        rows,
        summary,
        out_of_grid_predictions: out_of_grid,
    })
}
