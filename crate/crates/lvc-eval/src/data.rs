//! Domain types and ingestion of ground-truth annotations and prediction
//! files.
//!
//! Ground truth is a JSON object mapping video id to
//! `{"duration": s, "timestamps": [[start, end], ...], "sentences": [...]}`.
//! Predictions are `{"results": {video_id: [{"sentence", "timestamp",
//! "score"?}, ...]}}`; unknown top-level keys are ignored. All time is kept
//! in seconds as f64; frame counts are converted once at the configuration
//! boundary.

use crate::error::{Error, Result};
use crate::temporal::Interval;
use crate::text::tokenize;
use serde::Deserialize;
use std::collections::BTreeMap;

/// Ground-truth events may overshoot the stated video duration by this much
/// before the overshoot is clamped away; the public annotation releases
/// contain such cases.
pub const DURATION_SLACK_S: f64 = 0.5;

/// One captioned temporal event.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedCaption {
    pub start_s: f64,
    pub end_s: f64,
    pub sentence: String,
    /// Present on predictions, absent on ground truth.
    pub confidence: Option<f64>,
}

impl TimedCaption {
    pub fn interval(&self) -> Interval {
        Interval::new(self.start_s, self.end_s)
    }

    /// Confidence with the neutral default for ground-truth captions.
    pub fn confidence_or_default(&self) -> f64 {
        self.confidence.unwrap_or(1.0)
    }
}

/// Annotated events of one video.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoAnnotation {
    pub video_id: String,
    pub duration_s: f64,
    pub events: Vec<TimedCaption>,
}

/// Caption predictions of one video; every event carries a confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    pub video_id: String,
    pub events: Vec<TimedCaption>,
}

impl PredictionSet {
    pub fn empty(video_id: impl Into<String>) -> PredictionSet {
        PredictionSet {
            video_id: video_id.into(),
            events: Vec::new(),
        }
    }
}

/// The Δt/fps segmentation of a video timeline into evaluation slots.
///
/// Segment `n` (1-based) covers the half-open interval
/// `[(n-1)·Δt, n·Δt)`; its closing instant `t'_n = n·Δt` is when a live
/// system emits the segment's captions. A prediction is therefore assigned
/// to the segment whose closing instant is the first one at or after the
/// prediction's end time: captions ending exactly on a boundary belong to
/// the segment they close.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentGrid {
    delta_t_frames: u32,
    fps: f64,
    delta_t_s: f64,
}

impl SegmentGrid {
    pub const DEFAULT_FPS: f64 = 30.0;

    /// The Δt sweep used for live-score summaries when none is given,
    /// in frames at 30 fps.
    pub const DEFAULT_DELTA_T_FRAMES: [u32; 6] = [24, 48, 72, 96, 120, 150];

    pub fn from_frames(delta_t_frames: u32, fps: f64) -> Result<SegmentGrid> {
        if delta_t_frames == 0 {
            return Err(Error::Config("delta-t must be a positive frame count".into()));
        }
        if !(fps.is_finite() && fps > 0.0) {
            return Err(Error::Config(format!("fps must be positive, got {fps}")));
        }
        Ok(SegmentGrid {
            delta_t_frames,
            fps,
            delta_t_s: delta_t_frames as f64 / fps,
        })
    }

    /// Seconds-first construction for non-30fps corpora: the nearest whole
    /// frame count is used.
    pub fn from_seconds(delta_t_s: f64, fps: f64) -> Result<SegmentGrid> {
        if !(delta_t_s.is_finite() && delta_t_s > 0.0) {
            return Err(Error::Config(format!("delta-t must be positive, got {delta_t_s}s")));
        }
        let frames = (delta_t_s * fps).round().max(1.0) as u32;
        SegmentGrid::from_frames(frames, fps)
    }

    pub fn delta_t_frames(&self) -> u32 {
        self.delta_t_frames
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn delta_t_s(&self) -> f64 {
        self.delta_t_s
    }

    /// The half-open interval covered by segment `n` (1-based).
    pub fn segment_interval(&self, n: usize) -> Interval {
        assert!(n >= 1, "segment indices are 1-based");
        Interval::new((n - 1) as f64 * self.delta_t_s, n as f64 * self.delta_t_s)
    }

    /// Closing instant t'_n of segment `n`.
    pub fn emission_time(&self, n: usize) -> f64 {
        n as f64 * self.delta_t_s
    }

    /// Segment that emits a caption ending at `end_s`: the smallest `n`
    /// with `end_s <= n·Δt`.
    pub fn segment_of_end(&self, end_s: f64) -> usize {
        let dt = self.delta_t_s;
        let mut n = ((end_s / dt).ceil().max(1.0)) as usize;
        while n > 1 && end_s <= (n - 1) as f64 * dt {
            n -= 1;
        }
        while end_s > n as f64 * dt {
            n += 1;
        }
        n
    }

    /// Segment whose half-open interval contains `start_s`: the smallest
    /// `n` with `start_s < n·Δt`.
    pub fn segment_of_start(&self, start_s: f64) -> usize {
        let dt = self.delta_t_s;
        let mut n = ((start_s / dt).floor().max(0.0)) as usize + 1;
        while n > 1 && start_s < (n - 1) as f64 * dt {
            n -= 1;
        }
        while start_s >= n as f64 * dt {
            n += 1;
        }
        n
    }

    /// Number of evaluation slots covering a video of the given duration.
    pub fn segment_count(&self, duration_s: f64) -> usize {
        self.segment_of_end(duration_s)
    }
}

/// Assign every prediction to the segment that emits it (by end time).
///
/// The assignment partitions the predictions; a prediction ending beyond
/// ten times the video duration makes the input a range error.
pub fn group_by_segment(
    preds: &PredictionSet,
    grid: &SegmentGrid,
    duration_s: f64,
) -> Result<BTreeMap<usize, Vec<TimedCaption>>> {
    let mut buckets: BTreeMap<usize, Vec<TimedCaption>> = BTreeMap::new();
    for event in &preds.events {
        if event.end_s > 10.0 * duration_s {
            return Err(Error::Range(format!(
                "prediction in '{}' ends at {:.3}s, beyond 10x the video duration {:.3}s",
                preds.video_id, event.end_s, duration_s
            )));
        }
        let n = grid.segment_of_end(event.end_s);
        buckets.entry(n).or_default().push(event.clone());
    }
    Ok(buckets)
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct RawAnnotation {
    duration: f64,
    timestamps: Vec<[f64; 2]>,
    sentences: Vec<String>,
}

#[derive(Deserialize)]
struct RawPredictionFile {
    results: BTreeMap<String, Vec<RawPrediction>>,
}

#[derive(Deserialize)]
struct RawPrediction {
    sentence: String,
    timestamp: [f64; 2],
    score: Option<f64>,
}

fn check_sentence(context: &str, sentence: &str) -> Result<()> {
    if tokenize(sentence).is_empty() {
        return Err(Error::structural(
            context,
            format!("sentence '{sentence}' is empty after tokenization"),
        ));
    }
    Ok(())
}

/// Parse a ground-truth file. Returns the annotations keyed by video id plus
/// warnings for events that were clamped onto the video timeline.
pub fn parse_ground_truth(bytes: &[u8]) -> Result<(BTreeMap<String, VideoAnnotation>, Vec<String>)> {
    let raw: BTreeMap<String, RawAnnotation> = serde_json::from_slice(bytes)
        .map_err(|e| Error::parse("ground-truth file", e.to_string()))?;
    let mut videos = BTreeMap::new();
    let mut warnings = Vec::new();
    for (video_id, ann) in raw {
        let context = format!("ground truth for '{video_id}'");
        if !(ann.duration.is_finite() && ann.duration > 0.0) {
            return Err(Error::structural(&context, format!("duration {} is not positive", ann.duration)));
        }
        if ann.timestamps.len() != ann.sentences.len() {
            return Err(Error::structural(
                &context,
                format!(
                    "{} timestamps but {} sentences",
                    ann.timestamps.len(),
                    ann.sentences.len()
                ),
            ));
        }
        let mut events = Vec::with_capacity(ann.timestamps.len());
        for (i, ([mut start, mut end], sentence)) in
            ann.timestamps.iter().copied().zip(ann.sentences).enumerate()
        {
            let field = format!("{context}, event {i}");
            if !start.is_finite() || !end.is_finite() {
                return Err(Error::structural(&field, "non-finite timestamp".to_string()));
            }
            if start < 0.0 {
                warnings.push(format!("{field}: start {start:.3}s clamped to 0"));
                start = 0.0;
            }
            if end > ann.duration + DURATION_SLACK_S {
                warnings.push(format!(
                    "{field}: end {end:.3}s clamped to the video duration {:.3}s",
                    ann.duration
                ));
                end = ann.duration;
            }
            if start >= end {
                return Err(Error::structural(
                    &field,
                    format!("interval [{start:.3}, {end:.3}] has no positive length"),
                ));
            }
            check_sentence(&field, &sentence)?;
            events.push(TimedCaption {
                start_s: start,
                end_s: end,
                sentence,
                confidence: None,
            });
        }
        videos.insert(
            video_id.clone(),
            VideoAnnotation {
                video_id,
                duration_s: ann.duration,
                events,
            },
        );
    }
    Ok((videos, warnings))
}

/// Parse a prediction file. A missing score defaults to 1.0 with a warning;
/// invalid intervals or out-of-range confidences reject the file.
pub fn parse_predictions(bytes: &[u8]) -> Result<(BTreeMap<String, PredictionSet>, Vec<String>)> {
    let raw: RawPredictionFile = serde_json::from_slice(bytes)
        .map_err(|e| Error::parse("prediction file", e.to_string()))?;
    let mut videos = BTreeMap::new();
    let mut warnings = Vec::new();
    for (video_id, items) in raw.results {
        let context = format!("predictions for '{video_id}'");
        let mut events = Vec::with_capacity(items.len());
        for (i, item) in items.into_iter().enumerate() {
            let field = format!("{context}, prediction {i}");
            let [start, end] = item.timestamp;
            if !start.is_finite() || !end.is_finite() || start < 0.0 {
                return Err(Error::structural(&field, format!("bad timestamp [{start}, {end}]")));
            }
            if start >= end {
                return Err(Error::structural(
                    &field,
                    format!("interval [{start:.3}, {end:.3}] has no positive length"),
                ));
            }
            check_sentence(&field, &item.sentence)?;
            let confidence = match item.score {
                Some(score) if (0.0..=1.0).contains(&score) => score,
                Some(score) => {
                    return Err(Error::structural(&field, format!("score {score} outside [0, 1]")));
                }
                None => {
                    warnings.push(format!("{field}: missing score, defaulting to 1.0"));
                    1.0
                }
            };
            events.push(TimedCaption {
                start_s: start,
                end_s: end,
                sentence: item.sentence,
                confidence: Some(confidence),
            });
        }
        videos.insert(video_id.clone(), PredictionSet { video_id, events });
    }
    Ok((videos, warnings))
}
