//! Interval arithmetic, segment-grid queries and annotation splitting.

use crate::data::{SegmentGrid, TimedCaption, VideoAnnotation};

/// A time interval in seconds with positive length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start_s: f64,
    pub end_s: f64,
}

impl Interval {
    pub fn new(start_s: f64, end_s: f64) -> Interval {
        debug_assert!(start_s < end_s, "interval must have positive length");
        Interval { start_s, end_s }
    }

    pub fn length(&self) -> f64 {
        self.end_s - self.start_s
    }

    /// Overlap with positive measure; boundary contact does not count.
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.start_s < other.end_s && other.start_s < self.end_s
    }
}

/// 1-D intersection over union; 0 for disjoint intervals.
pub fn iou(a: &Interval, b: &Interval) -> f64 {
    let inter = a.end_s.min(b.end_s) - a.start_s.max(b.start_s);
    if inter <= 0.0 {
        return 0.0;
    }
    let union = a.length() + b.length() - inter;
    inter / union
}

/// Ground-truth events overlapping segment `n` with positive measure.
pub fn refs_for_segment(ann: &VideoAnnotation, grid: &SegmentGrid, n: usize) -> Vec<TimedCaption> {
    let seg = grid.segment_interval(n);
    ann.events
        .iter()
        .filter(|ev| ev.interval().overlaps(&seg))
        .cloned()
        .collect()
}

/// Split every event along the absolute segment grid: each event is replaced
/// by its positive-measure intersections with the grid segments it overlaps,
/// all chunks carrying the original sentence. Chunks are ordered by start
/// time, ties by original event order.
pub fn split_annotations(ann: &VideoAnnotation, grid: &SegmentGrid) -> VideoAnnotation {
    let mut chunks: Vec<TimedCaption> = Vec::new();
    for event in &ann.events {
        let first = grid.segment_of_start(event.start_s);
        let last = grid.segment_of_end(event.end_s);
        for n in first..=last {
            let seg = grid.segment_interval(n);
            let start = event.start_s.max(seg.start_s);
            let end = event.end_s.min(seg.end_s);
            if start < end {
                chunks.push(TimedCaption {
                    start_s: start,
                    end_s: end,
                    sentence: event.sentence.clone(),
                    confidence: event.confidence,
                });
            }
        }
    }
    chunks.sort_by(|a, b| a.start_s.total_cmp(&b.start_s));
    VideoAnnotation {
        video_id: ann.video_id.clone(),
        duration_s: ann.duration_s,
        events: chunks,
    }
}
