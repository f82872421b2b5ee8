//! Offline evaluation: event-localization precision/recall and matched-pair
//! caption scoring across IoU thresholds, for comparison against the live
//! metrics.
//!
//! Matching is many-to-many: a ground-truth event is recalled if any
//! prediction reaches the IoU threshold, and a prediction is precise if any
//! ground-truth event does. Corpus numbers are uniform means over the
//! annotated videos.

use crate::data::{PredictionSet, VideoAnnotation};
use crate::error::{Error, Result};
use crate::temporal::iou;
use crate::text::{score, tokenize, ScorerKind, TokenSeq};
use std::collections::BTreeMap;

/// The IoU thresholds of the standard offline protocol.
pub const DEFAULT_IOU_THRESHOLDS: [f64; 4] = [0.3, 0.5, 0.7, 0.9];

/// Caption quality at each threshold plus their mean, in percent.
#[derive(Debug, Clone, PartialEq)]
pub struct CaptionScore {
    pub per_threshold: Vec<f64>,
    pub average: f64,
}

/// Localization and caption scores of one video or a whole corpus,
/// all values in [0, 100].
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineReport {
    pub thresholds: Vec<f64>,
    pub recall: Vec<f64>,
    pub precision: Vec<f64>,
    pub recall_avg: f64,
    pub precision_avg: f64,
    pub captions: BTreeMap<ScorerKind, CaptionScore>,
    /// True when the prediction set was empty and precision is reported as 0
    /// by convention rather than by measurement.
    pub empty_predictions: bool,
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Localization precision/recall per threshold, in percent.
pub fn localization_pr(
    preds: &PredictionSet,
    ann: &VideoAnnotation,
    thresholds: &[f64],
) -> (Vec<f64>, Vec<f64>, bool) {
    let mut precision = Vec::with_capacity(thresholds.len());
    let mut recall = Vec::with_capacity(thresholds.len());
    let empty = preds.events.is_empty();
    for &tau in thresholds {
        let recalled = ann
            .events
            .iter()
            .filter(|gt| {
                preds
                    .events
                    .iter()
                    .any(|p| iou(&p.interval(), &gt.interval()) >= tau)
            })
            .count();
        let precise = preds
            .events
            .iter()
            .filter(|p| {
                ann.events
                    .iter()
                    .any(|gt| iou(&p.interval(), &gt.interval()) >= tau)
            })
            .count();
        recall.push(if ann.events.is_empty() {
            0.0
        } else {
            100.0 * recalled as f64 / ann.events.len() as f64
        });
        precision.push(if empty {
            0.0
        } else {
            100.0 * precise as f64 / preds.events.len() as f64
        });
    }
    (precision, recall, empty)
}

/// Caption precision for one scorer: each prediction is scored against all
/// ground-truth sentences whose events reach the IoU threshold (one
/// multi-reference call per prediction); unmatched predictions contribute 0.
pub fn caption_precision(
    preds: &PredictionSet,
    ann: &VideoAnnotation,
    thresholds: &[f64],
    kind: ScorerKind,
) -> CaptionScore {
    let pred_tokens: Vec<TokenSeq> = preds.events.iter().map(|p| tokenize(&p.sentence)).collect();
    let gt_tokens: Vec<TokenSeq> = ann.events.iter().map(|g| tokenize(&g.sentence)).collect();
    let mut per_threshold = Vec::with_capacity(thresholds.len());
    for &tau in thresholds {
        let mut total = 0.0;
        for (p, cand) in preds.events.iter().zip(&pred_tokens) {
            let refs: Vec<TokenSeq> = ann
                .events
                .iter()
                .zip(&gt_tokens)
                .filter(|(gt, _)| iou(&p.interval(), &gt.interval()) >= tau)
                .map(|(_, tokens)| tokens.clone())
                .collect();
            if !refs.is_empty() {
                total += score(kind, cand, &refs);
            }
        }
        let value = if preds.events.is_empty() {
            0.0
        } else {
            100.0 * total / preds.events.len() as f64
        };
        per_threshold.push(value);
    }
    let average = mean(&per_threshold);
    CaptionScore { per_threshold, average }
}

/// Evaluate one video.
pub fn evaluate_offline_video(
    preds: &PredictionSet,
    ann: &VideoAnnotation,
    thresholds: &[f64],
    kinds: &[ScorerKind],
) -> OfflineReport {
    let (precision, recall, empty_predictions) = localization_pr(preds, ann, thresholds);
    let captions = kinds
        .iter()
        .map(|&kind| (kind, caption_precision(preds, ann, thresholds, kind)))
        .collect();
    OfflineReport {
        thresholds: thresholds.to_vec(),
        recall_avg: mean(&recall),
        precision_avg: mean(&precision),
        recall,
        precision,
        captions,
        empty_predictions,
    }
}

/// Uniform mean of per-video reports; threshold lists must agree.
pub fn aggregate_reports(reports: &[OfflineReport], thresholds: &[f64], kinds: &[ScorerKind]) -> OfflineReport {
    let n = reports.len().max(1) as f64;
    let per_threshold = |pick: &dyn Fn(&OfflineReport, usize) -> f64| -> Vec<f64> {
        (0..thresholds.len())
            .map(|i| reports.iter().map(|r| pick(r, i)).sum::<f64>() / n)
            .collect()
    };
    let recall = per_threshold(&|r, i| r.recall[i]);
    let precision = per_threshold(&|r, i| r.precision[i]);
    let captions = kinds
        .iter()
        .map(|&kind| {
            let per_t = per_threshold(&|r, i| r.captions[&kind].per_threshold[i]);
            let average = reports.iter().map(|r| r.captions[&kind].average).sum::<f64>() / n;
            (kind, CaptionScore { per_threshold: per_t, average })
        })
        .collect();
    OfflineReport {
        thresholds: thresholds.to_vec(),
        recall_avg: mean(&recall),
        precision_avg: mean(&precision),
        recall,
        precision,
        captions,
        empty_predictions: reports.iter().any(|r| r.empty_predictions),
    }
}

/// Evaluate a corpus: per-video reports averaged uniformly over the
/// annotated videos. Annotated videos without predictions are scored against
/// an empty set; predicted ids absent from the annotations are flagged and
/// skipped. Disjoint id sets are an error.
pub fn evaluate_offline(
    preds: &BTreeMap<String, PredictionSet>,
    anns: &BTreeMap<String, VideoAnnotation>,
    thresholds: &[f64],
    kinds: &[ScorerKind],
) -> Result<(OfflineReport, Vec<String>)> {
    if anns.is_empty() {
        return Err(Error::IdMismatch("annotation corpus is empty".into()));
    }
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
    let mut reports = Vec::with_capacity(anns.len());
    for (id, ann) in anns {
        let fallback = PredictionSet::empty(id.clone());
        let video_preds = preds.get(id).unwrap_or_else(|| {
            flags.push(format!("no predictions for annotated video '{id}'"));
            &fallback
        });
        reports.push(evaluate_offline_video(video_preds, ann, thresholds, kinds));
    }
    Ok((aggregate_reports(&reports, thresholds, kinds), flags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::TimedCaption;

    fn caption(start: f64, end: f64, text: &str, conf: Option<f64>) -> TimedCaption {
        TimedCaption {
            start_s: start,
            end_s: end,
            sentence: text.to_string(),
            confidence: conf,
        }
    }

    fn ann(events: Vec<TimedCaption>) -> VideoAnnotation {
        VideoAnnotation {
            video_id: "v".into(),
            duration_s: 100.0,
            events,
        }
    }

    fn preds(events: Vec<TimedCaption>) -> PredictionSet {
        PredictionSet { video_id: "v".into(), events }
    }

    #[test]
    fn identity_predictions_score_100_everywhere() {
        let gt = ann(vec![
            caption(0.0, 10.0, "a man runs", None),
            caption(20.0, 30.0, "a dog barks", None),
        ]);
        let p = preds(gt.events.iter().map(|e| TimedCaption { confidence: Some(1.0), ..e.clone() }).collect());
        let report = evaluate_offline_video(&p, &gt, &DEFAULT_IOU_THRESHOLDS, &[ScorerKind::RougeL]);
        assert_eq!(report.recall, vec![100.0; 4]);
        assert_eq!(report.precision, vec![100.0; 4]);
        assert_eq!(report.recall_avg, 100.0);
        assert_eq!(report.captions[&ScorerKind::RougeL].average, 100.0);
    }

    #[test]
    fn one_third_iou_survives_only_the_lowest_threshold() {
        let gt = ann(vec![caption(0.0, 10.0, "a man runs", None)]);
        let p = preds(vec![caption(5.0, 15.0, "a man runs", Some(1.0))]);
        let report = evaluate_offline_video(&p, &gt, &DEFAULT_IOU_THRESHOLDS, &[ScorerKind::RougeL]);
        assert_eq!(report.recall, vec![100.0, 0.0, 0.0, 0.0]);
        assert_eq!(report.precision, vec![100.0, 0.0, 0.0, 0.0]);
        assert_eq!(report.recall_avg, 25.0);
        let cap = &report.captions[&ScorerKind::RougeL];
        assert_eq!(cap.per_threshold, vec![100.0, 0.0, 0.0, 0.0]);
        assert_eq!(cap.average, 25.0);
    }

    #[test]
    fn empty_predictions_are_flagged_zero() {
        let gt = ann(vec![caption(0.0, 10.0, "a", None)]);
        let report = evaluate_offline_video(&preds(vec![]), &gt, &DEFAULT_IOU_THRESHOLDS, &[]);
        assert!(report.empty_predictions);
        assert_eq!(report.recall, vec![0.0; 4]);
        assert_eq!(report.precision, vec![0.0; 4]);
    }

    #[test]
    fn disjoint_intervals_score_zero_captions() {
        let gt = ann(vec![caption(0.0, 10.0, "a man runs", None)]);
        let p = preds(vec![caption(50.0, 60.0, "a man runs", Some(1.0))]);
        let cap = caption_precision(&p, &gt, &DEFAULT_IOU_THRESHOLDS, ScorerKind::RougeL);
        assert_eq!(cap.average, 0.0);
    }

    #[test]
    fn precision_and_recall_are_non_increasing_in_tau() {
        let gt = ann(vec![caption(0.0, 10.0, "a", None), caption(12.0, 30.0, "b", None)]);
        let p = preds(vec![
            caption(1.0, 10.5, "a", Some(1.0)),
            caption(13.0, 24.0, "b", Some(1.0)),
            caption(70.0, 80.0, "c", Some(1.0)),
        ]);
        let (precision, recall, _) = localization_pr(&p, &gt, &DEFAULT_IOU_THRESHOLDS);
        for pair in precision.windows(2) {
            assert!(pair[0] >= pair[1]);
        }
        for pair in recall.windows(2) {
            assert!(pair[0] >= pair[1]);
        }
    }

    #[test]
    fn corpus_averages_uniformly_over_videos() {
        let mut anns = BTreeMap::new();
        let mut predictions = BTreeMap::new();
        let gt1 = ann(vec![caption(0.0, 10.0, "a man runs", None)]);
        anns.insert("v1".to_string(), VideoAnnotation { video_id: "v1".into(), ..gt1.clone() });
        anns.insert("v2".to_string(), VideoAnnotation { video_id: "v2".into(), ..gt1.clone() });
        // v1 perfect, v2 missing entirely
        predictions.insert(
            "v1".to_string(),
            PredictionSet {
                video_id: "v1".into(),
                events: vec![caption(0.0, 10.0, "a man runs", Some(1.0))],
            },
        );
        let (corpus, flags) =
            evaluate_offline(&predictions, &anns, &DEFAULT_IOU_THRESHOLDS, &[ScorerKind::RougeL]).unwrap();
        assert_eq!(corpus.recall, vec![50.0; 4]);
        assert_eq!(corpus.precision, vec![50.0; 4]);
        assert!(flags.iter().any(|f| f.contains("v2")));
    }

    #[test]
    fn disjoint_id_sets_are_an_error() {
        let mut anns = BTreeMap::new();
        anns.insert("v1".to_string(), ann(vec![caption(0.0, 1.0, "a", None)]));
        let mut predictions = BTreeMap::new();
        predictions.insert("other".to_string(), preds(vec![caption(0.0, 1.0, "a", Some(1.0))]));
        let err = evaluate_offline(&predictions, &anns, &DEFAULT_IOU_THRESHOLDS, &[]).unwrap_err();
        assert!(matches!(err, Error::IdMismatch(_)));
    }

    #[test]
    fn prediction_order_is_irrelevant() {
        let gt = ann(vec![caption(0.0, 10.0, "a", None), caption(20.0, 28.0, "b", None)]);
        let forward = preds(vec![
            caption(0.0, 9.0, "a", Some(0.9)),
            caption(21.0, 28.0, "b", Some(0.8)),
        ]);
        let mut reversed_events = forward.events.clone();
        reversed_events.reverse();
        let reversed = preds(reversed_events);
        let a = evaluate_offline_video(&forward, &gt, &DEFAULT_IOU_THRESHOLDS, &[ScorerKind::Bleu4]);
        let b = evaluate_offline_video(&reversed, &gt, &DEFAULT_IOU_THRESHOLDS, &[ScorerKind::Bleu4]);
        assert_eq!(a.recall, b.recall);
        assert_eq!(a.precision, b.precision);
        assert_eq!(a.captions[&ScorerKind::Bleu4].average, b.captions[&ScorerKind::Bleu4].average);
    }
}
