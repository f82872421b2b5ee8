//! Offline evaluation of the same prediction file: localization
//! precision/recall and caption scores across IoU thresholds.
//!
//! Short live predictions rarely reach the higher IoU thresholds against
//! full-length annotations; compare with the `eval_live` and
//! `split_annotations` examples.
//!
//! ```bash
//! cargo run -p lvc-eval --example eval_offline
//! ```

use lvc_eval::data::{parse_ground_truth, parse_predictions};
use lvc_eval::offline::{evaluate_offline, DEFAULT_IOU_THRESHOLDS};
use lvc_eval::text::ScorerKind;

fn main() -> lvc_eval::Result<()> {
    let (annotations, _) = parse_ground_truth(include_bytes!("data/ground_truth.json"))?;
    let (predictions, _) = parse_predictions(include_bytes!("data/predictions.json"))?;

    let (report, flags) =
        evaluate_offline(&predictions, &annotations, &DEFAULT_IOU_THRESHOLDS, &ScorerKind::ALL)?;
    for flag in &flags {
        eprintln!("note: {flag}");
    }

    println!("IoU thresholds:    {:?}", report.thresholds);
    println!(
        "recall    (%):     {:?}  avg {:.2}",
        report.recall.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>(),
        report.recall_avg
    );
    println!(
        "precision (%):     {:?}  avg {:.2}",
        report.precision.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>(),
        report.precision_avg
    );
    for (kind, cap) in &report.captions {
        println!("caption {kind:<12} avg {:.2}%", cap.average);
    }
    Ok(())
}
