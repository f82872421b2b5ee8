//! Live-score evaluation of a prediction stream: the per-segment series and
//! the cumulative LS / wLS / hLS / hwLS values.
//!
//! ```bash
//! cargo run -p lvc-eval --example eval_live
//! ```

use lvc_eval::data::{parse_ground_truth, parse_predictions, SegmentGrid};
use lvc_eval::live::{evaluate_live, LiveScoreConfig};
use lvc_eval::text::ScorerKind;

fn main() -> lvc_eval::Result<()> {
    let (annotations, _) = parse_ground_truth(include_bytes!("data/ground_truth.json"))?;
    let (predictions, _) = parse_predictions(include_bytes!("data/predictions.json"))?;

    // 120 frames at 30 fps = 4-second evaluation slots
    let grid = SegmentGrid::from_frames(120, 30.0)?;
    let config = LiveScoreConfig::new(grid, ScorerKind::RougeL, 3)?;

    for (video_id, ann) in &annotations {
        let preds = &predictions[video_id];
        let series = evaluate_live(preds, ann, &config)?;
        println!("== {video_id} (duration {:.1}s, {} slots)", ann.duration_s, series.rows.len());
        println!("{:>3} {:>7} {:>7} {:>3} {:>7} {:>7} {:>7} {:>7}", "n", "t'", "gamma", "fp", "ls", "wls", "hls", "hwls");
        for row in &series.rows {
            println!(
                "{:>3} {:>7.1} {:>7.4} {:>3} {:>7.4} {:>7.4} {:>7.4} {:>7.4}",
                row.segment_index, row.t_prime_s, row.gamma, row.fp_count, row.ls, row.wls, row.hls, row.hwls
            );
        }
        let s = &series.summary;
        println!(
            "   means (percent): ls {:.2}  wls {:.2}  hls {:.2}  hwls {:.2}\n",
            100.0 * s.ls,
            100.0 * s.wls,
            100.0 * s.hls,
            100.0 * s.hwls
        );
    }
    Ok(())
}
