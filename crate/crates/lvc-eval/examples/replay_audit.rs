//! Replay a prediction file as a causal stream with a segment memory, audit
//! the emission log, then corrupt the log and audit again.
//!
//! ```bash
//! cargo run -p lvc-eval --example replay_audit
//! ```

use lvc_eval::data::{parse_ground_truth, parse_predictions, SegmentGrid};
use lvc_eval::stream::{audit_causality, replay, ReplayConfig};

fn main() -> lvc_eval::Result<()> {
    let (annotations, _) = parse_ground_truth(include_bytes!("data/ground_truth.json"))?;
    let (predictions, _) = parse_predictions(include_bytes!("data/predictions.json"))?;
    let grid = SegmentGrid::from_frames(120, 30.0)?;
    let config = ReplayConfig::new(grid, 3)?; // keep three segments in memory

    let preds = &predictions["v_kayak"];
    let log = replay(preds, &config, true);
    println!("replayed v_kayak with memory 3 + consolidation:");
    for emission in &log.emissions {
        println!("  t'={:>5.1}s: {} caption(s)", emission.emission_time_s, emission.tuples.len());
        for t in &emission.tuples {
            println!("      [{:>4.1}, {:>4.1}] {}", t.start_s, t.end_s, t.sentence);
        }
    }

    let gt = &annotations["v_kayak"];
    let violations = audit_causality(&log, &grid, Some(gt))?;
    println!("\naudit of the replayed log: {} finding(s)", violations.len());
    for v in &violations {
        println!("  {}{} at step {}: {}", v.kind.name(), if v.advisory { " (advisory)" } else { "" }, v.step, v.detail);
    }

    // break causality on purpose: push one tuple past its emission instant
    let mut corrupted = log.clone();
    corrupted.emissions[2].tuples[0].end_s = corrupted.emissions[2].emission_time_s + 1.0;
    let violations = audit_causality(&corrupted, &grid, None)?;
    println!("\naudit of the corrupted log: {} finding(s)", violations.len());
    for v in &violations {
        println!("  {} at step {}: {}", v.kind.name(), v.step, v.detail);
    }
    Ok(())
}
