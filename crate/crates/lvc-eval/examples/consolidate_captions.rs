//! Frequency-voting consolidation of temporally overlapping caption
//! predictions, as a live model would apply to the queries of one segment.
//!
//! ```bash
//! cargo run -p lvc-eval --example consolidate_captions
//! ```

use lvc_eval::data::TimedCaption;
use lvc_eval::stream::consolidate;

fn caption(start: f64, end: f64, sentence: &str, confidence: f64) -> TimedCaption {
    TimedCaption {
        start_s: start,
        end_s: end,
        sentence: sentence.to_string(),
        confidence: Some(confidence),
    }
}

fn main() {
    // ten event queries for one four-second window
    let queries = vec![
        caption(0.2, 3.8, "a man paddles a kayak", 0.82),
        caption(0.4, 4.0, "a man paddles a kayak", 0.77),
        caption(0.1, 3.5, "A man paddles a kayak.", 0.71),
        caption(0.6, 3.9, "a person rows on the water", 0.88),
        caption(1.0, 3.2, "a person rows on the water", 0.64),
        caption(0.3, 3.6, "waves splash on rocks", 0.41),
        // a disjoint prediction passes through untouched
        caption(6.0, 7.5, "a bird lands on the water", 0.59),
    ];

    println!("raw query outputs:");
    for q in &queries {
        println!("  [{:.1}, {:.1}] ({:.2}) {}", q.start_s, q.end_s, q.confidence.unwrap(), q.sentence);
    }

    let merged = consolidate(&queries);
    println!("\nconsolidated captions:");
    for c in &merged {
        println!("  [{:.1}, {:.1}] ({:.2}) {}", c.start_s, c.end_s, c.confidence.unwrap(), c.sentence);
    }
}
