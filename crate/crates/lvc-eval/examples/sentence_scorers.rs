//! The three sentence scorers on a few candidate/reference pairs.
//!
//! ```bash
//! cargo run -p lvc-eval --example sentence_scorers
//! ```

use lvc_eval::text::{score, tokenize, ScorerKind};

fn main() {
    let pairs = [
        ("a man paddles a kayak down a calm river", "a man paddles a kayak down a calm river"),
        ("a man paddles a kayak", "a man paddles a kayak down a calm river"),
        ("a person rows on the water", "a man paddles a kayak down a calm river"),
        ("dogs run", "dog runs"),
        ("a cat sleeps on the couch", "a man paddles a kayak down a calm river"),
    ];

    println!("{:<44} {:>8} {:>8} {:>12}", "candidate vs reference", "bleu4", "rouge-l", "meteor-lite");
    for (candidate_text, reference_text) in pairs {
        let candidate = tokenize(candidate_text);
        let references = vec![tokenize(reference_text)];
        print!("{candidate_text:<44}");
        for kind in [ScorerKind::Bleu4, ScorerKind::RougeL, ScorerKind::MeteorLite] {
            let value = score(kind, &candidate, &references);
            print!(" {value:>8.4}");
        }
        println!();
    }

    // multi-reference calls take the best reference per scorer
    let candidate = tokenize("she stirs vegetables in a pan");
    let references = vec![
        tokenize("a woman chops vegetables on a wooden board"),
        tokenize("she stirs the vegetables in a large pan"),
    ];
    println!(
        "\nmulti-reference rouge-l: {:.4}",
        score(ScorerKind::RougeL, &candidate, &references)
    );
}
