//! Sentence-level BLEU4.

use super::TokenSeq;
use std::collections::HashMap;

/// Smoothing constant added to numerator and denominator of every n-gram
/// precision, so the identity case stays at 1 and zero overlap stays at ~0.
const EPSILON: f64 = 1e-9;

const MAX_N: usize = 4;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts: HashMap<&[String], usize> = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Modified n-gram precision: candidate counts clipped at the maximum count
/// of the same n-gram across all references.
fn precision(candidate: &[String], references: &[TokenSeq], n: usize) -> f64 {
    if candidate.len() < n {
        // vacuous level for short candidates: epsilon / epsilon
        return 1.0;
    }
    let cand = ngram_counts(candidate, n);
    let refs: Vec<_> = references.iter().map(|r| ngram_counts(r.tokens(), n)).collect();
    let total: usize = cand.values().sum();
    let mut clipped = 0usize;
    for (gram, &count) in &cand {
        let max_ref = refs.iter().map(|rc| rc.get(gram).copied().unwrap_or(0)).max().unwrap_or(0);
        clipped += count.min(max_ref);
    }
    (clipped as f64 + EPSILON) / (total as f64 + EPSILON)
}

/// Reference length closest to the candidate length, ties to the shorter.
fn closest_reference_len(candidate_len: usize, references: &[TokenSeq]) -> usize {
    let mut best = references[0].len();
    for r in references {
        let len = r.len();
        let d = len.abs_diff(candidate_len);
        let best_d = best.abs_diff(candidate_len);
        if d < best_d || (d == best_d && len < best) {
            best = len;
        }
    }
    best
}

/// Smoothed sentence BLEU4: geometric mean of the four clipped precisions
/// times the brevity penalty min(1, e^(1 - r/c)). An empty candidate scores 0.
pub fn bleu4(candidate: &TokenSeq, references: &[TokenSeq]) -> f64 {
    assert!(!references.is_empty(), "bleu4 requires at least one reference");
    let c = candidate.len();
    if c == 0 {
        return 0.0;
    }
    let log_sum: f64 = (1..=MAX_N)
        .map(|n| precision(candidate.tokens(), references, n).ln())
        .sum();
    let geo_mean = (log_sum / MAX_N as f64).exp();
    let r = closest_reference_len(c, references);
    let bp = if c >= r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    (bp * geo_mean).min(1.0)
}
