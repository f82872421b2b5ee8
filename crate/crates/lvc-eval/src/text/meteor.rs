//! METEOR-lite: two-stage unigram alignment (exact, then Porter stems) with
//! the METEOR 1.0 parameters, and no synonym or paraphrase resources.

use super::{porter, TokenSeq};

const ALPHA: f64 = 0.9;
const PENALTY_WEIGHT: f64 = 0.5;
const PENALTY_EXPONENT: f64 = 3.0;

/// One matched unigram: (candidate position, reference position).
type Pair = (usize, usize);

/// Leftmost-first greedy alignment. Stage 1 pairs exactly equal tokens.
/// Stage 2 pairs leftover tokens by stemmed form, preferring the reference
/// position that continues the previous match so chunk count stays minimal.
fn align(candidate: &[String], reference: &[String]) -> Vec<Pair> {
    let mut cand_used = vec![false; candidate.len()];
    let mut ref_used = vec![false; reference.len()];
    // matched reference position per candidate position
    let mut matched: Vec<Option<usize>> = vec![None; candidate.len()];

    for (i, token) in candidate.iter().enumerate() {
        let hit = (0..reference.len()).find(|&j| !ref_used[j] && reference[j] == *token);
        if let Some(j) = hit {
            cand_used[i] = true;
            ref_used[j] = true;
            matched[i] = Some(j);
        }
    }

    let cand_stems: Vec<String> = candidate.iter().map(|t| porter::stem(t)).collect();
    let ref_stems: Vec<String> = reference.iter().map(|t| porter::stem(t)).collect();
    for i in 0..candidate.len() {
        if cand_used[i] {
            continue;
        }
        let options: Vec<usize> = (0..reference.len())
            .filter(|&j| !ref_used[j] && ref_stems[j] == cand_stems[i])
            .collect();
        if options.is_empty() {
            continue;
        }
        // continue the chunk of the previous candidate token when possible
        let preferred = if i > 0 {
            matched[i - 1].map(|prev| prev + 1)
        } else {
            None
        };
        let j = match preferred {
            Some(next) if options.contains(&next) => next,
            _ => options[0],
        };
        ref_used[j] = true;
        matched[i] = Some(j);
    }

    matched
        .into_iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| (i, j)))
        .collect()
}

/// Number of chunks: maximal runs of pairs contiguous in both sentences.
fn chunk_count(pairs: &[Pair]) -> usize {
    let mut chunks = 0;
    let mut prev: Option<Pair> = None;
    for &(i, j) in pairs {
        match prev {
            Some((pi, pj)) if i == pi + 1 && j == pj + 1 => {}
            _ => chunks += 1,
        }
        prev = Some((i, j));
    }
    chunks
}

fn single_reference(candidate: &[String], reference: &[String]) -> f64 {
    if candidate.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let pairs = align(candidate, reference);
    let m = pairs.len() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let p = m / candidate.len() as f64;
    let r = m / reference.len() as f64;
    let f_mean = p * r / (ALPHA * p + (1.0 - ALPHA) * r);
    let frag = chunk_count(&pairs) as f64 / m;
    let penalty = PENALTY_WEIGHT * frag.powf(PENALTY_EXPONENT);
    f_mean * (1.0 - penalty)
}

/// Best METEOR-lite score over the references.
pub fn meteor_lite(candidate: &TokenSeq, references: &[TokenSeq]) -> f64 {
    assert!(!references.is_empty(), "meteor_lite requires at least one reference");
    references
        .iter()
        .map(|r| single_reference(candidate.tokens(), r.tokens()))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::TokenSeq;

    fn seq(words: &[&str]) -> TokenSeq {
        TokenSeq::from_words(words)
    }

    #[test]
    fn identical_four_token_sentences() {
        // m = 4, one chunk: 1 - 0.5 * (1/4)^3
        let s = seq(&["a", "man", "runs", "fast"]);
        assert!((meteor_lite(&s, &[s.clone()]) - 0.9921875).abs() < 1e-12);
    }

    #[test]
    fn stem_matches_count_as_matches() {
        // dogs/dog and run/runs align in stage 2: m = 2, one chunk
        let c = seq(&["dogs", "run"]);
        let r = seq(&["dog", "runs"]);
        assert!((meteor_lite(&c, &[r]) - 0.9375).abs() < 1e-12);
    }

    #[test]
    fn no_shared_tokens_or_stems() {
        let c = seq(&["cat", "sleeps"]);
        let r = seq(&["bird", "flying"]);
        assert_eq!(meteor_lite(&c, &[r]), 0.0);
    }

    #[test]
    fn fully_scrambled_match_pays_full_penalty() {
        // four matches, four chunks: F = 1, penalty = 0.5
        let c = seq(&["a", "b", "c", "d"]);
        let r = seq(&["b", "a", "d", "c"]);
        assert!((meteor_lite(&c, &[r]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn precision_recall_imbalance() {
        // m = 2, P = 1, R = 0.5: F = 10/19, penalty = 1/16
        let c = seq(&["a", "b"]);
        let r = seq(&["a", "b", "c", "d"]);
        let expected = 75.0 / 152.0;
        assert!((meteor_lite(&c, &[r]) - expected).abs() < 1e-12);
    }

    #[test]
    fn empty_candidate_scores_zero() {
        let c = seq(&[] as &[&str]);
        let r = seq(&["a"]);
        assert_eq!(meteor_lite(&c, &[r]), 0.0);
    }
}
