//! ROUGE-L: longest-common-subsequence F-measure.

use super::TokenSeq;

/// Recall weight of the F-measure, the value used by the standard captioning
/// evaluation toolkits.
const BETA: f64 = 1.2;

/// LCS length via the usual two-row dynamic program.
fn lcs_len(a: &[String], b: &[String]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Best LCS F-measure over the references; 0 when either side is empty.
pub fn rouge_l(candidate: &TokenSeq, references: &[TokenSeq]) -> f64 {
    assert!(!references.is_empty(), "rouge_l requires at least one reference");
    let mut best = 0.0f64;
    for reference in references {
        if candidate.is_empty() || reference.is_empty() {
            continue;
        }
        let l = lcs_len(candidate.tokens(), reference.tokens()) as f64;
        if l == 0.0 {
            continue;
        }
        let p = l / candidate.len() as f64;
        let r = l / reference.len() as f64;
        let f = (1.0 + BETA * BETA) * p * r / (r + BETA * BETA * p);
        best = best.max(f);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::TokenSeq;

    fn seq(words: &[&str]) -> TokenSeq {
        TokenSeq::from_words(words)
    }

    #[test]
    fn identical_sequences_score_one() {
        let s = seq(&["a", "b", "c"]);
        assert_eq!(rouge_l(&s, &[s.clone()]), 1.0);
    }

    #[test]
    fn swapped_middle_pair() {
        // LCS = 3 of 4, P = R = 0.75, and F equals P when P = R
        let c = seq(&["a", "b", "c", "d"]);
        let r = seq(&["a", "c", "b", "d"]);
        assert!((rouge_l(&c, &[r]) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn disjoint_vocabularies_score_zero() {
        let c = seq(&["a", "b"]);
        let r = seq(&["x", "y"]);
        assert_eq!(rouge_l(&c, &[r]), 0.0);
    }

    #[test]
    fn empty_candidate_scores_zero() {
        let c = seq(&[] as &[&str]);
        let r = seq(&["a"]);
        assert_eq!(rouge_l(&c, &[r]), 0.0);
    }

    #[test]
    fn max_over_references() {
        let c = seq(&["a", "b", "c"]);
        let weak = seq(&["a", "x", "y"]);
        let strong = seq(&["a", "b", "c"]);
        assert_eq!(rouge_l(&c, &[weak, strong]), 1.0);
    }
}
