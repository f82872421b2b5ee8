//! Caption consolidation, causal stream replay with a segment memory, the
//! causality/irreversibility auditor, and a deterministic synthetic stream
//! generator for tests and benchmarks.

use crate::data::{PredictionSet, SegmentGrid, TimedCaption, VideoAnnotation};
use crate::error::{Error, Result};
use crate::temporal::{refs_for_segment, split_annotations, Interval};
use crate::text::tokenize;
use std::collections::BTreeMap;

/// What a live system output at one segment boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub segment_index: usize,
    pub emission_time_s: f64,
    pub tuples: Vec<TimedCaption>,
}

/// The causal record of a live system's outputs, ordered by segment index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmissionLog {
    pub emissions: Vec<Emission>,
}

/// Replay parameters: the segment grid and the number of recent segments a
/// live system may keep in memory as context.
#[derive(Debug, Clone, Copy)]
pub struct ReplayConfig {
    pub grid: SegmentGrid,
    pub memory: usize,
}

impl ReplayConfig {
    pub fn new(grid: SegmentGrid, memory: usize) -> Result<ReplayConfig> {
        if memory == 0 {
            return Err(Error::Config("memory must be at least 1 segment".into()));
        }
        Ok(ReplayConfig { grid, memory })
    }
}

/// Consolidate temporally overlapping predictions by frequency voting.
///
/// Predictions are grouped into connected components of the pairwise
/// overlap graph. Within a group the sentence with the highest vote count
/// wins (ties: higher best confidence, then earlier earliest start, then
/// lexicographic sentence); the output tuple spans the hull of the winning
/// sentence's predictions and carries their best confidence. Predictions
/// overlapping nothing pass through unchanged.
pub fn consolidate(preds: &[TimedCaption]) -> Vec<TimedCaption> {
    if preds.is_empty() {
        return Vec::new();
    }
    // connected components via union-find
    let mut parent: Vec<usize> = (0..preds.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..preds.len() {
        for j in i + 1..preds.len() {
            if preds[i].interval().overlaps(&preds[j].interval()) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..preds.len() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }

    let mut out = Vec::new();
    for members in groups.values() {
        if members.len() == 1 {
            out.push(preds[members[0]].clone());
            continue;
        }
        // tally votes on the tokenizer-normalized sentence form
        let mut classes: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for &i in members {
            classes
                .entry(tokenize(&preds[i].sentence).normalized())
                .or_default()
                .push(i);
        }
        let class_stats: Vec<(&String, usize, f64, f64)> = classes
            .iter()
            .map(|(key, idxs)| {
                let best_conf = idxs
                    .iter()
                    .map(|&i| preds[i].confidence_or_default())
                    .fold(f64::NEG_INFINITY, f64::max);
                let earliest = idxs
                    .iter()
                    .map(|&i| preds[i].start_s)
                    .fold(f64::INFINITY, f64::min);
                (key, idxs.len(), best_conf, earliest)
            })
            .collect();
        let (winner_key, _, winner_conf, _) = class_stats
            .iter()
            .max_by(|a, b| {
                a.1.cmp(&b.1)
                    .then(a.2.total_cmp(&b.2))
                    .then(b.3.total_cmp(&a.3)) // earlier start wins
                    .then(b.0.cmp(a.0)) // lexicographically smaller wins
            })
            .expect("group is non-empty");
        let winners = &classes[*winner_key];
        let start = winners.iter().map(|&i| preds[i].start_s).fold(f64::INFINITY, f64::min);
        let end = winners.iter().map(|&i| preds[i].end_s).fold(f64::NEG_INFINITY, f64::max);
        // representative raw sentence: best confidence, then earliest, then text
        let rep = winners
            .iter()
            .copied()
            .max_by(|&a, &b| {
                preds[a]
                    .confidence_or_default()
                    .total_cmp(&preds[b].confidence_or_default())
                    .then(preds[b].start_s.total_cmp(&preds[a].start_s))
                    .then(preds[b].sentence.cmp(&preds[a].sentence))
            })
            .expect("winning class is non-empty");
        out.push(TimedCaption {
            start_s: start,
            end_s: end,
            sentence: preds[rep].sentence.clone(),
            confidence: Some(*winner_conf),
        });
    }
    out.sort_by(|a, b| {
        a.start_s
            .total_cmp(&b.start_s)
            .then(a.end_s.total_cmp(&b.end_s))
            .then(a.sentence.cmp(&b.sentence))
    });
    out
}

/// Replay a prediction file as a causal stream.
///
/// Step n's working set holds every prediction emitted in segments
/// max(1, n-M+1)..=n; with the flag set the working set is consolidated.
/// Emitted tuples are clamped to end at or before the emission instant.
pub fn replay(preds: &PredictionSet, config: &ReplayConfig, consolidate_window: bool) -> EmissionLog {
    let mut buckets: BTreeMap<usize, Vec<TimedCaption>> = BTreeMap::new();
    for event in &preds.events {
        let n = config.grid.segment_of_end(event.end_s);
        buckets.entry(n).or_default().push(event.clone());
    }
    let last = buckets.keys().max().copied().unwrap_or(0);
    let mut emissions = Vec::with_capacity(last);
    for n in 1..=last {
        let oldest = n.saturating_sub(config.memory - 1).max(1);
        let mut working: Vec<TimedCaption> = (oldest..=n)
            .filter_map(|m| buckets.get(&m))
            .flatten()
            .cloned()
            .collect();
        if consolidate_window {
            working = consolidate(&working);
        }
        let t = config.grid.emission_time(n);
        for tuple in &mut working {
            if tuple.end_s > t {
                tuple.end_s = t;
            }
        }
        emissions.push(Emission {
            segment_index: n,
            emission_time_s: t,
            tuples: working,
        });
    }
    EmissionLog { emissions }
}

/// Kinds of contract breaches the auditor reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// An emitted tuple extends past its emission instant.
    Causality,
    /// A caption already emitted for an interval came back with different
    /// text or a different confidence.
    Irreversibility,
    /// Advisory: a segment had overlapping ground truth but nothing was
    /// emitted for it.
    Timeliness,
}

impl ViolationKind {
    pub fn name(&self) -> &'static str {
        match self {
            ViolationKind::Causality => "CAUSALITY",
            ViolationKind::Irreversibility => "IRREVERSIBILITY",
            ViolationKind::Timeliness => "TIMELINESS",
        }
    }
}

/// One detected breach, carrying the step index and the offending tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub step: usize,
    pub tuple: Option<TimedCaption>,
    pub detail: String,
    pub advisory: bool,
}

/// Tolerance when comparing times that round-tripped through the 6-decimal
/// wire format.
const TIME_EPS: f64 = 5e-7;

fn micros(value: f64) -> i64 {
    (value * 1e6).round() as i64
}

/// Audit an emission log for causality and irreversibility breaches, and
/// (when ground truth is supplied) advisory timeliness gaps.
pub fn audit_causality(
    log: &EmissionLog,
    grid: &SegmentGrid,
    ground_truth: Option<&VideoAnnotation>,
) -> Result<Vec<Violation>> {
    let mut violations = Vec::new();
    let mut prev_index = 0usize;
    // identity of a caption = its emitted interval at 6-decimal resolution
    let mut first_seen: BTreeMap<(i64, i64), (usize, String, i64)> = BTreeMap::new();
    for emission in &log.emissions {
        let n = emission.segment_index;
        if n <= prev_index {
            return Err(Error::UnsortedLog(format!(
                "segment index {n} follows {prev_index}"
            )));
        }
        prev_index = n;
        let expected_t = grid.emission_time(n);
        if (emission.emission_time_s - expected_t).abs() > TIME_EPS {
            return Err(Error::UnsortedLog(format!(
                "emission time {:.6} at step {n} does not match the grid instant {:.6}",
                emission.emission_time_s, expected_t
            )));
        }
        for tuple in &emission.tuples {
            if tuple.end_s > expected_t + TIME_EPS {
                violations.push(Violation {
                    kind: ViolationKind::Causality,
                    step: n,
                    tuple: Some(tuple.clone()),
                    detail: format!(
                        "tuple ends at {:.6}s, after the emission instant {:.6}s",
                        tuple.end_s, expected_t
                    ),
                    advisory: false,
                });
            }
            let key = (micros(tuple.start_s), micros(tuple.end_s));
            let conf = micros(tuple.confidence_or_default());
            match first_seen.get(&key) {
                None => {
                    first_seen.insert(key, (n, tuple.sentence.clone(), conf));
                }
                Some((first_step, sentence, first_conf)) if *first_step < n => {
                    if *sentence != tuple.sentence {
                        violations.push(Violation {
                            kind: ViolationKind::Irreversibility,
                            step: n,
                            tuple: Some(tuple.clone()),
                            detail: format!(
                                "caption for [{:.3}, {:.3}] first emitted at step {first_step} as '{sentence}' was revised",
                                tuple.start_s, tuple.end_s
                            ),
                            advisory: false,
                        });
                    } else if *first_conf != conf {
                        violations.push(Violation {
                            kind: ViolationKind::Irreversibility,
                            step: n,
                            tuple: Some(tuple.clone()),
                            detail: format!(
                                "confidence for [{:.3}, {:.3}] '{}' changed after step {first_step}",
                                tuple.start_s, tuple.end_s, tuple.sentence
                            ),
                            advisory: false,
                        });
                    }
                }
                Some(_) => {} // duplicates within one step are not revisions
            }
        }
    }
    if let Some(gt) = ground_truth {
        let k = grid.segment_count(gt.duration_s);
        let by_index: BTreeMap<usize, &Emission> =
            log.emissions.iter().map(|e| (e.segment_index, e)).collect();
        for n in 1..=k {
            if refs_for_segment(gt, grid, n).is_empty() {
                continue;
            }
            let silent = by_index.get(&n).is_none_or(|e| e.tuples.is_empty());
            if silent {
                violations.push(Violation {
                    kind: ViolationKind::Timeliness,
                    step: n,
                    tuple: None,
                    detail: "segment has annotated events but nothing was emitted".to_string(),
                    advisory: true,
                });
            }
        }
    }
    Ok(violations)
}

// ---------------------------------------------------------------------------
// Synthetic streams
// ---------------------------------------------------------------------------

/// SplitMix64: tiny, seedable and stable across platforms, which keeps
/// generated fixtures byte-identical between runs and toolchains.
struct SplitMix64(u64);

impl SplitMix64 {
    fn new(seed: u64) -> SplitMix64 {
        SplitMix64(seed)
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    fn poisson(&mut self, lambda: f64) -> usize {
        if lambda <= 0.0 {
            return 0;
        }
        let limit = (-lambda).exp();
        let mut k = 0usize;
        let mut p = 1.0;
        loop {
            p *= self.next_f64();
            if p <= limit {
                return k;
            }
            k += 1;
        }
    }
}

fn stable_hash(text: &str) -> u64 {
    // FNV-1a, for mixing video ids into the seed
    let mut hash = 0xcbf29ce484222325u64;
    for byte in text.bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Generate a synthetic causal prediction stream for an annotated video.
///
/// Every grid-aligned ground-truth chunk yields one prediction: the true
/// sentence with probability `quality`, otherwise a sentence drawn from
/// `distractor_vocab`. Additionally each segment receives Poisson(`fp_rate`)
/// distractor predictions placed on gaps not covered by any annotation.
/// Deterministic for a fixed seed.
pub fn synth_stream(
    ann: &VideoAnnotation,
    grid: &SegmentGrid,
    quality: f64,
    fp_rate: f64,
    seed: u64,
    distractor_vocab: &[String],
) -> PredictionSet {
    let mut rng = SplitMix64::new(seed ^ stable_hash(&ann.video_id));
    let fallback = "nothing notable happens".to_string();
    let pick_wrong = |rng: &mut SplitMix64| -> String {
        if distractor_vocab.is_empty() {
            fallback.clone()
        } else {
            distractor_vocab[rng.below(distractor_vocab.len())].clone()
        }
    };

    let mut events = Vec::new();
    let split = split_annotations(ann, grid);
    for (i, chunk) in split.events.iter().enumerate() {
        let truthful = rng.next_f64() < quality;
        let noise = rng.next_f64();
        let sentence = if truthful { chunk.sentence.clone() } else { pick_wrong(&mut rng) };
        let confidence = (0.25 + 0.55 * quality + 0.2 * noise).clamp(0.0, 1.0);
        // nudge starts so intervals stay distinct when chunks coincide
        let jitter = 1e-3 * (i % 7) as f64;
        let start = (chunk.start_s + jitter).min(chunk.end_s - 1e-3).max(0.0);
        events.push(TimedCaption {
            start_s: start,
            end_s: chunk.end_s,
            sentence,
            confidence: Some(confidence),
        });
    }

    if fp_rate > 0.0 {
        let k = grid.segment_count(ann.duration_s);
        for n in 1..=k {
            let count = rng.poisson(fp_rate);
            for _ in 0..count {
                let seg = grid.segment_interval(n);
                if let Some(gap) = free_gap(&seg, ann, &mut rng) {
                    let sentence = pick_wrong(&mut rng);
                    let confidence = (0.15 + 0.3 * rng.next_f64()).clamp(0.0, 1.0);
                    events.push(TimedCaption {
                        start_s: gap.start_s,
                        end_s: gap.end_s,
                        sentence,
                        confidence: Some(confidence),
                    });
                }
            }
        }
    }

    events.sort_by(|a, b| {
        a.end_s
            .total_cmp(&b.end_s)
            .then(a.start_s.total_cmp(&b.start_s))
            .then(a.sentence.cmp(&b.sentence))
    });
    PredictionSet {
        video_id: ann.video_id.clone(),
        events,
    }
}

/// Pick a sub-interval of `seg` that overlaps no annotated event, if any
/// usable gap exists.
fn free_gap(seg: &Interval, ann: &VideoAnnotation, rng: &mut SplitMix64) -> Option<Interval> {
    const MIN_GAP: f64 = 0.05;
    let mut cuts: Vec<(f64, f64)> = ann
        .events
        .iter()
        .filter(|e| e.interval().overlaps(seg))
        .map(|e| (e.start_s.max(seg.start_s), e.end_s.min(seg.end_s)))
        .collect();
    cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut gaps: Vec<(f64, f64)> = Vec::new();
    let mut cursor = seg.start_s;
    for (start, end) in cuts {
        if start - cursor >= MIN_GAP {
            gaps.push((cursor, start));
        }
        cursor = cursor.max(end);
    }
    if seg.end_s - cursor >= MIN_GAP {
        gaps.push((cursor, seg.end_s));
    }
    if gaps.is_empty() {
        return None;
    }
    let (g0, g1) = gaps[rng.below(gaps.len())];
    let width = g1 - g0;
    let start = g0 + 0.2 * width * rng.next_f64();
    let end = g1 - 0.2 * width * rng.next_f64();
    if end - start < MIN_GAP / 2.0 {
        return None;
    }
    Some(Interval::new(start, end))
}

/// Synthesize a prediction stream per video; each video draws its wrong
/// sentences from the other videos' vocabulary.
pub fn synth_corpus(
    anns: &BTreeMap<String, VideoAnnotation>,
    grid: &SegmentGrid,
    quality: f64,
    fp_rate: f64,
    seed: u64,
) -> BTreeMap<String, PredictionSet> {
    let mut out = BTreeMap::new();
    for (id, ann) in anns {
        let vocab: Vec<String> = anns
            .iter()
            .filter(|(other, _)| *other != id)
            .flat_map(|(_, a)| a.events.iter().map(|e| e.sentence.clone()))
            .collect();
        out.insert(id.clone(), synth_stream(ann, grid, quality, fp_rate, seed, &vocab));
    }
    out
}

// ---------------------------------------------------------------------------
// Wire formats
// ---------------------------------------------------------------------------

/// Serialize an emission log as line-delimited JSON, one emission per line.
pub fn emission_log_to_jsonl(log: &EmissionLog) -> String {
    use crate::report::fmt6;
    let mut out = String::new();
    for emission in &log.emissions {
        out.push_str(&format!(
            "{{\"n\":{},\"t\":{}",
            emission.segment_index,
            fmt6(emission.emission_time_s)
        ));
        out.push_str(",\"tuples\":[");
        for (i, tuple) in emission.tuples.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "{{\"s\":{},\"e\":{},\"sentence\":{},\"score\":{}}}",
                fmt6(tuple.start_s),
                fmt6(tuple.end_s),
                serde_json::to_string(&tuple.sentence).expect("string to json"),
                fmt6(tuple.confidence_or_default())
            ));
        }
        out.push_str("]}\n");
    }
    out
}

#[derive(serde::Deserialize)]
struct RawEmission {
    n: usize,
    t: f64,
    tuples: Vec<RawTuple>,
}

#[derive(serde::Deserialize)]
struct RawTuple {
    s: f64,
    e: f64,
    sentence: String,
    score: f64,
}

/// Parse a line-delimited emission log.
pub fn parse_emission_log(bytes: &[u8]) -> Result<EmissionLog> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::parse("emission log", e.to_string()))?;
    let mut emissions = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawEmission = serde_json::from_str(line)
            .map_err(|e| Error::parse(format!("emission log line {}", lineno + 1), e.to_string()))?;
        emissions.push(Emission {
            segment_index: raw.n,
            emission_time_s: raw.t,
            tuples: raw
                .tuples
                .into_iter()
                .map(|t| TimedCaption {
                    start_s: t.s,
                    end_s: t.e,
                    sentence: t.sentence,
                    confidence: Some(t.score),
                })
                .collect(),
        });
    }
    Ok(EmissionLog { emissions })
}
