//! Evaluation toolkit for live (streaming) dense video captioning.
//!
//! Offline dense-captioning metrics score a finished video in one shot. A
//! live captioning system instead emits captions every Δt seconds, causally,
//! and never revises them; judging such a system needs metrics that evolve
//! with the stream. This crate provides:
//!
//! - the live-score family ([`live`]): per-segment caption quality γ, the
//!   cumulative LS, its false-positive-calibrated wLS, and the
//!   history-window variants hLS/hwLS;
//! - deterministic sentence scorers ([`text`]): BLEU4, ROUGE-L and a
//!   synonym-free METEOR variant over a shared tokenizer;
//! - the classic offline protocol ([`offline`]): localization
//!   precision/recall and matched-pair caption scores across IoU thresholds,
//!   for side-by-side comparison;
//! - annotation splitting ([`temporal`]): ground truth re-cut along the
//!   absolute Δt grid so offline metrics stop filtering out short live
//!   predictions;
//! - caption consolidation, causal replay with a segment memory, a
//!   causality/irreversibility auditor and a synthetic stream generator
//!   ([`stream`]);
//! - byte-deterministic reports and a command-line front end ([`report`],
//!   [`cli`]).
//!
//! Each major capability has a runnable example under `examples/`; the
//! `lvc-eval` binary exposes the same operations as subcommands.
//!
//! ```
//! use lvc_eval::data::{PredictionSet, SegmentGrid, TimedCaption, VideoAnnotation};
//! use lvc_eval::live::{evaluate_live, LiveScoreConfig};
//! use lvc_eval::text::ScorerKind;
//!
//! let ann = VideoAnnotation {
//!     video_id: "v_demo".into(),
//!     duration_s: 10.0,
//!     events: vec![TimedCaption {
//!         start_s: 0.0,
//!         end_s: 4.0,
//!         sentence: "a dog runs across the yard".into(),
//!         confidence: None,
//!     }],
//! };
//! let preds = PredictionSet {
//!     video_id: "v_demo".into(),
//!     events: vec![TimedCaption {
//!         start_s: 0.0,
//!         end_s: 4.0,
//!         sentence: "a dog runs across the yard".into(),
//!         confidence: Some(0.9),
//!     }],
//! };
//! let grid = SegmentGrid::from_frames(150, 30.0).unwrap(); // 5 s slots
//! let config = LiveScoreConfig::new(grid, ScorerKind::RougeL, 3).unwrap();
//! let series = evaluate_live(&preds, &ann, &config).unwrap();
//! assert_eq!(series.rows[0].gamma, 1.0);
//! ```

pub mod cli;
pub mod data;
pub mod error;
pub mod live;
pub mod offline;
pub mod report;
pub mod stream;
pub mod temporal;
pub mod text;

pub use error::{Error, Result};
