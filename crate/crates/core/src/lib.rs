//! Scoring engine for the CAMSA agility course from two-camera pose
//! trajectories.

pub mod balltrack;
pub mod bundle;
pub mod config;
pub mod course;
pub mod geometry;
pub mod scoring;
pub mod segmenter;
pub mod synth;
pub mod trajectory;

pub use config::ScoringConfig;
pub use scoring::{score_run, score_run_detailed, CriterionResult, ScoreError, ScoreReport};
pub use segmenter::{segment, ActionId, ActionPhase, SegmentError, SegmentationResult};
pub use trajectory::{RunBundle, Trajectory, View};
