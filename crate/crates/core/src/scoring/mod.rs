//! Skill criteria, time score and report assembly.

mod actions;
mod cohort;
mod time;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balltrack::{extract_ball_track, BallError, BallTrack};
use crate::config::ScoringConfig;
use crate::geometry::GeometryError;
use crate::segmenter::{segment_partial, ActionId, PartialSegmentation, SegmentInput};
use crate::trajectory::{clean_trajectory, BundleError, RunBundle, View};

pub use actions::{
    score_action1, score_action2, score_action3, score_action4, score_action5, score_action6,
    score_action7,
};
pub use cohort::{aggregate_cohort, CohortEntry, CohortReport, GroupSummary};
pub use time::{time_score_from_frames, time_score_from_seconds, BAND_EDGES};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ScoreError {
    #[error("negative completion time {0}")]
    NegativeTime(f64),
    #[error("non-positive fps {0}")]
    NonPositiveFps(f64),
    #[error("phase for action {found} passed to the action {expected} scorer")]
    PhaseMismatch { expected: u8, found: u8 },
    #[error("no direction reversal in the slide")]
    NoReversalFound,
    #[error("no ball observations in the action {0} phase")]
    NoBallObservations(u8),
    #[error("rect target missing from the layout")]
    MissingRect,
    #[error("{0} missing from the layout")]
    MissingLandmark(String),
    #[error("no kick launch found")]
    NoKickDetected,
    #[error("no pose for frame {0}")]
    MissingFrame(i64),
    #[error("cannot measure shank length in the {} view", .0.as_str())]
    NoBodyScale(View),
    #[error("empty cohort")]
    EmptyCohort,
    #[error("invalid bundle: {0}")]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Criterion ids grouped by action.
pub const CRITERIA_BY_ACTION: [&[u8]; 7] = [
    &[1, 2],
    &[3, 4, 5],
    &[6],
    &[7, 8],
    &[9, 10],
    &[11, 12],
    &[13, 14],
];

/// Action a criterion belongs to.
pub fn action_of(criterion: u8) -> Option<ActionId> {
    CRITERIA_BY_ACTION
        .iter()
        .position(|ids| ids.contains(&criterion))
        .and_then(|i| ActionId::new(i as u8 + 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    #[serde(rename = "id")]
    pub criterion_id: u8,
    pub passed: bool,
    pub evidence: String,
}

impl CriterionResult {
    pub fn new(criterion_id: u8, passed: bool, evidence: impl Into<String>) -> Self {
        Self {
            criterion_id,
            passed,
            evidence: evidence.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub criteria: Vec<CriterionResult>,
    pub skill_score: u8,
    /// Absent when the run has no detectable end.
    pub completion_frames: Option<i64>,
    pub fps: f64,
    pub time_score: u8,
    pub total: u8,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

impl ScoreReport {
    pub fn failed(&self) -> Vec<u8> {
        self.criteria
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.criterion_id)
            .collect()
    }

    /// Points per action (number of passed criteria of that action).
    pub fn action_scores(&self) -> [u8; 7] {
        let mut out = [0u8; 7];
        for c in self.criteria.iter().filter(|c| c.passed) {
            if let Some(a) = action_of(c.criterion_id) {
                out[a.get() as usize - 1] += 1;
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A fully scored run together with the segmentation behind it.
#[derive(Debug, Clone)]
pub struct ScoredRun {
    pub report: ScoreReport,
    pub segmentation: PartialSegmentation,
}

fn failed_action(action: ActionId, why: &str) -> Vec<CriterionResult> {
    CRITERIA_BY_ACTION[action.get() as usize - 1]
        .iter()
        .map(|&id| CriterionResult::new(id, false, why))
        .collect()
}

/// Cleans, segments and scores one run.
pub fn score_run(bundle: &RunBundle, cfg: &ScoringConfig) -> Result<ScoreReport, ScoreError> {
    score_run_detailed(bundle, cfg).map(|r| r.report)
}

pub fn score_run_detailed(
    bundle: &RunBundle,
    cfg: &ScoringConfig,
) -> Result<ScoredRun, ScoreError> {
    bundle.check()?;
    let front = clean_trajectory(&bundle.front, &cfg.cleaning);
    let rear = clean_trajectory(&bundle.rear, &cfg.cleaning);
    let ball_front = extract_ball_track(&bundle.ball_front, &cfg.ball)?;
    let ball_rear = extract_ball_track(&bundle.ball_rear, &cfg.ball)?;

    let seg = segment_partial(
        &SegmentInput {
            front: &front,
            rear: &rear,
            rear_frame_offset: bundle.rear_frame_offset,
            front_layout: &bundle.front_layout,
            rear_layout: &bundle.rear_layout,
            rear_ball: &ball_rear,
        },
        cfg,
    );

    let mut criteria = Vec::with_capacity(14);
    for action in ActionId::all() {
        let Some(phase) = seg.phase(action) else {
            criteria.extend(failed_action(
                action,
                &format!("no phase for action {action}"),
            ));
            continue;
        };
        let scored = score_phase(
            action,
            phase,
            &front,
            &rear,
            &ball_front,
            &ball_rear,
            bundle,
            cfg,
        );
        match scored {
            Ok(v) => criteria.extend(v),
            Err(e) => criteria.extend(failed_action(action, &e.to_string())),
        }
    }

    let skill_score = criteria.iter().filter(|c| c.passed).count() as u8;
    let fps = bundle.fps();
    let completion_frames = seg.run_end_frame.map(|end| end - seg.run_start_frame);
    let mut errors: Vec<String> = seg.errors.iter().map(|e| e.to_string()).collect();
    let time_score = match completion_frames {
        Some(f) => match time_score_from_frames(f, fps) {
            Ok(t) => t,
            Err(e) => {
                errors.push(e.to_string());
                1
            }
        },
        None => 1,
    };
    Ok(ScoredRun {
        report: ScoreReport {
            criteria,
            skill_score,
            completion_frames,
            fps,
            time_score,
            total: skill_score + time_score,
            errors,
        },
        segmentation: seg,
    })
}

#[allow(clippy::too_many_arguments)]
fn score_phase(
    action: ActionId,
    phase: &crate::segmenter::ActionPhase,
    front: &crate::trajectory::Trajectory,
    rear: &crate::trajectory::Trajectory,
    ball_front: &BallTrack,
    ball_rear: &BallTrack,
    bundle: &RunBundle,
    cfg: &ScoringConfig,
) -> Result<Vec<CriterionResult>, ScoreError> {
    let (fl, rl) = (&bundle.front_layout, &bundle.rear_layout);
    Ok(match action.get() {
        1 => score_action1(phase, front, fl, cfg)?.to_vec(),
        2 => score_action2(phase, front, fl, cfg)?.to_vec(),
        3 => score_action3(phase, front, ball_front, cfg)?.to_vec(),
        4 => score_action4(phase, rear, rl, ball_rear, cfg)?.to_vec(),
        5 => score_action5(phase, front, cfg)?.to_vec(),
        6 => score_action6(phase, front, fl, cfg)?.to_vec(),
        _ => score_action7(phase, rear, rl, ball_rear, cfg)?.to_vec(),
    })
}
