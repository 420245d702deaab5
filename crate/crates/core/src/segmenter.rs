//! Splits a run into the seven course actions using per-view zones and the
//! fixed action order, and finds the timing triggers of the run.
//!
//! Frames of both views are compared on a common clock: front frame numbers,
//! with rear frame `r` mapped to `r + rear_frame_offset`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balltrack::{extract_ball_track, BallError, BallTrack};
use crate::config::ScoringConfig;
use crate::course::CourseLayout;
use crate::geometry::{point_in_polygon, Containment, Point};
use crate::trajectory::{KeypointId, PoseFrame, RunBundle, Trajectory, View};

/// One of the seven course actions, numbered in course order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct ActionId(u8);

impl ActionId {
    pub fn new(v: u8) -> Option<Self> {
        (1..=7).contains(&v).then_some(Self(v))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = ActionId> {
        (1..=7).map(ActionId)
    }

    /// Camera that records this action.
    pub fn view(self) -> View {
        match self.0 {
            4 | 7 => View::Rear,
            _ => View::Front,
        }
    }
}

impl TryFrom<u8> for ActionId {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        ActionId::new(v).ok_or_else(|| format!("action id {v} outside 1..7"))
    }
}

impl From<ActionId> for u8 {
    fn from(a: ActionId) -> u8 {
        a.0
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionPhase {
    pub action: ActionId,
    pub view: View,
    /// Inclusive bounds in the numbering of `view`.
    pub start_frame: i64,
    pub end_frame: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentationResult {
    pub phases: Vec<ActionPhase>,
    pub run_start_frame: i64,
    /// Kick contact on the front clock.
    pub run_end_frame: i64,
}

impl SegmentationResult {
    pub fn phase(&self, action: ActionId) -> Option<&ActionPhase> {
        self.phases.iter().find(|p| p.action == action)
    }
}

/// Run length in front-view frames.
pub fn completed_frames(seg: &SegmentationResult) -> i64 {
    seg.run_end_frame - seg.run_start_frame
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SegmentError {
    #[error("action {0} zone never dwelt in")]
    MissingPhase(u8),
    #[error("zone {0} entered before zone {prev}", prev = .0 - 1)]
    OutOfOrder(u8),
    #[error("no kick launch found in the rear ball track")]
    NoKickDetected,
    #[error(transparent)]
    Ball(#[from] BallError),
}

/// Everything the segmenter reads from a run.
#[derive(Debug, Clone, Copy)]
pub struct SegmentInput<'a> {
    pub front: &'a Trajectory,
    pub rear: &'a Trajectory,
    pub rear_frame_offset: i64,
    pub front_layout: &'a CourseLayout,
    pub rear_layout: &'a CourseLayout,
    pub rear_ball: &'a BallTrack,
}

/// Best-effort segmentation: missing phases are left out and every problem
/// is reported alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSegmentation {
    pub phases: Vec<ActionPhase>,
    pub run_start_frame: i64,
    pub run_end_frame: Option<i64>,
    /// Kick contact in rear frames.
    pub kick_contact_rear: Option<i64>,
    pub errors: Vec<SegmentError>,
}

impl PartialSegmentation {
    pub fn phase(&self, action: ActionId) -> Option<&ActionPhase> {
        self.phases.iter().find(|p| p.action == action)
    }

    pub fn into_result(self) -> Result<SegmentationResult, SegmentError> {
        if let Some(e) = self.errors.into_iter().next() {
            return Err(e);
        }
        let run_end_frame = self.run_end_frame.ok_or(SegmentError::NoKickDetected)?;
        Ok(SegmentationResult {
            phases: self.phases,
            run_start_frame: self.run_start_frame,
            run_end_frame,
        })
    }
}

/// Ankle midpoint, the person's ground reference.
pub fn reference_point(f: &PoseFrame) -> Point {
    f.kp(KeypointId::LEFT_ANKLE)
        .midpoint(f.kp(KeypointId::RIGHT_ANKLE))
}

fn inside(poly: &[Point], p: Point) -> bool {
    matches!(
        point_in_polygon(p, poly),
        Ok(Containment::Inside | Containment::OnBoundary)
    )
}

struct ViewTrack<'a> {
    traj: &'a Trajectory,
    layout: &'a CourseLayout,
    /// Added to the view's frame numbers to get the common clock.
    offset: i64,
}

impl ViewTrack<'_> {
    fn in_zone_flags(&self, action: ActionId) -> Vec<bool> {
        let zone = self.layout.zone(action);
        self.traj
            .frames
            .iter()
            .map(|f| zone.is_some_and(|z| inside(z, reference_point(f))))
            .collect()
    }

    /// First common-clock frame `>= from` that starts `d_min` consecutive
    /// in-zone samples.
    fn first_dwell(&self, flags: &[bool], from: i64, d_min: usize) -> Option<i64> {
        let frames = &self.traj.frames;
        let lo = frames.partition_point(|f| f.frame_index + self.offset < from);
        let mut run = 0usize;
        for i in lo..frames.len() {
            if flags[i] {
                run += 1;
                if run >= d_min.max(1) {
                    return Some(frames[i + 1 - run].frame_index + self.offset);
                }
            } else {
                run = 0;
            }
        }
        None
    }

    /// Last in-zone view frame with common-clock index in `[from, until)`.
    fn last_in_zone(&self, flags: &[bool], from: i64, until: i64) -> Option<i64> {
        self.traj
            .frames
            .iter()
            .zip(flags)
            .rev()
            .find(|(f, &inz)| {
                let g = f.frame_index + self.offset;
                inz && g >= from && g < until
            })
            .map(|(f, _)| f.frame_index)
    }
}

fn find_run_start(front: &Trajectory, layout: &CourseLayout) -> i64 {
    let flags: Vec<bool> = front
        .frames
        .iter()
        .map(|f| inside(&layout.start_region, reference_point(f)))
        .collect();
    let first = front.first_frame().unwrap_or(0);
    let Some(entered) = flags.iter().position(|&b| b) else {
        return first;
    };
    flags[entered..]
        .iter()
        .position(|&b| !b)
        .map(|k| front.frames[entered + k].frame_index)
        .unwrap_or(first)
}

/// Kick contact: the last rest sample before the first launch of a ball
/// resting in the action-7 zone, searched from rear frame `from`.
pub fn find_kick_contact(
    ball: &BallTrack,
    rear_layout: &CourseLayout,
    from: i64,
    v_launch: f64,
    v_rest: f64,
) -> Option<i64> {
    let zone = rear_layout.zone(ActionId(7))?;
    let obs: Vec<(i64, Point)> = ball.observed_in(from, i64::MAX).collect();
    for i in 0..obs.len().saturating_sub(1) {
        let (f0, p0) = obs[i];
        let (f1, p1) = obs[i + 1];
        let speed = p0.dist(p1) / (f1 - f0) as f64;
        if speed < v_launch || !inside(zone, p0) {
            continue;
        }
        let rested = if i > 0 && obs[i - 1].0 == f0 - 1 {
            obs[i - 1].1.dist(p0) <= v_rest
        } else {
            // nothing seen just before: a differencing tracker cannot see a
            // resting ball
            ball.get(f0 - 1).is_none()
        };
        if rested {
            return Some(f0);
        }
    }
    None
}

pub fn segment_partial(input: &SegmentInput<'_>, cfg: &ScoringConfig) -> PartialSegmentation {
    let front = ViewTrack {
        traj: input.front,
        layout: input.front_layout,
        offset: 0,
    };
    let rear = ViewTrack {
        traj: input.rear,
        layout: input.rear_layout,
        offset: input.rear_frame_offset,
    };
    let track = |a: ActionId| match a.view() {
        View::Front => &front,
        View::Rear => &rear,
    };
    let flags: Vec<Vec<bool>> = ActionId::all().map(|a| track(a).in_zone_flags(a)).collect();
    let d_min = cfg.segment.d_min;

    let run_start = find_run_start(input.front, input.front_layout);
    let mut errors = Vec::new();
    let mut opens: Vec<(ActionId, i64)> = Vec::new();
    let mut cursor = run_start;
    for a in ActionId::all() {
        let k = a.get() as usize - 1;
        let Some(open) = track(a).first_dwell(&flags[k], cursor, d_min) else {
            errors.push(SegmentError::MissingPhase(a.get()));
            continue;
        };
        if let Some(next) = ActionId::new(a.get() + 1) {
            if let Some(early) = track(next).first_dwell(&flags[k + 1], cursor, d_min) {
                if early < open {
                    errors.push(SegmentError::OutOfOrder(next.get()));
                }
            }
        }
        opens.push((a, open));
        cursor = open;
    }

    // kick contact closes the run
    let shank = input.rear.median_shank_length();
    let kick_from = opens
        .iter()
        .find(|(a, _)| a.get() == 7)
        .map(|&(_, g)| g)
        .unwrap_or(cursor)
        - input.rear_frame_offset;
    let kick_contact_rear = shank.and_then(|s| {
        find_kick_contact(
            input.rear_ball,
            input.rear_layout,
            kick_from,
            cfg.segment.kick_launch_speed * s,
            cfg.segment.ball_rest_speed * s,
        )
    });
    let run_end = kick_contact_rear.map(|r| r + input.rear_frame_offset);
    if run_end.is_none() {
        errors.push(SegmentError::NoKickDetected);
    }

    let mut phases = Vec::with_capacity(opens.len());
    for (i, &(a, open)) in opens.iter().enumerate() {
        let t = track(a);
        let k = a.get() as usize - 1;
        let until = match opens.get(i + 1) {
            Some(&(_, next)) => next,
            None => run_end.map_or(i64::MAX, |e| e + 1),
        };
        let start = open - t.offset;
        let mut end = t.last_in_zone(&flags[k], open, until).unwrap_or(start);
        if a.get() == 7 {
            if let Some(c) = kick_contact_rear {
                end = c.max(start);
            }
        }
        phases.push(ActionPhase {
            action: a,
            view: a.view(),
            start_frame: start,
            end_frame: end.max(start),
        });
    }

    PartialSegmentation {
        phases,
        run_start_frame: run_start,
        run_end_frame: run_end,
        kick_contact_rear,
        errors,
    }
}

/// Strict segmentation of a bundle whose trajectories are already cleaned.
pub fn segment(
    bundle: &RunBundle,
    cfg: &ScoringConfig,
) -> Result<SegmentationResult, SegmentError> {
    let rear_ball = extract_ball_track(&bundle.ball_rear, &cfg.ball)?;
    let input = SegmentInput {
        front: &bundle.front,
        rear: &bundle.rear,
        rear_frame_offset: bundle.rear_frame_offset,
        front_layout: &bundle.front_layout,
        rear_layout: &bundle.rear_layout,
        rear_ball: &rear_ball,
    };
    segment_partial(&input, cfg).into_result()
}

#[derive(Serialize)]
struct PhaseDump {
    action: u8,
    view: View,
    start: i64,
    end: i64,
}

/// Debug listing of phase bounds.
pub fn phases_json(phases: &[ActionPhase]) -> String {
    let dump: Vec<PhaseDump> = phases
        .iter()
        .map(|p| PhaseDump {
            action: p.action.get(),
            view: p.view,
            start: p.start_frame,
            end: p.end_frame,
        })
        .collect();
    serde_json::to_string(&dump).expect("phases serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_ids() {
        assert!(ActionId::new(0).is_none());
        assert!(ActionId::new(8).is_none());
        assert_eq!(ActionId::new(4).unwrap().view(), View::Rear);
        assert_eq!(ActionId::new(5).unwrap().view(), View::Front);
        assert_eq!(ActionId::all().count(), 7);
    }

    #[test]
    fn completed_frame_arithmetic() {
        let mut seg = SegmentationResult {
            phases: vec![],
            run_start_frame: 10,
            run_end_frame: 430,
        };
        assert_eq!(completed_frames(&seg), 420);
        seg.run_end_frame = 10;
        assert_eq!(completed_frames(&seg), 0);
    }

    #[test]
    fn error_messages() {
        assert_eq!(
            SegmentError::OutOfOrder(5).to_string(),
            "zone 5 entered before zone 4"
        );
        assert_eq!(
            SegmentError::MissingPhase(1).to_string(),
            "action 1 zone never dwelt in"
        );
    }
}
