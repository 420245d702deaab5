//! Synthetic runs with known outcomes.
//!
//! A [`RunScript`] names the action durations, injected faults and noise
//! level; [`generate_run`] renders both camera views, ball data and the
//! expected result.

mod body;
mod grids;
mod motion;
mod world;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balltrack::{BallSource, BallTrack, GridMapping};
use crate::geometry::Point;
use crate::segmenter::{ActionId, ActionPhase};
use crate::trajectory::{Keypoint, PoseFrame, RunBundle, Trajectory, View, NUM_KEYPOINTS};

pub use body::{Arm, Foot, Local, Pose};
pub use grids::generate_ball_grids;
pub use world::{canonical_layouts, project, zone_rect, W3};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid script: {0}")]
    InvalidScript(String),
    #[error("ball path leaves the grid at frame {frame} ({x:.2}, {y:.2})")]
    PathOutOfBounds { frame: usize, x: f64, y: f64 },
}

/// A fault makes exactly the criterion with the same number fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Fault {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    F9,
    F10,
    F11,
    F12,
    F13,
    F14,
}

impl Fault {
    pub const ALL: [Fault; 14] = [
        Fault::F1,
        Fault::F2,
        Fault::F3,
        Fault::F4,
        Fault::F5,
        Fault::F6,
        Fault::F7,
        Fault::F8,
        Fault::F9,
        Fault::F10,
        Fault::F11,
        Fault::F12,
        Fault::F13,
        Fault::F14,
    ];

    pub fn criterion(self) -> u8 {
        Self::ALL.iter().position(|&f| f == self).expect("listed") as u8 + 1
    }

    pub fn for_criterion(id: u8) -> Option<Fault> {
        Self::ALL.get((id as usize).checked_sub(1)?).copied()
    }
}

pub const DEFAULT_DURATIONS: [f64; 7] = [1.8, 2.3, 1.2, 1.3, 2.2, 3.3, 1.4];
pub const GRID_CELLS: usize = 64;
pub const GRID_CELL_PX: f64 = 30.0;
pub const GRID_BLOB_SIGMA: f64 = 1.5;

fn default_durations() -> [f64; 7] {
    DEFAULT_DURATIONS
}

fn default_fps() -> f64 {
    30.0
}

fn default_offset() -> i64 {
    12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunScript {
    pub seed: u64,
    /// Seconds from each action's start to the next one's (the last ends at
    /// kick contact).
    #[serde(default = "default_durations")]
    pub action_durations: [f64; 7],
    #[serde(default)]
    pub fault_set: Vec<Fault>,
    /// Pixel standard deviation of keypoint noise.
    #[serde(default)]
    pub noise: f64,
    #[serde(default = "default_fps")]
    pub fps: f64,
    /// Render ball intensity grids instead of precomputed tracks.
    #[serde(default)]
    pub ball_grids: bool,
    #[serde(default = "default_offset")]
    pub rear_frame_offset: i64,
}

impl RunScript {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            action_durations: DEFAULT_DURATIONS,
            fault_set: Vec::new(),
            noise: 0.0,
            fps: 30.0,
            ball_grids: false,
            rear_frame_offset: default_offset(),
        }
    }

    pub fn with_faults(mut self, faults: &[Fault]) -> Self {
        self.fault_set = faults.to_vec();
        self
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidScript(m));
        if !(self.fps.is_finite() && self.fps >= 10.0 && self.fps <= 240.0) {
            return bad(format!("fps {} outside [10, 240]", self.fps));
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return bad(format!(
                "noise {} must be a non-negative number",
                self.noise
            ));
        }
        if let Some(d) = self
            .action_durations
            .iter()
            .find(|d| !(d.is_finite() && **d > 0.0))
        {
            return bad(format!("action duration {d} must be positive"));
        }
        for (i, f) in self.fault_set.iter().enumerate() {
            if self.fault_set[..i].contains(f) {
                return bad(format!("fault {f:?} listed twice"));
            }
        }
        if self.rear_frame_offset < 0 {
            return bad(format!(
                "rear frame offset {} is negative",
                self.rear_frame_offset
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub expected_failed_criteria: Vec<u8>,
    pub phases: Vec<ActionPhase>,
    pub run_start_frame: i64,
    pub run_end_frame: i64,
    pub completion_frames: i64,
    pub completion_seconds: f64,
}

/// Frames per action from cumulative rounded boundaries.
fn budgets(durations: &[f64; 7], fps: f64) -> [usize; 7] {
    let mut out = [0usize; 7];
    let mut cum = 0.0;
    let mut prev = 0i64;
    for (k, d) in durations.iter().enumerate() {
        cum += d;
        let edge = (cum * fps).round() as i64;
        out[k] = (edge - prev).max(0) as usize;
        prev = edge;
    }
    out
}

const FRONT_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
const REAR_SALT: u64 = 0xc2b2_ae3d_27d4_eb4f;
const GRID_SALT: u64 = 0x1656_67b1_9e37_79f9;

fn view_rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

fn to_frame(
    index: i64,
    pts: &[Point; NUM_KEYPOINTS],
    sigma: f64,
    rng: &mut ChaCha8Rng,
) -> PoseFrame {
    let keypoints = std::array::from_fn(|i| {
        let nx: f64 = rng.sample(StandardNormal);
        let ny: f64 = rng.sample(StandardNormal);
        Keypoint {
            x: pts[i].x + sigma * nx,
            y: pts[i].y + sigma * ny,
            visibility: Some(1.0),
        }
    });
    PoseFrame {
        frame_index: index,
        keypoints,
    }
}

fn ankle_mid(pts: &[Point; NUM_KEYPOINTS]) -> Point {
    pts[27].midpoint(pts[28])
}

/// Zone phases of the noise-free motion, on the front clock.
fn truth_phases(
    front: &[Point],
    rear: &[Option<Point>],
    start: usize,
    contact: usize,
) -> Vec<ActionPhase> {
    const D_MIN: usize = 3;
    let flags: Vec<Vec<bool>> = ActionId::all()
        .map(|a| {
            let z = zone_rect(a.get());
            (0..front.len())
                .map(|g| match a.view() {
                    View::Front => world::in_rect(front[g], z),
                    View::Rear => rear[g].is_some_and(|p| world::in_rect(p, z)),
                })
                .collect()
        })
        .collect();
    let mut opens = Vec::new();
    let mut cursor = start;
    for (k, f) in flags.iter().enumerate() {
        let mut run = 0;
        let open = (cursor..f.len()).find(|&g| {
            run = if f[g] { run + 1 } else { 0 };
            run >= D_MIN
        });
        if let Some(g) = open {
            let open = g + 1 - D_MIN;
            opens.push((k, open));
            cursor = open;
        }
    }
    let mut out = Vec::new();
    for (i, &(k, open)) in opens.iter().enumerate() {
        let until = opens.get(i + 1).map_or(contact + 1, |&(_, n)| n);
        let mut end = (open..until).rev().find(|&g| flags[k][g]).unwrap_or(open);
        let action = ActionId::new(k as u8 + 1).expect("valid id");
        if k == 6 {
            end = contact;
        }
        out.push((action, open, end));
    }
    out.into_iter()
        .map(|(action, s, e)| out_phase(action, s as i64, e as i64))
        .collect()
}

fn out_phase(action: ActionId, s: i64, e: i64) -> ActionPhase {
    ActionPhase {
        action,
        view: action.view(),
        start_frame: s,
        end_frame: e,
    }
}

fn ball_source(
    samples: BTreeMap<i64, Option<Point>>,
    grids: bool,
    seed: u64,
    salt: u64,
) -> Result<BallSource, SynthError> {
    if !grids {
        return Ok(BallSource::Precomputed(BallTrack { samples }));
    }
    let first = samples.keys().next().copied().unwrap_or(0);
    let path: Vec<Option<Point>> = samples
        .values()
        .map(|p| p.map(|p| p * (1.0 / GRID_CELL_PX)))
        .collect();
    let mut rng = view_rng(seed, GRID_SALT ^ salt);
    let grids = generate_ball_grids(&path, GRID_CELLS, GRID_CELLS, GRID_BLOB_SIGMA, &mut rng)?;
    Ok(BallSource::Grids {
        grids,
        first_frame: first,
        mapping: GridMapping {
            origin: Point::new(0.0, 0.0),
            cell_px: GRID_CELL_PX,
        },
    })
}

/// Renders a run and its expected outcome.
pub fn generate_run(script: &RunScript) -> Result<(RunBundle, GroundTruth), SynthError> {
    script.validate()?;
    let mut faults = script.fault_set.clone();
    faults.sort();
    let has = |f: Fault| faults.contains(&f);
    let fps = script.fps;
    let tl = motion::build(fps, budgets(&script.action_durations, fps), &faults)?;
    let n = tl.poses.len();
    let offset = script.rear_frame_offset as usize;
    if offset >= tl.run_start {
        return Err(SynthError::InvalidScript(format!(
            "rear frame offset {offset} must be below the run start frame {}",
            tl.run_start
        )));
    }

    let mut front_rng = view_rng(script.seed, FRONT_SALT);
    let mut rear_rng = view_rng(script.seed, REAR_SALT);
    let mut front_frames = Vec::with_capacity(n);
    let mut rear_frames = Vec::with_capacity(n - offset);
    let mut front_ref = Vec::with_capacity(n);
    let mut rear_ref = Vec::with_capacity(n);
    for (g, pose) in tl.poses.iter().enumerate() {
        let mut k = pose.keypoints();
        if tl.pinned_arms.as_ref().is_some_and(|r| r.contains(&g)) {
            k[15] = pose.world(body::WRIST_REST, 1.0);
            k[16] = pose.world(body::WRIST_REST, -1.0);
        }
        let mut fp = k.map(|w| project(View::Front, w));
        let rp = k.map(|w| project(View::Rear, w));
        front_ref.push(ankle_mid(&fp));
        let crossed = (has(Fault::F3) && tl.slide_out.contains(&g))
            || (has(Fault::F4) && tl.slide_back.contains(&g));
        if crossed {
            let (a, b) = (fp[27].x, fp[28].x);
            fp[27].x = b;
            fp[28].x = a;
        }
        front_frames.push(to_frame(g as i64, &fp, script.noise, &mut front_rng));
        if g >= offset {
            rear_ref.push(Some(ankle_mid(&rp)));
            rear_frames.push(to_frame(
                (g - offset) as i64,
                &rp,
                script.noise,
                &mut rear_rng,
            ));
        } else {
            rear_ref.push(None);
        }
    }

    let front_ball: BTreeMap<i64, Option<Point>> =
        (0..n).map(|g| (g as i64, tl.ball_front[g])).collect();
    let rear_ball: BTreeMap<i64, Option<Point>> = (offset..n)
        .map(|g| ((g - offset) as i64, tl.ball_rear[g]))
        .collect();

    let (front_layout, rear_layout) = canonical_layouts();
    let bundle = RunBundle {
        front: Trajectory {
            view: View::Front,
            fps,
            frames: front_frames,
        },
        rear: Trajectory {
            view: View::Rear,
            fps,
            frames: rear_frames,
        },
        rear_frame_offset: script.rear_frame_offset,
        front_layout,
        rear_layout,
        ball_front: ball_source(front_ball, script.ball_grids, script.seed, FRONT_SALT)?,
        ball_rear: ball_source(rear_ball, script.ball_grids, script.seed, REAR_SALT)?,
    };

    let phases = truth_phases(&front_ref, &rear_ref, tl.run_start, tl.contact)
        .into_iter()
        .map(|p| match p.view {
            View::Front => p,
            View::Rear => ActionPhase {
                start_frame: p.start_frame - script.rear_frame_offset,
                end_frame: p.end_frame - script.rear_frame_offset,
                ..p
            },
        })
        .collect();
    let completion_frames = (tl.contact - tl.run_start) as i64;
    let truth = GroundTruth {
        expected_failed_criteria: faults.iter().map(|f| f.criterion()).collect(),
        phases,
        run_start_frame: tl.run_start as i64,
        run_end_frame: tl.contact as i64,
        completion_frames,
        completion_seconds: completion_frames as f64 / fps,
    };
    Ok((bundle, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budgets_sum_to_rounded_total() {
        let b = budgets(&DEFAULT_DURATIONS, 30.0);
        assert_eq!(b.iter().sum::<usize>(), 405);
        let b = budgets(&[1.01; 7], 30.0);
        assert_eq!(b.iter().sum::<usize>(), (7.07f64 * 30.0).round() as usize);
    }

    #[test]
    fn fault_numbers() {
        for (i, f) in Fault::ALL.iter().enumerate() {
            assert_eq!(f.criterion() as usize, i + 1);
            assert_eq!(Fault::for_criterion(i as u8 + 1), Some(*f));
        }
        assert_eq!(Fault::for_criterion(0), None);
        assert_eq!(serde_json::to_string(&Fault::F13).unwrap(), "\"F13\"");
    }

    #[test]
    fn clean_run_timing() {
        let (bundle, truth) = generate_run(&RunScript::new(1)).unwrap();
        assert_eq!(truth.completion_frames, 405);
        assert!(truth.expected_failed_criteria.is_empty());
        assert_eq!(truth.phases.len(), 7);
        bundle.check().unwrap();
    }

    #[test]
    fn same_seed_same_run() {
        let s = RunScript::new(5).with_noise(2.0);
        assert_eq!(generate_run(&s).unwrap().0, generate_run(&s).unwrap().0);
        let other = RunScript::new(6).with_noise(2.0);
        assert_ne!(
            generate_run(&s).unwrap().0.front,
            generate_run(&other).unwrap().0.front
        );
    }

    #[test]
    fn rejects_bad_scripts() {
        let mut s = RunScript::new(1);
        s.action_durations[2] = 0.2;
        assert!(matches!(
            generate_run(&s),
            Err(SynthError::InvalidScript(_))
        ));
        let mut s = RunScript::new(1);
        s.fps = 0.0;
        assert!(generate_run(&s).is_err());
        let s = RunScript::new(1).with_faults(&[Fault::F2, Fault::F2]);
        assert!(matches!(
            generate_run(&s),
            Err(SynthError::InvalidScript(_))
        ));
        let s: RunScript = serde_json::from_str(r#"{"seed":1}"#).unwrap();
        assert_eq!(s, RunScript::new(1));
        let s: Result<RunScript, _> =
            serde_json::from_str(r#"{"seed":1,"action_durations":[1,1,1,1,1,1,1],"bogus":1}"#);
        assert!(s.is_err());
    }
}
