//! Pose trajectory data model, the canonical trajectory file format and
//! keypoint cleaning.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balltrack::BallSource;
use crate::course::CourseLayout;
use crate::geometry::{median, Point};

/// Number of keypoints in every pose frame.
pub const NUM_KEYPOINTS: usize = 33;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("malformed trajectory file: {0}")]
    MalformedFile(String),
    #[error("frame {frame}: expected 33 keypoints, found {found}")]
    WrongKeypointCount { frame: i64, found: usize },
    #[error("fps must be positive, got {0}")]
    NonPositiveFps(f64),
    #[error("frame index {next} does not follow {prev}")]
    NonMonotonicFrames { prev: i64, next: i64 },
}

/// Index of a keypoint in the 33-point body topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeypointId(u8);

impl KeypointId {
    pub const NOSE: Self = Self(0);
    pub const LEFT_SHOULDER: Self = Self(11);
    pub const RIGHT_SHOULDER: Self = Self(12);
    pub const LEFT_ELBOW: Self = Self(13);
    pub const RIGHT_ELBOW: Self = Self(14);
    pub const LEFT_WRIST: Self = Self(15);
    pub const RIGHT_WRIST: Self = Self(16);
    pub const LEFT_INDEX: Self = Self(19);
    pub const RIGHT_INDEX: Self = Self(20);
    pub const LEFT_HIP: Self = Self(23);
    pub const RIGHT_HIP: Self = Self(24);
    pub const LEFT_KNEE: Self = Self(25);
    pub const RIGHT_KNEE: Self = Self(26);
    pub const LEFT_ANKLE: Self = Self(27);
    pub const RIGHT_ANKLE: Self = Self(28);
    pub const LEFT_HEEL: Self = Self(29);
    pub const RIGHT_HEEL: Self = Self(30);
    pub const LEFT_FOOT_INDEX: Self = Self(31);
    pub const RIGHT_FOOT_INDEX: Self = Self(32);

    pub fn new(index: usize) -> Option<Self> {
        (index < NUM_KEYPOINTS).then_some(Self(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = KeypointId> {
        (0..NUM_KEYPOINTS as u8).map(KeypointId)
    }
}

/// A single detected landmark in image pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub x: f64,
    pub y: f64,
    /// Detector confidence in [0, 1]; absent means fully visible.
    pub visibility: Option<f64>,
}

impl Keypoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self {
            x,
            y,
            visibility: None,
        }
    }

    pub fn pos(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn vis(&self) -> f64 {
        self.visibility.unwrap_or(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoseFrame {
    pub frame_index: i64,
    pub keypoints: [Keypoint; NUM_KEYPOINTS],
}

impl PoseFrame {
    pub fn kp(&self, id: KeypointId) -> Point {
        self.keypoints[id.index()].pos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum View {
    Front,
    Rear,
}

impl View {
    pub fn as_str(self) -> &'static str {
        match self {
            View::Front => "front",
            View::Rear => "rear",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub view: View,
    pub fps: f64,
    pub frames: Vec<PoseFrame>,
}

impl Trajectory {
    /// Position of the frame with `frame_index`, if recorded.
    pub fn position_of(&self, frame_index: i64) -> Option<usize> {
        self.frames
            .binary_search_by_key(&frame_index, |f| f.frame_index)
            .ok()
    }

    pub fn frame(&self, frame_index: i64) -> Option<&PoseFrame> {
        self.position_of(frame_index).map(|i| &self.frames[i])
    }

    /// Frames whose index lies in `[start, end]`.
    pub fn frames_in(&self, start: i64, end: i64) -> &[PoseFrame] {
        let lo = self.frames.partition_point(|f| f.frame_index < start);
        let hi = self.frames.partition_point(|f| f.frame_index <= end);
        &self.frames[lo..hi.max(lo)]
    }

    pub fn first_frame(&self) -> Option<i64> {
        self.frames.first().map(|f| f.frame_index)
    }

    pub fn last_frame(&self) -> Option<i64> {
        self.frames.last().map(|f| f.frame_index)
    }

    /// Median knee-to-ankle distance over both legs and all frames.
    pub fn median_shank_length(&self) -> Option<f64> {
        let mut v: Vec<f64> = self
            .frames
            .iter()
            .flat_map(|f| {
                [
                    f.kp(KeypointId::LEFT_KNEE)
                        .dist(f.kp(KeypointId::LEFT_ANKLE)),
                    f.kp(KeypointId::RIGHT_KNEE)
                        .dist(f.kp(KeypointId::RIGHT_ANKLE)),
                ]
            })
            .filter(|d| d.is_finite() && *d > 0.0)
            .collect();
        median(&mut v)
    }

    /// Multiplies every coordinate by `k`.
    pub fn scaled(&self, k: f64) -> Trajectory {
        let mut t = self.clone();
        for f in &mut t.frames {
            for kp in &mut f.keypoints {
                kp.x *= k;
                kp.y *= k;
            }
        }
        t
    }

    fn check(&self) -> Result<(), TrajectoryError> {
        if !(self.fps > 0.0) || !self.fps.is_finite() {
            return Err(TrajectoryError::NonPositiveFps(self.fps));
        }
        for w in self.frames.windows(2) {
            if w[1].frame_index <= w[0].frame_index {
                return Err(TrajectoryError::NonMonotonicFrames {
                    prev: w[0].frame_index,
                    next: w[1].frame_index,
                });
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrajectory {
    view: View,
    fps: f64,
    frames: Vec<RawFrame>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    i: i64,
    kp: Vec<Vec<f64>>,
}

/// Parses the canonical JSON trajectory format.
pub fn parse_trajectory(bytes: &[u8]) -> Result<Trajectory, TrajectoryError> {
    let raw: RawTrajectory =
        serde_json::from_slice(bytes).map_err(|e| TrajectoryError::MalformedFile(e.to_string()))?;
    if !(raw.fps > 0.0) {
        return Err(TrajectoryError::NonPositiveFps(raw.fps));
    }
    if raw.frames.is_empty() {
        return Err(TrajectoryError::MalformedFile("no frames".into()));
    }
    let mut frames = Vec::with_capacity(raw.frames.len());
    for rf in raw.frames {
        if rf.kp.len() != NUM_KEYPOINTS {
            return Err(TrajectoryError::WrongKeypointCount {
                frame: rf.i,
                found: rf.kp.len(),
            });
        }
        let mut kps = [Keypoint::new(0.0, 0.0); NUM_KEYPOINTS];
        for (slot, v) in kps.iter_mut().zip(&rf.kp) {
            let (x, y, vis) = match v.as_slice() {
                [x, y] => (*x, *y, None),
                [x, y, vis] => (*x, *y, Some(*vis)),
                _ => {
                    return Err(TrajectoryError::MalformedFile(format!(
                        "frame {}: keypoint needs 2 or 3 numbers",
                        rf.i
                    )))
                }
            };
            if !x.is_finite() || !y.is_finite() {
                return Err(TrajectoryError::MalformedFile(format!(
                    "frame {}: non-finite coordinate",
                    rf.i
                )));
            }
            if let Some(v) = vis {
                if !(0.0..=1.0).contains(&v) {
                    return Err(TrajectoryError::MalformedFile(format!(
                        "frame {}: visibility {v} outside [0,1]",
                        rf.i
                    )));
                }
            }
            *slot = Keypoint {
                x,
                y,
                visibility: vis,
            };
        }
        frames.push(PoseFrame {
            frame_index: rf.i,
            keypoints: kps,
        });
    }
    let t = Trajectory {
        view: raw.view,
        fps: raw.fps,
        frames,
    };
    t.check()?;
    Ok(t)
}

/// Formats `v` rounded to six significant digits in its shortest form.
pub fn fmt_sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return "0".into();
    }
    let rounded: f64 = format!("{v:.5e}").parse().unwrap_or(v);
    let s = format!("{rounded}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Serializes a trajectory in the canonical field order.
pub fn write_trajectory(t: &Trajectory) -> String {
    let mut out = String::with_capacity(t.frames.len() * NUM_KEYPOINTS * 24);
    let _ = write!(
        out,
        "{{\"view\":\"{}\",\"fps\":{},\"frames\":[",
        t.view.as_str(),
        fmt_sig6(t.fps)
    );
    for (fi, f) in t.frames.iter().enumerate() {
        if fi > 0 {
            out.push(',');
        }
        let _ = write!(out, "{{\"i\":{},\"kp\":[", f.frame_index);
        for (ki, kp) in f.keypoints.iter().enumerate() {
            if ki > 0 {
                out.push(',');
            }
            let _ = write!(out, "[{},{}", fmt_sig6(kp.x), fmt_sig6(kp.y));
            if let Some(v) = kp.visibility {
                let _ = write!(out, ",{}", fmt_sig6(v));
            }
            out.push(']');
        }
        out.push_str("]}");
    }
    out.push_str("]}");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CleaningConfig {
    /// Median filter window in frames (odd).
    pub window: usize,
    /// Outlier threshold as a fraction of the image diagonal.
    pub v_max_fraction: f64,
    /// Keypoints below this visibility are treated as missing.
    pub visibility_floor: f64,
    /// Image diagonal in pixels; estimated from the keypoint extent when absent.
    pub image_diagonal: Option<f64>,
}

impl Default for CleaningConfig {
    fn default() -> Self {
        Self {
            window: 5,
            v_max_fraction: 0.15,
            visibility_floor: 0.3,
            image_diagonal: None,
        }
    }
}

const MAX_MEDIAN_PASSES: usize = 200;

/// Median filter with replicated end samples.
fn median_pass(series: &[f64], window: usize) -> Vec<f64> {
    let half = (window / 2) as isize;
    let n = series.len() as isize;
    let mut buf = Vec::with_capacity(window);
    (0..n)
        .map(|i| {
            buf.clear();
            for j in (i - half)..=(i + half) {
                buf.push(series[j.clamp(0, n - 1) as usize]);
            }
            median(&mut buf).unwrap_or(series[i as usize])
        })
        .collect()
}

/// Repeats the median filter until the series is a fixed point of it.
fn median_root(series: &[f64], window: usize) -> Vec<f64> {
    let mut cur = series.to_vec();
    for _ in 0..MAX_MEDIAN_PASSES {
        let next = median_pass(&cur, window);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Median over the non-missing samples of a window with replicated end
/// samples, matching [`median_pass`] on fully visible tracks.
fn masked_median(series: &[f64], missing: &[bool], window: usize) -> Vec<f64> {
    let half = (window / 2) as isize;
    let n = series.len() as isize;
    let mut buf = Vec::with_capacity(window);
    (0..n)
        .map(|i| {
            buf.clear();
            for j in (i - half)..=(i + half) {
                let j = j.clamp(0, n - 1) as usize;
                if !missing[j] {
                    buf.push(series[j]);
                }
            }
            median(&mut buf).unwrap_or(f64::NAN)
        })
        .collect()
}

fn estimate_diagonal(t: &Trajectory, cfg: &CleaningConfig) -> f64 {
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for id in KeypointId::all() {
        let missing: Vec<bool> = t
            .frames
            .iter()
            .map(|f| f.keypoints[id.index()].vis() < cfg.visibility_floor)
            .collect();
        let xs: Vec<f64> = t.frames.iter().map(|f| f.keypoints[id.index()].x).collect();
        let ys: Vec<f64> = t.frames.iter().map(|f| f.keypoints[id.index()].y).collect();
        for (x, y) in masked_median(&xs, &missing, cfg.window)
            .into_iter()
            .zip(masked_median(&ys, &missing, cfg.window))
        {
            if x.is_finite() && y.is_finite() {
                min_x = min_x.min(x);
                max_x = max_x.max(x);
                min_y = min_y.min(y);
                max_y = max_y.max(y);
            }
        }
    }
    if min_x.is_finite() {
        (max_x - min_x).hypot(max_y - min_y)
    } else {
        0.0
    }
}

/// Linearly interpolates flagged samples from their nearest good neighbours
/// (by frame index); flagged runs at either end copy the nearest good value.
fn interpolate_flagged(frames: &[i64], values: &mut [f64], bad: &[bool]) {
    let good: Vec<usize> = (0..values.len()).filter(|&i| !bad[i]).collect();
    if good.is_empty() {
        return;
    }
    for i in 0..values.len() {
        if !bad[i] {
            continue;
        }
        let next = good.partition_point(|&g| g < i);
        values[i] = match (next.checked_sub(1).map(|p| good[p]), good.get(next)) {
            (Some(a), Some(&b)) => {
                let t = (frames[i] - frames[a]) as f64 / (frames[b] - frames[a]) as f64;
                values[a] + t * (values[b] - values[a])
            }
            (Some(a), None) => values[a],
            (None, Some(&b)) => values[b],
            (None, None) => values[i],
        };
    }
}

/// Removes spikes and low-confidence samples, then median-smooths every
/// keypoint track. Frame count, indices, fps and view are preserved.
///
/// A sample is an outlier when it is missing (visibility below the floor)
/// or lies farther than `v_max` from the windowed median of its track.
/// Outliers are re-filled by interpolation and the track is median-filtered
/// to a root signal, which makes the transform idempotent on visible tracks.
pub fn clean_trajectory(t: &Trajectory, cfg: &CleaningConfig) -> Trajectory {
    let mut out = t.clone();
    if t.frames.is_empty() {
        return out;
    }
    let window = cfg.window.max(1) | 1;
    let diag = cfg
        .image_diagonal
        .filter(|d| *d > 0.0)
        .unwrap_or_else(|| estimate_diagonal(t, cfg));
    let v_max = cfg.v_max_fraction * diag;
    let frame_idx: Vec<i64> = t.frames.iter().map(|f| f.frame_index).collect();

    for id in KeypointId::all() {
        let k = id.index();
        let missing: Vec<bool> = t
            .frames
            .iter()
            .map(|f| f.keypoints[k].vis() < cfg.visibility_floor)
            .collect();
        let mut xs: Vec<f64> = t.frames.iter().map(|f| f.keypoints[k].x).collect();
        let mut ys: Vec<f64> = t.frames.iter().map(|f| f.keypoints[k].y).collect();
        let mx = masked_median(&xs, &missing, window);
        let my = masked_median(&ys, &missing, window);
        let bad: Vec<bool> = (0..xs.len())
            .map(|i| {
                missing[i] || !mx[i].is_finite() || (xs[i] - mx[i]).hypot(ys[i] - my[i]) > v_max
            })
            .collect();
        interpolate_flagged(&frame_idx, &mut xs, &bad);
        interpolate_flagged(&frame_idx, &mut ys, &bad);
        let xs = median_root(&xs, window);
        let ys = median_root(&ys, window);
        for (f, (x, y)) in out.frames.iter_mut().zip(xs.into_iter().zip(ys)) {
            f.keypoints[k].x = x;
            f.keypoints[k].y = y;
        }
    }
    out
}

/// Front and rear recordings of one child's run with their course layouts
/// and ball observations.
#[derive(Debug, Clone, PartialEq)]
pub struct RunBundle {
    pub front: Trajectory,
    pub rear: Trajectory,
    /// Rear frame `i` corresponds to front frame `i + rear_frame_offset`.
    pub rear_frame_offset: i64,
    pub front_layout: CourseLayout,
    pub rear_layout: CourseLayout,
    pub ball_front: BallSource,
    pub ball_rear: BallSource,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BundleError {
    #[error("{slot} trajectory has view {found:?}")]
    WrongView { slot: &'static str, found: View },
    #[error("front fps {front} differs from rear fps {rear}")]
    FpsMismatch { front: f64, rear: f64 },
}

impl RunBundle {
    pub fn check(&self) -> Result<(), BundleError> {
        if self.front.view != View::Front {
            return Err(BundleError::WrongView {
                slot: "front",
                found: self.front.view,
            });
        }
        if self.rear.view != View::Rear {
            return Err(BundleError::WrongView {
                slot: "rear",
                found: self.rear.view,
            });
        }
        if self.front.fps != self.rear.fps {
            return Err(BundleError::FpsMismatch {
                front: self.front.fps,
                rear: self.rear.fps,
            });
        }
        Ok(())
    }

    pub fn fps(&self) -> f64 {
        self.front.fps
    }

    /// Uniformly scales every coordinate (keypoints, landmarks, ball).
    pub fn scaled(&self, k: f64) -> RunBundle {
        RunBundle {
            front: self.front.scaled(k),
            rear: self.rear.scaled(k),
            rear_frame_offset: self.rear_frame_offset,
            front_layout: self.front_layout.scaled(k),
            rear_layout: self.rear_layout.scaled(k),
            ball_front: self.ball_front.scaled(k),
            ball_rear: self.ball_rear.scaled(k),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(i: i64, f: impl Fn(usize) -> (f64, f64)) -> PoseFrame {
        let mut kps = [Keypoint::new(0.0, 0.0); NUM_KEYPOINTS];
        for (k, kp) in kps.iter_mut().enumerate() {
            let (x, y) = f(k);
            *kp = Keypoint {
                x,
                y,
                visibility: Some(0.9),
            };
        }
        PoseFrame {
            frame_index: i,
            keypoints: kps,
        }
    }

    fn smooth_track(n: usize) -> Trajectory {
        Trajectory {
            view: View::Front,
            fps: 30.0,
            frames: (0..n as i64)
                .map(|i| {
                    frame(i, |k| {
                        (
                            100.0 + 4.0 * i as f64 + 10.0 * k as f64,
                            300.0 + 2.0 * i as f64 + 5.0 * k as f64,
                        )
                    })
                })
                .collect(),
        }
    }

    #[test]
    fn two_frame_round_trip() {
        let t = Trajectory {
            view: View::Rear,
            fps: 30.0,
            frames: vec![
                frame(0, |k| (k as f64 * 1.5, 2.25)),
                frame(1, |k| (k as f64 * 1.5 + 0.125, 2.0)),
            ],
        };
        let text = write_trajectory(&t);
        let parsed = parse_trajectory(text.as_bytes()).unwrap();
        assert_eq!(parsed.frames.len(), 2);
        assert_eq!(write_trajectory(&parsed), text);
        assert_eq!(parsed, t);
    }

    #[test]
    fn optional_visibility_parses() {
        let kp: Vec<String> = (0..33).map(|k| format!("[{k},1]")).collect();
        let text = format!(
            "{{\"view\":\"front\",\"fps\":25,\"frames\":[{{\"i\":3,\"kp\":[{}]}}]}}",
            kp.join(",")
        );
        let t = parse_trajectory(text.as_bytes()).unwrap();
        assert_eq!(t.frames[0].keypoints[5].visibility, None);
        assert_eq!(t.frames[0].keypoints[5].vis(), 1.0);
        assert_eq!(write_trajectory(&t), text);
    }

    #[test]
    fn wrong_keypoint_count() {
        let kp: Vec<String> = (0..32).map(|k| format!("[{k},1,1]")).collect();
        let text = format!(
            "{{\"view\":\"front\",\"fps\":30,\"frames\":[{{\"i\":0,\"kp\":[{}]}}]}}",
            kp.join(",")
        );
        assert!(matches!(
            parse_trajectory(text.as_bytes()),
            Err(TrajectoryError::WrongKeypointCount { found: 32, .. })
        ));
    }

    #[test]
    fn zero_fps_and_bad_order() {
        let mut t = smooth_track(3);
        t.fps = 0.0;
        let text = write_trajectory(&t);
        assert!(matches!(
            parse_trajectory(text.as_bytes()),
            Err(TrajectoryError::NonPositiveFps(_))
        ));
        let mut t = smooth_track(3);
        t.frames[2].frame_index = 1;
        assert!(matches!(
            parse_trajectory(write_trajectory(&t).as_bytes()),
            Err(TrajectoryError::NonMonotonicFrames { prev: 1, next: 1 })
        ));
        assert!(matches!(
            parse_trajectory(b"{\"view\":\"front\""),
            Err(TrajectoryError::MalformedFile(_))
        ));
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(fmt_sig6(1234.56789), "1234.57");
        assert_eq!(fmt_sig6(30.0), "30");
        assert_eq!(fmt_sig6(-0.000123456789), "-0.000123457");
        assert_eq!(fmt_sig6(0.0), "0");
    }

    #[test]
    fn constant_track_unchanged() {
        let t = Trajectory {
            view: View::Front,
            fps: 30.0,
            frames: (0..20)
                .map(|i| frame(i, |k| (k as f64, 2.0 * k as f64)))
                .collect(),
        };
        assert_eq!(clean_trajectory(&t, &CleaningConfig::default()), t);
    }

    #[test]
    fn single_spike_is_repaired() {
        let clean = smooth_track(40);
        let mut spiky = clean.clone();
        spiky.frames[17].keypoints[27].x += 500.0;
        let out = clean_trajectory(&spiky, &CleaningConfig::default());
        for (a, b) in out.frames.iter().zip(&clean.frames) {
            for k in 0..NUM_KEYPOINTS {
                assert!(a.keypoints[k].pos().dist(b.keypoints[k].pos()) <= 2.0);
            }
        }
    }

    #[test]
    fn two_consecutive_spikes_are_repaired() {
        let clean = smooth_track(40);
        let mut spiky = clean.clone();
        spiky.frames[20].keypoints[15].y -= 500.0;
        spiky.frames[21].keypoints[15].y -= 480.0;
        let out = clean_trajectory(&spiky, &CleaningConfig::default());
        for (a, b) in out.frames.iter().zip(&clean.frames) {
            for k in 0..NUM_KEYPOINTS {
                assert!(a.keypoints[k].pos().dist(b.keypoints[k].pos()) <= 1.0);
            }
        }
    }

    #[test]
    fn low_visibility_samples_are_interpolated() {
        let clean = smooth_track(30);
        let mut t = clean.clone();
        t.frames[10].keypoints[0] = Keypoint {
            x: 0.0,
            y: 0.0,
            visibility: Some(0.05),
        };
        let out = clean_trajectory(&t, &CleaningConfig::default());
        assert!(
            out.frames[10]
                .kp(KeypointId::NOSE)
                .dist(clean.frames[10].kp(KeypointId::NOSE))
                < 1e-9
        );
    }

    #[test]
    fn shank_length() {
        let t = Trajectory {
            view: View::Front,
            fps: 30.0,
            frames: vec![frame(0, |k| match k {
                25 | 26 => (0.0, 0.0),
                27 | 28 => (0.0, 60.0),
                _ => (1.0, 1.0),
            })],
        };
        assert_eq!(t.median_shank_length(), Some(60.0));
    }
}
