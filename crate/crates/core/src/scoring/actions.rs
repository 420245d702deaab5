//! Per-action criterion checks. Every threshold is scaled by the median shank
//! length of the trajectory being scored or by landmark size.

use crate::balltrack::BallTrack;
use crate::config::ScoringConfig;
use crate::course::{CourseLayout, Hoop};
use crate::geometry::{
    centroid, detect_jump_events_windowed, distance_to_hull, point_in_circle, point_in_polygon,
    rolling_median, segments_intersect, Containment, JumpEvent, Point, BASELINE_WINDOW,
};
use crate::segmenter::{find_kick_contact, reference_point, ActionId, ActionPhase};
use crate::trajectory::{KeypointId as K, PoseFrame, Trajectory};

use super::{CriterionResult, ScoreError};

const FOOT: [K; 4] = [
    K::LEFT_HEEL,
    K::RIGHT_HEEL,
    K::LEFT_FOOT_INDEX,
    K::RIGHT_FOOT_INDEX,
];
const HANDS: [K; 2] = [K::LEFT_INDEX, K::RIGHT_INDEX];
const TORSO: [K; 4] = [
    K::LEFT_SHOULDER,
    K::RIGHT_SHOULDER,
    K::LEFT_HIP,
    K::RIGHT_HIP,
];

fn check_phase(phase: &ActionPhase, action: u8, traj: &Trajectory) -> Result<(), ScoreError> {
    let expected = ActionId::new(action).expect("action id in range");
    if phase.action != expected || phase.view != expected.view() || traj.view != expected.view() {
        return Err(ScoreError::PhaseMismatch {
            expected: action,
            found: phase.action.get(),
        });
    }
    Ok(())
}

fn shank(traj: &Trajectory) -> Result<f64, ScoreError> {
    traj.median_shank_length()
        .filter(|s| *s > 0.0)
        .ok_or(ScoreError::NoBodyScale(traj.view))
}

fn phase_frames<'a>(traj: &'a Trajectory, phase: &ActionPhase) -> &'a [PoseFrame] {
    traj.frames_in(phase.start_frame, phase.end_frame)
}

/// A frame count given at 30 fps, at the trajectory's rate (at least 1).
fn at_rate(frames_at_30: usize, traj: &Trajectory) -> usize {
    ((frames_at_30 as f64 * traj.fps / 30.0).round() as usize).max(1)
}

fn pass(id: u8, evidence: impl Into<String>) -> CriterionResult {
    CriterionResult::new(id, true, evidence)
}

fn fail(id: u8, evidence: impl Into<String>) -> CriterionResult {
    CriterionResult::new(id, false, evidence)
}

/// Per frame, the lower of the two ankles in the image (larger y).
fn support_track(frames: &[PoseFrame]) -> Vec<(i64, Point)> {
    frames
        .iter()
        .map(|f| {
            let l = f.kp(K::LEFT_ANKLE);
            let r = f.kp(K::RIGHT_ANKLE);
            (f.frame_index, if l.y >= r.y { l } else { r })
        })
        .collect()
}

fn keypoint_track(frames: &[PoseFrame], id: K) -> Vec<(i64, Point)> {
    frames.iter().map(|f| (f.frame_index, f.kp(id))).collect()
}

/// Jump detection parameters for one trajectory.
struct JumpScale {
    theta: f64,
    k_min: usize,
    /// Baseline median window, odd.
    window: usize,
    settle_fraction: f64,
}

impl JumpScale {
    fn new(cfg: &ScoringConfig, traj: &Trajectory, shank: f64) -> Self {
        Self {
            theta: cfg.jump.theta_scale * shank,
            k_min: at_rate(cfg.jump.k_min, traj),
            window: at_rate(BASELINE_WINDOW, traj) | 1,
            settle_fraction: cfg.jump.settle_fraction,
        }
    }
}

/// Jump events whose peak also stands at least `theta / 2` above both
/// bracketing samples. A baseline median lags when the ankle line moves fast
/// in the image (walking toward the camera), which reads as a rise without
/// this check.
fn jumps(track: &[(i64, Point)], js: &JumpScale) -> Result<Vec<JumpEvent>, ScoreError> {
    let theta = js.theta;
    let events = match detect_jump_events_windowed(track, theta, js.k_min, js.window) {
        Ok(ev) => ev,
        Err(crate::geometry::GeometryError::SeriesTooShort { .. }) => return Ok(Vec::new()),
        Err(e) => return Err(ScoreError::Geometry(e)),
    };
    let y_at = |f: i64| track.iter().find(|(g, _)| *g == f).map(|(_, p)| p.y);
    Ok(events
        .into_iter()
        .filter(|e| {
            let (Some(a), Some(b)) = (y_at(e.takeoff_frame), y_at(e.landing_frame)) else {
                return false;
            };
            let peak = track
                .iter()
                .filter(|(f, _)| *f > e.takeoff_frame && *f < e.landing_frame)
                .map(|(_, p)| p.y)
                .fold(f64::INFINITY, f64::min);
            a.min(b) - peak >= theta / 2.0
        })
        .collect())
}

/// First frame at or after landing where the rise above the baseline has
/// dropped to `frac * theta`.
fn settle_frame(track: &[(i64, Point)], ev: &JumpEvent, js: &JumpScale) -> i64 {
    let (theta, frac) = (js.theta, js.settle_fraction);
    let ys: Vec<f64> = track.iter().map(|(_, p)| p.y).collect();
    let base = rolling_median(&ys, js.window);
    let start = track.partition_point(|(f, _)| *f < ev.landing_frame);
    (start..track.len())
        .find(|&i| base[i] - ys[i] <= frac * theta)
        .map_or(ev.landing_frame, |i| track[i].0)
}

fn landings(track: &[(i64, Point)], js: &JumpScale) -> Result<Vec<(JumpEvent, i64)>, ScoreError> {
    Ok(jumps(track, js)?
        .into_iter()
        .map(|e| {
            let s = settle_frame(track, &e, js);
            (e, s)
        })
        .collect())
}

fn containment(p: Point, hoop: &Hoop) -> Containment {
    point_in_circle(p, hoop.center, hoop.radius).unwrap_or(Containment::Outside)
}

fn hoop(layout: &CourseLayout, id: u8) -> Result<&Hoop, ScoreError> {
    layout
        .hoop(id)
        .ok_or_else(|| ScoreError::MissingLandmark(format!("hoop {id}")))
}

fn frame_at(traj: &Trajectory, f: i64) -> Result<&PoseFrame, ScoreError> {
    traj.frame(f).ok_or(ScoreError::MissingFrame(f))
}

fn boundary_touch(frame: &PoseFrame, hoops: &[Hoop]) -> Option<(K, u8)> {
    FOOT.iter().find_map(|&k| {
        hoops
            .iter()
            .find(|h| containment(frame.kp(k), h) == Containment::OnBoundary)
            .map(|h| (k, h.id))
    })
}

fn join(frames: &[i64]) -> String {
    frames
        .iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Two-footed jumps into hoops 1 to 3.
pub fn score_action1(
    phase: &ActionPhase,
    traj: &Trajectory,
    layout: &CourseLayout,
    cfg: &ScoringConfig,
) -> Result<[CriterionResult; 2], ScoreError> {
    check_phase(phase, 1, traj)?;
    let js = JumpScale::new(cfg, traj, shank(traj)?);
    let frames = phase_frames(traj, phase);
    let track = support_track(frames);
    let lands = landings(&track, &js)?;
    let hoops: Vec<Hoop> = (1..=3)
        .map(|i| hoop(layout, i).cloned())
        .collect::<Result<_, _>>()?;
    let settles: Vec<i64> = lands.iter().map(|(_, s)| *s).collect();

    let c1 = if lands.len() < 3 {
        fail(1, format!("{} jump landings, 3 needed", lands.len()))
    } else {
        let mut bad = None;
        for (h, &f) in hoops.iter().zip(&settles) {
            let frame = frame_at(traj, f)?;
            if let Some(k) = FOOT
                .iter()
                .find(|&&k| containment(frame.kp(k), h) != Containment::Inside)
            {
                bad = Some(format!(
                    "frame {f}: keypoint {} not inside hoop {}",
                    k.index(),
                    h.id
                ));
                break;
            }
        }
        match bad {
            Some(msg) => fail(1, msg),
            None => pass(
                1,
                format!("landings in hoops 1-3 at frames {}", join(&settles[..3])),
            ),
        }
    };

    let mut touch = None;
    for &f in &settles {
        if let Some((k, h)) = boundary_touch(frame_at(traj, f)?, &layout.hoops) {
            touch = Some(format!(
                "frame {f}: keypoint {} on edge of hoop {h}",
                k.index()
            ));
            break;
        }
    }
    let c2 = match (lands.len(), touch) {
        (_, Some(msg)) => fail(2, msg),
        (3, None) => pass(2, format!("3 jumps, landings at frames {}", join(&settles))),
        (n, None) => fail(
            2,
            format!("{n} jump events, expected 3 (frames {})", join(&settles)),
        ),
    };
    Ok([c1, c2])
}

fn shins_cross(f: &PoseFrame) -> bool {
    segments_intersect(
        f.kp(K::RIGHT_KNEE),
        f.kp(K::RIGHT_ANKLE),
        f.kp(K::LEFT_KNEE),
        f.kp(K::LEFT_ANKLE),
    )
}

/// Side slide between cones 1 and 2 and back.
pub fn score_action2(
    phase: &ActionPhase,
    traj: &Trajectory,
    layout: &CourseLayout,
    cfg: &ScoringConfig,
) -> Result<[CriterionResult; 3], ScoreError> {
    check_phase(phase, 2, traj)?;
    let s = shank(traj)?;
    let frames = phase_frames(traj, phase);
    let cone = |id: u8| {
        layout
            .cone(id)
            .ok_or_else(|| ScoreError::MissingLandmark(format!("cone {id}")))
    };
    let (cone1, cone2) = (cone(1)?, cone(2)?);

    let reversal = frames.first().and_then(|first| {
        let x0 = reference_point(first).x;
        let (i, d) = frames
            .iter()
            .enumerate()
            .map(|(i, f)| (i, (reference_point(f).x - x0).abs()))
            .fold(
                (0, 0.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        (i > 0 && i + 1 < frames.len() && d >= s).then_some(i)
    });
    let (c3, c4) = match reversal {
        None => {
            let msg = ScoreError::NoReversalFound.to_string();
            (fail(3, msg.clone()), fail(4, msg))
        }
        Some(rev) => {
            let half =
                |id: u8, part: &[PoseFrame], name: &str| match part.iter().find(|f| shins_cross(f))
                {
                    Some(f) => fail(id, format!("shins cross at frame {}", f.frame_index)),
                    None => pass(
                        id,
                        format!(
                            "{name} frames {}-{} without crossing",
                            part[0].frame_index,
                            part[part.len() - 1].frame_index
                        ),
                    ),
                };
            (
                half(3, &frames[..=rev], "outbound"),
                half(4, &frames[rev..], "return"),
            )
        }
    };

    let touched = |c: &crate::course::Cone| {
        let r = c.touch_radius(cfg.contact.touch_scale);
        frames
            .iter()
            .find(|f| HANDS.iter().any(|&k| f.kp(k).dist(c.apex) <= r))
            .map(|f| f.frame_index)
    };
    let c5 = match (touched(cone1), touched(cone2)) {
        (Some(a), Some(b)) => pass(
            5,
            format!("cone 1 touched at frame {a}, cone 2 at frame {b}"),
        ),
        (a, b) => {
            let missing: Vec<&str> = [(a, "1"), (b, "2")]
                .iter()
                .filter(|(f, _)| f.is_none())
                .map(|(_, n)| *n)
                .collect();
            fail(
                5,
                format!(
                    "no hand inside touch disk of cone {}",
                    missing.join(" and ")
                ),
            )
        }
    };
    Ok([c3, c4, c5])
}

fn ball_radius(shank: f64, cfg: &ScoringConfig) -> f64 {
    cfg.contact.ball_radius_scale * shank
}

fn hand_distance(f: &PoseFrame, p: Point) -> f64 {
    HANDS
        .iter()
        .map(|&k| f.kp(k).dist(p))
        .fold(f64::INFINITY, f64::min)
}

/// Catch.
pub fn score_action3(
    phase: &ActionPhase,
    traj: &Trajectory,
    ball: &BallTrack,
    cfg: &ScoringConfig,
) -> Result<[CriterionResult; 1], ScoreError> {
    check_phase(phase, 3, traj)?;
    let r = ball_radius(shank(traj)?, cfg);
    let (r_contact, r_hold) = (cfg.contact.contact_scale * r, cfg.contact.hold_scale * r);
    let obs: Vec<(i64, Point)> = ball
        .observed_in(phase.start_frame, phase.end_frame)
        .collect();
    if obs.is_empty() {
        return Err(ScoreError::NoBallObservations(3));
    }

    let torso_first = obs.iter().find_map(|&(f, p)| {
        let frame = traj.frame(f)?;
        let pts: Vec<Point> = TORSO.iter().map(|&k| frame.kp(k)).collect();
        (distance_to_hull(p, &pts) <= r_contact).then_some(f)
    });

    let need = at_rate(cfg.contact.hold_frames, traj);
    let mut first_contact = None;
    for &(f, p) in &obs {
        let Some(frame) = traj.frame(f) else { continue };
        if hand_distance(frame, p) > r_contact {
            continue;
        }
        first_contact.get_or_insert(f);
        if torso_first.is_some_and(|t| t < f) {
            break;
        }
        // hold: following observations stay near the hands
        let mut held = 0;
        for (g, q) in ball.observed_in(f + 1, i64::MAX) {
            match traj.frame(g) {
                Some(fr) if hand_distance(fr, q) <= r_hold => held += 1,
                _ => break,
            }
            if held >= need {
                break;
            }
        }
        if held >= need {
            return Ok([pass(
                6,
                format!("hand contact at frame {f}, held {held} frames"),
            )]);
        }
    }
    let msg = match (first_contact, torso_first) {
        (_, Some(t)) if first_contact.is_none_or(|c| t < c) => {
            format!("ball trapped against torso at frame {t}")
        }
        (Some(c), _) => format!("hand contact at frame {c} but ball not held"),
        (None, _) => "ball never within contact radius of hands".to_string(),
    };
    Ok([fail(6, msg)])
}

/// Signed coordinate of `k` relative to the nose along `axis` (+1 or -1 in x).
fn nose_relative(f: &PoseFrame, k: K, axis: f64) -> f64 {
    (f.kp(k).x - f.kp(K::NOSE).x) * axis
}

/// First `(a, b)` with `a < b`, `s(a) < -m` and `s(b) > m`.
fn back_to_front(series: &[(i64, f64)], m: f64) -> Option<(i64, i64)> {
    let mut behind = None;
    for &(f, s) in series {
        if s < -m && behind.is_none() {
            behind = Some(f);
        } else if s > m {
            if let Some(b) = behind {
                return Some((b, f));
            }
        }
    }
    None
}

/// Overhand throw at the rectangular target.
pub fn score_action4(
    phase: &ActionPhase,
    traj: &Trajectory,
    layout: &CourseLayout,
    ball: &BallTrack,
    cfg: &ScoringConfig,
) -> Result<[CriterionResult; 2], ScoreError> {
    check_phase(phase, 4, traj)?;
    let s = shank(traj)?;
    let rect = layout.rect.as_ref().ok_or(ScoreError::MissingRect)?;
    let obs: Vec<(i64, Point)> = ball
        .observed_in(phase.start_frame, phase.end_frame)
        .collect();
    if obs.is_empty() {
        return Err(ScoreError::NoBallObservations(4));
    }

    let c7 = match obs
        .iter()
        .find(|(_, p)| point_in_polygon(*p, &rect.corners) == Ok(Containment::Inside))
    {
        Some((f, _)) => pass(7, format!("ball inside target at frame {f}")),
        None => fail(7, format!("{} ball samples, none inside target", obs.len())),
    };

    let frames = phase_frames(traj, phase);
    let mut nose_x: Vec<f64> = frames.iter().map(|f| f.kp(K::NOSE).x).collect();
    let target = centroid(&rect.corners);
    let axis = match crate::geometry::median(&mut nose_x) {
        Some(x) if target.x < x => -1.0,
        _ => 1.0,
    };
    let series = |k: K| -> Vec<(i64, f64)> {
        frames
            .iter()
            .map(|f| (f.frame_index, nose_relative(f, k, axis)))
            .collect()
    };
    let excursion = |v: &[(i64, f64)]| {
        let (lo, hi) = v
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, s)| {
                (lo.min(s), hi.max(s))
            });
        hi - lo
    };
    let (left, right) = (series(K::LEFT_WRIST), series(K::RIGHT_WRIST));
    let (id, wrist) = if excursion(&right) >= excursion(&left) {
        (16, right)
    } else {
        (15, left)
    };
    let m = cfg.margins.throw_wrist * s;
    let c8 = match back_to_front(&wrist, m) {
        Some((a, b)) => pass(
            8,
            format!("wrist {id} behind nose at frame {a}, in front at frame {b}"),
        ),
        None => fail(
            8,
            format!("wrist {id} never moves from behind to in front of the nose"),
        ),
    };
    Ok([c7, c8])
}

/// Number of distinct airborne intervals after merging overlapping events.
fn merged_event_count(mut events: Vec<JumpEvent>) -> usize {
    events.sort_by_key(|e| e.takeoff_frame);
    let mut count = 0;
    let mut end = i64::MIN;
    for e in events {
        if e.takeoff_frame >= end {
            count += 1;
        }
        end = end.max(e.landing_frame);
    }
    count
}

/// Side changes of a series with hysteresis `m`; also returns the side per sample.
fn crossings(series: &[f64], m: f64) -> (usize, Vec<i8>) {
    let mut state = 0i8;
    let mut n = 0;
    let sides = series
        .iter()
        .map(|&s| {
            let side = if s > m {
                1
            } else if s < -m {
                -1
            } else {
                0
            };
            if side != 0 {
                if state != 0 && side != state {
                    n += 1;
                }
                state = side;
            }
            side
        })
        .collect();
    (n, sides)
}

/// Step-hop between cones 3 and 4.
pub fn score_action5(
    phase: &ActionPhase,
    traj: &Trajectory,
    cfg: &ScoringConfig,
) -> Result<[CriterionResult; 2], ScoreError> {
    check_phase(phase, 5, traj)?;
    let s = shank(traj)?;
    let js = JumpScale::new(cfg, traj, s);
    let frames = phase_frames(traj, phase);

    let mut events = jumps(&keypoint_track(frames, K::LEFT_ANKLE), &js)?;
    events.extend(jumps(&keypoint_track(frames, K::RIGHT_ANKLE), &js)?);
    let hops = merged_event_count(events);
    let c9 = if hops >= 2 {
        pass(9, format!("{hops} airborne intervals"))
    } else {
        fail(9, format!("{hops} airborne intervals, 2 needed"))
    };

    let axis = match (frames.first(), frames.last()) {
        (Some(a), Some(b)) if reference_point(b).x < reference_point(a).x => -1.0,
        _ => 1.0,
    };
    let m = cfg.margins.arm_crossing * s;
    let rel = |k: K| -> Vec<f64> { frames.iter().map(|f| nose_relative(f, k, axis)).collect() };
    let (nl, sl) = crossings(&rel(K::LEFT_WRIST), m);
    let (nr, sr) = crossings(&rel(K::RIGHT_WRIST), m);
    let both: Vec<(i8, i8)> = sl
        .into_iter()
        .zip(sr)
        .filter(|(a, b)| *a != 0 && *b != 0)
        .collect();
    let opposed = both.iter().filter(|(a, b)| a != b).count();
    let share = if both.is_empty() {
        0.0
    } else {
        opposed as f64 / both.len() as f64
    };
    let c10 = if nl >= 2 && nr >= 2 && share >= cfg.margins.arm_opposition {
        pass(
            10,
            format!("wrist crossings {nl}/{nr}, opposed {:.0}%", share * 100.0),
        )
    } else {
        fail(
            10,
            format!("wrist crossings {nl}/{nr}, opposed {:.0}%", share * 100.0),
        )
    };
    Ok([c9, c10])
}

/// One-foot hops through hoops 1 to 6.
pub fn score_action6(
    phase: &ActionPhase,
    traj: &Trajectory,
    layout: &CourseLayout,
    cfg: &ScoringConfig,
) -> Result<[CriterionResult; 2], ScoreError> {
    check_phase(phase, 6, traj)?;
    let s = shank(traj)?;
    let js = JumpScale::new(cfg, traj, s);
    let split = cfg.jump.split_scale * s;
    let hoops: Vec<Hoop> = (1..=6)
        .map(|i| hoop(layout, i).cloned())
        .collect::<Result<_, _>>()?;
    let frames = phase_frames(traj, phase);
    let track = support_track(frames);
    let lands = landings(&track, &js)?;

    let mut per_hoop: Vec<Vec<i64>> = vec![Vec::new(); hoops.len()];
    let mut c11_fault: Option<String> = None;
    let mut edge: Option<String> = None;
    for &(_, f) in &lands {
        let frame = frame_at(traj, f)?;
        let (l, r) = (frame.kp(K::LEFT_ANKLE), frame.kp(K::RIGHT_ANKLE));
        let (ankle, own, other) = if r.y >= l.y {
            (
                r,
                [K::RIGHT_HEEL, K::RIGHT_FOOT_INDEX],
                [K::LEFT_HEEL, K::LEFT_FOOT_INDEX],
            )
        } else {
            (
                l,
                [K::LEFT_HEEL, K::LEFT_FOOT_INDEX],
                [K::RIGHT_HEEL, K::RIGHT_FOOT_INDEX],
            )
        };
        if edge.is_none() {
            if let Some((k, h)) = boundary_touch(frame, &hoops) {
                edge = Some(format!(
                    "frame {f}: keypoint {} on edge of hoop {h}",
                    k.index()
                ));
            }
        }
        let Some(hi) = hoops
            .iter()
            .position(|h| containment(ankle, h) != Containment::Outside)
        else {
            continue;
        };
        per_hoop[hi].push(f);
        if c11_fault.is_some() {
            continue;
        }
        let h = &hoops[hi];
        let gap = l.dist(r);
        if gap < split {
            c11_fault = Some(format!(
                "frame {f}: ankles {gap:.1} px apart in hoop {}",
                h.id
            ));
        } else if let Some(k) = own
            .iter()
            .find(|&&k| containment(frame.kp(k), h) != Containment::Inside)
        {
            c11_fault = Some(format!(
                "frame {f}: hopping foot keypoint {} outside hoop {}",
                k.index(),
                h.id
            ));
        } else if let Some(k) = other
            .iter()
            .find(|&&k| containment(frame.kp(k), h) == Containment::Inside)
        {
            c11_fault = Some(format!(
                "frame {f}: free foot keypoint {} inside hoop {}",
                k.index(),
                h.id
            ));
        }
    }

    let empty: Vec<u8> = hoops
        .iter()
        .zip(&per_hoop)
        .filter(|(_, v)| v.is_empty())
        .map(|(h, _)| h.id)
        .collect();
    let c11 = match (&c11_fault, empty.first()) {
        (Some(msg), _) => fail(11, msg.clone()),
        (None, Some(h)) => fail(11, format!("no landing in hoop {h}")),
        (None, None) => pass(11, format!("{} one-footed landings", lands.len())),
    };
    let multi = hoops.iter().zip(&per_hoop).find(|(_, v)| v.len() > 1);
    let c12 = match (edge, multi, empty.first()) {
        (Some(msg), _, _) => fail(12, msg),
        (None, Some((h, v)), _) => fail(
            12,
            format!("{} landings in hoop {} (frames {})", v.len(), h.id, join(v)),
        ),
        (None, None, Some(h)) => fail(12, format!("no landing in hoop {h}")),
        (None, None, None) => pass(12, "one landing per hoop".to_string()),
    };
    Ok([c11, c12])
}

/// Kick between cones 5 and 6.
pub fn score_action7(
    phase: &ActionPhase,
    traj: &Trajectory,
    layout: &CourseLayout,
    ball: &BallTrack,
    cfg: &ScoringConfig,
) -> Result<[CriterionResult; 2], ScoreError> {
    check_phase(phase, 7, traj)?;
    let s = shank(traj)?;
    if ball
        .observed_in(phase.start_frame, i64::MAX)
        .next()
        .is_none()
    {
        return Err(ScoreError::NoBallObservations(7));
    }
    let contact = find_kick_contact(
        ball,
        layout,
        phase.start_frame,
        cfg.segment.kick_launch_speed * s,
        cfg.segment.ball_rest_speed * s,
    )
    .ok_or(ScoreError::NoKickDetected)?;
    let p0 = ball.get(contact).ok_or(ScoreError::NoKickDetected)?;
    let dir = ball
        .observed_in(contact + 1, contact + 3)
        .last()
        .and_then(|(_, p)| (p - p0).normalized())
        .ok_or(ScoreError::NoKickDetected)?;

    let cone = |id: u8| {
        layout
            .cone(id)
            .ok_or_else(|| ScoreError::MissingLandmark(format!("cone {id}")))
    };
    let (c5, c6) = (cone(5)?, cone(6)?);
    let n = dir.perp();
    let (r5, r6) = (
        c5.touch_radius(cfg.contact.touch_scale),
        c6.touch_radius(cfg.contact.touch_scale),
    );
    let (s5, s6, sb) = (n.dot(c5.apex), n.dot(c6.apex), n.dot(p0));
    let lo = (s5 - r5).min(s6 - r6);
    let hi = (s5 + r5).max(s6 + r6);
    let ahead = dir.dot(c5.apex - p0) > 0.0 && dir.dot(c6.apex - p0) > 0.0;
    let c13 = if ahead && (lo..=hi).contains(&sb) {
        pass(
            13,
            format!("kick at frame {contact} heads between cones 5 and 6"),
        )
    } else {
        fail(
            13,
            format!("kick at frame {contact} heads outside the cone 5-6 corridor"),
        )
    };

    let at = frame_at(traj, contact)?;
    let right_kicks = at.kp(K::RIGHT_ANKLE).dist(p0) <= at.kp(K::LEFT_ANKLE).dist(p0);
    let (kick, sup_knee, sup_ankle, side) = if right_kicks {
        (K::RIGHT_ANKLE, K::LEFT_KNEE, K::LEFT_ANKLE, "right")
    } else {
        (K::LEFT_ANKLE, K::RIGHT_KNEE, K::RIGHT_ANKLE, "left")
    };
    let w = at_rate(cfg.margins.kick_window.max(0) as usize, traj) as i64;
    let series: Vec<(i64, f64)> = traj
        .frames_in(contact - w, contact + w)
        .iter()
        .filter_map(|f| {
            let (k, a) = (f.kp(sup_knee), f.kp(sup_ankle));
            let d = a - k;
            let len = d.norm();
            if len == 0.0 {
                return None;
            }
            let front = d.cross(dir).signum();
            Some((f.frame_index, d.cross(f.kp(kick) - k) / len * front))
        })
        .collect();
    let c14 = match back_to_front(&series, cfg.margins.kick_side * s) {
        Some((a, b)) => pass(
            14,
            format!("{side} leg swings from behind (frame {a}) to in front (frame {b})"),
        ),
        None => fail(
            14,
            format!("{side} leg never swings through the support line"),
        ),
    };
    Ok([c13, c14])
}
