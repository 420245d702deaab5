//! Scripted motion for the whole course, one pose per front frame.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::Range;

use super::body::{local, Arm, Foot, Local, Pose, FOOT_LAT, INDEX_REST, WRIST_REST};
use super::world::{
    cone_apex, project, CATCH_SPOT, HOOP_X, HOOP_Z, KICK_BALL, RECT_PX, SLIDE_Z, START, STEP_HOP_Z,
    THROWER_X, THROW_SPOT, W3,
};
use super::{Fault, SynthError};
use crate::geometry::Point;
use crate::trajectory::View;

const JUMP_HEIGHT: f64 = 0.35;
const FACE_CAMERA: f64 = -FRAC_PI_2;
/// Fastest transition allowed, metres per frame at 30 fps.
const MAX_STEP_30: f64 = 0.25;

pub struct Timeline {
    pub poses: Vec<Pose>,
    /// Ball centre per frame in each view's pixels.
    pub ball_front: Vec<Option<Point>>,
    pub ball_rear: Vec<Option<Point>>,
    pub run_start: usize,
    pub contact: usize,
    pub slide_out: Range<usize>,
    pub slide_back: Range<usize>,
    /// Frames whose wrists are replaced by the resting position.
    pub pinned_arms: Option<Range<usize>>,
}

struct Builder {
    fps: f64,
    cur: Pose,
    t: Timeline,
    gait: f64,
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

fn lerp_local(a: Local, b: Local, t: f64) -> Local {
    local(
        lerp(a.fwd, b.fwd, t),
        lerp(a.lat, b.lat, t),
        lerp(a.h, b.h, t),
    )
}

fn lerp_w3(a: W3, b: W3, t: f64) -> W3 {
    W3::new(lerp(a.x, b.x, t), lerp(a.z, b.z, t), lerp(a.h, b.h, t))
}

impl Builder {
    fn fr(&self, n: usize) -> usize {
        ((n as f64) * self.fps / 30.0).round().max(1.0) as usize
    }

    fn len(&self) -> usize {
        self.t.poses.len()
    }

    fn push(&mut self) {
        self.t.poses.push(self.cur);
        self.t.ball_front.push(None);
        self.t.ball_rear.push(None);
    }

    fn hold(&mut self, n: usize) {
        for _ in 0..n {
            self.push();
        }
    }

    fn rest_limbs(&mut self) {
        self.cur.feet = [Foot::REST; 2];
        self.cur.arms = [Arm::REST; 2];
        self.cur.lift = 0.0;
    }

    fn check_speed(&self, dist: f64, frames: usize) -> Result<(), SynthError> {
        let limit = MAX_STEP_30 * 30.0 / self.fps;
        if frames == 0 || dist / frames as f64 > limit {
            return Err(SynthError::InvalidScript(format!(
                "durations leave {frames} frames to cover {dist:.2} m"
            )));
        }
        Ok(())
    }

    /// Walks in a straight line with a small gait; `facing` None faces the
    /// direction of travel.
    fn walk_to(&mut self, x: f64, z: f64, n: usize, facing: Option<f64>) -> Result<(), SynthError> {
        let (x0, z0) = (self.cur.x, self.cur.z);
        let dist = (x - x0).hypot(z - z0);
        self.check_speed(dist, n)?;
        self.rest_limbs();
        self.cur.facing = facing.unwrap_or_else(|| {
            if dist > 0.0 {
                (z - z0).atan2(x - x0)
            } else {
                self.cur.facing
            }
        });
        for i in 1..=n {
            let t = i as f64 / n as f64;
            self.cur.x = lerp(x0, x, t);
            self.cur.z = lerp(z0, z, t);
            self.gait += PI / 4.0 * 30.0 / self.fps;
            let s = self.gait.sin();
            self.cur.feet[0] = Foot {
                fwd: 0.08 * s,
                lat: FOOT_LAT,
                h: 0.05 * s.max(0.0),
            };
            self.cur.feet[1] = Foot {
                fwd: -0.08 * s,
                lat: FOOT_LAT,
                h: 0.05 * (-s).max(0.0),
            };
            self.push();
        }
        self.cur.feet = [Foot::REST; 2];
        Ok(())
    }

    /// Airborne frames toward `(x, z)` followed by `ground` frames standing there.
    fn jump_to(&mut self, x: f64, z: f64, air: usize, ground: usize) {
        let (x0, z0) = (self.cur.x, self.cur.z);
        for i in 1..=air {
            let t = i as f64 / (air + 1) as f64;
            self.cur.x = lerp(x0, x, t);
            self.cur.z = lerp(z0, z, t);
            self.cur.lift = 4.0 * JUMP_HEIGHT * t * (1.0 - t);
            self.push();
        }
        self.cur.x = x;
        self.cur.z = z;
        self.cur.lift = 0.0;
        self.hold(ground);
    }

    /// Side steps facing the front camera; feet never cross.
    fn slide_to(&mut self, x: f64, n: usize) -> Range<usize> {
        let start = self.len();
        let x0 = self.cur.x;
        self.rest_limbs();
        self.cur.facing = FACE_CAMERA;
        for i in 1..=n {
            self.cur.x = lerp(x0, x, i as f64 / n as f64);
            self.gait += PI / 5.0;
            let s = self.gait.sin();
            self.cur.feet[0].lat = FOOT_LAT + 0.06 * s * s;
            self.cur.feet[1].lat = FOOT_LAT + 0.06 * (1.0 - s * s);
            self.push();
        }
        self.cur.feet = [Foot::REST; 2];
        start..self.len()
    }

    /// Reaches the index finger of arm `arm` (0 left, 1 right) to a cone apex.
    fn touch(&mut self, cone: u8, arm: usize, n: usize, reach: bool) {
        let side = if arm == 0 { 1.0 } else { -1.0 };
        let ramp = self.fr(2);
        let apex = cone_apex(cone);
        let index_target = W3::new(apex.x, apex.z, apex.h + 0.01);
        let wrist_target = W3::new(
            lerp(apex.x, self.cur.x, 0.15),
            lerp(apex.z, self.cur.z, 0.15),
            apex.h + 0.07,
        );
        let index_rest = self.cur.world(INDEX_REST, side);
        let wrist_rest = self.cur.world(WRIST_REST, side);
        for i in 0..n {
            let w = if !reach {
                0.0
            } else if i < ramp {
                (i + 1) as f64 / (ramp + 1) as f64
            } else if i >= n - ramp {
                (n - i) as f64 / (ramp + 1) as f64
            } else {
                1.0
            };
            self.cur.arms[arm] = Arm::World {
                wrist: lerp_w3(wrist_rest, wrist_target, w),
                index: lerp_w3(index_rest, index_target, w),
            };
            self.push();
        }
        self.cur.arms[arm] = Arm::REST;
    }
}

/// Builds the run. `budgets` are the frames allotted to each action; faults
/// that add a jump or hop lengthen their action by one jump cycle.
pub fn build(fps: f64, budgets: [usize; 7], faults: &[Fault]) -> Result<Timeline, SynthError> {
    let mut b = Builder {
        fps,
        cur: Pose::standing(START.0, START.1, 0.0),
        t: Timeline {
            poses: Vec::new(),
            ball_front: Vec::new(),
            ball_rear: Vec::new(),
            run_start: 0,
            contact: 0,
            slide_out: 0..0,
            slide_back: 0..0,
            pinned_arms: None,
        },
        gait: 0.0,
    };
    let has = |x: Fault| faults.contains(&x);
    let (air, ground) = (b.fr(5), b.fr(8));
    let cycle = air + ground;

    // pre-roll: stand, then walk up to the start line
    b.hold(b.fr(15));
    let n = b.fr(4);
    b.walk_to(0.95, START.1, n, Some(0.0))?;
    b.t.run_start = b.len();
    let mut budget_end = b.len();

    // 1: two-footed jumps into hoops 1-3
    let extra = if has(Fault::F2) { cycle } else { 0 };
    budget_end += budgets[0] + extra;
    // first frame past the start line, whatever the frame rate
    b.cur.x = 1.05;
    b.push();
    let n = b.fr(2).saturating_sub(1).max(1);
    b.walk_to(1.15, HOOP_Z, n, Some(0.0))?;
    b.hold(ground);
    for (k, &hx) in HOOP_X[..3].iter().enumerate() {
        let short = if k == 1 && has(Fault::F1) { 0.22 } else { 0.0 };
        b.jump_to(hx - 0.04 - short, HOOP_Z, air, ground);
    }
    if extra > 0 {
        b.jump_to(b.cur.x, b.cur.z, air, ground);
    }
    fill(&mut b, budget_end, 1)?;

    // 2: side slide to cone 2 and back to cone 1
    budget_end += budgets[1];
    let (out, touch, back) = (b.fr(21), b.fr(8), b.fr(12));
    let walk = transition(&b, budget_end, out + touch + back + touch, 2)?;
    b.walk_to(5.0, SLIDE_Z, walk, None)?;
    b.t.slide_out = b.slide_to(7.5, out);
    b.touch(2, 0, touch, !has(Fault::F5));
    b.t.slide_back = b.slide_to(6.1, back);
    b.touch(1, 1, touch, !has(Fault::F5));

    // 3: catch
    budget_end += budgets[2];
    let (ready, flight, hold) = (b.fr(2), b.fr(12), b.fr(8));
    let walk = transition(&b, budget_end, ready + flight + hold, 3)?;
    b.walk_to(CATCH_SPOT.0, CATCH_SPOT.1, walk, Some(FACE_CAMERA))?;
    b.cur.facing = 0.0;
    let hands = |fwd: f64| {
        [
            Arm::Local {
                wrist: local(fwd - 0.05, 0.1, 1.0),
                index: local(fwd, 0.07, 1.0),
            },
            Arm::Local {
                wrist: local(fwd - 0.05, 0.1, 1.0),
                index: local(fwd, 0.07, 1.0),
            },
        ]
    };
    b.cur.arms = hands(0.3);
    b.hold(ready);
    let launch = W3::new(THROWER_X, CATCH_SPOT.1, 1.3);
    let catch_at = b.cur.world(local(0.3, 0.0, 1.0), 1.0);
    let path = |t: f64| {
        let p = lerp_w3(launch, catch_at, t);
        W3::new(
            p.x,
            p.z,
            (p.h + 2.0 * t * (1.0 - t)).max(super::world::BALL_RADIUS_M),
        )
    };
    for i in 1..=flight {
        b.push();
        let i_last = b.len() - 1;
        b.t.ball_front[i_last] = Some(project(View::Front, path(i as f64 / flight as f64)));
    }
    for j in 1..=hold {
        let fwd = lerp(0.3, 0.2, j as f64 / hold as f64);
        let ball = if has(Fault::F6) {
            path(1.0 + j as f64 / flight as f64)
        } else {
            b.cur.arms = hands(fwd);
            b.cur.world(local(fwd, 0.0, 1.0), 1.0)
        };
        b.push();
        let i_last = b.len() - 1;
        b.t.ball_front[i_last] = Some(project(View::Front, ball));
    }
    fill(&mut b, budget_end, 3)?;

    // 4: overhand throw at the target
    budget_end += budgets[3];
    let (ready, windup, throw, follow, wait) = (b.fr(3), b.fr(6), b.fr(4), b.fr(3), b.fr(12));
    let walk = transition(&b, budget_end, ready + windup + throw + follow + wait, 4)?;
    let carry_start = b.len();
    // shuffle over already facing the target so the arms stay level with
    // the nose along the throw axis
    b.walk_to(THROW_SPOT.0, THROW_SPOT.1, walk, Some(PI))?;
    b.cur.facing = PI;
    b.hold(ready);
    let rest = WRIST_REST;
    let (back_kf, fwd_kf) = if has(Fault::F8) {
        (local(0.1, 0.2, 1.2), local(0.45, 0.15, 1.2))
    } else {
        (local(-0.25, 0.2, 1.3), local(0.4, 0.15, 1.2))
    };
    let end_kf = local(0.45, 0.1, 0.9);
    let arm_at = |w: Local| Arm::Local {
        wrist: w,
        index: local(w.fwd + 0.04, w.lat, w.h - 0.03),
    };
    for (from, to, n) in [(rest, back_kf, windup), (back_kf, fwd_kf, throw)] {
        for i in 1..=n {
            b.cur.arms[1] = arm_at(lerp_local(from, to, i as f64 / n as f64));
            b.push();
        }
    }
    let release = b.len() - 1;
    for i in 1..=follow {
        b.cur.arms[1] = arm_at(lerp_local(fwd_kf, end_kf, i as f64 / follow as f64));
        b.push();
    }
    for i in 1..=wait {
        b.cur.arms[1] = arm_at(lerp_local(end_kf, rest, i as f64 / wait as f64));
        b.push();
    }
    b.cur.arms = [Arm::REST; 2];
    for g in carry_start..=release {
        let k = b.t.poses[g].keypoints();
        b.t.ball_rear[g] = Some(project(View::Rear, k[20]));
    }
    let from = b.t.ball_rear[release].expect("ball held at release");
    let target = Point::new(
        (RECT_PX.0 + RECT_PX.1) / 2.0,
        (RECT_PX.2 + RECT_PX.3) / 2.0 - if has(Fault::F7) { 150.0 } else { 0.0 },
    );
    let flight = b.fr(10);
    // the last flight sample is the impact; the ball drops out of view after
    for i in 1..=flight {
        let t = i as f64 / flight as f64;
        let p = Point::new(
            lerp(from.x, target.x, t),
            lerp(from.y, target.y, t) - 60.0 * (PI * t).sin(),
        );
        if let Some(slot) = b.t.ball_rear.get_mut(release + i) {
            *slot = Some(p);
        }
    }
    fill(&mut b, budget_end, 4)?;

    // 5: step-hop from cone 3 to cone 4
    budget_end += budgets[4];
    let unit = cycle;
    let walk = transition(&b, budget_end, 4 * unit, 5)?;
    b.walk_to(5.95, STEP_HOP_Z, walk, None)?;
    b.cur.facing = PI;
    let hop_start = b.len();
    let x0 = b.cur.x;
    let total = 4 * unit;
    for i in 0..total {
        let side = (i / unit) % 2;
        let k = i % unit;
        b.cur.x = lerp(x0, 2.75, (i + 1) as f64 / total as f64);
        let swing = 0.25 * (2.0 * PI * (i as f64 + 0.5) / (2 * unit) as f64).sin();
        b.cur.arms = [
            Arm::Local {
                wrist: local(0.05 + swing, 0.22, 0.75),
                index: local(0.06 + swing, 0.22, 0.67),
            },
            Arm::Local {
                wrist: local(0.05 - swing, 0.22, 0.75),
                index: local(0.06 - swing, 0.22, 0.67),
            },
        ];
        if has(Fault::F9) {
            let s = (PI * i as f64 / 6.0).sin();
            b.cur.lift = 0.0;
            b.cur.feet[0] = Foot {
                fwd: 0.05 * s,
                lat: FOOT_LAT,
                h: 0.04 * s.max(0.0),
            };
            b.cur.feet[1] = Foot {
                fwd: -0.05 * s,
                lat: FOOT_LAT,
                h: 0.04 * (-s).max(0.0),
            };
        } else {
            let airborne = k >= ground;
            b.cur.lift = if airborne {
                let t = (k - ground + 1) as f64 / (air + 1) as f64;
                4.0 * JUMP_HEIGHT * t * (1.0 - t)
            } else {
                0.0
            };
            b.cur.feet[side] = Foot::REST;
            b.cur.feet[1 - side] = Foot {
                fwd: 0.1,
                lat: FOOT_LAT,
                h: 0.1,
            };
        }
        b.push();
    }
    if has(Fault::F10) {
        b.t.pinned_arms = Some(hop_start..b.len());
    }
    b.rest_limbs();
    fill(&mut b, budget_end, 5)?;

    // 6: one-foot hops through hoops 1-6 on the right foot
    let extra = if has(Fault::F12) { cycle } else { 0 };
    budget_end += budgets[5] + extra;
    let ready = b.fr(8);
    let walk = transition(&b, budget_end, ready + 6 * cycle + extra, 6)?;
    let hz = HOOP_Z + FOOT_LAT;
    b.walk_to(1.15, hz, walk, None)?;
    b.cur.facing = 0.0;
    let free = Foot {
        fwd: -0.25,
        lat: FOOT_LAT,
        h: 0.25,
    };
    b.cur.feet = [free, Foot::REST];
    b.hold(ready);
    for (k, &hx) in HOOP_X.iter().enumerate() {
        b.cur.feet[0] = free;
        let both = k == 3 && has(Fault::F11);
        let (x, z) = (hx - 0.04, hz);
        let (x0, z0) = (b.cur.x, b.cur.z);
        for i in 1..=air {
            let t = i as f64 / (air + 1) as f64;
            b.cur.x = lerp(x0, x, t);
            b.cur.z = lerp(z0, z, t);
            b.cur.lift = 4.0 * JUMP_HEIGHT * t * (1.0 - t);
            b.push();
        }
        b.cur.x = x;
        b.cur.z = z;
        b.cur.lift = 0.0;
        if both {
            b.cur.feet[0] = Foot {
                fwd: 0.0,
                lat: 0.03 - 2.0 * FOOT_LAT + FOOT_LAT,
                h: 0.0,
            };
        }
        b.hold(ground);
        if k == 2 && extra > 0 {
            b.jump_to(x, z, air, ground);
        }
    }
    b.rest_limbs();
    fill(&mut b, budget_end, 6)?;

    // 7: kick between cones 5 and 6 with the right foot
    budget_end += budgets[6];
    let (plant, backswing, forward) = (b.fr(5), b.fr(6), b.fr(4));
    let walk = transition(&b, budget_end, plant + backswing + forward - 1, 7)?;
    let root = (KICK_BALL.x - 0.25, KICK_BALL.z + FOOT_LAT);
    b.walk_to(root.0, root.1, walk, None)?;
    b.cur.facing = 0.0;
    b.hold(plant);
    let toe_poke = has(Fault::F14);
    let back_fwd = if toe_poke { 0.0 } else { -0.3 };
    for i in 1..=backswing {
        let t = i as f64 / backswing as f64;
        b.cur.feet[1] = Foot {
            fwd: back_fwd * t,
            lat: FOOT_LAT,
            h: if toe_poke { 0.0 } else { 0.12 * t },
        };
        b.push();
    }
    for i in 1..=forward {
        let t = i as f64 / forward as f64;
        let h0 = if toe_poke { 0.0 } else { 0.12 };
        b.cur.feet[1] = Foot {
            fwd: lerp(back_fwd, 0.2, t),
            lat: FOOT_LAT,
            h: h0 * (1.0 - t),
        };
        b.push();
    }
    b.t.contact = b.len() - 1;
    debug_assert_eq!(b.t.contact, budget_end);
    let follow = b.fr(3);
    for i in 1..=follow {
        b.cur.feet[1] = Foot {
            fwd: lerp(0.2, 0.4, i as f64 / follow as f64),
            lat: FOOT_LAT,
            h: 0.05,
        };
        b.push();
    }
    b.rest_limbs();
    b.hold(b.fr(20));

    let rest_px = project(View::Rear, KICK_BALL);
    let visible_from = b.t.contact.saturating_sub(b.fr(20));
    for g in visible_from..=b.t.contact {
        b.t.ball_rear[g] = Some(rest_px);
    }
    let dir = if has(Fault::F13) {
        Point::new(-1.0, -1.0).normalized().expect("unit")
    } else {
        Point::new(-1.0, 0.0)
    };
    let speed = 48.0 * 30.0 / fps;
    for g in b.t.contact + 1..b.len() {
        let p = rest_px + dir * (speed * (g - b.t.contact) as f64);
        if p.x < 0.0 || p.y < 0.0 {
            break;
        }
        b.t.ball_rear[g] = Some(p);
    }
    Ok(b.t)
}

/// Frames left for walking once `core` frames of the action are reserved.
fn transition(
    b: &Builder,
    budget_end: usize,
    core: usize,
    action: u8,
) -> Result<usize, SynthError> {
    budget_end
        .checked_sub(b.len() + core)
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            SynthError::InvalidScript(format!("action {action} duration too short for its motion"))
        })
}

/// Stands still until the action's budget is used up.
fn fill(b: &mut Builder, budget_end: usize, action: u8) -> Result<(), SynthError> {
    let n = budget_end.checked_sub(b.len()).ok_or_else(|| {
        SynthError::InvalidScript(format!("action {action} duration too short for its motion"))
    })?;
    b.hold(n);
    Ok(())
}
