//! Canonical child skeleton posed in world coordinates.

use super::world::W3;
use crate::trajectory::NUM_KEYPOINTS;

/// Local offsets: `fwd` along the facing direction, `lat` toward the body's
/// left, `h` up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Local {
    pub fwd: f64,
    pub lat: f64,
    pub h: f64,
}

pub const fn local(fwd: f64, lat: f64, h: f64) -> Local {
    Local { fwd, lat, h }
}

pub const SHANK_FWD: f64 = 0.06;
pub const SHANK_UP: f64 = 0.294;
pub const ANKLE_H: f64 = 0.06;
pub const FOOT_LAT: f64 = 0.08;

/// Hanging arm, slightly in front of the hips.
pub const WRIST_REST: Local = local(0.05, 0.22, 0.58);
pub const INDEX_REST: Local = local(0.06, 0.22, 0.5);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Foot {
    pub fwd: f64,
    /// Outward distance from the midline.
    pub lat: f64,
    /// Lift above the ground, on top of the body lift.
    pub h: f64,
}

impl Foot {
    pub const REST: Foot = Foot {
        fwd: 0.0,
        lat: FOOT_LAT,
        h: 0.0,
    };
}

/// Arm target: wrist and index finger, either body-relative or pinned to a
/// world point (used for touching landmarks and holding the ball).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arm {
    Local { wrist: Local, index: Local },
    World { wrist: W3, index: W3 },
}

impl Arm {
    /// Arm at rest; `lat` is mirrored per side by the body.
    pub const REST: Arm = Arm::Local {
        wrist: WRIST_REST,
        index: INDEX_REST,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub z: f64,
    /// Facing angle in the ground plane; 0 faces +X, +pi/2 faces +Z.
    pub facing: f64,
    /// Whole-body height offset.
    pub lift: f64,
    /// Left, right.
    pub feet: [Foot; 2],
    pub arms: [Arm; 2],
}

impl Pose {
    pub fn standing(x: f64, z: f64, facing: f64) -> Self {
        Self {
            x,
            z,
            facing,
            lift: 0.0,
            feet: [Foot::REST; 2],
            arms: [Arm::REST; 2],
        }
    }

    /// World position of a body-local offset; `side` is +1 for left, -1 for right.
    pub fn world(&self, l: Local, side: f64) -> W3 {
        let (s, c) = self.facing.sin_cos();
        let lat = l.lat * side;
        W3::new(
            self.x + l.fwd * c - lat * s,
            self.z + l.fwd * s + lat * c,
            l.h + self.lift,
        )
    }

    /// Inverse of [`Pose::world`] ignoring height.
    pub fn to_local(&self, p: W3, side: f64) -> Local {
        let (s, c) = self.facing.sin_cos();
        let (dx, dz) = (p.x - self.x, p.z - self.z);
        local(dx * c + dz * s, (-dx * s + dz * c) * side, p.h - self.lift)
    }

    pub fn keypoints(&self) -> [W3; NUM_KEYPOINTS] {
        let mut k = [W3::new(0.0, 0.0, 0.0); NUM_KEYPOINTS];
        let at = |l: Local, side: f64| self.world(l, side);
        k[0] = at(local(0.08, 0.0, 1.15), 1.0);
        for (side, base) in [(1.0, 1usize), (-1.0, 4)] {
            k[base] = at(local(0.07, 0.02, 1.19), side);
            k[base + 1] = at(local(0.07, 0.03, 1.19), side);
            k[base + 2] = at(local(0.06, 0.045, 1.19), side);
        }
        for (i, side) in [(0usize, 1.0), (1, -1.0)] {
            let shoulder = local(0.0, 0.2, 0.98);
            let hip = local(0.0, 0.09, 0.62);
            k[11 + i] = at(shoulder, side);
            k[23 + i] = at(hip, side);
            k[7 + i] = at(local(0.0, 0.07, 1.17), side);
            k[9 + i] = at(local(0.07, 0.02, 1.1), side);

            let (wrist, index) = match self.arms[i] {
                Arm::Local { wrist, index } => (at(wrist, side), at(index, side)),
                Arm::World { wrist, index } => (wrist, index),
            };
            let sh = k[11 + i];
            let out = at(local(0.0, 0.03, 0.0), side);
            let mid = W3::new(
                (sh.x + wrist.x) / 2.0 + out.x - self.x,
                (sh.z + wrist.z) / 2.0 + out.z - self.z,
                (sh.h + wrist.h) / 2.0,
            );
            k[13 + i] = mid;
            k[15 + i] = wrist;
            k[19 + i] = index;
            let toward = W3::new(
                (index.x - wrist.x) * 0.6,
                (index.z - wrist.z) * 0.6,
                (index.h - wrist.h) * 0.6,
            );
            let edge = at(local(0.0, 0.015, 0.0), side);
            k[17 + i] = W3::new(
                wrist.x + toward.x + edge.x - self.x,
                wrist.z + toward.z + edge.z - self.z,
                wrist.h + toward.h,
            );
            let inner = at(local(0.0, -0.015, 0.0), side);
            k[21 + i] = W3::new(
                wrist.x + toward.x * 0.7 + inner.x - self.x,
                wrist.z + toward.z * 0.7 + inner.z - self.z,
                wrist.h + toward.h * 0.7,
            );

            let f = self.feet[i];
            let ankle = local(f.fwd, f.lat, ANKLE_H + f.h);
            k[27 + i] = at(ankle, side);
            k[25 + i] = at(
                local(f.fwd + SHANK_FWD, f.lat, ANKLE_H + f.h + SHANK_UP),
                side,
            );
            k[29 + i] = at(local(f.fwd - 0.05, f.lat, ANKLE_H + f.h - 0.03), side);
            k[31 + i] = at(local(f.fwd + 0.13, f.lat, ANKLE_H + f.h - 0.04), side);
        }
        k
    }
}
