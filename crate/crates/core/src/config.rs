//! Scoring thresholds. Body-relative values are multiples of the median shank
//! length of the view being scored; ball radii are multiples of the ball
//! radius.

use serde::{Deserialize, Serialize};

use crate::balltrack::BallConfig;
use crate::trajectory::CleaningConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentConfig {
    /// Consecutive in-zone frames that open a phase.
    pub d_min: usize,
    /// Ball speed (shank lengths per frame) that counts as the kick launch.
    pub kick_launch_speed: f64,
    /// Ball speed at or below which the ball is at rest.
    pub ball_rest_speed: f64,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        Self {
            d_min: 3,
            kick_launch_speed: 0.25,
            ball_rest_speed: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JumpConfig {
    /// θ_jump as a multiple of shank length.
    pub theta_scale: f64,
    pub k_min: usize,
    /// θ_split (ankle separation of a one-footed landing).
    pub split_scale: f64,
    /// A landing has settled once the rise drops below this fraction of θ_jump.
    pub settle_fraction: f64,
}

impl Default for JumpConfig {
    fn default() -> Self {
        Self {
            theta_scale: 0.5,
            k_min: 3,
            split_scale: 0.4,
            settle_fraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContactConfig {
    /// Cone touch disk radius over base circumradius.
    pub touch_scale: f64,
    /// Ball radius as a multiple of shank length, used when nothing better is known.
    pub ball_radius_scale: f64,
    pub contact_scale: f64,
    pub hold_scale: f64,
    /// Frames at 30 fps; scaled to the trajectory's rate.
    pub hold_frames: usize,
}

impl Default for ContactConfig {
    fn default() -> Self {
        Self {
            touch_scale: 1.5,
            ball_radius_scale: 0.35,
            contact_scale: 1.2,
            hold_scale: 2.0,
            hold_frames: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarginConfig {
    /// Wrist must pass this far behind and in front of the nose (throw).
    pub throw_wrist: f64,
    /// Hysteresis for a wrist crossing the nose (step-hop arm swing).
    pub arm_crossing: f64,
    /// Share of crossings where the two wrists sit on opposite sides.
    pub arm_opposition: f64,
    /// Kicking segment must clear the support line by this much.
    pub kick_side: f64,
    /// Frames (at 30 fps, scaled) either side of kick contact inspected for
    /// the leg swing.
    pub kick_window: i64,
}

impl Default for MarginConfig {
    fn default() -> Self {
        Self {
            throw_wrist: 0.25,
            arm_crossing: 0.15,
            arm_opposition: 0.8,
            kick_side: 0.25,
            kick_window: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringConfig {
    pub cleaning: CleaningConfig,
    pub ball: BallConfig,
    pub segment: SegmentConfig,
    pub jump: JumpConfig,
    pub contact: ContactConfig,
    pub margins: MarginConfig,
}

impl ScoringConfig {
    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_override() {
        let cfg = ScoringConfig::from_json(br#"{"segment":{"d_min":5},"ball":{"threshold":30}}"#)
            .unwrap();
        assert_eq!(cfg.segment.d_min, 5);
        assert_eq!(cfg.segment.kick_launch_speed, 0.25);
        assert_eq!(cfg.ball.threshold, 30);
        assert_eq!(cfg.ball.min_area, 4);
        assert_eq!(cfg.jump.theta_scale, 0.5);
    }

    #[test]
    fn empty_is_default() {
        assert_eq!(
            ScoringConfig::from_json(b"{}").unwrap(),
            ScoringConfig::default()
        );
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(ScoringConfig::from_json(br#"{"jump":{"theta":1}}"#).is_err());
    }
}
