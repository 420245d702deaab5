//! Completion time to time score.

use super::ScoreError;

/// Lower edges (seconds) of the bands below the top score. Each edge passed
/// costs one point.
pub const BAND_EDGES: [f64; 13] = [
    14.0, 15.0, 16.0, 17.0, 18.0, 19.0, 20.0, 21.0, 22.0, 24.0, 26.0, 28.0, 30.0,
];

pub fn time_score_from_seconds(t: f64) -> Result<u8, ScoreError> {
    if !(t >= 0.0) {
        return Err(ScoreError::NegativeTime(t));
    }
    let passed = BAND_EDGES.iter().filter(|&&e| t >= e).count();
    Ok(14 - passed as u8)
}

/// Same bands evaluated as `frames >= edge * fps`, which keeps the edges
/// exact for integral frame rates.
pub fn time_score_from_frames(frames: i64, fps: f64) -> Result<u8, ScoreError> {
    if frames < 0 {
        return Err(ScoreError::NegativeTime(frames as f64 / fps));
    }
    if !(fps > 0.0) {
        return Err(ScoreError::NonPositiveFps(fps));
    }
    let f = frames as f64;
    let passed = BAND_EDGES.iter().filter(|&&e| f >= e * fps).count();
    Ok(14 - passed as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_examples() {
        assert_eq!(time_score_from_frames(419, 30.0).unwrap(), 14);
        assert_eq!(time_score_from_frames(450, 30.0).unwrap(), 12);
        assert_eq!(time_score_from_frames(900, 30.0).unwrap(), 1);
        assert_eq!(time_score_from_frames(720, 30.0).unwrap(), 4);
        assert_eq!(time_score_from_frames(719, 30.0).unwrap(), 5);
    }

    #[test]
    fn seconds_edges() {
        assert_eq!(time_score_from_seconds(13.999).unwrap(), 14);
        assert_eq!(time_score_from_seconds(14.0).unwrap(), 13);
        assert_eq!(time_score_from_seconds(23.9).unwrap(), 5);
        assert_eq!(time_score_from_seconds(0.0).unwrap(), 14);
        assert_eq!(time_score_from_seconds(1e6).unwrap(), 1);
    }

    #[test]
    fn negative_rejected() {
        assert!(matches!(
            time_score_from_seconds(-0.1),
            Err(ScoreError::NegativeTime(_))
        ));
        assert!(time_score_from_seconds(f64::NAN).is_err());
        assert!(time_score_from_frames(-1, 30.0).is_err());
    }
}
