//! Low-resolution intensity grids showing a bright ball on a dark field.

use rand::Rng;

use super::SynthError;
use crate::balltrack::FrameGrid;
use crate::geometry::Point;

pub const BACKGROUND: u8 = 20;
const PEAK: f64 = 180.0;
const NOISE_MAX: u8 = 5;

/// One grid per path entry. Positions are in cell coordinates; `None` draws
/// an empty field.
pub fn generate_ball_grids<R: Rng>(
    path: &[Option<Point>],
    width: usize,
    height: usize,
    sigma: f64,
    rng: &mut R,
) -> Result<Vec<FrameGrid>, SynthError> {
    let mut out = Vec::with_capacity(path.len());
    for (k, p) in path.iter().enumerate() {
        if let Some(p) = p {
            let inside =
                p.x >= 0.0 && p.y >= 0.0 && p.x <= (width - 1) as f64 && p.y <= (height - 1) as f64;
            if !inside || !p.is_finite() {
                return Err(SynthError::PathOutOfBounds {
                    frame: k,
                    x: p.x,
                    y: p.y,
                });
            }
        }
        let mut values = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                let mut v = BACKGROUND as f64;
                if let Some(p) = p {
                    let d2 = (c as f64 - p.x).powi(2) + (r as f64 - p.y).powi(2);
                    v += PEAK * (-d2 / (2.0 * sigma * sigma)).exp();
                }
                let n = rng.random_range(0..=NOISE_MAX) as f64;
                values.push((v + n).round().clamp(0.0, 255.0) as u8);
            }
        }
        out.push(FrameGrid::new(width, height, values).expect("sized grid"));
    }
    Ok(out)
}
