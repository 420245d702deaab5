//! Ball localisation from low-resolution grayscale grids by three-frame
//! differencing, plus the precomputed-track passthrough.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BallError {
    #[error("grid dimensions differ: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize), (usize, usize)),
    #[error("threshold must be in 1..=254 and min_area >= 1 (got {threshold}, {min_area})")]
    InvalidParams { threshold: u8, min_area: usize },
    #[error("malformed grid file: {0}")]
    MalformedGridFile(String),
    #[error("malformed ball track file: {0}")]
    MalformedTrackFile(String),
}

/// Row-major grayscale frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameGrid {
    pub width: usize,
    pub height: usize,
    pub values: Vec<u8>,
}

impl FrameGrid {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Option<Self> {
        (width * height == values.len()).then_some(Self {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, v: u8) -> Self {
        Self {
            width,
            height,
            values: vec![v; width * height],
        }
    }

    fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

/// Per-frame ball centroid in the owning view's pixel coordinates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BallTrack {
    pub samples: BTreeMap<i64, Option<Point>>,
}

impl BallTrack {
    pub fn get(&self, frame: i64) -> Option<Point> {
        self.samples.get(&frame).copied().flatten()
    }

    /// Observed positions with frame index in `[start, end]`.
    pub fn observed_in(&self, start: i64, end: i64) -> impl Iterator<Item = (i64, Point)> + '_ {
        self.samples
            .range(start..=end)
            .filter_map(|(&f, p)| p.map(|p| (f, p)))
    }

    pub fn observed_count(&self) -> usize {
        self.samples.values().filter(|p| p.is_some()).count()
    }
}

/// Placement of a grid in image pixels: cell `(c, r)` maps to
/// `origin + (c, r) * cell_px`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMapping {
    pub origin: Point,
    pub cell_px: f64,
}

impl GridMapping {
    pub fn to_pixels(&self, cell: Point) -> Point {
        self.origin + cell * self.cell_px
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BallSource {
    Precomputed(BallTrack),
    /// Grid `k` shows frame `first_frame + k`.
    Grids {
        grids: Vec<FrameGrid>,
        first_frame: i64,
        mapping: GridMapping,
    },
}

impl BallSource {
    pub fn scaled(&self, k: f64) -> BallSource {
        match self {
            BallSource::Precomputed(t) => BallSource::Precomputed(BallTrack {
                samples: t
                    .samples
                    .iter()
                    .map(|(&f, p)| (f, p.map(|p| p * k)))
                    .collect(),
            }),
            BallSource::Grids {
                grids,
                first_frame,
                mapping,
            } => BallSource::Grids {
                grids: grids.clone(),
                first_frame: *first_frame,
                mapping: GridMapping {
                    origin: mapping.origin * k,
                    cell_px: mapping.cell_px * k,
                },
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BallConfig {
    pub threshold: u8,
    pub min_area: usize,
}

impl Default for BallConfig {
    fn default() -> Self {
        Self {
            threshold: 25,
            min_area: 4,
        }
    }
}

struct Component {
    area: usize,
    sum_c: f64,
    sum_r: f64,
    top: usize,
    left: usize,
    /// Summed brightness of the middle frame over both neighbours.
    contrast: i64,
}

/// Motion blob centroid (cell coordinates) of the middle frame.
///
/// The mask is the AND of the thresholded absolute differences of both
/// consecutive pairs. Only components where the middle frame is brighter
/// than its neighbours count (the ball is the bright object; the other
/// components are the vacated and the upcoming position). The largest
/// 4-connected component of at least `min_area` cells wins, ties going to
/// the smaller top-left corner.
pub fn three_frame_diff(
    prev: &FrameGrid,
    cur: &FrameGrid,
    next: &FrameGrid,
    threshold: u8,
    min_area: usize,
) -> Result<Option<Point>, BallError> {
    if threshold == 0 || threshold == 255 || min_area == 0 {
        return Err(BallError::InvalidParams {
            threshold,
            min_area,
        });
    }
    for g in [prev, next] {
        if g.dims() != cur.dims() {
            return Err(BallError::DimensionMismatch(g.dims(), cur.dims()));
        }
    }
    let (w, h) = cur.dims();
    let mask: Vec<bool> = (0..w * h)
        .map(|i| {
            let d1 = cur.values[i].abs_diff(prev.values[i]);
            let d2 = next.values[i].abs_diff(cur.values[i]);
            d1 >= threshold && d2 >= threshold
        })
        .collect();

    let mut seen = vec![false; w * h];
    let mut best: Option<Component> = None;
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut comp = Component {
            area: 0,
            sum_c: 0.0,
            sum_r: 0.0,
            top: usize::MAX,
            left: usize::MAX,
            contrast: 0,
        };
        while let Some(i) = queue.pop_front() {
            let (c, r) = (i % w, i / w);
            comp.area += 1;
            comp.sum_c += c as f64;
            comp.sum_r += r as f64;
            comp.top = comp.top.min(r);
            comp.left = comp.left.min(c);
            comp.contrast +=
                2 * cur.values[i] as i64 - prev.values[i] as i64 - next.values[i] as i64;
            let mut visit = |j: usize| {
                if mask[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if c > 0 {
                visit(i - 1);
            }
            if c + 1 < w {
                visit(i + 1);
            }
            if r > 0 {
                visit(i - w);
            }
            if r + 1 < h {
                visit(i + w);
            }
        }
        if comp.area < min_area || comp.contrast <= 0 {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => {
                comp.area > b.area
                    || (comp.area == b.area && (comp.top, comp.left) < (b.top, b.left))
            }
        };
        if better {
            best = Some(comp);
        }
    }
    Ok(best.map(|c| Point::new(c.sum_c / c.area as f64, c.sum_r / c.area as f64)))
}

/// Resolves a ball source into a per-frame track.
pub fn extract_ball_track(src: &BallSource, cfg: &BallConfig) -> Result<BallTrack, BallError> {
    match src {
        BallSource::Precomputed(t) => Ok(t.clone()),
        BallSource::Grids {
            grids,
            first_frame,
            mapping,
        } => {
            let mut samples = BTreeMap::new();
            if grids.len() < 3 {
                return Ok(BallTrack { samples });
            }
            let mut found: Vec<Option<Point>> = Vec::with_capacity(grids.len() - 2);
            for w in grids.windows(3) {
                let p = three_frame_diff(&w[0], &w[1], &w[2], cfg.threshold, cfg.min_area)?;
                found.push(p.map(|c| mapping.to_pixels(c)));
            }
            // fill isolated one-frame gaps
            for i in 1..found.len().saturating_sub(1) {
                if found[i].is_none() {
                    if let (Some(a), Some(b)) = (found[i - 1], found[i + 1]) {
                        found[i] = Some(a.midpoint(b));
                    }
                }
            }
            for (k, p) in found.into_iter().enumerate() {
                samples.insert(first_frame + 1 + k as i64, p);
            }
            Ok(BallTrack { samples })
        }
    }
}

/// Reads the binary grid file: little-endian `u16 width, u16 height,
/// u32 frame_count`, then `frame_count` raw frames.
pub fn read_grids(bytes: &[u8]) -> Result<Vec<FrameGrid>, BallError> {
    if bytes.len() < 8 {
        return Err(BallError::MalformedGridFile("header truncated".into()));
    }
    let w = u16::from_le_bytes([bytes[0], bytes[1]]) as usize;
    let h = u16::from_le_bytes([bytes[2], bytes[3]]) as usize;
    let n = u32::from_le_bytes([bytes[4], bytes[5], bytes[6], bytes[7]]) as usize;
    let body = &bytes[8..];
    let size = w * h;
    if body.len() != size * n {
        return Err(BallError::MalformedGridFile(format!(
            "expected {} payload bytes, found {}",
            size * n,
            body.len()
        )));
    }
    Ok(body
        .chunks(size.max(1))
        .take(n)
        .map(|c| FrameGrid {
            width: w,
            height: h,
            values: c.to_vec(),
        })
        .collect())
}

pub fn write_grids(grids: &[FrameGrid]) -> Result<Vec<u8>, BallError> {
    let (w, h) = grids.first().map(|g| g.dims()).unwrap_or((0, 0));
    let mut out = Vec::with_capacity(8 + w * h * grids.len());
    let w16 = u16::try_from(w).map_err(|_| BallError::MalformedGridFile("width".into()))?;
    let h16 = u16::try_from(h).map_err(|_| BallError::MalformedGridFile("height".into()))?;
    out.extend_from_slice(&w16.to_le_bytes());
    out.extend_from_slice(&h16.to_le_bytes());
    out.extend_from_slice(&(grids.len() as u32).to_le_bytes());
    for g in grids {
        if g.dims() != (w, h) {
            return Err(BallError::DimensionMismatch(g.dims(), (w, h)));
        }
        out.extend_from_slice(&g.values);
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct RawTrack {
    frames: BTreeMap<String, Option<Point>>,
}

pub fn parse_ball_track(bytes: &[u8]) -> Result<BallTrack, BallError> {
    let raw: RawTrack =
        serde_json::from_slice(bytes).map_err(|e| BallError::MalformedTrackFile(e.to_string()))?;
    let mut samples = BTreeMap::new();
    for (k, p) in raw.frames {
        let f: i64 = k
            .parse()
            .map_err(|_| BallError::MalformedTrackFile(format!("bad frame key {k:?}")))?;
        samples.insert(f, p);
    }
    Ok(BallTrack { samples })
}

pub fn write_ball_track(t: &BallTrack) -> String {
    // keys in numeric order
    let mut out = String::from("{\"frames\":{");
    for (i, (f, p)) in t.samples.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("\"{f}\":"));
        out.push_str(&serde_json::to_string(p).expect("point serializes"));
    }
    out.push_str("}}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob_grid(centers: &[(usize, usize, usize)]) -> FrameGrid {
        // (col, row, half-size) squares on a dark 64x64 background
        let mut g = FrameGrid::filled(64, 64, 20);
        for &(c, r, half) in centers {
            for y in r - half..=r + half {
                for x in c - half..=c + half {
                    g.values[y * 64 + x] = 200;
                }
            }
        }
        g
    }

    #[test]
    fn static_scene_has_no_detection() {
        let g = blob_grid(&[(30, 30, 1)]);
        assert_eq!(three_frame_diff(&g, &g, &g, 25, 4).unwrap(), None);
    }

    #[test]
    fn moving_blob_centroid() {
        let f0 = blob_grid(&[(10, 20, 1)]);
        let f1 = blob_grid(&[(14, 20, 1)]);
        let f2 = blob_grid(&[(18, 20, 1)]);
        let p = three_frame_diff(&f0, &f1, &f2, 25, 4).unwrap().unwrap();
        assert!(p.dist(Point::new(14.0, 20.0)) <= 2.0, "{p:?}");
    }

    #[test]
    fn larger_of_two_blobs_wins() {
        let f0 = blob_grid(&[(10, 10, 1), (40, 40, 2)]);
        let f1 = blob_grid(&[(16, 10, 1), (48, 40, 2)]);
        let f2 = blob_grid(&[(22, 10, 1), (56, 40, 2)]);
        let p = three_frame_diff(&f0, &f1, &f2, 25, 4).unwrap().unwrap();
        assert!(p.dist(Point::new(48.0, 40.0)) <= 2.0, "{p:?}");
    }

    #[test]
    fn dimension_mismatch() {
        let a = FrameGrid::filled(8, 8, 0);
        let b = FrameGrid::filled(8, 9, 0);
        assert!(matches!(
            three_frame_diff(&a, &a, &b, 25, 4),
            Err(BallError::DimensionMismatch(..))
        ));
        assert!(three_frame_diff(&a, &a, &a, 0, 4).is_err());
    }

    #[test]
    fn precomputed_passthrough_and_static_grids() {
        let mut t = BallTrack::default();
        t.samples.insert(3, Some(Point::new(1.0, 2.0)));
        t.samples.insert(4, None);
        let src = BallSource::Precomputed(t.clone());
        assert_eq!(extract_ball_track(&src, &BallConfig::default()).unwrap(), t);

        let grids = vec![blob_grid(&[(30, 30, 1)]); 10];
        let src = BallSource::Grids {
            grids,
            first_frame: 0,
            mapping: GridMapping {
                origin: Point::new(0.0, 0.0),
                cell_px: 1.0,
            },
        };
        let track = extract_ball_track(&src, &BallConfig::default()).unwrap();
        assert_eq!(track.observed_count(), 0);
    }

    #[test]
    fn grid_file_round_trip() {
        let grids = vec![blob_grid(&[(5, 5, 1)]), blob_grid(&[(9, 5, 1)])];
        let bytes = write_grids(&grids).unwrap();
        assert_eq!(&bytes[..8], &[64, 0, 64, 0, 2, 0, 0, 0]);
        assert_eq!(read_grids(&bytes).unwrap(), grids);
        assert!(read_grids(&bytes[..100]).is_err());
    }

    #[test]
    fn track_file_round_trip() {
        let mut t = BallTrack::default();
        t.samples.insert(12, Some(Point::new(1.5, -2.0)));
        t.samples.insert(2, None);
        let text = write_ball_track(&t);
        assert_eq!(text, r#"{"frames":{"2":null,"12":[1.5,-2.0]}}"#);
        assert_eq!(parse_ball_track(text.as_bytes()).unwrap(), t);
    }
}
