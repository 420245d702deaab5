//! Geometric and signal kernels shared by every criterion evaluator.
//!
//! All coordinates are image pixels with `y` growing downward, so an upward
//! displacement is a decrease in `y`.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Distance below which a point is classified as lying on a boundary.
pub const BOUNDARY_EPS: f64 = 1e-9;

/// Window (frames) of the rolling median used as the ground baseline.
pub const BASELINE_WINDOW: usize = 15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),
    #[error("non-positive radius {0}")]
    NonPositiveRadius(f64),
    #[error("series too short: {len} samples, need at least 3")]
    SeriesTooShort { len: usize },
    #[error("invalid jump parameters: theta={theta}, k_min={k_min}")]
    InvalidJumpParams { theta: f64, k_min: usize },
}

/// A 2D point in image pixels. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn midpoint(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    /// Unit vector, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Point> {
        let n = self.norm();
        (n > 1e-12).then(|| self * (1.0 / n))
    }

    /// Counterclockwise perpendicular in a y-up frame.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from(a: [f64; 2]) -> Self {
        Point::new(a[0], a[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// Result of a containment query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Containment {
    Inside,
    OnBoundary,
    Outside,
}

impl Containment {
    pub fn is_inside(self) -> bool {
        self == Containment::Inside
    }
}

/// Shoelace signed area; positive for counterclockwise order in a y-up frame.
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += poly[i].cross(poly[(i + 1) % n]);
    }
    0.5 * acc
}

pub fn centroid(poly: &[Point]) -> Point {
    let n = poly.len().max(1) as f64;
    let s = poly.iter().fold(Point::default(), |a, &p| a + p);
    s * (1.0 / n)
}

/// Distance from `p` to the closed segment `a`-`b`.
pub fn distance_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

fn check_polygon(poly: &[Point]) -> Result<(), GeometryError> {
    if poly.len() < 3 {
        return Err(GeometryError::DegeneratePolygon(format!(
            "{} vertices",
            poly.len()
        )));
    }
    if signed_area(poly).abs() <= f64::EPSILON {
        return Err(GeometryError::DegeneratePolygon("zero area".into()));
    }
    Ok(())
}

/// Even-odd ray casting with an explicit boundary band of [`BOUNDARY_EPS`].
pub fn point_in_polygon(p: Point, poly: &[Point]) -> Result<Containment, GeometryError> {
    check_polygon(poly)?;
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if distance_to_segment(p, a, b) < BOUNDARY_EPS {
            return Ok(Containment::OnBoundary);
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    Ok(if inside {
        Containment::Inside
    } else {
        Containment::Outside
    })
}

/// Classification by the signed distance `|p - c| - r`.
pub fn point_in_circle(p: Point, c: Point, r: f64) -> Result<Containment, GeometryError> {
    if !(r > 0.0) {
        return Err(GeometryError::NonPositiveRadius(r));
    }
    let d = p.dist(c) - r;
    Ok(if d.abs() < BOUNDARY_EPS {
        Containment::OnBoundary
    } else if d < 0.0 {
        Containment::Inside
    } else {
        Containment::Outside
    })
}

/// Sign of the turn `a -> b -> c`: 1, -1 or 0 for collinear.
pub fn orientation(a: Point, b: Point, c: Point) -> i8 {
    let v = (b - a).cross(c - a);
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// True iff the closed segments `a1-a2` and `b1-b2` share at least one point.
pub fn segments_intersect(a1: Point, a2: Point, b1: Point, b2: Point) -> bool {
    let o1 = orientation(a1, a2, b1);
    let o2 = orientation(a1, a2, b2);
    let o3 = orientation(b1, b2, a1);
    let o4 = orientation(b1, b2, a2);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    if o1 == 0 && on_segment(b1, a1, a2) {
        return true;
    }
    if o2 == 0 && on_segment(b2, a1, a2) {
        return true;
    }
    if o3 == 0 && on_segment(a1, b1, b2) {
        return true;
    }
    if o4 == 0 && on_segment(a2, b1, b2) {
        return true;
    }
    false
}

/// Convex hull (Andrew's monotone chain), counterclockwise in a y-up frame.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && (lower[lower.len() - 1] - lower[lower.len() - 2]).cross(p - lower[lower.len() - 2])
                <= 0.0
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && (upper[upper.len() - 1] - upper[upper.len() - 2]).cross(p - upper[upper.len() - 2])
                <= 0.0
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Distance from `p` to the convex hull of `points`; zero when inside.
/// Degenerate hulls (fewer than three distinct points) fall back to the
/// distance to their segment or point.
pub fn distance_to_hull(p: Point, points: &[Point]) -> f64 {
    let hull = convex_hull(points);
    match hull.len() {
        0 => f64::INFINITY,
        1 => p.dist(hull[0]),
        2 => distance_to_segment(p, hull[0], hull[1]),
        n => {
            if let Ok(Containment::Inside | Containment::OnBoundary) = point_in_polygon(p, &hull) {
                return 0.0;
            }
            (0..n)
                .map(|i| distance_to_segment(p, hull[i], hull[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// True when all consecutive turns share one sign (and the polygon has area).
pub fn is_convex(poly: &[Point]) -> bool {
    if check_polygon(poly).is_err() {
        return false;
    }
    let n = poly.len();
    let mut sign = 0i8;
    for i in 0..n {
        let o = orientation(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]);
        if o == 0 {
            continue;
        }
        if sign == 0 {
            sign = o;
        } else if o != sign {
            return false;
        }
    }
    sign != 0
}

/// Median of a slice (upper median for even lengths is not used; the lower
/// of the two middle values is returned so the result is always a sample).
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    Some(values[(values.len() - 1) / 2])
}

/// Centered rolling median, window clipped at the series ends.
pub fn rolling_median(series: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let n = series.len();
    let mut buf = Vec::with_capacity(window);
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            buf.clear();
            buf.extend_from_slice(&series[lo..hi]);
            median(&mut buf).unwrap_or(series[i])
        })
        .collect()
}

/// One airborne interval of an ankle series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    pub takeoff_frame: i64,
    pub landing_frame: i64,
    /// Largest upward displacement from the baseline, pixels.
    pub peak_rise: f64,
    /// Ankle position at the landing frame.
    pub landing_point: Point,
}

/// Detects jumps in a per-frame ankle track `(frame, position)`.
///
/// The baseline is a rolling median over [`BASELINE_WINDOW`] frames; an event
/// is a maximal run of at least `k_min` samples rising at least `theta`
/// pixels above it. Takeoff and landing are the samples bracketing the run.
pub fn detect_jump_events(
    track: &[(i64, Point)],
    theta: f64,
    k_min: usize,
) -> Result<Vec<JumpEvent>, GeometryError> {
    detect_jump_events_windowed(track, theta, k_min, BASELINE_WINDOW)
}

/// [`detect_jump_events`] with an explicit baseline window, for frame rates
/// other than 30 fps.
pub fn detect_jump_events_windowed(
    track: &[(i64, Point)],
    theta: f64,
    k_min: usize,
    window: usize,
) -> Result<Vec<JumpEvent>, GeometryError> {
    if track.len() < 3 {
        return Err(GeometryError::SeriesTooShort { len: track.len() });
    }
    if !(theta > 0.0) || k_min == 0 {
        return Err(GeometryError::InvalidJumpParams { theta, k_min });
    }
    let ys: Vec<f64> = track.iter().map(|(_, p)| p.y).collect();
    let baseline = rolling_median(&ys, window.max(1));
    let rise: Vec<f64> = baseline.iter().zip(&ys).map(|(b, y)| b - y).collect();

    let n = track.len();
    let mut events = Vec::new();
    let mut i = 0;
    while i < n {
        if rise[i] < theta {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && rise[i] >= theta {
            i += 1;
        }
        let end = i - 1;
        if end - start + 1 >= k_min {
            let before = start.saturating_sub(1);
            let after = (end + 1).min(n - 1);
            let peak = rise[start..=end].iter().copied().fold(f64::MIN, f64::max);
            events.push(JumpEvent {
                takeoff_frame: track[before].0,
                landing_frame: track[after].0,
                peak_rise: peak,
                landing_point: track[after].1,
            });
        }
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ]
    }

    #[test]
    fn square_center_and_vertex() {
        let sq = square();
        assert_eq!(
            point_in_polygon(Point::new(0.5, 0.5), &sq).unwrap(),
            Containment::Inside
        );
        assert_eq!(
            point_in_polygon(Point::new(1.0, 1.0), &sq).unwrap(),
            Containment::OnBoundary
        );
        assert_eq!(
            point_in_polygon(Point::new(0.5, 0.0), &sq).unwrap(),
            Containment::OnBoundary
        );
        assert_eq!(
            point_in_polygon(Point::new(1.5, 0.5), &sq).unwrap(),
            Containment::Outside
        );
    }

    #[test]
    fn degenerate_polygons_rejected() {
        let two = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        assert!(matches!(
            point_in_polygon(Point::new(0.0, 0.0), &two),
            Err(GeometryError::DegeneratePolygon(_))
        ));
        let flat = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
        ];
        assert!(point_in_polygon(Point::new(0.0, 1.0), &flat).is_err());
    }

    #[test]
    fn circle_cases() {
        let c = Point::new(3.0, 4.0);
        assert_eq!(point_in_circle(c, c, 2.0).unwrap(), Containment::Inside);
        assert_eq!(
            point_in_circle(Point::new(5.0, 4.0), c, 2.0).unwrap(),
            Containment::OnBoundary
        );
        assert_eq!(
            point_in_circle(Point::new(9.0, 4.0), c, 2.0).unwrap(),
            Containment::Outside
        );
        assert!(matches!(
            point_in_circle(c, c, 0.0),
            Err(GeometryError::NonPositiveRadius(_))
        ));
    }

    #[test]
    fn segment_cases() {
        let p = Point::new;
        assert!(segments_intersect(
            p(0., 0.),
            p(1., 1.),
            p(0., 1.),
            p(1., 0.)
        ));
        assert!(!segments_intersect(
            p(0., 0.),
            p(1., 0.),
            p(0., 1.),
            p(1., 1.)
        ));
        // collinear overlap and collinear disjoint
        assert!(segments_intersect(
            p(0., 0.),
            p(2., 0.),
            p(1., 0.),
            p(3., 0.)
        ));
        assert!(!segments_intersect(
            p(0., 0.),
            p(1., 0.),
            p(2., 0.),
            p(3., 0.)
        ));
        // T-junction touching
        assert!(segments_intersect(
            p(0., 0.),
            p(2., 0.),
            p(1., 0.),
            p(1., 5.)
        ));
    }

    #[test]
    fn hull_distance() {
        let pts = square();
        assert_eq!(distance_to_hull(Point::new(0.5, 0.5), &pts), 0.0);
        assert!((distance_to_hull(Point::new(3.0, 0.5), &pts) - 2.0).abs() < 1e-12);
        let line = vec![Point::new(0.0, 0.0), Point::new(0.0, 2.0)];
        assert!((distance_to_hull(Point::new(1.0, 1.0), &line) - 1.0).abs() < 1e-12);
    }

    fn series(ys: &[f64]) -> Vec<(i64, Point)> {
        ys.iter()
            .enumerate()
            .map(|(i, &y)| (i as i64, Point::new(i as f64, y)))
            .collect()
    }

    #[test]
    fn constant_series_has_no_events() {
        let t = series(&[500.0; 60]);
        assert!(detect_jump_events(&t, 10.0, 3).unwrap().is_empty());
    }

    #[test]
    fn single_triangular_bump() {
        // rise 2*theta over 6 frames starting at frame 20, short enough to
        // leave the median baseline alone
        let theta = 10.0;
        let mut ys = vec![500.0; 60];
        let bump = [5.0, 10.0, 20.0, 20.0, 10.0, 5.0];
        for (k, r) in bump.iter().enumerate() {
            ys[20 + k] -= r;
        }
        let ev = detect_jump_events(&series(&ys), theta, 3).unwrap();
        assert_eq!(ev.len(), 1);
        // frames 21..=24 reach theta
        assert_eq!(ev[0].takeoff_frame, 20, "{:?}", ev[0]);
        assert_eq!(ev[0].landing_frame, 25, "{:?}", ev[0]);
        assert_eq!(ev[0].peak_rise, 20.0);
    }

    #[test]
    fn too_short_and_bad_params() {
        assert!(matches!(
            detect_jump_events(&series(&[1.0, 2.0]), 1.0, 1),
            Err(GeometryError::SeriesTooShort { len: 2 })
        ));
        assert!(detect_jump_events(&series(&[1.0; 5]), 0.0, 1).is_err());
        assert!(detect_jump_events(&series(&[1.0; 5]), 1.0, 0).is_err());
    }

    #[test]
    fn convexity() {
        assert!(is_convex(&square()));
        let dart = vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(0.0, 2.0),
            Point::new(1.0, 1.0),
        ];
        assert!(!is_convex(&dart));
    }
}
