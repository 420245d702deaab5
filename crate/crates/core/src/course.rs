//! Course landmark geometry per camera view and layout validation.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, centroid, is_convex, signed_area, Containment, Point};
use crate::segmenter::ActionId;
use crate::trajectory::View;

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("malformed layout file: {0}")]
    MalformedFile(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hoop {
    pub id: u8,
    pub center: Point,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    pub id: u8,
    pub apex: Point,
    pub base: [Point; 3],
}

impl Cone {
    /// Circumradius of the base triangle.
    pub fn base_circumradius(&self) -> f64 {
        let [a, b, c] = self.base;
        let area = signed_area(&self.base).abs();
        if area == 0.0 {
            return 0.0;
        }
        a.dist(b) * b.dist(c) * c.dist(a) / (4.0 * area)
    }

    /// Radius of the disk around the apex in which a hand counts as touching.
    pub fn touch_radius(&self, scale: f64) -> f64 {
        scale * self.base_circumradius()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RectTarget {
    pub corners: [Point; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CourseLayout {
    pub view: View,
    pub hoops: Vec<Hoop>,
    pub cones: Vec<Cone>,
    pub rect: Option<RectTarget>,
    pub start_region: Vec<Point>,
    pub zones: BTreeMap<ActionId, Vec<Point>>,
}

impl CourseLayout {
    pub fn hoop(&self, id: u8) -> Option<&Hoop> {
        self.hoops.iter().find(|h| h.id == id)
    }

    pub fn cone(&self, id: u8) -> Option<&Cone> {
        self.cones.iter().find(|c| c.id == id)
    }

    pub fn zone(&self, action: ActionId) -> Option<&[Point]> {
        self.zones.get(&action).map(Vec::as_slice)
    }

    /// True when `p` is inside or on the boundary of the zone for `action`.
    pub fn in_zone(&self, action: ActionId, p: Point) -> bool {
        self.zone(action)
            .and_then(|z| geometry::point_in_polygon(p, z).ok())
            .is_some_and(|c| c != Containment::Outside)
    }

    pub fn scaled(&self, k: f64) -> CourseLayout {
        let sp = |p: Point| p * k;
        CourseLayout {
            view: self.view,
            hoops: self
                .hoops
                .iter()
                .map(|h| Hoop {
                    id: h.id,
                    center: sp(h.center),
                    radius: h.radius * k,
                })
                .collect(),
            cones: self
                .cones
                .iter()
                .map(|c| Cone {
                    id: c.id,
                    apex: sp(c.apex),
                    base: c.base.map(sp),
                })
                .collect(),
            rect: self.rect.as_ref().map(|r| RectTarget {
                corners: r.corners.map(sp),
            }),
            start_region: self.start_region.iter().copied().map(sp).collect(),
            zones: self
                .zones
                .iter()
                .map(|(a, z)| (*a, z.iter().copied().map(sp).collect()))
                .collect(),
        }
    }
}

/// Actions observed by each camera.
pub fn actions_for_view(view: View) -> &'static [u8] {
    match view {
        View::Front => &[1, 2, 3, 5, 6],
        View::Rear => &[4, 7],
    }
}

/// Returns the action whose zone contains `p`; the lowest id wins on overlap.
pub fn zone_of_point(layout: &CourseLayout, p: Point) -> Option<ActionId> {
    layout.zones.keys().copied().find(|&a| layout.in_zone(a, p))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub view: View,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_view(layout: &CourseLayout, expected: View, out: &mut Vec<String>) {
    if layout.view != expected {
        out.push(format!(
            "layout tagged {} used as {}",
            layout.view.as_str(),
            expected.as_str()
        ));
    }

    let mut hoop_ids = BTreeSet::new();
    for h in &layout.hoops {
        if !(1..=6).contains(&h.id) {
            out.push(format!("hoop id {} outside 1..6", h.id));
        }
        if !hoop_ids.insert(h.id) {
            out.push(format!("duplicate hoop id {}", h.id));
        }
        if !(h.radius > 0.0) {
            out.push(format!("hoop {} radius {} not positive", h.id, h.radius));
        }
    }
    let mut cone_ids = BTreeSet::new();
    for c in &layout.cones {
        if !(1..=6).contains(&c.id) {
            out.push(format!("cone id {} outside 1..6", c.id));
        }
        if !cone_ids.insert(c.id) {
            out.push(format!("duplicate cone id {}", c.id));
        }
        if signed_area(&c.base).abs() <= f64::EPSILON {
            out.push(format!("cone {} base triangle is degenerate", c.id));
        }
    }

    let (want_hoops, want_cones, want_rect): (usize, &[u8], bool) = match expected {
        View::Front => (6, &[1, 2, 3, 4], false),
        View::Rear => (0, &[2, 5, 6], true),
    };
    if expected == View::Front && layout.hoops.len() != want_hoops {
        out.push(format!(
            "hoop count {} \u{2260} {}",
            layout.hoops.len(),
            want_hoops
        ));
    }
    for id in want_cones {
        if !cone_ids.contains(id) {
            out.push(format!("cone {id} absent"));
        }
    }
    match &layout.rect {
        None if want_rect => out.push("rect target absent".into()),
        None => {}
        Some(r) => {
            if !is_convex(&r.corners) {
                out.push("rect target is not convex".into());
            } else if signed_area(&r.corners) <= 0.0 {
                out.push("rect target corners not counterclockwise".into());
            }
        }
    }

    if !is_convex(&layout.start_region) {
        out.push("start region is not a convex polygon".into());
    }
    let assigned = actions_for_view(expected);
    for &a in assigned {
        let id = ActionId::new(a).expect("static action id");
        match layout.zone(id) {
            None => out.push(format!("zone for action {a} absent")),
            Some(z) if !is_convex(z) => {
                out.push(format!("zone for action {a} is not a convex polygon"))
            }
            Some(_) => {}
        }
    }
    for a in layout.zones.keys() {
        if !assigned.contains(&a.get()) {
            out.push(format!(
                "zone for action {} not observed by the {} camera",
                a.get(),
                expected.as_str()
            ));
        }
    }

    // ordering: hoop 2 between hoops 1 and 3 along the course axis
    if let (Some(h1), Some(h2), Some(h3)) = (layout.hoop(1), layout.hoop(2), layout.hoop(3)) {
        let axis = h3.center - h1.center;
        let len2 = axis.dot(axis);
        let t = if len2 > 0.0 {
            (h2.center - h1.center).dot(axis) / len2
        } else {
            f64::NAN
        };
        if !(t > 0.0 && t < 1.0) {
            out.push("hoop centers 1..3 not monotone along the course".into());
        }
    }

    // ordering: each cone pair straddles the corridor of its action
    for (a, b, action) in [(1u8, 2u8, 2u8), (3, 4, 5), (5, 6, 7)] {
        let (Some(ca), Some(cb)) = (layout.cone(a), layout.cone(b)) else {
            continue;
        };
        let Some(zone) = ActionId::new(action).and_then(|id| layout.zone(id)) else {
            continue;
        };
        let c = centroid(zone);
        let ab = cb.apex - ca.apex;
        if !((ca.apex - c).dot(ab) < 0.0 && (cb.apex - c).dot(ab) > 0.0) {
            out.push(format!(
                "cones {a} and {b} not on opposite sides of the action {action} corridor"
            ));
        }
    }
}

/// Checks landmark counts, ids, shapes and ordering for both views.
pub fn validate_layout(front: &CourseLayout, rear: &CourseLayout) -> ValidationReport {
    let mut violations = Vec::new();
    for (layout, view) in [(front, View::Front), (rear, View::Rear)] {
        let mut msgs = Vec::new();
        check_view(layout, view, &mut msgs);
        violations.extend(msgs.into_iter().map(|message| Violation { view, message }));
    }
    violations.sort();
    ValidationReport { violations }
}

#[derive(Serialize, Deserialize)]
struct RawHoop {
    id: u8,
    cx: f64,
    cy: f64,
    r: f64,
}

#[derive(Serialize, Deserialize)]
struct RawCone {
    id: u8,
    apex: Point,
    base: [Point; 3],
}

#[derive(Serialize, Deserialize)]
struct RawLayout {
    view: View,
    hoops: Vec<RawHoop>,
    cones: Vec<RawCone>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rect: Option<[Point; 4]>,
    start: Vec<Point>,
    zones: BTreeMap<String, Vec<Point>>,
}

pub fn parse_layout(bytes: &[u8]) -> Result<CourseLayout, LayoutError> {
    let raw: RawLayout =
        serde_json::from_slice(bytes).map_err(|e| LayoutError::MalformedFile(e.to_string()))?;
    let mut zones = BTreeMap::new();
    for (k, poly) in raw.zones {
        let id = k
            .parse::<u8>()
            .ok()
            .and_then(ActionId::new)
            .ok_or_else(|| LayoutError::MalformedFile(format!("bad zone key {k:?}")))?;
        zones.insert(id, poly);
    }
    Ok(CourseLayout {
        view: raw.view,
        hoops: raw
            .hoops
            .into_iter()
            .map(|h| Hoop {
                id: h.id,
                center: Point::new(h.cx, h.cy),
                radius: h.r,
            })
            .collect(),
        cones: raw
            .cones
            .into_iter()
            .map(|c| Cone {
                id: c.id,
                apex: c.apex,
                base: c.base,
            })
            .collect(),
        rect: raw.rect.map(|corners| RectTarget { corners }),
        start_region: raw.start,
        zones,
    })
}

pub fn write_layout(layout: &CourseLayout) -> String {
    let raw = RawLayout {
        view: layout.view,
        hoops: layout
            .hoops
            .iter()
            .map(|h| RawHoop {
                id: h.id,
                cx: h.center.x,
                cy: h.center.y,
                r: h.radius,
            })
            .collect(),
        cones: layout
            .cones
            .iter()
            .map(|c| RawCone {
                id: c.id,
                apex: c.apex,
                base: c.base,
            })
            .collect(),
        rect: layout.rect.as_ref().map(|r| r.corners),
        start: layout.start_region.clone(),
        zones: layout
            .zones
            .iter()
            .map(|(a, z)| (a.get().to_string(), z.clone()))
            .collect(),
    };
    serde_json::to_string(&raw).expect("layout serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::canonical_layouts;

    #[test]
    fn canonical_layout_is_valid() {
        let (front, rear) = canonical_layouts();
        let report = validate_layout(&front, &rear);
        assert!(report.is_ok(), "{:?}", report.violations);
    }

    #[test]
    fn five_hoops_flagged() {
        let (mut front, rear) = canonical_layouts();
        front.hoops.pop();
        let report = validate_layout(&front, &rear);
        assert!(report
            .violations
            .iter()
            .any(|v| v.message == "hoop count 5 \u{2260} 6"));
    }

    #[test]
    fn missing_rect_flagged() {
        let (front, mut rear) = canonical_layouts();
        rear.rect = None;
        let report = validate_layout(&front, &rear);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].message, "rect target absent");
    }

    #[test]
    fn swapped_hoops_break_ordering() {
        let (mut front, rear) = canonical_layouts();
        let c1 = front.hoops[0].center;
        front.hoops[0].center = front.hoops[1].center;
        front.hoops[1].center = c1;
        let report = validate_layout(&front, &rear);
        assert!(report
            .violations
            .iter()
            .any(|v| v.message.contains("monotone")));
    }

    #[test]
    fn landmark_order_does_not_matter() {
        let (mut front, mut rear) = canonical_layouts();
        front.hoops.pop();
        let base = validate_layout(&front, &rear);
        front.hoops.reverse();
        front.cones.reverse();
        rear.cones.reverse();
        assert_eq!(validate_layout(&front, &rear), base);
    }

    #[test]
    fn zone_lookup() {
        let (front, _) = canonical_layouts();
        let h2 = front.hoop(2).unwrap().center;
        assert_eq!(zone_of_point(&front, h2), ActionId::new(1));
        assert_eq!(zone_of_point(&front, Point::new(-500.0, -500.0)), None);
        let c3 = front.cone(3).unwrap().apex;
        let c4 = front.cone(4).unwrap().apex;
        // corridor between cones 3 and 4, at ground level
        let mid = c3.midpoint(c4) + Point::new(0.0, 20.0);
        assert_eq!(zone_of_point(&front, mid), ActionId::new(5));
    }

    #[test]
    fn layout_file_round_trip() {
        let (front, rear) = canonical_layouts();
        for l in [front, rear] {
            let text = write_layout(&l);
            assert_eq!(parse_layout(text.as_bytes()).unwrap(), l);
        }
    }

    #[test]
    fn bad_zone_key_rejected() {
        let text = r#"{"view":"front","hoops":[],"cones":[],"start":[],"zones":{"9":[]}}"#;
        assert!(parse_layout(text.as_bytes()).is_err());
    }

    #[test]
    fn touch_radius_scales_circumradius() {
        let c = Cone {
            id: 1,
            apex: Point::new(0.0, -10.0),
            base: [
                Point::new(-1.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0),
            ],
        };
        // right angle at (0,1): hypotenuse 2 -> circumradius 1
        assert!((c.base_circumradius() - 1.0).abs() < 1e-12);
        assert!((c.touch_radius(1.5) - 1.5).abs() < 1e-12);
    }
}
