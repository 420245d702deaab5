//! Course geometry in metres and the two camera projections.
//!
//! World axes: `X` runs along the course, `Z` across it (away from the front
//! camera), `h` is height above the ground.

use std::collections::BTreeMap;

use crate::course::{Cone, CourseLayout, Hoop, RectTarget};
use crate::geometry::Point;
use crate::segmenter::ActionId;
use crate::trajectory::View;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct W3 {
    pub x: f64,
    pub z: f64,
    pub h: f64,
}

impl W3 {
    pub const fn new(x: f64, z: f64, h: f64) -> Self {
        Self { x, z, h }
    }
}

pub fn project(view: View, p: W3) -> Point {
    match view {
        View::Front => Point::new(
            80.0 + 180.0 * p.x,
            1000.0 - 150.0 * p.z - 200.0 * p.h * (1.0 - 0.08 * p.z),
        ),
        View::Rear => Point::new(
            1840.0 - 180.0 * p.x,
            560.0 + 150.0 * p.z - 200.0 * p.h * (0.84 + 0.08 * p.z),
        ),
    }
}

pub const HOOP_X: [f64; 6] = [1.6, 2.2, 2.8, 3.4, 4.0, 4.6];
pub const HOOP_Z: f64 = 0.5;
pub const HOOP_RADIUS_PX: f64 = 48.0;

/// Cone ground positions, ids 1 to 6.
pub const CONES: [(f64, f64); 6] = [
    (5.8, 0.5),
    (7.8, 0.5),
    (6.0, 1.6),
    (2.6, 1.6),
    (10.0, 0.4),
    (10.0, 1.6),
];
pub const CONE_HEIGHT: f64 = 0.25;
pub const CONE_BASE_PX: f64 = 16.0;

pub const START: (f64, f64) = (0.55, 0.5);
pub const SLIDE_Z: f64 = 0.5;
pub const CATCH_SPOT: (f64, f64) = (6.8, 2.2);
pub const THROWER_X: f64 = 9.5;
pub const THROW_SPOT: (f64, f64) = (7.4, 3.2);
pub const STEP_HOP_Z: f64 = 1.6;
pub const KICK_BALL: W3 = W3::new(8.9, 1.0, 0.1);
pub const BALL_RADIUS_M: f64 = 0.1;

/// Throw target in rear pixels.
pub const RECT_PX: (f64, f64, f64, f64) = (1240.0, 1360.0, 640.0, 780.0);

pub fn cone_apex(id: u8) -> W3 {
    let (x, z) = CONES[id as usize - 1];
    W3::new(x, z, CONE_HEIGHT)
}

fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> Vec<Point> {
    vec![
        Point::new(x0, y0),
        Point::new(x1, y0),
        Point::new(x1, y1),
        Point::new(x0, y1),
    ]
}

/// Pixel rectangle `(x0, x1, y0, y1)` of each zone.
pub fn zone_rect(action: u8) -> (f64, f64, f64, f64) {
    match action {
        1 => (263.6, 638.0, 820.0, 1060.0),
        2 => (1034.0, 1574.0, 820.0, 1060.0),
        3 => (1214.0, 1394.0, 610.0, 700.0),
        4 => (418.0, 598.0, 995.0, 1085.0),
        5 => (530.0, 1178.0, 640.0, 815.0),
        6 => (263.6, 980.0, 820.0, 1060.0),
        _ => (0.0, 470.0, 590.0, 860.0),
    }
}

pub fn start_rect(view: View) -> (f64, f64, f64, f64) {
    match view {
        View::Front => (70.0, 260.0, 830.0, 1010.0),
        View::Rear => (1660.0, 1850.0, 540.0, 710.0),
    }
}

fn cone(view: View, id: u8) -> Cone {
    let (x, z) = CONES[id as usize - 1];
    let g = project(view, W3::new(x, z, 0.0));
    let base = [90.0f64, 210.0, 330.0].map(|deg| {
        let a = deg.to_radians();
        Point::new(g.x + CONE_BASE_PX * a.cos(), g.y + CONE_BASE_PX * a.sin())
    });
    Cone {
        id,
        apex: project(view, cone_apex(id)),
        base,
    }
}

pub fn layout(view: View) -> CourseLayout {
    let hoops = match view {
        View::Front => HOOP_X
            .iter()
            .enumerate()
            .map(|(i, &x)| Hoop {
                id: i as u8 + 1,
                center: project(view, W3::new(x, HOOP_Z, 0.0)),
                radius: HOOP_RADIUS_PX,
            })
            .collect(),
        View::Rear => Vec::new(),
    };
    let rect_target = (view == View::Rear).then(|| {
        let (x0, x1, y0, y1) = RECT_PX;
        let c = rect(x0, x1, y0, y1);
        RectTarget {
            corners: [c[0], c[1], c[2], c[3]],
        }
    });
    let (sx0, sx1, sy0, sy1) = start_rect(view);
    let zones: BTreeMap<ActionId, Vec<Point>> = ActionId::all()
        .filter(|a| a.view() == view)
        .map(|a| {
            let (x0, x1, y0, y1) = zone_rect(a.get());
            (a, rect(x0, x1, y0, y1))
        })
        .collect();
    CourseLayout {
        view,
        hoops,
        cones: (1..=6).map(|id| cone(view, id)).collect(),
        rect: rect_target,
        start_region: rect(sx0, sx1, sy0, sy1),
        zones,
    }
}

/// Front and rear layouts of the synthetic course.
pub fn canonical_layouts() -> (CourseLayout, CourseLayout) {
    (layout(View::Front), layout(View::Rear))
}

pub fn in_rect(p: Point, r: (f64, f64, f64, f64)) -> bool {
    p.x >= r.0 && p.x <= r.1 && p.y >= r.2 && p.y <= r.3
}
