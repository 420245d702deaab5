//! Browser bindings for the demo page in `www/`.

use camsa_core::course::{write_layout, CourseLayout};
use camsa_core::geometry::{point_in_circle, point_in_polygon, Containment, Point};
use camsa_core::scoring::time_score_from_seconds;
use camsa_core::segmenter::reference_point;
use camsa_core::synth::{canonical_layouts, generate_run, Fault, RunScript, DEFAULT_DURATIONS};
use camsa_core::{score_run_detailed, ScoringConfig, Trajectory, View};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn layout(view: &str) -> Result<CourseLayout, String> {
    let (front, rear) = canonical_layouts();
    match view {
        "front" => Ok(front),
        "rear" => Ok(rear),
        other => Err(format!("unknown view {other:?}")),
    }
}

/// Canonical front and rear layouts in the layout file format.
#[wasm_bindgen]
pub fn layouts() -> String {
    let (front, rear) = canonical_layouts();
    format!(
        r#"{{"front":{},"rear":{}}}"#,
        write_layout(&front),
        write_layout(&rear)
    )
}

fn path_of(t: &Trajectory) -> Vec<[f64; 2]> {
    t.frames
        .iter()
        .map(|f| {
            let p = reference_point(f);
            [p.x, p.y]
        })
        .collect()
}

/// Parses "3, 5 12" into faults for those criteria.
fn parse_faults(text: &str) -> Result<Vec<Fault>, String> {
    let mut out = Vec::new();
    for tok in text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let tok = tok.trim_start_matches(['F', 'f']);
        let id: u8 = tok.parse().map_err(|_| format!("bad criterion {tok:?}"))?;
        let f = Fault::for_criterion(id).ok_or_else(|| format!("no criterion {id}"))?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    Ok(out)
}

pub fn run_course_json(
    seed: u64,
    faults: &str,
    noise: f64,
    seconds: f64,
) -> Result<String, String> {
    if !(seconds.is_finite() && seconds > 0.0) {
        return Err(format!("run length {seconds} must be positive"));
    }
    let total: f64 = DEFAULT_DURATIONS.iter().sum();
    let mut script = RunScript::new(seed)
        .with_noise(noise)
        .with_faults(&parse_faults(faults)?);
    script.action_durations = DEFAULT_DURATIONS.map(|d| d * seconds / total);
    let (bundle, truth) = generate_run(&script).map_err(|e| e.to_string())?;
    let scored =
        score_run_detailed(&bundle, &ScoringConfig::default()).map_err(|e| e.to_string())?;
    let phases: Vec<Value> = scored
        .segmentation
        .phases
        .iter()
        .map(|p| json!({"action": p.action.get(), "view": p.view, "start": p.start_frame, "end": p.end_frame}))
        .collect();
    let out = json!({
        "report": scored.report,
        "expected_failed": truth.expected_failed_criteria,
        "phases": phases,
        "front_path": path_of(&bundle.front),
        "rear_path": path_of(&bundle.rear),
        "rear_frame_offset": bundle.rear_frame_offset,
    });
    Ok(out.to_string())
}

/// Renders a synthetic run with the listed faulty criteria and scores it.
#[wasm_bindgen]
pub fn run_course(seed: u64, faults: &str, noise: f64, seconds: f64) -> Result<String, JsError> {
    run_course_json(seed, faults, noise, seconds).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn time_score(seconds: f64) -> Result<u8, JsError> {
    time_score_from_seconds(seconds).map_err(|e| JsError::new(&e.to_string()))
}

pub fn landmark_at_text(view: &str, x: f64, y: f64) -> Result<String, String> {
    let l = layout(view)?;
    let p = Point::new(x, y);
    let mut hits = Vec::new();
    let word = |c: Containment| match c {
        Containment::Inside => "inside",
        Containment::OnBoundary => "on the edge of",
        Containment::Outside => "outside",
    };
    for h in &l.hoops {
        if let Ok(c) = point_in_circle(p, h.center, h.radius) {
            if c != Containment::Outside {
                hits.push(format!("{} hoop {}", word(c), h.id));
            }
        }
    }
    for c in &l.cones {
        if let Ok(k) = point_in_polygon(p, &c.base) {
            if k != Containment::Outside {
                hits.push(format!("{} cone {} base", word(k), c.id));
            }
        }
    }
    if let Some(r) = &l.rect {
        if let Ok(k) = point_in_polygon(p, &r.corners) {
            if k != Containment::Outside {
                hits.push(format!("{} the target rectangle", word(k)));
            }
        }
    }
    if let Ok(k) = point_in_polygon(p, &l.start_region) {
        if k != Containment::Outside {
            hits.push(format!("{} the start region", word(k)));
        }
    }
    for (a, z) in &l.zones {
        if let Ok(k) = point_in_polygon(p, z) {
            if k != Containment::Outside {
                hits.push(format!("{} the action {a} zone", word(k)));
            }
        }
    }
    let view = if l.view == View::Front {
        "front"
    } else {
        "rear"
    };
    if hits.is_empty() {
        Ok(format!("({x:.0}, {y:.0}) in the {view} view: no landmark"))
    } else {
        Ok(format!(
            "({x:.0}, {y:.0}) in the {view} view: {}",
            hits.join(", ")
        ))
    }
}

/// Describes which landmarks and zones contain an image point.
#[wasm_bindgen]
pub fn landmark_at(view: &str, x: f64, y: f64) -> Result<String, JsError> {
    landmark_at_text(view, x, y).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_list_parsing() {
        assert_eq!(
            parse_faults("3, F5 12").unwrap(),
            vec![Fault::F3, Fault::F5, Fault::F12]
        );
        assert_eq!(parse_faults("").unwrap(), vec![]);
        assert!(parse_faults("15").is_err());
        assert!(parse_faults("x").is_err());
    }

    #[test]
    fn scored_run_reports_the_fault() {
        let v: Value = serde_json::from_str(&run_course_json(3, "7", 1.0, 13.5).unwrap()).unwrap();
        assert_eq!(v["report"]["total"], 27);
        assert_eq!(v["expected_failed"], json!([7]));
        assert_eq!(v["phases"].as_array().unwrap().len(), 7);
        assert!(run_course_json(3, "", 1.0, 0.0).is_err());
    }

    #[test]
    fn landmark_lookup() {
        let (front, _) = canonical_layouts();
        let h = &front.hoops[0];
        let s = landmark_at_text("front", h.center.x, h.center.y).unwrap();
        assert!(s.contains("inside hoop 1"), "{s}");
        assert!(landmark_at_text("front", -50.0, -50.0)
            .unwrap()
            .ends_with("no landmark"));
        assert!(landmark_at_text("side", 0.0, 0.0).is_err());
    }

    #[test]
    fn layouts_parse() {
        let v: Value = serde_json::from_str(&layouts()).unwrap();
        assert_eq!(v["front"]["hoops"].as_array().unwrap().len(), 6);
    }
}
