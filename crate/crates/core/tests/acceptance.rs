//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use camsa_core::balltrack::{extract_ball_track, BallConfig, BallSource, GridMapping};
use camsa_core::geometry::{
    distance_to_segment, orientation, point_in_polygon, segments_intersect, Containment, Point,
};
use camsa_core::scoring::{aggregate_cohort, time_score_from_frames, CohortEntry};
use camsa_core::synth::{generate_ball_grids, generate_run, Fault, RunScript};
use camsa_core::{score_run, ScoringConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = f();
    let took = t.elapsed();
    let in_time = took <= limit;
    let ok = out.passed && in_time;
    println!(
        "{} {name}: {} ({:.2} s, limit {} s)",
        if ok { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64(),
        limit.as_secs()
    );
    ok
}

// ---- time bands ----

/// Rows as printed: score, first frame, last frame at 30 fps.
const TABLE1: [(u8, i64, Option<i64>); 14] = [
    (14, 0, Some(419)),
    (13, 420, Some(449)),
    (12, 450, Some(479)),
    (11, 480, Some(509)),
    (10, 510, Some(539)),
    (9, 540, Some(569)),
    (8, 570, Some(599)),
    (7, 600, Some(629)),
    (6, 630, Some(659)),
    (5, 660, Some(719)),
    (4, 720, Some(779)),
    (3, 780, Some(839)),
    (2, 840, Some(899)),
    (1, 900, None),
];

fn time_bands() -> Outcome {
    let mut wrong = Vec::new();
    let mut checked = 0;
    for (score, lo, hi) in TABLE1 {
        for f in [lo, hi.unwrap_or(1_000_000)] {
            checked += 1;
            if time_score_from_frames(f, 30.0).ok() != Some(score) {
                wrong.push(f);
            }
        }
    }
    let same = time_score_from_frames(240, 15.0).ok() == time_score_from_frames(480, 30.0).ok();
    let sweep = (0..2000)
        .all(|f| time_score_from_frames(f, 15.0).ok() == time_score_from_frames(2 * f, 30.0).ok());
    Outcome {
        passed: wrong.is_empty() && checked == 28 && same && sweep,
        detail: format!(
            "{}/{checked} boundary values, 240@15 fps == 480@30 fps: {same}, full 15/30 fps sweep: {sweep}",
            checked - wrong.len()
        ),
    }
}

// ---- fault injection ----

fn fault_oracle() -> Outcome {
    let cfg = ScoringConfig::default();
    let mut sets: Vec<Vec<Fault>> = vec![vec![]];
    sets.extend(Fault::ALL.iter().map(|&f| vec![f]));
    for (i, &a) in Fault::ALL.iter().enumerate() {
        for &b in &Fault::ALL[i + 1..] {
            sets.push(vec![a, b]);
        }
    }
    let mut mismatches = Vec::new();
    let mut clean_total = None;
    for (seed, faults) in sets.iter().enumerate() {
        let script = RunScript::new(seed as u64)
            .with_faults(faults)
            .with_noise(1.5);
        let (bundle, truth) = match generate_run(&script) {
            Ok(v) => v,
            Err(e) => {
                mismatches.push(format!("{faults:?}: {e}"));
                continue;
            }
        };
        let report = match score_run(&bundle, &cfg) {
            Ok(r) => r,
            Err(e) => {
                mismatches.push(format!("{faults:?}: {e}"));
                continue;
            }
        };
        let expected: Vec<u8> = faults.iter().map(|f| f.criterion()).collect();
        let skill_ok = report.skill_score as usize == 14 - expected.len();
        if report.failed() != expected || truth.expected_failed_criteria != expected || !skill_ok {
            mismatches.push(format!("{faults:?} failed {:?}", report.failed()));
        }
        if faults.is_empty() {
            clean_total = Some(report.total);
        }
    }
    let pairs = sets.len() - 15;
    Outcome {
        passed: mismatches.is_empty() && clean_total == Some(28) && pairs == 91,
        detail: format!(
            "clean total {:?}, {} runs (14 single, {pairs} pairs), mismatches: {:?}",
            clean_total,
            sets.len(),
            mismatches
        ),
    }
}

// ---- geometry ----

/// Scan-converts an integer-vertex polygon and reports whether the pixel
/// centred at `(px + 0.5, py + 0.5)` is filled (even-odd rule).
fn raster_filled(poly: &[(i64, i64)], px: i64, py: i64) -> bool {
    let y = py as f64 + 0.5;
    let mut xs: Vec<f64> = Vec::new();
    for i in 0..poly.len() {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % poly.len()];
        let (fy0, fy1) = (y0 as f64, y1 as f64);
        if (fy0 < y) != (fy1 < y) {
            xs.push(x0 as f64 + (y - fy0) * (x1 - x0) as f64 / (fy1 - fy0));
        }
    }
    xs.sort_by(f64::total_cmp);
    let x = px as f64 + 0.5;
    xs.chunks(2).any(|s| s.len() == 2 && x > s[0] && x < s[1])
}

fn random_polygon(rng: &mut ChaCha8Rng) -> Vec<(i64, i64)> {
    let n = rng.random_range(3..12);
    let mut angles: Vec<f64> = (0..n)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    angles.sort_by(f64::total_cmp);
    angles
        .iter()
        .map(|a| {
            let r = rng.random_range(4.0..30.0);
            (
                (32.0 + r * a.cos()).round() as i64,
                (32.0 + r * a.sin()).round() as i64,
            )
        })
        .collect()
}

fn polygon_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut agree = 0;
    let mut cases = 0;
    while cases < 1000 {
        let poly = random_polygon(&mut rng);
        let pts: Vec<Point> = poly
            .iter()
            .map(|&(x, y)| Point::new(x as f64, y as f64))
            .collect();
        let (px, py) = (rng.random_range(0..64), rng.random_range(0..64));
        let p = Point::new(px as f64 + 0.5, py as f64 + 0.5);
        let on_edge =
            (0..pts.len()).any(|i| distance_to_segment(p, pts[i], pts[(i + 1) % pts.len()]) < 1e-9);
        if on_edge {
            continue;
        }
        cases += 1;
        let got = match point_in_polygon(p, &pts) {
            Ok(Containment::Inside) => Some(true),
            Ok(Containment::Outside) => Some(false),
            _ => None,
        };
        if got == Some(raster_filled(&poly, px, py)) {
            agree += 1;
        }
    }
    Outcome {
        passed: agree == cases,
        detail: format!("{agree}/{cases} agree with scan conversion"),
    }
}

/// Walks segment `a` in fine steps and looks for a sign change of its side
/// of line `b` whose crossing lies within `b`.
fn sampled_intersect(a1: Point, a2: Point, b1: Point, b2: Point) -> bool {
    const STEPS: usize = 2000;
    let side = |p: Point| (b2 - b1).cross(p - b1);
    let at = |i: usize| a1 + (a2 - a1) * (i as f64 / STEPS as f64);
    let mut prev = side(at(0));
    for i in 1..=STEPS {
        let cur = side(at(i));
        let crosses = (prev <= 0.0 && cur >= 0.0) || (prev >= 0.0 && cur <= 0.0);
        if crosses {
            let t = if prev == cur {
                0.0
            } else {
                prev / (prev - cur)
            };
            let p = at(i - 1) + (at(i) - at(i - 1)) * t;
            let d = b2 - b1;
            let u = (p - b1).dot(d) / d.dot(d);
            if (0.0..=1.0).contains(&u) {
                return true;
            }
        }
        prev = cur;
    }
    false
}

fn segment_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let pt = |rng: &mut ChaCha8Rng| {
        Point::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0))
    };
    let mut agree = 0;
    let mut cases = 0;
    while cases < 10_000 {
        let (a1, a2, b1, b2) = (pt(&mut rng), pt(&mut rng), pt(&mut rng), pt(&mut rng));
        let gap = [
            distance_to_segment(a1, b1, b2),
            distance_to_segment(a2, b1, b2),
            distance_to_segment(b1, a1, a2),
            distance_to_segment(b2, a1, a2),
        ];
        if gap.iter().any(|&g| g < 1e-9) || orientation(a1, a2, b1) == 0 {
            continue;
        }
        cases += 1;
        if segments_intersect(a1, a2, b1, b2) == sampled_intersect(a1, a2, b1, b2) {
            agree += 1;
        }
    }
    Outcome {
        passed: agree == cases,
        detail: format!("{agree}/{cases} agree with dense sampling"),
    }
}

// ---- ball tracker ----

fn ball_tracker() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let cfg = BallConfig::default();
    let mapping = GridMapping {
        origin: Point::new(0.0, 0.0),
        cell_px: 1.0,
    };
    let (mut good, mut total) = (0, 0);
    for _ in 0..100 {
        let n = 16;
        let speed = rng.random_range(1.5..3.0);
        let dir = rng.random_range(0.0..std::f64::consts::TAU);
        let v = Point::new(speed * dir.cos(), speed * dir.sin());
        // start so the whole path stays inside the grid
        let span = v * (n - 1) as f64;
        let lo = |s: f64| if s < 0.0 { 4.0 - s } else { 4.0 };
        let hi = |s: f64| if s > 0.0 { 59.0 - s } else { 59.0 };
        let start = Point::new(
            rng.random_range(lo(span.x)..hi(span.x)),
            rng.random_range(lo(span.y)..hi(span.y)),
        );
        let path: Vec<Option<Point>> = (0..n).map(|k| Some(start + v * k as f64)).collect();
        let grids = generate_ball_grids(&path, 64, 64, 1.5, &mut rng).expect("path inside grid");
        let track = extract_ball_track(
            &BallSource::Grids {
                grids,
                first_frame: 0,
                mapping,
            },
            &cfg,
        )
        .expect("grids are consistent");
        for (k, truth) in path.iter().enumerate().take(n - 1).skip(1) {
            total += 1;
            let truth = truth.expect("always visible");
            if track.get(k as i64).is_some_and(|p| p.dist(truth) <= 2.0) {
                good += 1;
            }
        }
    }
    let mut static_hits = 0;
    for _ in 0..10 {
        let p = Point::new(rng.random_range(5.0..59.0), rng.random_range(5.0..59.0));
        let path = vec![Some(p); 12];
        let grids = generate_ball_grids(&path, 64, 64, 1.5, &mut rng).expect("inside");
        let track = extract_ball_track(
            &BallSource::Grids {
                grids,
                first_frame: 0,
                mapping,
            },
            &cfg,
        )
        .expect("consistent");
        static_hits += track.observed_count();
    }
    let share = good as f64 / total as f64;
    Outcome {
        passed: share >= 0.95 && static_hits == 0,
        detail: format!("{good}/{total} interior frames within 2 cells ({:.1}%), static detections {static_hits}", share * 100.0),
    }
}

// ---- cohort tables ----

fn referee_rows() -> Vec<CohortEntry> {
    let rows: [(&str, [f64; 7], f64); 9] = [
        ("1", [1.7, 2.0, 0.5, 1.3, 0.9, 0.7, 1.3], 3.5),
        ("1", [1.8, 1.6, 0.3, 0.7, 0.8, 0.8, 1.2], 3.5),
        ("1", [1.8, 2.0, 0.3, 0.8, 0.8, 0.7, 1.3], 3.5),
        ("2", [1.8, 2.0, 0.6, 1.1, 0.8, 0.7, 1.5], 4.0),
        ("2", [1.9, 1.5, 0.5, 1.1, 0.4, 0.5, 1.5], 4.0),
        ("2", [1.2, 2.1, 0.5, 1.0, 0.3, 0.2, 1.0], 4.0),
        ("3", [1.8, 1.0, 0.7, 1.0, 1.1, 1.8, 2.0], 5.6),
        ("3", [1.9, 1.5, 0.7, 1.3, 1.3, 1.4, 1.7], 5.6),
        ("3", [1.8, 1.5, 0.7, 0.8, 1.2, 1.1, 1.5], 5.6),
    ];
    rows.iter()
        .map(|(l, a, t)| CohortEntry {
            label: l.to_string(),
            actions: *a,
            time_score: *t,
        })
        .collect()
}

/// Printed average rows: seven action means, time, sum.
const AVE_MANUAL: [(&str, [f64; 7], f64, f64); 3] = [
    ("1", [1.77, 1.87, 0.37, 0.93, 0.83, 0.73, 1.27], 3.5, 11.27),
    ("2", [1.63, 1.87, 0.53, 1.07, 0.50, 0.47, 1.33], 4.0, 11.40),
    ("3", [1.83, 1.33, 0.70, 1.03, 1.20, 1.43, 1.73], 5.6, 14.87),
];

fn cohort_sums() -> Outcome {
    let report = match aggregate_cohort(&referee_rows()) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                passed: false,
                detail: e.to_string(),
            }
        }
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, means, time, sum) in AVE_MANUAL {
        let Some(g) = report.group(label) else {
            ok = false;
            continue;
        };
        let means_ok = g
            .action_means
            .iter()
            .zip(means)
            .all(|(a, b)| (a - b).abs() <= 0.01)
            && (g.time_mean - time).abs() <= 0.01;
        let sum_ok = (g.sum - sum).abs() <= 0.01;
        ok &= means_ok && sum_ok;
        parts.push(format!("group {label} sum {:.2} (printed {sum:.2})", g.sum));
    }
    Outcome {
        passed: ok,
        detail: parts.join(", "),
    }
}

fn categories() -> Outcome {
    let report = aggregate_cohort(&referee_rows()).expect("non-empty");
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, m, time, _) in AVE_MANUAL {
        // hand sums of the printed means
        let movement = m[0] + m[1] + m[4] + m[5];
        let object = m[2] + m[3] + m[6];
        let g = report.group(label).expect("group present");
        let good = (g.movement - movement).abs() <= 0.01
            && (g.object_control - object).abs() <= 0.01
            && (g.dexterity - time).abs() <= 0.01;
        ok &= good;
        parts.push(format!(
            "group {label} movement {:.2} object {:.2} dexterity {:.2}",
            g.movement, g.object_control, g.dexterity
        ));
    }
    Outcome {
        passed: ok,
        detail: parts.join(", "),
    }
}

// ---- determinism ----

fn determinism() -> Outcome {
    let cfg = ScoringConfig::default();
    let mut problems = Vec::new();
    let fault_sets: [&[Fault]; 4] = [&[], &[Fault::F3], &[Fault::F7, Fault::F11], &[Fault::F13]];
    for (seed, faults) in fault_sets.iter().enumerate() {
        let script = RunScript::new(100 + seed as u64)
            .with_faults(faults)
            .with_noise(2.0);
        let (bundle, _) = generate_run(&script).expect("valid script");
        let a = score_run(&bundle, &cfg).expect("scores").to_json();
        let b = score_run(&bundle, &cfg).expect("scores").to_json();
        if a != b {
            problems.push(format!("{faults:?}: repeat differs"));
        }
        let r1 = score_run(&bundle, &cfg).expect("scores");
        let r2 = score_run(&bundle.scaled(2.0), &cfg).expect("scores");
        let outcome = |r: &camsa_core::ScoreReport| {
            r.criteria
                .iter()
                .map(|c| (c.criterion_id, c.passed))
                .collect::<Vec<_>>()
        };
        if outcome(&r1) != outcome(&r2) || r1.time_score != r2.time_score {
            problems.push(format!("{faults:?}: x2 scale changes outcome"));
        }
    }
    Outcome {
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            "4 runs byte-identical on repeat, same outcomes at x2 scale".into()
        } else {
            problems.join("; ")
        },
    }
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let results = [
        check("time bands", s(1), time_bands),
        check("fault injection", s(60), fault_oracle),
        check("geometry oracles", s(10), || {
            let (a, b) = (polygon_oracle(), segment_oracle());
            Outcome {
                passed: a.passed && b.passed,
                detail: format!("point in polygon {}; segments {}", a.detail, b.detail),
            }
        }),
        check("ball tracker", s(10), ball_tracker),
        check("cohort sums", s(1), cohort_sums),
        check("skill categories", s(1), categories),
        check("determinism", s(30), determinism),
    ];
    if results.iter().all(|&r| r) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
