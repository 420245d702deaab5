use camsa_core::synth::{generate_run, Fault, RunScript, DEFAULT_DURATIONS};
use camsa_core::{score_run, segment, ScoringConfig, SegmentError};

fn cfg() -> ScoringConfig {
    ScoringConfig::default()
}

#[test]
fn phases_follow_the_script() {
    for seed in 1..5 {
        let (bundle, truth) = generate_run(&RunScript::new(seed).with_noise(3.0)).unwrap();
        let seg = segment(&bundle, &cfg()).unwrap();
        assert_eq!(seg.phases.len(), 7);
        for (got, want) in seg.phases.iter().zip(&truth.phases) {
            assert_eq!(got.action, want.action);
            assert_eq!(got.view, want.view);
            assert!(
                (got.start_frame - want.start_frame).abs() <= 3,
                "{got:?} vs {want:?}"
            );
            assert!(
                (got.end_frame - want.end_frame).abs() <= 3,
                "{got:?} vs {want:?}"
            );
        }
        assert!((seg.run_start_frame - truth.run_start_frame).abs() <= 3);
        assert!((seg.run_end_frame - truth.run_end_frame).abs() <= 3);
    }
}

#[test]
fn fifteen_and_a_half_seconds() {
    let mut script = RunScript::new(2).with_noise(1.0);
    script.action_durations = DEFAULT_DURATIONS.map(|d| d * 15.5 / 13.5);
    let (bundle, truth) = generate_run(&script).unwrap();
    assert!((truth.completion_seconds - 15.5).abs() < 1e-9);
    let report = score_run(&bundle, &cfg()).unwrap();
    let frames = report.completion_frames.unwrap();
    assert!((frames - 465).abs() <= 5, "{frames}");
    assert_eq!(report.time_score, 12);
    assert_eq!(report.skill_score, 14);
}

#[test]
fn slow_run_loses_time_points_only() {
    let mut script = RunScript::new(3);
    script.action_durations = DEFAULT_DURATIONS.map(|d| d * 2.0);
    let (bundle, _) = generate_run(&script).unwrap();
    let report = score_run(&bundle, &cfg()).unwrap();
    assert_eq!(report.completion_frames, Some(810));
    assert_eq!(report.time_score, 3);
    assert_eq!(report.skill_score, 14);
    assert_eq!(report.total, 17);
}

#[test]
fn other_frame_rates() {
    for fps in [15.0, 25.0, 60.0] {
        let mut script = RunScript::new(4).with_noise(1.0);
        script.fps = fps;
        script.rear_frame_offset = (12.0 * fps / 30.0) as i64;
        let (bundle, truth) = generate_run(&script).unwrap();
        let report = score_run(&bundle, &cfg()).unwrap();
        assert_eq!(report.failed(), Vec::<u8>::new(), "fps {fps}: {report:?}");
        assert_eq!(report.completion_frames, Some(truth.completion_frames));
        assert_eq!(report.time_score, 14);
    }
}

#[test]
fn clean_runs_survive_three_pixel_noise() {
    for seed in 20..26 {
        let (bundle, _) = generate_run(&RunScript::new(seed).with_noise(3.0)).unwrap();
        let report = score_run(&bundle, &cfg()).unwrap();
        assert_eq!(report.skill_score, 14, "seed {seed}: {:?}", report.failed());
    }
}

#[test]
fn wrist_fault_touches_only_wrists() {
    let (clean, _) = generate_run(&RunScript::new(1).with_noise(1.0)).unwrap();
    let (faulty, truth) =
        generate_run(&RunScript::new(1).with_noise(1.0).with_faults(&[Fault::F10])).unwrap();
    assert_eq!(truth.expected_failed_criteria, vec![10]);
    for (c, f) in [(&clean.front, &faulty.front), (&clean.rear, &faulty.rear)] {
        let mut wrist_diffs = 0;
        for (a, b) in c.frames.iter().zip(&f.frames) {
            for k in 0..33 {
                if a.keypoints[k] != b.keypoints[k] {
                    assert!(
                        k == 15 || k == 16,
                        "keypoint {k} differs at frame {}",
                        a.frame_index
                    );
                    wrist_diffs += 1;
                }
            }
        }
        assert!(wrist_diffs > 0);
    }
    assert_eq!(clean.ball_front, faulty.ball_front);
    assert_eq!(clean.ball_rear, faulty.ball_rear);
}

#[test]
fn skipping_the_step_hop_corridor() {
    let (mut bundle, truth) = generate_run(&RunScript::new(5)).unwrap();
    let p5 = truth.phases[4];
    // carry the child out of every zone for the whole step-hop stretch
    for f in bundle.front.frames.iter_mut() {
        if f.frame_index >= p5.start_frame - 5 && f.frame_index <= p5.end_frame + 5 {
            for k in f.keypoints.iter_mut() {
                k.x += 2000.0;
            }
        }
    }
    assert_eq!(segment(&bundle, &cfg()), Err(SegmentError::MissingPhase(5)));
    let report = score_run(&bundle, &cfg()).unwrap();
    assert_eq!(report.failed(), vec![9, 10]);
    assert!(report.errors.iter().any(|e| e.contains('5')));
}

#[test]
fn no_kick_means_no_completion_time() {
    let (mut bundle, truth) = generate_run(&RunScript::new(6)).unwrap();
    let contact = truth.run_end_frame - bundle.rear_frame_offset;
    if let camsa_core::balltrack::BallSource::Precomputed(t) = &mut bundle.ball_rear {
        // the ball never leaves its spot
        let rest = t.get(contact).unwrap();
        for (_, p) in t.samples.range_mut(contact..) {
            *p = Some(rest);
        }
    }
    assert_eq!(segment(&bundle, &cfg()), Err(SegmentError::NoKickDetected));
    let report = score_run(&bundle, &cfg()).unwrap();
    assert_eq!(report.completion_frames, None);
    assert_eq!(report.time_score, 1);
    assert!(report.failed().contains(&13));
}

#[test]
fn grid_ball_input_scores_everything_but_the_catch() {
    let mut script = RunScript::new(7).with_noise(1.0);
    script.ball_grids = true;
    let (bundle, _) = generate_run(&script).unwrap();
    let report = score_run(&bundle, &cfg()).unwrap();
    // a ball held still in the hands leaves no frame difference
    assert_eq!(report.failed(), vec![6]);
    assert!((report.completion_frames.unwrap() - 405).abs() <= 1);
}
