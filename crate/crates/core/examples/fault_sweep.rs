//! Scores every single and pairwise fault injection over a range of seeds
//! and lists the runs whose failed criteria differ from the script.
//!
//! usage: fault_sweep [noise px] [seed count]

use camsa_core::synth::{generate_run, Fault, RunScript};
use camsa_core::{score_run, ScoringConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let noise: f64 = args.next().map_or(1.5, |a| a.parse().expect("noise"));
    let seeds: u64 = args.next().map_or(5, |a| a.parse().expect("seed count"));
    let cfg = ScoringConfig::default();

    let mut sets: Vec<Vec<Fault>> = vec![vec![]];
    sets.extend(Fault::ALL.iter().map(|f| vec![*f]));
    for (i, &a) in Fault::ALL.iter().enumerate() {
        for &b in &Fault::ALL[i + 1..] {
            sets.push(vec![a, b]);
        }
    }

    let (mut bad, mut n) = (0, 0);
    for seed in 1000..1000 + seeds {
        for faults in &sets {
            n += 1;
            let script = RunScript::new(seed).with_faults(faults).with_noise(noise);
            let (bundle, truth) = generate_run(&script).expect("valid script");
            let got = score_run(&bundle, &cfg).expect("scorable").failed();
            if got != truth.expected_failed_criteria {
                bad += 1;
                println!(
                    "seed {seed} {faults:?}: expected {:?}, got {got:?}",
                    truth.expected_failed_criteria
                );
            }
        }
    }
    println!("{bad}/{n} mismatches");
}
