use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use camsa_core::bundle::{load_bundle, save_bundle};
use camsa_core::course::{parse_layout, validate_layout};
use camsa_core::scoring::{aggregate_cohort, CohortEntry};
use camsa_core::segmenter::phases_json;
use camsa_core::synth::{generate_run, RunScript};
use camsa_core::{score_run_detailed, ScoreReport, ScoringConfig};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;

#[derive(Parser)]
#[command(
    name = "camsa",
    version,
    about = "Score CAMSA course runs from pose trajectories"
)]
struct Cli {
    /// Progress messages on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a front/rear layout pair against the course description.
    Validate {
        front: PathBuf,
        rear: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score one or more run bundles (manifest files).
    Score {
        #[arg(required = true)]
        bundles: Vec<PathBuf>,
        /// JSON file of threshold overrides.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include the phase bounds found by the segmenter.
        #[arg(long)]
        dump_phases: bool,
    },
    /// Per-label means over score reports.
    Aggregate {
        reports: Vec<PathBuf>,
        /// CSV with `report,label` columns; unlabeled runs go to "all".
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a synthetic run bundle and its ground truth.
    Synth {
        script: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Exit 1 for bad content, 2 for file system failures.
enum Failure {
    Domain(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Io(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Domain(e) | Failure::Io(e) => format!("{e:#}"),
        }
    }
}

fn domain(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Domain(e.into())
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Io)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n"))
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Failure::Io),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { front, rear, out } => cmd_validate(&front, &rear, out.as_deref()),
        Command::Score {
            bundles,
            config,
            out,
            dump_phases,
        } => cmd_score(
            &bundles,
            config.as_deref(),
            out.as_deref(),
            dump_phases,
            cli.verbose,
        ),
        Command::Aggregate {
            reports,
            labels,
            out,
        } => cmd_aggregate(&reports, labels.as_deref(), out.as_deref()),
        Command::Synth { script, out } => cmd_synth(&script, &out, cli.verbose),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("camsa: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn cmd_validate(front: &Path, rear: &Path, out: Option<&Path>) -> Result<u8, Failure> {
    let f = read(front)?;
    let r = read(rear)?;
    let f = parse_layout(&f)
        .with_context(|| front.display().to_string())
        .map_err(Failure::Domain)?;
    let r = parse_layout(&r)
        .with_context(|| rear.display().to_string())
        .map_err(Failure::Domain)?;
    let report = validate_layout(&f, &r);
    for v in &report.violations {
        eprintln!("{}: {}", v.view.as_str(), v.message);
    }
    emit(
        &serde_json::to_string_pretty(&report).expect("report serializes"),
        out,
    )?;
    Ok(if report.is_ok() { 0 } else { 1 })
}

fn load_config(path: Option<&Path>) -> Result<ScoringConfig, Failure> {
    let Some(path) = path else {
        return Ok(ScoringConfig::default());
    };
    ScoringConfig::from_json(&read(path)?)
        .with_context(|| format!("config {}", path.display()))
        .map_err(Failure::Domain)
}

fn score_one(
    path: &Path,
    cfg: &ScoringConfig,
    dump_phases: bool,
) -> Result<serde_json::Value, Failure> {
    let bundle = load_bundle(path).map_err(|e| {
        if e.is_io() {
            Failure::Io(e.into())
        } else {
            domain(e)
        }
    })?;
    let scored = score_run_detailed(&bundle, cfg)
        .with_context(|| path.display().to_string())
        .map_err(Failure::Domain)?;
    let mut value = serde_json::to_value(&scored.report).expect("report serializes");
    if dump_phases {
        let phases: serde_json::Value =
            serde_json::from_str(&phases_json(&scored.segmentation.phases)).expect("phases parse");
        value["phases"] = phases;
    }
    Ok(value)
}

/// One report object for a single bundle, an array in input order otherwise.
/// Bundles that cannot be scored appear as `{"input", "error"}` entries.
fn cmd_score(
    bundles: &[PathBuf],
    config: Option<&Path>,
    out: Option<&Path>,
    dump_phases: bool,
    verbose: bool,
) -> Result<u8, Failure> {
    let cfg = load_config(config)?;
    let results: Vec<Result<serde_json::Value, Failure>> = bundles
        .par_iter()
        .map(|p| {
            let r = score_one(p, &cfg, dump_phases);
            if verbose {
                eprintln!("scored {}", p.display());
            }
            r
        })
        .collect();
    let code = results
        .iter()
        .filter_map(|r| r.as_ref().err().map(Failure::code))
        .max()
        .unwrap_or(0);
    if bundles.len() == 1 {
        let value = results.into_iter().next().expect("one result")?;
        emit(&serde_json::to_string_pretty(&value).expect("json"), out)?;
        return Ok(0);
    }
    let values: Vec<serde_json::Value> = results
        .into_iter()
        .zip(bundles)
        .map(|(r, p)| match r {
            Ok(v) => v,
            Err(f) => {
                eprintln!("camsa: {}", f.message());
                serde_json::json!({ "input": p.display().to_string(), "error": f.message() })
            }
        })
        .collect();
    emit(&serde_json::to_string_pretty(&values).expect("json"), out)?;
    Ok(code)
}

#[derive(Deserialize)]
struct LabelRow {
    report: String,
    label: String,
}

fn read_labels(path: &Path) -> Result<HashMap<String, String>, Failure> {
    let bytes = read(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let mut out = HashMap::new();
    for row in rdr.deserialize::<LabelRow>() {
        let row = row
            .with_context(|| format!("labels {}", path.display()))
            .map_err(Failure::Domain)?;
        out.insert(row.report, row.label);
    }
    Ok(out)
}

/// Label for a report path: exact match first, then its file name.
fn label_for(labels: &HashMap<String, String>, path: &Path) -> Option<String> {
    let full = path.display().to_string();
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned());
    labels
        .get(&full)
        .or_else(|| name.and_then(|n| labels.get(&n)))
        .cloned()
}

fn cmd_aggregate(
    reports: &[PathBuf],
    labels: Option<&Path>,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let labels = match labels {
        Some(p) => Some(read_labels(p)?),
        None => None,
    };
    let mut entries = Vec::with_capacity(reports.len());
    for path in reports {
        let report: ScoreReport = serde_json::from_slice(&read(path)?)
            .with_context(|| format!("report {}", path.display()))
            .map_err(Failure::Domain)?;
        let label = match &labels {
            Some(map) => label_for(map, path)
                .ok_or_else(|| domain(anyhow!("no label for {}", path.display())))?,
            None => "all".to_string(),
        };
        entries.push(CohortEntry::from_report(label, &report));
    }
    let cohort = aggregate_cohort(&entries).map_err(domain)?;
    emit(
        &serde_json::to_string_pretty(&cohort).expect("cohort serializes"),
        out,
    )?;
    Ok(0)
}

fn cmd_synth(script: &Path, out: &Path, verbose: bool) -> Result<u8, Failure> {
    let script: RunScript = serde_json::from_slice(&read(script)?)
        .with_context(|| format!("script {}", script.display()))
        .map_err(Failure::Domain)?;
    let (bundle, truth) = generate_run(&script).map_err(domain)?;
    let manifest = save_bundle(&bundle, out).map_err(|e| Failure::Io(e.into()))?;
    let truth_path = out.join("truth.json");
    fs::write(
        &truth_path,
        serde_json::to_string_pretty(&truth).expect("truth serializes"),
    )
    .with_context(|| format!("writing {}", truth_path.display()))
    .map_err(Failure::Io)?;
    if verbose {
        eprintln!("wrote {} and {}", manifest.display(), truth_path.display());
    }
    Ok(0)
}
