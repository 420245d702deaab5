//! On-disk run bundles: a manifest JSON naming the component files, with
//! paths relative to the manifest's directory.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balltrack::{
    parse_ball_track, read_grids, write_ball_track, write_grids, BallError, BallSource, GridMapping,
};
use crate::course::{parse_layout, write_layout, LayoutError};
use crate::trajectory::{parse_trajectory, write_trajectory, RunBundle, TrajectoryError};

#[derive(Debug, Error)]
pub enum BundleIoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed manifest {}: {msg}", path.display())]
    Manifest { path: PathBuf, msg: String },
    #[error("{}: {source}", path.display())]
    Trajectory {
        path: PathBuf,
        #[source]
        source: TrajectoryError,
    },
    #[error("{}: {source}", path.display())]
    Layout {
        path: PathBuf,
        #[source]
        source: LayoutError,
    },
    #[error("{}: {source}", path.display())]
    Ball {
        path: PathBuf,
        #[source]
        source: BallError,
    },
}

impl BundleIoError {
    /// True for failures to read or write files, as opposed to bad content.
    pub fn is_io(&self) -> bool {
        matches!(self, BundleIoError::Io { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum BallEntry {
    Track {
        track: String,
    },
    Grids {
        grids: String,
        first_frame: i64,
        mapping: GridMapping,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub front: String,
    pub rear: String,
    pub rear_frame_offset: i64,
    pub front_layout: String,
    pub rear_layout: String,
    pub ball_front: BallEntry,
    pub ball_rear: BallEntry,
}

fn read(path: &Path) -> Result<Vec<u8>, BundleIoError> {
    fs::read(path).map_err(|source| BundleIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), BundleIoError> {
    fs::write(path, bytes).map_err(|source| BundleIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_ball(dir: &Path, entry: &BallEntry) -> Result<BallSource, BundleIoError> {
    match entry {
        BallEntry::Track { track } => {
            let path = dir.join(track);
            parse_ball_track(&read(&path)?)
                .map(BallSource::Precomputed)
                .map_err(|source| BundleIoError::Ball { path, source })
        }
        BallEntry::Grids {
            grids,
            first_frame,
            mapping,
        } => {
            let path = dir.join(grids);
            let grids =
                read_grids(&read(&path)?).map_err(|source| BundleIoError::Ball { path, source })?;
            Ok(BallSource::Grids {
                grids,
                first_frame: *first_frame,
                mapping: *mapping,
            })
        }
    }
}

pub fn load_bundle(manifest_path: &Path) -> Result<RunBundle, BundleIoError> {
    let bytes = read(manifest_path)?;
    let m: Manifest = serde_json::from_slice(&bytes).map_err(|e| BundleIoError::Manifest {
        path: manifest_path.to_path_buf(),
        msg: e.to_string(),
    })?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let traj = |name: &str| {
        let path = dir.join(name);
        parse_trajectory(&read(&path)?).map_err(|source| BundleIoError::Trajectory { path, source })
    };
    let layout = |name: &str| {
        let path = dir.join(name);
        parse_layout(&read(&path)?).map_err(|source| BundleIoError::Layout { path, source })
    };
    Ok(RunBundle {
        front: traj(&m.front)?,
        rear: traj(&m.rear)?,
        rear_frame_offset: m.rear_frame_offset,
        front_layout: layout(&m.front_layout)?,
        rear_layout: layout(&m.rear_layout)?,
        ball_front: load_ball(dir, &m.ball_front)?,
        ball_rear: load_ball(dir, &m.ball_rear)?,
    })
}

fn save_ball(dir: &Path, name: &str, src: &BallSource) -> Result<BallEntry, BundleIoError> {
    match src {
        BallSource::Precomputed(t) => {
            let file = format!("{name}.json");
            write(&dir.join(&file), write_ball_track(t).as_bytes())?;
            Ok(BallEntry::Track { track: file })
        }
        BallSource::Grids {
            grids,
            first_frame,
            mapping,
        } => {
            let file = format!("{name}.grid");
            let path = dir.join(&file);
            let bytes = write_grids(grids).map_err(|source| BundleIoError::Ball {
                path: path.clone(),
                source,
            })?;
            write(&path, &bytes)?;
            Ok(BallEntry::Grids {
                grids: file,
                first_frame: *first_frame,
                mapping: *mapping,
            })
        }
    }
}

/// Writes the component files and `bundle.json` into `dir`; returns the
/// manifest path.
pub fn save_bundle(bundle: &RunBundle, dir: &Path) -> Result<PathBuf, BundleIoError> {
    fs::create_dir_all(dir).map_err(|source| BundleIoError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write(
        &dir.join("front.json"),
        write_trajectory(&bundle.front).as_bytes(),
    )?;
    write(
        &dir.join("rear.json"),
        write_trajectory(&bundle.rear).as_bytes(),
    )?;
    write(
        &dir.join("front_layout.json"),
        write_layout(&bundle.front_layout).as_bytes(),
    )?;
    write(
        &dir.join("rear_layout.json"),
        write_layout(&bundle.rear_layout).as_bytes(),
    )?;
    let manifest = Manifest {
        front: "front.json".into(),
        rear: "rear.json".into(),
        rear_frame_offset: bundle.rear_frame_offset,
        front_layout: "front_layout.json".into(),
        rear_layout: "rear_layout.json".into(),
        ball_front: save_ball(dir, "ball_front", &bundle.ball_front)?,
        ball_rear: save_ball(dir, "ball_rear", &bundle.ball_rear)?,
    };
    let path = dir.join("bundle.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(&path, text.as_bytes())?;
    Ok(path)
}
