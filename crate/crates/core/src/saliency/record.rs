//! On-disk trajectory records: a CSV with one row per step, PNG snapshots,
//! and a JSON manifest tying them together.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::trajectory::TrajectoryRecord;
use crate::error::{Error, Result};
use crate::imaging::save_image;

pub const CSV_HEADER: &str = "step_index,blur_fraction,target_prob,top1_index,top1_prob";

/// Floats use shortest round-trip formatting, so parsing a row gives back
/// the recorded value exactly.
pub fn trajectory_csv(traj: &TrajectoryRecord) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (i, step) in traj.steps.iter().enumerate() {
        let top = step.class_probs.argmax();
        writeln!(
            out,
            "{i},{},{},{top},{}",
            step.blur_fraction,
            step.class_probs.prob(traj.target_class),
            step.class_probs.prob(top)
        )
        .expect("write to string");
    }
    out
}

#[derive(Serialize)]
struct SnapshotEntry {
    step_index: usize,
    blur_fraction: f64,
    image: String,
    map: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    target_class: usize,
    target_name: &'a str,
    mode: &'a str,
    steps: usize,
    csv: &'a str,
    snapshots: Vec<SnapshotEntry>,
}

/// Writes `trajectory.csv`, `snapshots/step_NNNN_{image,map}.png` and
/// `manifest.json` under `dir`. Returns the manifest path.
pub fn write_record(traj: &TrajectoryRecord, target_name: &str, dir: &Path) -> Result<PathBuf> {
    let snap_dir = dir.join("snapshots");
    fs::create_dir_all(&snap_dir).map_err(|e| Error::io(&snap_dir, e))?;
    let csv_path = dir.join("trajectory.csv");
    fs::write(&csv_path, trajectory_csv(traj)).map_err(|e| Error::io(&csv_path, e))?;

    let mut snapshots = Vec::with_capacity(traj.steps.len());
    for (i, step) in traj.steps.iter().enumerate() {
        let image = format!("snapshots/step_{i:04}_image.png");
        let map = format!("snapshots/step_{i:04}_map.png");
        save_image(&step.image, dir.join(&image))?;
        save_image(&step.map, dir.join(&map))?;
        snapshots.push(SnapshotEntry {
            step_index: i,
            blur_fraction: step.blur_fraction,
            image,
            map,
        });
    }
    let manifest = Manifest {
        target_class: traj.target_class,
        target_name,
        mode: traj.mode.as_str(),
        steps: traj.steps.len(),
        csv: "trajectory.csv",
        snapshots,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
