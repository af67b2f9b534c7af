use super::config::{Mode, SaliencyConfig};
use super::filter::{enhance_selected, mask_selected};
use super::level::{quantile_level, Selection};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::image::Image;
use crate::model::{ClassDistribution, Network, SensitivityField};

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    pub blur_fraction: f64,
    /// Prediction for `image`.
    pub class_probs: ClassDistribution,
    pub image: Image,
    /// `image` with the selected pixels set to the background colour.
    pub map: Image,
    pub selection: Selection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub target_class: usize,
    pub mode: Mode,
    pub steps: Vec<TrajectoryStep>,
}

impl TrajectoryRecord {
    pub fn target_probs(&self) -> impl Iterator<Item = f32> + '_ {
        self.steps
            .iter()
            .map(|s| s.class_probs.prob(self.target_class))
    }

    /// Last step recorded at each schedule fraction.
    pub fn fraction_ends(&self) -> Vec<&TrajectoryStep> {
        let mut ends: Vec<&TrajectoryStep> = Vec::new();
        for step in &self.steps {
            match ends.last_mut() {
                Some(last) if last.blur_fraction == step.blur_fraction => *last = step,
                _ => ends.push(step),
            }
        }
        ends
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyResult {
    pub best_index: usize,
    pub best_step: TrajectoryStep,
    pub best_prob: f32,
    /// First blur fraction whose step pushes the target above 0.5.
    pub threshold_estimate: Option<f64>,
}

pub fn run_nonlinear(
    net: &Network,
    image: &Image,
    class: usize,
    cfg: &SaliencyConfig,
) -> Result<TrajectoryRecord> {
    run(net, image, class, Mode::Nonlinear, cfg)
}

pub fn run_linear(
    net: &Network,
    image: &Image,
    class: usize,
    cfg: &SaliencyConfig,
) -> Result<TrajectoryRecord> {
    run(net, image, class, Mode::Linear, cfg)
}

/// Runs the blur-and-enhance iteration over the whole schedule, carrying the
/// image forward from one fraction to the next.
pub fn run(
    net: &Network,
    image: &Image,
    class: usize,
    mode: Mode,
    cfg: &SaliencyConfig,
) -> Result<TrajectoryRecord> {
    net.check_class(class)?;
    let kernel = cfg.validate(image.channels())?;
    let frozen = match mode {
        Mode::Linear => Some(net.sensitivity(image, class)?),
        Mode::Nonlinear => None,
    };

    let mut steps = Vec::with_capacity(cfg.total_steps());
    let mut current = image.clone();
    for &q in &cfg.schedule {
        for _ in 0..cfg.steps_per_fraction {
            let fresh: SensitivityField;
            let field = match &frozen {
                Some(f) => f,
                None => {
                    fresh = net.sensitivity(&current, class)?;
                    &fresh
                }
            };
            let selection = quantile_level(&field.pixel_norm, q)?.selection(&field.pixel_norm);
            let h = cfg.step.resolve(field);
            let next = enhance_selected(&current, field, &selection, h, &kernel)?;
            let class_probs = net.predict(&next)?;
            let map = mask_selected(&next, &selection, &cfg.background)?;
            steps.push(TrajectoryStep {
                blur_fraction: q,
                class_probs,
                image: next.clone(),
                map,
                selection,
            });
            current = next;
        }
    }
    Ok(TrajectoryRecord {
        target_class: class,
        mode,
        steps,
    })
}

/// One independent trajectory to compute.
#[derive(Debug, Clone)]
pub struct Job {
    pub image: Image,
    pub class: usize,
    pub mode: Mode,
}

/// Runs independent trajectories, results in job order.
pub fn run_batch(
    net: &Network,
    jobs: &[Job],
    cfg: &SaliencyConfig,
    exec: Execution,
) -> Vec<Result<TrajectoryRecord>> {
    exec.map(jobs, |job| run(net, &job.image, job.class, job.mode, cfg))
}

/// Scans a trajectory for the step with the highest target probability; the
/// earliest step wins ties.
pub fn retrace_best(traj: &TrajectoryRecord) -> Result<SaliencyResult> {
    let mut best: Option<(usize, f32)> = None;
    let mut threshold = None;
    for (i, p) in traj.target_probs().enumerate() {
        if best.is_none_or(|(_, b)| p > b) {
            best = Some((i, p));
        }
        if threshold.is_none() && p > 0.5 {
            threshold = Some(traj.steps[i].blur_fraction);
        }
    }
    let (best_index, best_prob) = best.ok_or(Error::EmptyTrajectory)?;
    Ok(SaliencyResult {
        best_index,
        best_step: traj.steps[best_index].clone(),
        best_prob,
        threshold_estimate: threshold,
    })
}
