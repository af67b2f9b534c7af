//! Command implementations behind the `nlsal` binary.
//!
//! Every command is a plain function so it can be driven from tests. Figure
//! outputs go to `out_dir/run-<hash>/`, where the hash covers every flag that
//! affects the result.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::dataset;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::image::Image;
use crate::imaging::{load_image, render_montage, render_trajectory_plot, save_image, Layout};
use crate::model::{self, accuracy, train_observed, EpochStats, Network, TrainConfig};
use crate::saliency::{
    retrace_best, run, run_batch, write_record, Job, Mode, SaliencyConfig, StepSize,
    TrajectoryRecord,
};

const MONTAGE_GUTTER: usize = 2;

pub struct GenDataSummary {
    pub count: usize,
    pub per_class: Vec<usize>,
}

pub fn cmd_gen_data(seed: u64, count: usize, out_dir: &Path) -> Result<GenDataSummary> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be positive".into()));
    }
    let data = dataset::generate(seed, count, Execution::default());
    dataset::write_dataset(&data, out_dir)?;
    let mut per_class = vec![0; dataset::SHAPE_CLASSES.len()];
    for ex in &data {
        per_class[ex.label] += 1;
    }
    Ok(GenDataSummary { count, per_class })
}

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub data_dir: PathBuf,
    pub model_out: PathBuf,
    pub config: TrainConfig,
}

pub struct TrainSummary {
    pub accuracy: f32,
    pub epochs: Vec<EpochStats>,
}

/// Trains the default architecture on a generated dataset directory. The
/// initial weights are drawn from the same seed as the shuffle order.
pub fn cmd_train(
    opts: &TrainOptions,
    mut on_epoch: impl FnMut(EpochStats),
) -> Result<TrainSummary> {
    let data = dataset::read_dataset(&opts.data_dir)?;
    let shape = data[0].image.shape();
    let net = Network::default_architecture(shape, dataset::class_names(), opts.config.seed)?;
    let mut epochs = Vec::new();
    let net = train_observed(net, &data, &opts.config, |s| {
        epochs.push(s);
        on_epoch(s);
    })?;
    model::save(&net, &opts.model_out)?;
    Ok(TrainSummary {
        accuracy: accuracy(&net, &data, Execution::default())?,
        epochs,
    })
}

/// Where the input image comes from: a file, or the shapes generator.
#[derive(Debug, Clone, PartialEq)]
pub enum ImageSource {
    File(PathBuf),
    /// First image of the shapes stream for this seed.
    Generated {
        seed: u64,
    },
}

impl ImageSource {
    pub fn load(&self) -> Result<Image> {
        match self {
            ImageSource::File(p) => load_image(p),
            ImageSource::Generated { seed } => Ok(dataset::shape_example(*seed, 0).image),
        }
    }

    fn describe(&self) -> String {
        match self {
            ImageSource::File(p) => format!("file:{}", p.display()),
            ImageSource::Generated { seed } => format!("generated:{seed}"),
        }
    }
}

fn describe_config(cfg: &SaliencyConfig) -> String {
    let step = match cfg.step {
        StepSize::Auto { max_move } => format!("auto:{max_move}"),
        StepSize::Fixed(h) => h.to_string(),
    };
    let schedule: Vec<String> = cfg.schedule.iter().map(|q| q.to_string()).collect();
    let bg: Vec<String> = cfg.background.iter().map(|v| v.to_string()).collect();
    format!(
        "schedule={};steps={};little_h={step};sigma={};radius={};background={}",
        schedule.join(","),
        cfg.steps_per_fraction,
        cfg.kernel_sigma,
        cfg.kernel_radius,
        bg.join(",")
    )
}

pub fn run_dir(out_dir: &Path, canonical_flags: &str) -> PathBuf {
    let digest = Sha256::digest(canonical_flags.as_bytes());
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    out_dir.join(format!("run-{hex}"))
}

fn create(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone)]
pub struct SaliencyOptions {
    pub model: PathBuf,
    pub image: ImageSource,
    /// Class index or name.
    pub class: String,
    pub mode: Mode,
    pub config: SaliencyConfig,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone)]
pub struct SaliencyOutcome {
    pub run_dir: PathBuf,
    pub trajectory: TrajectoryRecord,
    pub best_index: usize,
    pub best_prob: f32,
    pub threshold_estimate: Option<f64>,
    pub summary: String,
}

/// Runs one trajectory and writes its CSV, snapshots, manifest, montage of
/// the schedule points (images above maps), SVG plot and summary.
pub fn cmd_saliency(opts: &SaliencyOptions) -> Result<SaliencyOutcome> {
    let net = model::load(&opts.model)?;
    let image = opts.image.load()?;
    let class = net.resolve_class(&opts.class)?;
    let class_name = net.class_names()[class].clone();
    let traj = run(&net, &image, class, opts.mode, &opts.config)?;
    let best = retrace_best(&traj)?;

    let flags = format!(
        "saliency;model={};image={};class={class};mode={};{}",
        opts.model.display(),
        opts.image.describe(),
        opts.mode.as_str(),
        describe_config(&opts.config)
    );
    let dir = run_dir(&opts.out_dir, &flags);
    create(&dir)?;
    write_record(&traj, &class_name, &dir)?;

    let ends = traj.fraction_ends();
    let tiles: Vec<Image> = ends
        .iter()
        .map(|s| s.image.clone())
        .chain(ends.iter().map(|s| s.map.clone()))
        .collect();
    let montage = render_montage(
        &tiles,
        Layout {
            rows: 2,
            cols: ends.len(),
            separator_px: MONTAGE_GUTTER,
        },
    )?;
    save_image(&montage, dir.join("montage.png"))?;
    write(
        &dir.join("trajectory.svg"),
        &render_trajectory_plot(&traj, &class_name)?,
    )?;

    let threshold = best
        .threshold_estimate
        .map_or_else(|| "none".to_string(), |t| t.to_string());
    let summary = format!(
        "class={class_name} mode={} best_prob={} best_step={} best_blur_fraction={} threshold_estimate={threshold}",
        opts.mode.as_str(),
        best.best_prob,
        best.best_index,
        best.best_step.blur_fraction
    );
    write(&dir.join("summary.txt"), &format!("{summary}\n"))?;
    Ok(SaliencyOutcome {
        run_dir: dir,
        best_index: best.best_index,
        best_prob: best.best_prob,
        threshold_estimate: best.threshold_estimate,
        trajectory: traj,
        summary,
    })
}

#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub model: PathBuf,
    pub image: ImageSource,
    pub class_a: String,
    pub class_b: String,
    pub config: SaliencyConfig,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone)]
pub struct CompareRow {
    pub class: usize,
    pub class_name: String,
    pub linear_map: Image,
    pub nonlinear_map: Image,
    /// Fraction of pixels masked in exactly one of the two final maps.
    pub disagreement: f64,
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub run_dir: PathBuf,
    pub rows: Vec<CompareRow>,
}

/// Linear against nonlinear maps at the final schedule fraction, per class:
/// one row of original / linear map / nonlinear map each.
pub fn compare(
    net: &Network,
    image: &Image,
    classes: [usize; 2],
    cfg: &SaliencyConfig,
) -> Result<Vec<CompareRow>> {
    let jobs: Vec<Job> = classes
        .iter()
        .flat_map(|&class| {
            [Mode::Linear, Mode::Nonlinear].map(|mode| Job {
                image: image.clone(),
                class,
                mode,
            })
        })
        .collect();
    let mut trajs = run_batch(net, &jobs, cfg, Execution::default()).into_iter();
    let mut rows = Vec::with_capacity(2);
    for &class in &classes {
        let lin = trajs.next().expect("linear job")?;
        let non = trajs.next().expect("nonlinear job")?;
        let (l, n) = (
            lin.steps.last().ok_or(Error::EmptyTrajectory)?,
            non.steps.last().ok_or(Error::EmptyTrajectory)?,
        );
        rows.push(CompareRow {
            class,
            class_name: net.class_names()[class].clone(),
            disagreement: l.selection.disagreement(&n.selection),
            linear_map: l.map.clone(),
            nonlinear_map: n.map.clone(),
        });
    }
    Ok(rows)
}

pub fn cmd_compare(opts: &CompareOptions) -> Result<CompareOutcome> {
    let net = model::load(&opts.model)?;
    let image = opts.image.load()?;
    let classes = [
        net.resolve_class(&opts.class_a)?,
        net.resolve_class(&opts.class_b)?,
    ];
    let rows = compare(&net, &image, classes, &opts.config)?;

    let flags = format!(
        "compare;model={};image={};classes={},{};{}",
        opts.model.display(),
        opts.image.describe(),
        classes[0],
        classes[1],
        describe_config(&opts.config)
    );
    let dir = run_dir(&opts.out_dir, &flags);
    create(&dir)?;
    let tiles: Vec<Image> = rows
        .iter()
        .flat_map(|r| [image.clone(), r.linear_map.clone(), r.nonlinear_map.clone()])
        .collect();
    let montage = render_montage(
        &tiles,
        Layout {
            rows: rows.len(),
            cols: 3,
            separator_px: MONTAGE_GUTTER,
        },
    )?;
    save_image(&montage, dir.join("compare.png"))?;
    let mut csv = String::from("class_index,class_name,disagreement\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{}\n",
            r.class, r.class_name, r.disagreement
        ));
    }
    write(&dir.join("compare.csv"), &csv)?;
    Ok(CompareOutcome { run_dir: dir, rows })
}

/// Class probabilities for one image, most probable first.
pub fn cmd_classify(model_path: &Path, image: &ImageSource) -> Result<Vec<(String, f32)>> {
    let net = model::load(model_path)?;
    let probs = net.predict(&image.load()?)?;
    Ok(probs
        .ranked()
        .into_iter()
        .map(|c| (net.class_names()[c].clone(), probs.prob(c)))
        .collect())
}

/// Parses a comma list of percents such as `0,5,10,95`.
pub fn parse_schedule(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map(|v| v / 100.0)
                .map_err(|_| Error::InvalidArgument(format!("bad schedule percent `{p}`")))
        })
        .collect()
}

/// `auto` or an absolute non-negative step size.
pub fn parse_little_h(text: &str) -> Result<StepSize> {
    if text == "auto" {
        return Ok(SaliencyConfig::default().step);
    }
    match text.parse::<f32>() {
        Ok(h) if h >= 0.0 && h.is_finite() => Ok(StepSize::Fixed(h)),
        _ => Err(Error::InvalidArgument(format!(
            "--little-h must be `auto` or a non-negative number, got `{text}`"
        ))),
    }
}
