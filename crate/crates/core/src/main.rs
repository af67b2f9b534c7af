use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use nlsal::cli::{
    cmd_classify, cmd_compare, cmd_gen_data, cmd_saliency, cmd_train, parse_little_h,
    parse_schedule, CompareOptions, ImageSource, SaliencyOptions, TrainOptions,
};
use nlsal::model::TrainConfig;
use nlsal::{Mode, SaliencyConfig};

#[derive(Parser)]
#[command(
    name = "nlsal",
    version,
    about = "Nonlinear saliency maps for a small CNN"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic shapes dataset.
    GenData {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        count: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Train the default architecture on a generated dataset.
    Train {
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        model_out: PathBuf,
        #[arg(long, default_value_t = TrainConfig::default().epochs)]
        epochs: usize,
        #[arg(long, default_value_t = TrainConfig::default().learning_rate)]
        lr: f32,
        #[arg(long, default_value_t = TrainConfig::default().batch_size)]
        batch_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print class probabilities for an image.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        image: ImageArgs,
    },
    /// Run one saliency trajectory and write its figures.
    Saliency {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        image: ImageArgs,
        /// Target class, by name or index.
        #[arg(long)]
        class: String,
        #[arg(long, default_value = "nonlinear")]
        mode: Mode,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Compare linear and nonlinear maps for two classes.
    Compare {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        image: ImageArgs,
        #[arg(long)]
        class_a: String,
        #[arg(long)]
        class_b: String,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct ImageArgs {
    /// PNG or PPM input; without it a shapes image is generated from --seed.
    #[arg(long)]
    image: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ImageArgs {
    fn source(&self) -> ImageSource {
        match &self.image {
            Some(p) => ImageSource::File(p.clone()),
            None => ImageSource::Generated { seed: self.seed },
        }
    }
}

#[derive(Args)]
struct ConfigArgs {
    /// Comma list of blur percents.
    #[arg(long, default_value = "0,5,10,20,30,50,75,95")]
    schedule: String,
    #[arg(long, default_value_t = 25)]
    steps_per_fraction: usize,
    /// `auto` or an absolute step size.
    #[arg(long, default_value = "auto")]
    little_h: String,
    #[arg(long, default_value_t = 1.0)]
    sigma: f32,
    #[arg(long, default_value_t = 2)]
    radius: usize,
}

impl ConfigArgs {
    fn config(&self) -> anyhow::Result<SaliencyConfig> {
        Ok(SaliencyConfig {
            step: parse_little_h(&self.little_h)?,
            schedule: parse_schedule(&self.schedule)?,
            steps_per_fraction: self.steps_per_fraction,
            kernel_sigma: self.sigma,
            kernel_radius: self.radius,
            ..SaliencyConfig::default()
        })
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::GenData {
            seed,
            count,
            out_dir,
        } => {
            let s = cmd_gen_data(seed, count, &out_dir)?;
            println!(
                "wrote {} images to {} (per class {:?})",
                s.count,
                out_dir.display(),
                s.per_class
            );
        }
        Command::Train {
            data_dir,
            model_out,
            epochs,
            lr,
            batch_size,
            seed,
        } => {
            let opts = TrainOptions {
                data_dir,
                model_out,
                config: TrainConfig {
                    epochs,
                    learning_rate: lr,
                    batch_size,
                    seed,
                },
            };
            let s = cmd_train(&opts, |e| {
                eprintln!("epoch {} loss {:.4}", e.epoch + 1, e.mean_loss)
            })
            .context("training failed")?;
            println!("train_accuracy={}", s.accuracy);
        }
        Command::Classify { model, image } => {
            for (name, p) in cmd_classify(&model, &image.source())? {
                println!("{name}\t{p}");
            }
        }
        Command::Saliency {
            model,
            image,
            class,
            mode,
            config,
            out_dir,
        } => {
            let out = cmd_saliency(&SaliencyOptions {
                model,
                image: image.source(),
                class,
                mode,
                config: config.config()?,
                out_dir,
            })?;
            println!("{}", out.summary);
            println!("output: {}", out.run_dir.display());
        }
        Command::Compare {
            model,
            image,
            class_a,
            class_b,
            config,
            out_dir,
        } => {
            let out = cmd_compare(&CompareOptions {
                model,
                image: image.source(),
                class_a,
                class_b,
                config: config.config()?,
                out_dir,
            })?;
            for r in &out.rows {
                println!("class={} disagreement={}", r.class_name, r.disagreement);
            }
            println!("output: {}", out.run_dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
