//! Networks, classification, and class sensitivity.

mod file;
mod network;
mod train;

pub use file::{from_bytes, load, save, to_bytes, FORMAT_VERSION, MAGIC};
pub use network::{ClassDistribution, Network, SensitivityField};
pub use train::{accuracy, sgd_step, train, train_observed, EpochStats, LabeledImage, TrainConfig};
