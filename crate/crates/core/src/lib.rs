//! Nonlinear saliency maps.
//!
//! A small convolutional network engine ([`tensor`], [`layer`], [`model`])
//! supplies class probabilities and their input gradients. [`saliency`]
//! drives an image toward a target class by blurring its least sensitive
//! pixels and stepping along the class gradient, recording the trajectory
//! and the masked saliency map at every step. [`imaging`] reads and writes
//! images and renders montages and trajectory plots; [`dataset`] generates
//! the synthetic shapes the bundled classifier is trained on.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod exec;
pub mod image;
pub mod imaging;
pub mod layer;
pub mod model;
pub mod saliency;
pub mod tensor;

pub use error::{Error, Result};
pub use exec::Execution;
pub use image::{Image, PixelGrid};
pub use layer::Layer;
pub use model::{ClassDistribution, Network, SensitivityField};
pub use saliency::{Mode, SaliencyConfig, TrajectoryRecord};
pub use tensor::Tensor;
