//! Plain minibatch SGD on cross-entropy.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Network;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::image::Image;
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledImage {
    pub image: Image,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f32,
    pub batch_size: usize,
    /// Drives the per-epoch shuffle order.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 8,
            learning_rate: 0.05,
            batch_size: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_loss: f32,
}

/// Cross-entropy loss of one example and its parameter gradients, one entry
/// per layer (empty for parameter-free layers).
fn example_grads(net: &Network, example: &LabeledImage) -> Result<(f32, Vec<Vec<Tensor>>)> {
    net.check_class(example.label)?;
    let acts = net.trace(example.image.to_tensor())?;
    let probs = acts.last().expect("non-empty trace");
    let loss = -probs.data()[example.label].ln();

    // d(loss)/d(logits) = p - onehot; start below the softmax.
    let mut logit_grad = probs.clone();
    logit_grad.data_mut()[example.label] -= 1.0;

    let n = net.layers().len();
    let mut grads = vec![Vec::new(); n];
    net.backprop(&acts, n - 2, logit_grad, |i, input, out_grad| {
        grads[i] = net.layers()[i]
            .backward_params(input, out_grad)
            .map_err(|e| e.at_layer(i))?;
        Ok(())
    })?;
    Ok((loss, grads))
}

/// One gradient step on the mean loss of `batch`. Returns the mean loss
/// measured before the step.
pub fn sgd_step(net: &mut Network, batch: &[LabeledImage], learning_rate: f32) -> Result<f32> {
    if batch.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut total_loss = 0.0f32;
    let mut sum: Option<Vec<Vec<Tensor>>> = None;
    for example in batch {
        let (loss, grads) = example_grads(net, example)?;
        total_loss += loss;
        match &mut sum {
            None => sum = Some(grads),
            Some(acc) => {
                for (a_layer, g_layer) in acc.iter_mut().zip(&grads) {
                    for (a, g) in a_layer.iter_mut().zip(g_layer) {
                        a.add_scaled(g, 1.0);
                    }
                }
            }
        }
    }
    let scale = learning_rate / batch.len() as f32;
    let flat: Vec<Tensor> = sum
        .expect("non-empty batch")
        .into_iter()
        .flatten()
        .collect();
    let mut grads = flat.iter();
    net.for_each_param_mut(|p| {
        let g = grads.next().expect("one gradient per parameter");
        for (w, d) in p.iter_mut().zip(g.data()) {
            *w -= scale * d;
        }
    });
    Ok(total_loss / batch.len() as f32)
}

pub fn train(net: Network, data: &[LabeledImage], config: &TrainConfig) -> Result<Network> {
    train_observed(net, data, config, |_| {})
}

/// Like [`train`], reporting the mean minibatch loss after each epoch.
/// Runs on the calling thread only.
pub fn train_observed(
    mut net: Network,
    data: &[LabeledImage],
    config: &TrainConfig,
    mut on_epoch: impl FnMut(EpochStats),
) -> Result<Network> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if config.batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be positive".into()));
    }
    for ex in data {
        if ex.image.shape() != net.input_shape() {
            return Err(Error::ShapeMismatch {
                layer: "training image".into(),
                expected: net.input_shape().to_vec(),
                found: ex.image.shape().to_vec(),
            });
        }
        net.check_class(ex.label)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut batch = Vec::with_capacity(config.batch_size);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0f64;
        let mut batches = 0usize;
        for chunk in order.chunks(config.batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| data[i].clone()));
            loss_sum += f64::from(sgd_step(&mut net, &batch, config.learning_rate)?);
            batches += 1;
        }
        on_epoch(EpochStats {
            epoch,
            mean_loss: (loss_sum / batches as f64) as f32,
        });
    }
    Ok(net)
}

/// Fraction of examples whose argmax prediction equals the label.
pub fn accuracy(net: &Network, data: &[LabeledImage], exec: Execution) -> Result<f32> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let hits = exec
        .map(data, |ex| {
            net.predict(&ex.image).map(|p| p.argmax() == ex.label)
        })
        .into_iter()
        .collect::<Result<Vec<bool>>>()?;
    Ok(hits.iter().filter(|&&h| h).count() as f32 / data.len() as f32)
}
