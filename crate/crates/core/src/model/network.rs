use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::image::{Image, PixelGrid};
use crate::layer::{Conv2d, Dense, Layer};
use crate::tensor::Tensor;

/// Softmax output of a network: one probability per class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDistribution {
    probs: Vec<f32>,
}

impl ClassDistribution {
    pub fn new(probs: Vec<f32>) -> Self {
        ClassDistribution { probs }
    }

    pub fn probs(&self) -> &[f32] {
        &self.probs
    }

    pub fn prob(&self, class: usize) -> f32 {
        self.probs[class]
    }

    /// Most probable class; the lowest index wins ties.
    pub fn argmax(&self) -> usize {
        self.ranked()[0]
    }

    /// Class indices ordered from most to least probable.
    pub fn ranked(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.probs.len()).collect();
        idx.sort_by(|&a, &b| self.probs[b].total_cmp(&self.probs[a]).then(a.cmp(&b)));
        idx
    }
}

/// Gradient of one class probability with respect to the input image, plus
/// its per-pixel Euclidean norm over channels.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityField {
    pub grad: Tensor,
    pub pixel_norm: PixelGrid,
}

impl SensitivityField {
    pub fn from_grad(grad: Tensor) -> Result<Self> {
        let [h, w, c] = match *grad.shape() {
            [h, w, c] => [h, w, c],
            _ => {
                return Err(Error::ShapeMismatch {
                    layer: "sensitivity".into(),
                    expected: vec![0, 0, 0],
                    found: grad.shape().to_vec(),
                })
            }
        };
        let norms = grad
            .data()
            .chunks_exact(c)
            .map(|px| px.iter().map(|g| g * g).sum::<f32>().sqrt())
            .collect();
        Ok(SensitivityField {
            pixel_norm: PixelGrid::new(h, w, norms)?,
            grad,
        })
    }
}

/// An ordered layer stack ending in softmax.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    input_shape: [usize; 3],
    layers: Vec<Layer>,
    class_names: Vec<String>,
}

impl Network {
    pub fn new(
        input_shape: [usize; 3],
        layers: Vec<Layer>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if !matches!(layers.last(), Some(Layer::Softmax)) {
            return Err(Error::InvalidNetwork("final layer must be softmax".into()));
        }
        if let Some(i) = layers[..layers.len() - 1]
            .iter()
            .position(|l| matches!(l, Layer::Softmax))
        {
            return Err(Error::InvalidNetwork(format!(
                "softmax may only be the final layer, found at layer {i}"
            )));
        }
        let mut shape = input_shape.to_vec();
        for (i, layer) in layers.iter().enumerate() {
            shape = layer.output_shape(&shape).map_err(|e| e.at_layer(i))?;
        }
        if shape != [class_names.len()] {
            return Err(Error::InvalidNetwork(format!(
                "network produces {shape:?} but {} class names were given",
                class_names.len()
            )));
        }
        Ok(Network {
            input_shape,
            layers,
            class_names,
        })
    }

    /// conv3×3(8) → relu → pool → conv3×3(16) → relu → pool → flatten → dense → softmax,
    /// He-normal weights and zero biases drawn from `seed`.
    pub fn default_architecture(
        input_shape: [usize; 3],
        class_names: Vec<String>,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut he = |shape: &[usize], fan_in: usize| {
            let normal = Normal::new(0.0f32, (2.0 / fan_in as f32).sqrt()).expect("positive std");
            let data = (0..shape.iter().product::<usize>())
                .map(|_| normal.sample(&mut rng))
                .collect();
            Tensor::from_parts(shape.to_vec(), data)
        };
        let [h, w, c] = input_shape;
        let k = class_names.len();
        let flat = (h / 2 / 2) * (w / 2 / 2) * 16;
        let layers = vec![
            Layer::Conv2d(Conv2d::new(
                he(&[3, 3, c, 8], 9 * c),
                Tensor::zeros(&[8]),
                1,
                true,
            )?),
            Layer::Relu,
            Layer::MaxPool2x2,
            Layer::Conv2d(Conv2d::new(
                he(&[3, 3, 8, 16], 72),
                Tensor::zeros(&[16]),
                1,
                true,
            )?),
            Layer::Relu,
            Layer::MaxPool2x2,
            Layer::Flatten,
            Layer::Dense(Dense::new(he(&[k, flat], flat), Tensor::zeros(&[k]))?),
            Layer::Softmax,
        ];
        Network::new(input_shape, layers, class_names)
    }

    pub fn input_shape(&self) -> [usize; 3] {
        self.input_shape
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    /// Visits every parameter buffer in storage order. Shapes cannot change.
    pub fn for_each_param_mut(&mut self, mut f: impl FnMut(&mut [f32])) {
        for layer in &mut self.layers {
            for p in layer.params_mut() {
                f(p.data_mut());
            }
        }
    }

    /// Accepts a class index or a class name.
    pub fn resolve_class(&self, class: &str) -> Result<usize> {
        if let Ok(index) = class.parse::<usize>() {
            self.check_class(index)?;
            return Ok(index);
        }
        self.class_names
            .iter()
            .position(|n| n == class)
            .ok_or_else(|| Error::UnknownClass {
                name: class.to_string(),
                known: self.class_names.join(", "),
            })
    }

    pub fn check_class(&self, index: usize) -> Result<()> {
        if index >= self.class_count() {
            return Err(Error::ClassIndex {
                index,
                count: self.class_count(),
            });
        }
        Ok(())
    }

    fn check_image(&self, image: &Image) -> Result<()> {
        if image.shape() != self.input_shape {
            return Err(Error::ShapeMismatch {
                layer: "network input".into(),
                expected: self.input_shape.to_vec(),
                found: image.shape().to_vec(),
            });
        }
        Ok(())
    }

    /// Inputs to every layer followed by the final output.
    pub(crate) fn trace(&self, input: Tensor) -> Result<Vec<Tensor>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(input);
        for (i, layer) in self.layers.iter().enumerate() {
            let next = layer.forward(&acts[i]).map_err(|e| e.at_layer(i))?;
            acts.push(next);
        }
        Ok(acts)
    }

    /// Backpropagates `grad` (taken at the output of layer `from`) down to the input,
    /// calling `on_layer` with each visited layer's index, input and output gradient.
    pub(crate) fn backprop(
        &self,
        acts: &[Tensor],
        from: usize,
        mut grad: Tensor,
        mut on_layer: impl FnMut(usize, &Tensor, &Tensor) -> Result<()>,
    ) -> Result<Tensor> {
        for i in (0..=from).rev() {
            on_layer(i, &acts[i], &grad)?;
            grad = self.layers[i]
                .backward_input(&acts[i], &grad)
                .map_err(|e| e.at_layer(i))?;
        }
        Ok(grad)
    }

    pub fn predict(&self, image: &Image) -> Result<ClassDistribution> {
        self.check_image(image)?;
        let mut x = image.to_tensor();
        for (i, layer) in self.layers.iter().enumerate() {
            x = layer.forward(&x).map_err(|e| e.at_layer(i))?;
        }
        Ok(ClassDistribution::new(x.into_data()))
    }

    pub fn predict_batch(
        &self,
        images: &[Image],
        exec: Execution,
    ) -> Result<Vec<ClassDistribution>> {
        exec.map(images, |img| self.predict(img))
            .into_iter()
            .collect()
    }

    /// Gradient of the softmax probability of `class` with respect to every
    /// input value.
    pub fn sensitivity(&self, image: &Image, class: usize) -> Result<SensitivityField> {
        self.check_class(class)?;
        self.check_image(image)?;
        let acts = self.trace(image.to_tensor())?;
        let mut seed = Tensor::zeros(&[self.class_count()]);
        seed.data_mut()[class] = 1.0;
        let grad = self.backprop(&acts, self.layers.len() - 1, seed, |_, _, _| Ok(()))?;
        SensitivityField::from_grad(grad)
    }
}
