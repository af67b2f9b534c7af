//! Image and per-pixel grid types shared by the model and saliency code.

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Height×width×channel intensities, every value in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f32>,
}

impl Image {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        let expected = height * width * channels;
        if expected == 0 || data.len() != expected {
            return Err(Error::DataLength {
                shape: vec![height, width, channels],
                expected,
                found: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument(format!(
                "image value {} at element {index} is outside [0, 1]",
                data[index]
            )));
        }
        Ok(Image {
            height,
            width,
            channels,
            data,
        })
    }

    /// Clips every value into `[0, 1]`. Non-finite values are rejected.
    pub fn from_clipped(
        height: usize,
        width: usize,
        channels: usize,
        data: Vec<f32>,
    ) -> Result<Self> {
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Image::new(
            height,
            width,
            channels,
            data.into_iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        )
    }

    pub fn filled(height: usize, width: usize, color: &[f32]) -> Result<Self> {
        let data = color
            .iter()
            .copied()
            .cycle()
            .take(height * width * color.len())
            .collect();
        Image::new(height, width, color.len(), data)
    }

    pub fn from_tensor(tensor: &Tensor) -> Result<Self> {
        match *tensor.shape() {
            [h, w, c] => Image::new(h, w, c, tensor.data().to_vec()),
            _ => Err(Error::ShapeMismatch {
                layer: "image".into(),
                expected: vec![0, 0, 0],
                found: tensor.shape().to_vec(),
            }),
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.height, self.width, self.channels]
    }

    pub fn pixel_count(&self) -> usize {
        self.height * self.width
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn pixel(&self, y: usize, x: usize) -> &[f32] {
        let c = self.channels;
        &self.data[(y * self.width + x) * c..][..c]
    }

    pub fn pixels(&self) -> std::slice::ChunksExact<'_, f32> {
        self.data.chunks_exact(self.channels)
    }

    pub fn to_tensor(&self) -> Tensor {
        Tensor::from_parts(self.shape().to_vec(), self.data.clone())
    }

    /// Mean squared difference over all channel values.
    pub fn mse(&self, other: &Image) -> f32 {
        assert_eq!(self.shape(), other.shape(), "mse shape mismatch");
        let sum: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f64::from(a - b).powi(2))
            .sum();
        (sum / self.data.len() as f64) as f32
    }
}

/// A scalar per pixel, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelGrid {
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl PixelGrid {
    pub fn new(height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if height * width == 0 || data.len() != height * width {
            return Err(Error::DataLength {
                shape: vec![height, width],
                expected: height * width,
                found: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(PixelGrid {
            height,
            width,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn get(&self, y: usize, x: usize) -> f32 {
        self.data[y * self.width + x]
    }

    pub fn max(&self) -> f32 {
        self.data.iter().copied().fold(0.0, f32::max)
    }
}
