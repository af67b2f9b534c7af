//! Layer kinds with forward evaluation and reverse-mode gradients.
//!
//! Activations use height×width×channel layout. Convolution kernels are
//! stored as `[k_h, k_w, c_in, c_out]` and dense weights as `[out, in]`, both
//! row-major.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq)]
pub struct Conv2d {
    pub kernel: Tensor,
    pub bias: Tensor,
    pub stride: usize,
    pub same_padding: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weight: Tensor,
    pub bias: Tensor,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    Conv2d(Conv2d),
    Dense(Dense),
    Relu,
    MaxPool2x2,
    Flatten,
    Softmax,
}

/// Parameter-free description of a layer, as stored in model file headers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayerKind {
    Conv2d {
        kernel_h: usize,
        kernel_w: usize,
        in_channels: usize,
        out_channels: usize,
        stride: usize,
        same_padding: bool,
    },
    Dense {
        inputs: usize,
        outputs: usize,
    },
    Relu,
    #[serde(rename = "maxpool2x2")]
    MaxPool2x2,
    Flatten,
    Softmax,
}

/// Spatial geometry of one convolution application.
#[derive(Debug, Clone, Copy)]
struct ConvGeometry {
    in_h: usize,
    in_w: usize,
    in_c: usize,
    out_h: usize,
    out_w: usize,
    out_c: usize,
    k_h: usize,
    k_w: usize,
    stride: usize,
    pad_top: usize,
    pad_left: usize,
}

impl ConvGeometry {
    /// Input coordinate read by output `o` at kernel tap `k`, if inside the image.
    #[inline]
    fn source(o: usize, k: usize, stride: usize, pad: usize, extent: usize) -> Option<usize> {
        (o * stride + k).checked_sub(pad).filter(|&i| i < extent)
    }
}

impl Conv2d {
    pub fn new(kernel: Tensor, bias: Tensor, stride: usize, same_padding: bool) -> Result<Self> {
        let ks = kernel.shape();
        if ks.len() != 4 || bias.shape() != [ks[3]] || stride == 0 {
            return Err(Error::InvalidNetwork(format!(
                "conv2d kernel {:?} / bias {:?} / stride {stride} are inconsistent",
                ks,
                bias.shape()
            )));
        }
        Ok(Conv2d {
            kernel,
            bias,
            stride,
            same_padding,
        })
    }

    fn geometry(&self, input: &[usize]) -> Result<ConvGeometry> {
        let ks = self.kernel.shape();
        let (k_h, k_w, k_in, out_c) = (ks[0], ks[1], ks[2], ks[3]);
        let mismatch = || Error::ShapeMismatch {
            layer: "conv2d".into(),
            expected: vec![k_h.max(1), k_w.max(1), k_in],
            found: input.to_vec(),
        };
        if input.len() != 3 || input[2] != k_in {
            return Err(mismatch());
        }
        let (in_h, in_w) = (input[0], input[1]);
        let s = self.stride;
        let (out_h, out_w, pad_top, pad_left) = if self.same_padding {
            let out_h = in_h.div_ceil(s);
            let out_w = in_w.div_ceil(s);
            let pad_h = ((out_h - 1) * s + k_h).saturating_sub(in_h);
            let pad_w = ((out_w - 1) * s + k_w).saturating_sub(in_w);
            (out_h, out_w, pad_h / 2, pad_w / 2)
        } else {
            if in_h < k_h || in_w < k_w {
                return Err(mismatch());
            }
            ((in_h - k_h) / s + 1, (in_w - k_w) / s + 1, 0, 0)
        };
        Ok(ConvGeometry {
            in_h,
            in_w,
            in_c: k_in,
            out_h,
            out_w,
            out_c,
            k_h,
            k_w,
            stride: s,
            pad_top,
            pad_left,
        })
    }

    fn forward(&self, input: &Tensor) -> Result<Tensor> {
        let g = self.geometry(input.shape())?;
        let x = input.data();
        let k = self.kernel.data();
        let mut out = Vec::with_capacity(g.out_h * g.out_w * g.out_c);
        for oy in 0..g.out_h {
            for ox in 0..g.out_w {
                let start = out.len();
                out.extend_from_slice(self.bias.data());
                let acc = &mut out[start..];
                for ky in 0..g.k_h {
                    let Some(iy) = ConvGeometry::source(oy, ky, g.stride, g.pad_top, g.in_h) else {
                        continue;
                    };
                    for kx in 0..g.k_w {
                        let Some(ix) = ConvGeometry::source(ox, kx, g.stride, g.pad_left, g.in_w)
                        else {
                            continue;
                        };
                        let px = &x[(iy * g.in_w + ix) * g.in_c..][..g.in_c];
                        let taps = &k[(ky * g.k_w + kx) * g.in_c * g.out_c..];
                        for (ci, &v) in px.iter().enumerate() {
                            let row = &taps[ci * g.out_c..][..g.out_c];
                            for (a, &w) in acc.iter_mut().zip(row) {
                                *a += v * w;
                            }
                        }
                    }
                }
            }
        }
        Ok(Tensor::from_parts(vec![g.out_h, g.out_w, g.out_c], out))
    }

    fn backward_input(&self, input: &Tensor, output_grad: &Tensor) -> Result<Tensor> {
        let g = self.geometry(input.shape())?;
        check_grad("conv2d", &[g.out_h, g.out_w, g.out_c], output_grad.shape())?;
        let k = self.kernel.data();
        let dy = output_grad.data();
        let mut dx = vec![0.0f32; input.len()];
        for oy in 0..g.out_h {
            for ox in 0..g.out_w {
                let go = &dy[(oy * g.out_w + ox) * g.out_c..][..g.out_c];
                for ky in 0..g.k_h {
                    let Some(iy) = ConvGeometry::source(oy, ky, g.stride, g.pad_top, g.in_h) else {
                        continue;
                    };
                    for kx in 0..g.k_w {
                        let Some(ix) = ConvGeometry::source(ox, kx, g.stride, g.pad_left, g.in_w)
                        else {
                            continue;
                        };
                        let taps = &k[(ky * g.k_w + kx) * g.in_c * g.out_c..];
                        let px = &mut dx[(iy * g.in_w + ix) * g.in_c..][..g.in_c];
                        for (ci, d) in px.iter_mut().enumerate() {
                            let row = &taps[ci * g.out_c..][..g.out_c];
                            *d += dot(row, go);
                        }
                    }
                }
            }
        }
        Ok(Tensor::from_parts(input.shape().to_vec(), dx))
    }

    fn backward_params(&self, input: &Tensor, output_grad: &Tensor) -> Result<Vec<Tensor>> {
        let g = self.geometry(input.shape())?;
        check_grad("conv2d", &[g.out_h, g.out_w, g.out_c], output_grad.shape())?;
        let x = input.data();
        let dy = output_grad.data();
        let mut dk = vec![0.0f32; self.kernel.len()];
        let mut db = vec![0.0f32; g.out_c];
        for oy in 0..g.out_h {
            for ox in 0..g.out_w {
                let go = &dy[(oy * g.out_w + ox) * g.out_c..][..g.out_c];
                for (b, &v) in db.iter_mut().zip(go) {
                    *b += v;
                }
                for ky in 0..g.k_h {
                    let Some(iy) = ConvGeometry::source(oy, ky, g.stride, g.pad_top, g.in_h) else {
                        continue;
                    };
                    for kx in 0..g.k_w {
                        let Some(ix) = ConvGeometry::source(ox, kx, g.stride, g.pad_left, g.in_w)
                        else {
                            continue;
                        };
                        let px = &x[(iy * g.in_w + ix) * g.in_c..][..g.in_c];
                        let taps = &mut dk[(ky * g.k_w + kx) * g.in_c * g.out_c..];
                        for (ci, &v) in px.iter().enumerate() {
                            let row = &mut taps[ci * g.out_c..][..g.out_c];
                            for (d, &gv) in row.iter_mut().zip(go) {
                                *d += v * gv;
                            }
                        }
                    }
                }
            }
        }
        Ok(vec![
            Tensor::from_parts(self.kernel.shape().to_vec(), dk),
            Tensor::from_parts(vec![g.out_c], db),
        ])
    }
}

impl Dense {
    pub fn new(weight: Tensor, bias: Tensor) -> Result<Self> {
        let ws = weight.shape();
        if ws.len() != 2 || bias.shape() != [ws[0]] {
            return Err(Error::InvalidNetwork(format!(
                "dense weight {:?} / bias {:?} are inconsistent",
                ws,
                bias.shape()
            )));
        }
        Ok(Dense { weight, bias })
    }

    pub fn inputs(&self) -> usize {
        self.weight.shape()[1]
    }

    pub fn outputs(&self) -> usize {
        self.weight.shape()[0]
    }

    fn check_input(&self, shape: &[usize]) -> Result<()> {
        if shape != [self.inputs()] {
            return Err(Error::ShapeMismatch {
                layer: "dense".into(),
                expected: vec![self.inputs()],
                found: shape.to_vec(),
            });
        }
        Ok(())
    }

    fn forward(&self, input: &Tensor) -> Result<Tensor> {
        self.check_input(input.shape())?;
        let n = self.inputs();
        let out = self
            .bias
            .data()
            .iter()
            .zip(self.weight.data().chunks_exact(n))
            .map(|(b, row)| b + dot(row, input.data()))
            .collect();
        Ok(Tensor::from_parts(vec![self.outputs()], out))
    }

    fn backward_input(&self, input: &Tensor, output_grad: &Tensor) -> Result<Tensor> {
        self.check_input(input.shape())?;
        check_grad("dense", &[self.outputs()], output_grad.shape())?;
        let n = self.inputs();
        let mut dx = vec![0.0f32; n];
        for (row, &g) in self.weight.data().chunks_exact(n).zip(output_grad.data()) {
            for (d, &w) in dx.iter_mut().zip(row) {
                *d += w * g;
            }
        }
        Ok(Tensor::from_parts(vec![n], dx))
    }

    fn backward_params(&self, input: &Tensor, output_grad: &Tensor) -> Result<Vec<Tensor>> {
        self.check_input(input.shape())?;
        check_grad("dense", &[self.outputs()], output_grad.shape())?;
        let dw = output_grad
            .data()
            .iter()
            .flat_map(|&g| input.data().iter().map(move |&x| g * x))
            .collect();
        Ok(vec![
            Tensor::from_parts(self.weight.shape().to_vec(), dw),
            output_grad.clone(),
        ])
    }
}

impl Layer {
    pub fn name(&self) -> &'static str {
        match self {
            Layer::Conv2d(_) => "conv2d",
            Layer::Dense(_) => "dense",
            Layer::Relu => "relu",
            Layer::MaxPool2x2 => "maxpool2x2",
            Layer::Flatten => "flatten",
            Layer::Softmax => "softmax",
        }
    }

    pub fn kind(&self) -> LayerKind {
        match self {
            Layer::Conv2d(c) => {
                let s = c.kernel.shape();
                LayerKind::Conv2d {
                    kernel_h: s[0],
                    kernel_w: s[1],
                    in_channels: s[2],
                    out_channels: s[3],
                    stride: c.stride,
                    same_padding: c.same_padding,
                }
            }
            Layer::Dense(d) => LayerKind::Dense {
                inputs: d.inputs(),
                outputs: d.outputs(),
            },
            Layer::Relu => LayerKind::Relu,
            Layer::MaxPool2x2 => LayerKind::MaxPool2x2,
            Layer::Flatten => LayerKind::Flatten,
            Layer::Softmax => LayerKind::Softmax,
        }
    }

    /// Parameters in storage order: weights before biases.
    pub fn params(&self) -> Vec<&Tensor> {
        match self {
            Layer::Conv2d(c) => vec![&c.kernel, &c.bias],
            Layer::Dense(d) => vec![&d.weight, &d.bias],
            _ => Vec::new(),
        }
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        match self {
            Layer::Conv2d(c) => vec![&mut c.kernel, &mut c.bias],
            Layer::Dense(d) => vec![&mut d.weight, &mut d.bias],
            _ => Vec::new(),
        }
    }

    pub fn param_count(&self) -> usize {
        self.params().iter().map(|p| p.len()).sum()
    }

    pub fn output_shape(&self, input: &[usize]) -> Result<Vec<usize>> {
        match self {
            Layer::Conv2d(c) => {
                let g = c.geometry(input)?;
                Ok(vec![g.out_h, g.out_w, g.out_c])
            }
            Layer::Dense(d) => {
                d.check_input(input)?;
                Ok(vec![d.outputs()])
            }
            Layer::Relu => Ok(input.to_vec()),
            Layer::MaxPool2x2 => {
                if input.len() != 3 || input[0] < 2 || input[1] < 2 {
                    return Err(Error::ShapeMismatch {
                        layer: "maxpool2x2".into(),
                        expected: vec![2, 2, input.last().copied().unwrap_or(1)],
                        found: input.to_vec(),
                    });
                }
                Ok(vec![input[0] / 2, input[1] / 2, input[2]])
            }
            Layer::Flatten => Ok(vec![input.iter().product()]),
            Layer::Softmax => {
                if input.len() != 1 {
                    return Err(Error::ShapeMismatch {
                        layer: "softmax".into(),
                        expected: vec![input.iter().product()],
                        found: input.to_vec(),
                    });
                }
                Ok(input.to_vec())
            }
        }
    }

    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        match self {
            Layer::Conv2d(c) => c.forward(input),
            Layer::Dense(d) => d.forward(input),
            Layer::Relu => Ok(Tensor::from_parts(
                input.shape().to_vec(),
                input.data().iter().map(|&v| v.max(0.0)).collect(),
            )),
            Layer::MaxPool2x2 => {
                let out_shape = self.output_shape(input.shape())?;
                let out = pool_argmax(input.shape(), &out_shape, input.data())
                    .into_iter()
                    .map(|i| input.data()[i])
                    .collect();
                Ok(Tensor::from_parts(out_shape, out))
            }
            Layer::Flatten => input.clone().reshape(&[input.len()]),
            Layer::Softmax => {
                self.output_shape(input.shape())?;
                Ok(Tensor::from_parts(
                    input.shape().to_vec(),
                    softmax(input.data()),
                ))
            }
        }
    }

    /// Gradient with respect to the layer input, given the gradient at its output.
    pub fn backward_input(&self, input: &Tensor, output_grad: &Tensor) -> Result<Tensor> {
        match self {
            Layer::Conv2d(c) => c.backward_input(input, output_grad),
            Layer::Dense(d) => d.backward_input(input, output_grad),
            Layer::Relu => {
                check_grad("relu", input.shape(), output_grad.shape())?;
                // subgradient 0 at 0
                let dx = input
                    .data()
                    .iter()
                    .zip(output_grad.data())
                    .map(|(&x, &g)| if x > 0.0 { g } else { 0.0 })
                    .collect();
                Ok(Tensor::from_parts(input.shape().to_vec(), dx))
            }
            Layer::MaxPool2x2 => {
                let out_shape = self.output_shape(input.shape())?;
                check_grad("maxpool2x2", &out_shape, output_grad.shape())?;
                let mut dx = vec![0.0f32; input.len()];
                for (src, &g) in pool_argmax(input.shape(), &out_shape, input.data())
                    .into_iter()
                    .zip(output_grad.data())
                {
                    dx[src] += g;
                }
                Ok(Tensor::from_parts(input.shape().to_vec(), dx))
            }
            Layer::Flatten => {
                check_grad("flatten", &[input.len()], output_grad.shape())?;
                output_grad.clone().reshape(input.shape())
            }
            Layer::Softmax => {
                self.output_shape(input.shape())?;
                check_grad("softmax", input.shape(), output_grad.shape())?;
                let y = softmax(input.data());
                let inner = dot(&y, output_grad.data());
                let dx = y
                    .iter()
                    .zip(output_grad.data())
                    .map(|(&p, &g)| p * (g - inner))
                    .collect();
                Ok(Tensor::from_parts(input.shape().to_vec(), dx))
            }
        }
    }

    /// Gradients of the layer parameters, in the order of [`Layer::params`].
    /// Parameter-free layers yield an empty list.
    pub fn backward_params(&self, input: &Tensor, output_grad: &Tensor) -> Result<Vec<Tensor>> {
        match self {
            Layer::Conv2d(c) => c.backward_params(input, output_grad),
            Layer::Dense(d) => d.backward_params(input, output_grad),
            _ => Ok(Vec::new()),
        }
    }
}

fn check_grad(layer: &str, expected: &[usize], found: &[usize]) -> Result<()> {
    if expected != found {
        return Err(Error::ShapeMismatch {
            layer: format!("{layer} output gradient"),
            expected: expected.to_vec(),
            found: found.to_vec(),
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn dot(a: &[f32], b: &[f32]) -> f32 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Max-subtracted softmax. Probabilities are floored at the smallest normal
/// `f32` so that they stay strictly positive.
pub(crate) fn softmax(logits: &[f32]) -> Vec<f32> {
    let max = logits.iter().copied().fold(f32::NEG_INFINITY, f32::max);
    let exps: Vec<f32> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f32 = exps.iter().sum();
    exps.into_iter()
        .map(|e| (e / sum).max(f32::MIN_POSITIVE))
        .collect()
}

/// For every pooled output, the flat input index of its maximum. Ties go to
/// the first element of the window in row-major order.
fn pool_argmax(input: &[usize], output: &[usize], data: &[f32]) -> Vec<usize> {
    let (w, c) = (input[1], input[2]);
    let mut idx = Vec::with_capacity(output.iter().product());
    for oy in 0..output[0] {
        for ox in 0..output[1] {
            for ch in 0..c {
                let mut best = ((2 * oy) * w + 2 * ox) * c + ch;
                for (dy, dx) in [(0, 1), (1, 0), (1, 1)] {
                    let i = ((2 * oy + dy) * w + 2 * ox + dx) * c + ch;
                    if data[i] > data[best] {
                        best = i;
                    }
                }
                idx.push(best);
            }
        }
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(shape: &[usize], data: &[f32]) -> Tensor {
        Tensor::from_vec(shape, data.to_vec()).unwrap()
    }

    #[test]
    fn relu_forward_and_backward() {
        let y = Layer::Relu.forward(&t(&[3], &[-1.0, 0.0, 2.5])).unwrap();
        assert_eq!(y.data(), &[0.0, 0.0, 2.5]);
        let g = Layer::Relu
            .backward_input(&t(&[2], &[-1.0, 2.0]), &t(&[2], &[5.0, 5.0]))
            .unwrap();
        assert_eq!(g.data(), &[0.0, 5.0]);
        let g0 = Layer::Relu
            .backward_input(&t(&[1], &[0.0]), &t(&[1], &[1.0]))
            .unwrap();
        assert_eq!(g0.data(), &[0.0]);
    }

    #[test]
    fn identity_conv_is_identity() {
        let conv =
            Layer::Conv2d(Conv2d::new(t(&[1, 1, 1, 1], &[1.0]), t(&[1], &[0.0]), 1, true).unwrap());
        let img = t(
            &[3, 4, 1],
            &(0..12).map(|v| v as f32 * 0.1).collect::<Vec<_>>(),
        );
        assert_eq!(conv.forward(&img).unwrap(), img);
    }

    #[test]
    fn conv_same_padding_pads_with_zeros() {
        // 3x3 all-ones kernel sums the neighbourhood; corners see 4 pixels.
        let conv = Layer::Conv2d(
            Conv2d::new(t(&[3, 3, 1, 1], &[1.0; 9]), t(&[1], &[0.0]), 1, true).unwrap(),
        );
        let y = conv.forward(&Tensor::filled(&[3, 3, 1], 1.0)).unwrap();
        assert_eq!(y.data(), &[4.0, 6.0, 4.0, 6.0, 9.0, 6.0, 4.0, 6.0, 4.0]);
    }

    #[test]
    fn conv_is_cross_correlation() {
        // Asymmetric kernel: a flip would swap which neighbour is read.
        let conv = Layer::Conv2d(
            Conv2d::new(t(&[1, 3, 1, 1], &[1.0, 0.0, 0.0]), t(&[1], &[0.0]), 1, true).unwrap(),
        );
        let y = conv.forward(&t(&[1, 3, 1], &[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(y.data(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn strided_valid_conv_shape() {
        let conv = Layer::Conv2d(
            Conv2d::new(Tensor::zeros(&[3, 3, 2, 5]), Tensor::zeros(&[5]), 2, false).unwrap(),
        );
        assert_eq!(conv.output_shape(&[7, 9, 2]).unwrap(), vec![3, 4, 5]);
        let same = Layer::Conv2d(
            Conv2d::new(Tensor::zeros(&[3, 3, 2, 5]), Tensor::zeros(&[5]), 2, true).unwrap(),
        );
        assert_eq!(same.output_shape(&[7, 9, 2]).unwrap(), vec![4, 5, 5]);
    }

    #[test]
    fn softmax_uniform_and_stable() {
        let y = Layer::Softmax.forward(&t(&[4], &[0.0; 4])).unwrap();
        assert_eq!(y.data(), &[0.25; 4]);
        let big = Layer::Softmax
            .forward(&t(&[3], &[50.0, -50.0, 49.0]))
            .unwrap();
        let sum: f32 = big.data().iter().sum();
        assert!((sum - 1.0).abs() < 1e-6);
        assert!(big.data().iter().all(|&p| p > 0.0 && p.is_finite()));
    }

    #[test]
    fn dense_forward_and_adjoint() {
        let dense = Layer::Dense(
            Dense::new(t(&[2, 2], &[2.0, 0.0, 0.0, 3.0]), t(&[2], &[1.0, 1.0])).unwrap(),
        );
        assert_eq!(
            dense.forward(&t(&[2], &[1.0, 1.0])).unwrap().data(),
            &[3.0, 4.0]
        );

        let w = t(&[2, 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let d = Layer::Dense(Dense::new(w, Tensor::zeros(&[2])).unwrap());
        let gx = d
            .backward_input(&Tensor::zeros(&[3]), &t(&[2], &[1.0, -1.0]))
            .unwrap();
        // W^T g
        assert_eq!(gx.data(), &[-3.0, -3.0, -3.0]);
    }

    #[test]
    fn dense_param_grad_is_outer_product() {
        let d = Layer::Dense(Dense::new(Tensor::zeros(&[2, 2]), Tensor::zeros(&[2])).unwrap());
        let grads = d
            .backward_params(&t(&[2], &[1.0, 0.0]), &t(&[2], &[0.7, -1.3]))
            .unwrap();
        // weight[o][i] = g[o] * x[i]: column 0 = g, column 1 = 0
        assert_eq!(grads[0].data(), &[0.7, 0.0, -1.3, 0.0]);
        assert_eq!(grads[1].data(), &[0.7, -1.3]);
        let zero = d
            .backward_params(&t(&[2], &[1.0, 2.0]), &Tensor::zeros(&[2]))
            .unwrap();
        assert!(zero.iter().all(|g| g.data().iter().all(|&v| v == 0.0)));
        assert!(Layer::Relu
            .backward_params(&Tensor::zeros(&[2]), &Tensor::zeros(&[2]))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn maxpool_routes_to_first_max() {
        // Window with a tie between positions (0,1) and (1,0).
        let x = t(&[2, 2, 1], &[0.0, 3.0, 3.0, 1.0]);
        let y = Layer::MaxPool2x2.forward(&x).unwrap();
        assert_eq!(y.data(), &[3.0]);
        let g = Layer::MaxPool2x2
            .backward_input(&x, &t(&[1, 1, 1], &[2.0]))
            .unwrap();
        assert_eq!(g.data(), &[0.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let d = Layer::Dense(Dense::new(Tensor::zeros(&[2, 3]), Tensor::zeros(&[2])).unwrap());
        let err = d.forward(&Tensor::zeros(&[4])).unwrap_err().at_layer(5);
        let msg = err.to_string();
        assert!(msg.contains("layer 5"), "{msg}");
        assert!(msg.contains("[3]") && msg.contains("[4]"), "{msg}");
    }
}
