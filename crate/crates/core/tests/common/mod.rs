//! Test-only reference implementations, written independently of the crate's
//! layer code: naive f64 loops straight from the layer definitions.

#![allow(dead_code)]

use nlsal::layer::Layer;
use nlsal::Network;

/// Forward one layer in f64. Appends the branch taken at every
/// non-differentiable point (relu sign, pooling winner) to `pattern`, so
/// callers can tell whether a finite-difference probe crossed a kink.
pub fn layer_forward(
    layer: &Layer,
    shape: &[usize],
    x: &[f64],
    pattern: &mut Vec<u32>,
) -> (Vec<usize>, Vec<f64>) {
    match layer {
        Layer::Conv2d(c) => {
            let ks = c.kernel.shape();
            let (kh, kw, cin, cout) = (ks[0], ks[1], ks[2], ks[3]);
            let (h, w) = (shape[0], shape[1]);
            let s = c.stride;
            let (oh, ow, pt, pl) = if c.same_padding {
                let oh = h.div_ceil(s);
                let ow = w.div_ceil(s);
                let ph = ((oh - 1) * s + kh).saturating_sub(h);
                let pw = ((ow - 1) * s + kw).saturating_sub(w);
                (oh, ow, ph / 2, pw / 2)
            } else {
                ((h - kh) / s + 1, (w - kw) / s + 1, 0, 0)
            };
            let k = c.kernel.data();
            let b = c.bias.data();
            let mut out = vec![0.0; oh * ow * cout];
            for oy in 0..oh {
                for ox in 0..ow {
                    for co in 0..cout {
                        let mut acc = b[co] as f64;
                        for ky in 0..kh {
                            for kx in 0..kw {
                                let iy = (oy * s + ky) as isize - pt as isize;
                                let ix = (ox * s + kx) as isize - pl as isize;
                                if iy < 0 || ix < 0 || iy >= h as isize || ix >= w as isize {
                                    continue;
                                }
                                for ci in 0..cin {
                                    let wv = k[((ky * kw + kx) * cin + ci) * cout + co] as f64;
                                    acc += wv * x[((iy as usize) * w + ix as usize) * cin + ci];
                                }
                            }
                        }
                        out[(oy * ow + ox) * cout + co] = acc;
                    }
                }
            }
            (vec![oh, ow, cout], out)
        }
        Layer::Dense(d) => {
            let n = d.inputs();
            let wt = d.weight.data();
            let out = (0..d.outputs())
                .map(|o| {
                    d.bias.data()[o] as f64
                        + (0..n).map(|i| wt[o * n + i] as f64 * x[i]).sum::<f64>()
                })
                .collect();
            (vec![d.outputs()], out)
        }
        Layer::Relu => {
            pattern.extend(x.iter().map(|&v| (v > 0.0) as u32));
            (shape.to_vec(), x.iter().map(|&v| v.max(0.0)).collect())
        }
        Layer::MaxPool2x2 => {
            let (h, w, c) = (shape[0], shape[1], shape[2]);
            let (oh, ow) = (h / 2, w / 2);
            let mut out = Vec::with_capacity(oh * ow * c);
            for oy in 0..oh {
                for ox in 0..ow {
                    for ch in 0..c {
                        let cand = [(0, 0), (0, 1), (1, 0), (1, 1)]
                            .map(|(dy, dx)| x[((2 * oy + dy) * w + 2 * ox + dx) * c + ch]);
                        let mut best = 0;
                        for j in 1..4 {
                            if cand[j] > cand[best] {
                                best = j;
                            }
                        }
                        pattern.push(best as u32);
                        out.push(cand[best]);
                    }
                }
            }
            (vec![oh, ow, c], out)
        }
        Layer::Flatten => (vec![x.len()], x.to_vec()),
        Layer::Softmax => {
            let m = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let e: Vec<f64> = x.iter().map(|v| (v - m).exp()).collect();
            let z: f64 = e.iter().sum();
            (shape.to_vec(), e.into_iter().map(|v| v / z).collect())
        }
    }
}

pub fn layers_forward(layers: &[Layer], shape: &[usize], x: &[f64]) -> (Vec<f64>, Vec<u32>) {
    let mut pattern = Vec::new();
    let mut shape = shape.to_vec();
    let mut x = x.to_vec();
    for layer in layers {
        let (s, y) = layer_forward(layer, &shape, &x, &mut pattern);
        shape = s;
        x = y;
    }
    (x, pattern)
}

pub fn network_forward(net: &Network, x: &[f64]) -> (Vec<f64>, Vec<u32>) {
    layers_forward(net.layers(), &net.input_shape(), x)
}

/// Central differences of `f` at `x` with step `h`. Entries whose probe
/// changes the kink pattern come back as `None`.
pub fn central_differences(
    x: &[f64],
    h: f64,
    f: impl Fn(&[f64]) -> (f64, Vec<u32>),
) -> Vec<Option<f64>> {
    let (_, base) = f(x);
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let (up, pu) = f(&probe);
            probe[i] = x[i] - h;
            let (down, pd) = f(&probe);
            probe[i] = x[i];
            (pu == base && pd == base).then(|| (up - down) / (2.0 * h))
        })
        .collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Deterministic pseudo-random values in `[lo, hi)`.
pub fn lcg_values(seed: u64, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut s = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    (0..n)
        .map(|_| {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            lo + (hi - lo) * ((s >> 11) as f64 / (1u64 << 53) as f64)
        })
        .collect()
}

use nlsal::layer::Dense;
use nlsal::Tensor;

/// `flatten → dense(2) → softmax` on 8×8×3 input whose first weight row has
/// per-pixel magnitudes that are distinct and well separated, and whose
/// second row is zero. The class gradient then always points along the first
/// row, so the pixel ranking never depends on the image.
pub fn affine_model() -> Network {
    let pixels = 64;
    let signs = lcg_values(99, pixels * 3, -1.0, 1.0);
    let mut row = Vec::with_capacity(pixels * 3);
    for p in 0..pixels {
        // permuted so saliency is not simply row-major
        let rank = (p * 37) % pixels;
        let base = 0.5 + 0.5 * rank as f64 / (pixels - 1) as f64;
        for c in 0..3 {
            let s = if signs[p * 3 + c] >= 0.0 { 1.0 } else { -1.0 };
            row.push((0.01 * base * s) as f32);
        }
    }
    row.extend(std::iter::repeat_n(0.0f32, pixels * 3));
    let weight = Tensor::from_vec(&[2, pixels * 3], row).unwrap();
    Network::new(
        [8, 8, 3],
        vec![
            Layer::Flatten,
            Layer::Dense(Dense::new(weight, Tensor::zeros(&[2])).unwrap()),
            Layer::Softmax,
        ],
        vec!["up".into(), "down".into()],
    )
    .unwrap()
}

pub fn random_image(seed: u64, h: usize, w: usize) -> nlsal::Image {
    let data = lcg_values(seed, h * w * 3, 0.0, 1.0)
        .into_iter()
        .map(|v| v as f32)
        .collect();
    nlsal::Image::new(h, w, 3, data).unwrap()
}

use std::sync::OnceLock;

/// Default architecture trained briefly on generated shapes; shared per test binary.
pub fn small_trained_model() -> &'static Network {
    static NET: OnceLock<Network> = OnceLock::new();
    NET.get_or_init(|| {
        let data = nlsal::dataset::generate(100, 400, nlsal::Execution::Parallel);
        let net =
            Network::default_architecture([32, 32, 3], nlsal::dataset::class_names(), 100).unwrap();
        let cfg = nlsal::model::TrainConfig {
            epochs: 4,
            ..Default::default()
        };
        nlsal::model::train(net, &data, &cfg).unwrap()
    })
}
