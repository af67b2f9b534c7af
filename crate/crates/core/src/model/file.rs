//! Binary model files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "NSAL" | version: u16 | header_len: u32 | header: UTF-8 JSON | params: f32 ...
//! ```
//!
//! The header names the input shape, class names and parameter-free layer
//! descriptions. Parameters follow in layer order, weights before biases,
//! each tensor row-major.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Network;
use crate::error::{Error, Result};
use crate::layer::{Conv2d, Dense, Layer, LayerKind};
use crate::tensor::Tensor;

pub const MAGIC: &[u8; 4] = b"NSAL";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    input_shape: [usize; 3],
    classes: Vec<String>,
    layers: Vec<LayerKind>,
}

pub fn to_bytes(net: &Network) -> Vec<u8> {
    let header = Header {
        input_shape: net.input_shape(),
        classes: net.class_names().to_vec(),
        layers: net.layers().iter().map(Layer::kind).collect(),
    };
    let text = serde_json::to_string(&header).expect("header serializes");
    let mut out = Vec::with_capacity(10 + text.len() + 4 * net.param_count());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(text.len() as u32).to_le_bytes());
    out.extend_from_slice(text.as_bytes());
    for layer in net.layers() {
        for p in layer.params() {
            for v in p.data() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::ModelFormat {
                offset: self.bytes.len() as u64,
                message: format!(
                    "truncated while reading {what}: need {n} bytes from offset {}",
                    self.pos
                ),
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn fail(&self, message: impl Into<String>) -> Error {
        Error::ModelFormat {
            offset: self.pos as u64,
            message: message.into(),
        }
    }

    fn tensor(&mut self, shape: &[usize]) -> Result<Tensor> {
        let n: usize = shape.iter().product();
        let start = self.pos;
        let raw = self.take(n * 4, "parameters")?;
        let data: Vec<f32> = raw
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::ModelFormat {
                offset: (start + 4 * i) as u64,
                message: "non-finite parameter".into(),
            });
        }
        Ok(Tensor::from_parts(shape.to_vec(), data))
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<Network> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(Error::ModelFormat {
            offset: 0,
            message: "bad magic bytes, not a model file".into(),
        });
    }
    let v = r.take(2, "version")?;
    let version = u16::from_le_bytes([v[0], v[1]]);
    if version != FORMAT_VERSION {
        return Err(Error::ModelVersion {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let l = r.take(4, "header length")?;
    let len = u32::from_le_bytes([l[0], l[1], l[2], l[3]]) as usize;
    let header_at = r.pos;
    let text = std::str::from_utf8(r.take(len, "header")?).map_err(|e| Error::ModelFormat {
        offset: (header_at + e.valid_up_to()) as u64,
        message: "header is not UTF-8".into(),
    })?;
    let header: Header = serde_json::from_str(text).map_err(|e| Error::ModelFormat {
        offset: header_at as u64,
        message: format!("bad header: {e}"),
    })?;

    let mut layers = Vec::with_capacity(header.layers.len());
    for kind in &header.layers {
        let layer = match *kind {
            LayerKind::Conv2d {
                kernel_h,
                kernel_w,
                in_channels,
                out_channels,
                stride,
                same_padding,
            } => {
                let kernel = r.tensor(&[kernel_h, kernel_w, in_channels, out_channels])?;
                let bias = r.tensor(&[out_channels])?;
                Layer::Conv2d(
                    Conv2d::new(kernel, bias, stride, same_padding)
                        .map_err(|e| r.fail(e.to_string()))?,
                )
            }
            LayerKind::Dense { inputs, outputs } => {
                let weight = r.tensor(&[outputs, inputs])?;
                let bias = r.tensor(&[outputs])?;
                Layer::Dense(Dense::new(weight, bias).map_err(|e| r.fail(e.to_string()))?)
            }
            LayerKind::Relu => Layer::Relu,
            LayerKind::MaxPool2x2 => Layer::MaxPool2x2,
            LayerKind::Flatten => Layer::Flatten,
            LayerKind::Softmax => Layer::Softmax,
        };
        layers.push(layer);
    }
    if r.pos != bytes.len() {
        return Err(r.fail(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    Network::new(header.input_shape, layers, header.classes).map_err(|e| Error::ModelFormat {
        offset: header_at as u64,
        message: e.to_string(),
    })
}

pub fn save(net: &Network, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_bytes(net)).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<Network> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}
