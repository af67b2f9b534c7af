//! 8-bit PNG (via the `png` crate) and binary PPM/PGM.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::Image;

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Quantizes to bytes with round-half-away-from-zero.
pub fn to_bytes_rgb8(image: &Image) -> Vec<u8> {
    image
        .data()
        .iter()
        .map(|&v| (v * 255.0).round() as u8)
        .collect()
}

fn from_bytes(height: usize, width: usize, channels: usize, bytes: &[u8]) -> Result<Image> {
    let data: Vec<f32> = match channels {
        3 => bytes.iter().map(|&b| f32::from(b) / 255.0).collect(),
        1 => bytes
            .iter()
            .flat_map(|&b| [f32::from(b) / 255.0; 3])
            .collect(),
        _ => unreachable!("callers reduce to 1 or 3 channels"),
    };
    Image::new(height, width, 3, data)
}

fn describe(bytes: &[u8]) -> String {
    match bytes {
        [0xFF, 0xD8, ..] => "JPEG".into(),
        [b'G', b'I', b'F', ..] => "GIF".into(),
        [b'B', b'M', ..] => "BMP".into(),
        [b'P', d @ b'1'..=b'7', ..] => format!("PNM variant P{}", *d as char),
        _ => {
            let head: Vec<String> = bytes.iter().take(4).map(|b| format!("{b:02x}")).collect();
            format!("unrecognized file starting with bytes [{}]", head.join(" "))
        }
    }
}

pub fn decode_image(bytes: &[u8]) -> Result<Image> {
    if bytes.starts_with(PNG_SIGNATURE) {
        decode_png(bytes)
    } else if bytes.starts_with(b"P6") || bytes.starts_with(b"P5") {
        decode_pnm(bytes)
    } else {
        Err(Error::UnsupportedImage(describe(bytes)))
    }
}

fn decode_png(bytes: &[u8]) -> Result<Image> {
    let bad = |e: png::DecodingError| Error::UnsupportedImage(format!("PNG: {e}"));
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(bad)?;
    let (color, depth) = reader.output_color_type();
    if depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedImage(format!(
            "PNG with {}-bit samples, only 8-bit is supported",
            depth as u8
        )));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::UnsupportedImage("PNG too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(bad)?;
    buf.truncate(info.buffer_size());
    let (h, w) = (info.height as usize, info.width as usize);
    let step = color.samples();
    // alpha is dropped
    let keep = if step >= 3 { 3 } else { 1 };
    let samples: Vec<u8> = buf
        .chunks_exact(step)
        .flat_map(|px| px[..keep].to_vec())
        .collect();
    from_bytes(h, w, keep, &samples)
}

fn decode_pnm(bytes: &[u8]) -> Result<Image> {
    let channels = if bytes[1] == b'6' { 3 } else { 1 };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                Error::UnsupportedImage(format!("malformed PNM header at byte {start}"))
            })?;
    }
    let [w, h, maxval] = fields;
    if maxval != 255 {
        return Err(Error::UnsupportedImage(format!(
            "PNM with maxval {maxval}, only 8-bit (255) is supported"
        )));
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::UnsupportedImage("malformed PNM header".into()));
    }
    pos += 1;
    let need = w * h * channels;
    let body = bytes.get(pos..pos + need).ok_or_else(|| {
        Error::UnsupportedImage(format!("PNM truncated: need {need} pixel bytes"))
    })?;
    from_bytes(h, w, channels, body)
}

pub fn encode_png(image: &Image) -> Vec<u8> {
    assert_eq!(image.channels(), 3, "PNG output is RGB");
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, image.width() as u32, image.height() as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().expect("in-memory PNG header");
        writer
            .write_image_data(&to_bytes_rgb8(image))
            .expect("in-memory PNG data");
    }
    out
}

pub fn encode_ppm(image: &Image) -> Vec<u8> {
    assert_eq!(image.channels(), 3, "PPM output is RGB");
    let mut out = format!("P6\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(to_bytes_rgb8(image));
    out
}

pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes)
}

/// Writes PPM for a `.ppm` extension, PNG otherwise.
pub fn save_image(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let is_ppm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("ppm"));
    let bytes = if is_ppm {
        encode_ppm(image)
    } else {
        encode_png(image)
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn black_png_loads_as_zeros() {
        let img = Image::filled(3, 5, &[0.0; 3]).unwrap();
        let back = decode_image(&encode_png(&img)).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn hand_built_ppm() {
        let mut bytes = b"P6\n# two by two\n2 2\n255\n".to_vec();
        bytes.extend([0, 51, 255, 255, 0, 102, 1, 2, 3, 254, 253, 128]);
        let img = decode_image(&bytes).unwrap();
        assert_eq!(img.shape(), [2, 2, 3]);
        let expected: Vec<f32> = [0u8, 51, 255, 255, 0, 102, 1, 2, 3, 254, 253, 128]
            .iter()
            .map(|&b| b as f32 / 255.0)
            .collect();
        assert_eq!(img.data(), expected.as_slice());
    }

    #[test]
    fn grayscale_expands_to_rgb() {
        let mut bytes = b"P5 2 1 255\n".to_vec();
        bytes.extend([0, 255]);
        let img = decode_image(&bytes).unwrap();
        assert_eq!(img.data(), &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);

        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, 2, 1);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Eight);
            enc.write_header()
                .unwrap()
                .write_image_data(&[255, 51])
                .unwrap();
        }
        let img = decode_image(&out).unwrap();
        assert_eq!(img.pixel(0, 1), &[0.2, 0.2, 0.2]);
    }

    #[test]
    fn unsupported_formats_are_named() {
        let err = decode_image(&[0xFF, 0xD8, 0xFF, 0xE0])
            .unwrap_err()
            .to_string();
        assert!(err.contains("JPEG"), "{err}");
        let err = decode_image(b"P3\n1 1\n255\n0 0 0")
            .unwrap_err()
            .to_string();
        assert!(err.contains("P3"), "{err}");
        let err = decode_image(b"P6 1 1 65535\n\0\0\0\0\0\0")
            .unwrap_err()
            .to_string();
        assert!(err.contains("65535"), "{err}");

        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, 1, 1);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Sixteen);
            enc.write_header()
                .unwrap()
                .write_image_data(&[0; 6])
                .unwrap();
        }
        let err = decode_image(&out).unwrap_err().to_string();
        assert!(err.contains("16"), "{err}");
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        // 0.5/255 sits exactly between byte values 0 and 1
        let img = Image::new(1, 1, 3, vec![0.5 / 255.0, 1.0, 0.0]).unwrap();
        assert_eq!(to_bytes_rgb8(&img), vec![1, 255, 0]);
    }

    proptest! {
        #[test]
        fn save_load_error_within_half_step(
            data in proptest::collection::vec(0.0f32..=1.0, 4 * 3 * 3),
            ppm in any::<bool>(),
        ) {
            let img = Image::new(4, 3, 3, data).unwrap();
            let bytes = if ppm { encode_ppm(&img) } else { encode_png(&img) };
            let back = decode_image(&bytes).unwrap();
            for (a, b) in img.data().iter().zip(back.data()) {
                prop_assert!((a - b).abs() <= 1.0 / 510.0 + 1e-7);
            }
            // re-encoding already quantized data is lossless
            let again = decode_image(&encode_png(&back)).unwrap();
            prop_assert_eq!(again, back);
        }
    }
}
