//! Synthetic shapes: one filled square, disk, triangle or cross per 32×32
//! image, over a dark background with random clutter.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::image::Image;
use crate::imaging::{load_image, save_image};
use crate::model::LabeledImage;

pub const SHAPE_CLASSES: [&str; 4] = ["square", "disk", "triangle", "cross"];
pub const SHAPE_SIZE: usize = 32;
pub const LABELS_FILE: &str = "labels.txt";

pub fn class_names() -> Vec<String> {
    SHAPE_CLASSES.iter().map(|s| s.to_string()).collect()
}

/// Image `index` of the stream for `seed`, labelled round-robin by index.
pub fn shape_example(seed: u64, index: usize) -> LabeledImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let label = index % SHAPE_CLASSES.len();
    LabeledImage {
        image: draw(&mut rng, label),
        label,
    }
}

pub fn generate(seed: u64, count: usize, exec: Execution) -> Vec<LabeledImage> {
    exec.map_range(count, |i| shape_example(seed, i))
}

fn draw(rng: &mut ChaCha8Rng, label: usize) -> Image {
    let n = SHAPE_SIZE;
    let bg: [f32; 3] = std::array::from_fn(|_| rng.random_range(0.0..0.4));
    let mut px: Vec<[f32; 3]> = vec![bg; n * n];

    // clutter: single dots and short axis-aligned strokes
    for _ in 0..rng.random_range(6..11) {
        let color: [f32; 3] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
        let (x, y) = (rng.random_range(0..n), rng.random_range(0..n));
        let len = if rng.random_bool(0.5) {
            1
        } else {
            rng.random_range(3..6)
        };
        let horizontal = rng.random_bool(0.5);
        for t in 0..len {
            let (xx, yy) = if horizontal { (x + t, y) } else { (x, y + t) };
            if xx < n && yy < n {
                px[yy * n + xx] = color;
            }
        }
    }

    let color: [f32; 3] = std::array::from_fn(|_| rng.random_range(0.55..1.0));
    let cx = rng.random_range(10.0..22.0f32);
    let cy = rng.random_range(10.0..22.0f32);
    let s = rng.random_range(5.0..8.5f32);
    let bar = (s / 3.0).max(1.5);
    for y in 0..n {
        for x in 0..n {
            let dx = x as f32 + 0.5 - cx;
            let dy = y as f32 + 0.5 - cy;
            let inside = match label {
                0 => dx.abs() <= 0.8 * s && dy.abs() <= 0.8 * s,
                1 => dx * dx + dy * dy <= s * s,
                2 => dy.abs() <= s && dx.abs() <= (dy + s) / 2.0,
                _ => (dx.abs() <= bar && dy.abs() <= s) || (dy.abs() <= bar && dx.abs() <= s),
            };
            if inside {
                px[y * n + x] = color;
            }
        }
    }

    let data = px
        .into_iter()
        .flatten()
        .map(|v| v + rng.random_range(-0.03..0.03))
        .collect();
    Image::from_clipped(n, n, 3, data).expect("finite pixels")
}

/// Writes `shape_NNNNN.png` files and a `labels.txt` with one
/// `file,label,name` line per image.
pub fn write_dataset(data: &[LabeledImage], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut labels = String::new();
    for (i, ex) in data.iter().enumerate() {
        let file = format!("shape_{i:05}.png");
        save_image(&ex.image, dir.join(&file))?;
        labels.push_str(&format!(
            "{file},{},{}\n",
            ex.label, SHAPE_CLASSES[ex.label]
        ));
    }
    let path = dir.join(LABELS_FILE);
    fs::write(&path, labels).map_err(|e| Error::io(&path, e))
}

pub fn read_dataset(dir: &Path) -> Result<Vec<LabeledImage>> {
    let path = dir.join(LABELS_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut out = Vec::new();
    for (n, line) in text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
    {
        let mut parts = line.split(',');
        let (Some(file), Some(label)) = (parts.next(), parts.next()) else {
            return Err(Error::InvalidArgument(format!(
                "{}:{}: expected `file,label[,name]`",
                path.display(),
                n + 1
            )));
        };
        let label = label.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!("{}:{}: bad label `{label}`", path.display(), n + 1))
        })?;
        out.push(LabeledImage {
            image: load_image(dir.join(file.trim()))?,
            label,
        });
    }
    if out.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_and_balanced() {
        let a = generate(7, 10, Execution::Parallel);
        let b = generate(7, 10, Execution::Sequential);
        assert_eq!(a, b);
        assert_ne!(a[0], generate(8, 1, Execution::Sequential)[0]);
        let mut counts = [0usize; 4];
        for ex in &a {
            counts[ex.label] += 1;
            assert_eq!(ex.image.shape(), [32, 32, 3]);
        }
        assert_eq!(counts, [3, 3, 2, 2]);
    }

    #[test]
    fn shape_pixels_are_bright() {
        // the primary shape is drawn last in a bright colour, so the image
        // always holds pixels well above the dark background range
        for i in 0..8 {
            let ex = shape_example(3, i);
            let bright = ex
                .image
                .pixels()
                .filter(|p| p.iter().all(|&v| v > 0.5))
                .count();
            assert!(bright >= 20, "image {i} has only {bright} bright pixels");
        }
    }
}
