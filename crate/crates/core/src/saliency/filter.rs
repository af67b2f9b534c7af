use super::level::{Level, Selection};
use crate::error::{Error, Result};
use crate::image::{Image, PixelGrid};
use crate::imaging::Kernel;
use crate::model::SensitivityField;

fn check_grid(image: &Image, height: usize, width: usize) -> Result<()> {
    if image.height() != height || image.width() != width {
        return Err(Error::ShapeMismatch {
            layer: "pixel selection".into(),
            expected: vec![image.height(), image.width()],
            found: vec![height, width],
        });
    }
    Ok(())
}

/// Replaces each selected pixel by the kernel-weighted average of its
/// neighbourhood in `image`, clamping coordinates at the edges.
pub fn blur_selected(image: &Image, selection: &Selection, kernel: &Kernel) -> Result<Image> {
    check_grid(image, selection.height(), selection.width())?;
    let (h, w, c) = (image.height(), image.width(), image.channels());
    let r = kernel.radius() as isize;
    let side = kernel.side();
    let src = image.data();
    let mut out = src.to_vec();
    for (i, _) in selection.mask().iter().enumerate().filter(|(_, &s)| s) {
        let (y, x) = ((i / w) as isize, (i % w) as isize);
        let px = &mut out[i * c..(i + 1) * c];
        px.fill(0.0);
        for dy in -r..=r {
            let sy = (y + dy).clamp(0, h as isize - 1) as usize;
            for dx in -r..=r {
                let sx = (x + dx).clamp(0, w as isize - 1) as usize;
                let wgt = kernel.weights()[(dy + r) as usize * side + (dx + r) as usize];
                for (o, &v) in px.iter_mut().zip(&src[(sy * w + sx) * c..]) {
                    *o += wgt * v;
                }
            }
        }
    }
    Image::from_clipped(h, w, c, out)
}

/// Paints each selected pixel with `background`.
pub fn mask_selected(image: &Image, selection: &Selection, background: &[f32]) -> Result<Image> {
    check_grid(image, selection.height(), selection.width())?;
    if background.len() != image.channels() {
        return Err(Error::InvalidArgument(format!(
            "background has {} channels, image has {}",
            background.len(),
            image.channels()
        )));
    }
    let mut out = image.data().to_vec();
    for (px, &s) in out.chunks_exact_mut(image.channels()).zip(selection.mask()) {
        if s {
            px.copy_from_slice(background);
        }
    }
    Image::new(image.height(), image.width(), image.channels(), out)
}

pub fn blur_below_level(
    image: &Image,
    pixel_norm: &PixelGrid,
    level: Level,
    kernel: &Kernel,
) -> Result<Image> {
    check_grid(image, pixel_norm.height(), pixel_norm.width())?;
    blur_selected(image, &level.selection(pixel_norm), kernel)
}

pub fn mask_below_level(
    image: &Image,
    pixel_norm: &PixelGrid,
    level: Level,
    background: &[f32],
) -> Result<Image> {
    check_grid(image, pixel_norm.height(), pixel_norm.width())?;
    mask_selected(image, &level.selection(pixel_norm), background)
}

/// `clip(blur(prev, selection) + little_h·grad, 0, 1)`. The gradient term
/// covers every pixel, blurred or not.
pub fn enhance_selected(
    prev: &Image,
    field: &SensitivityField,
    selection: &Selection,
    little_h: f32,
    kernel: &Kernel,
) -> Result<Image> {
    if field.grad.shape() != prev.shape() {
        return Err(Error::ShapeMismatch {
            layer: "sensitivity field".into(),
            expected: prev.shape().to_vec(),
            found: field.grad.shape().to_vec(),
        });
    }
    if !(little_h >= 0.0 && little_h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step size must be non-negative, got {little_h}"
        )));
    }
    let blurred = blur_selected(prev, selection, kernel)?;
    let data = blurred
        .data()
        .iter()
        .zip(field.grad.data())
        .map(|(&v, &g)| v + little_h * g)
        .collect();
    Image::from_clipped(prev.height(), prev.width(), prev.channels(), data)
}

pub fn enhancement_step(
    prev: &Image,
    field: &SensitivityField,
    level: Level,
    little_h: f32,
    kernel: &Kernel,
) -> Result<Image> {
    check_grid(prev, field.pixel_norm.height(), field.pixel_norm.width())?;
    enhance_selected(
        prev,
        field,
        &level.selection(&field.pixel_norm),
        little_h,
        kernel,
    )
}
