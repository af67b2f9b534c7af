use crate::error::{Error, Result};
use crate::image::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub rows: usize,
    pub cols: usize,
    /// Width of the white gutters between tiles and around the border.
    pub separator_px: usize,
}

/// Tiles snapshots row-major into one white-backed image.
///
/// The result is `cols·W + (cols+1)·sep` wide and `rows·H + (rows+1)·sep` tall.
pub fn render_montage(snapshots: &[Image], layout: Layout) -> Result<Image> {
    let first = snapshots
        .first()
        .ok_or_else(|| Error::InvalidArgument("montage needs at least one snapshot".into()))?;
    let [h, w, c] = first.shape();
    if let Some(bad) = snapshots.iter().find(|s| s.shape() != first.shape()) {
        return Err(Error::ShapeMismatch {
            layer: "montage snapshot".into(),
            expected: first.shape().to_vec(),
            found: bad.shape().to_vec(),
        });
    }
    let Layout {
        rows,
        cols,
        separator_px: sep,
    } = layout;
    if rows * cols < snapshots.len() {
        return Err(Error::InvalidArgument(format!(
            "{} snapshots do not fit a {rows}x{cols} layout",
            snapshots.len()
        )));
    }
    let out_w = cols * w + (cols + 1) * sep;
    let out_h = rows * h + (rows + 1) * sep;
    let mut data = vec![1.0f32; out_h * out_w * c];
    for (i, snap) in snapshots.iter().enumerate() {
        let top = sep + (i / cols) * (h + sep);
        let left = sep + (i % cols) * (w + sep);
        for (y, row) in snap.data().chunks_exact(w * c).enumerate() {
            let start = ((top + y) * out_w + left) * c;
            data[start..start + w * c].copy_from_slice(row);
        }
    }
    Image::new(out_h, out_w, c, data)
}
