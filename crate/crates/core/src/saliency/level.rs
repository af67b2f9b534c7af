use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::image::PixelGrid;

/// Number of pixels blurred at fraction `q` of `n`: `floor(q·n)`.
///
/// Products within a relative 1e-9 of an integer count as that integer, so
/// decimal fractions like 0.95 that are not exact binary values still give
/// the intended count.
pub fn selected_count(q: f64, n: usize) -> usize {
    let x = q * n as f64;
    let r = x.round();
    let k = if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r
    } else {
        x.floor()
    };
    (k.max(0.0) as usize).min(n.saturating_sub(1))
}

/// Sensitivity cutoff. Pixels rank by `(norm, row-major index)`; a pixel is
/// below the level when its key sorts strictly before the boundary key.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Level {
    /// Selects nothing.
    Empty,
    Below {
        norm: f32,
        index: usize,
    },
}

impl Level {
    /// The norm cutoff, `-inf` for the empty level.
    pub fn value(&self) -> f32 {
        match self {
            Level::Empty => f32::NEG_INFINITY,
            Level::Below { norm, .. } => *norm,
        }
    }

    pub fn selects(&self, norm: f32, index: usize) -> bool {
        match *self {
            Level::Empty => false,
            Level::Below { norm: l, index: li } => rank(norm, index, l, li) == Ordering::Less,
        }
    }

    pub fn selection(&self, pixel_norm: &PixelGrid) -> Selection {
        Selection {
            height: pixel_norm.height(),
            width: pixel_norm.width(),
            mask: pixel_norm
                .data()
                .iter()
                .enumerate()
                .map(|(i, &n)| self.selects(n, i))
                .collect(),
        }
    }
}

fn rank(a: f32, ai: usize, b: f32, bi: usize) -> Ordering {
    a.total_cmp(&b).then(ai.cmp(&bi))
}

/// Level that selects exactly `floor(q·H·W)` pixels of `pixel_norm`.
pub fn quantile_level(pixel_norm: &PixelGrid, q: f64) -> Result<Level> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "blur fraction must be in [0, 1), got {q}"
        )));
    }
    let k = selected_count(q, pixel_norm.len());
    if k == 0 {
        return Ok(Level::Empty);
    }
    let norms = pixel_norm.data();
    let mut order: Vec<usize> = (0..norms.len()).collect();
    let (_, &mut boundary, _) =
        order.select_nth_unstable_by(k, |&a, &b| rank(norms[a], a, norms[b], b));
    Ok(Level::Below {
        norm: norms[boundary],
        index: boundary,
    })
}

/// Pixels chosen for blurring or masking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    height: usize,
    width: usize,
    mask: Vec<bool>,
}

impl Selection {
    pub fn new(height: usize, width: usize, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != height * width {
            return Err(Error::DataLength {
                shape: vec![height, width],
                expected: height * width,
                found: mask.len(),
            });
        }
        Ok(Selection {
            height,
            width,
            mask,
        })
    }

    pub fn none(height: usize, width: usize) -> Self {
        Selection {
            height,
            width,
            mask: vec![false; height * width],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_selected(&self, index: usize) -> bool {
        self.mask[index]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Fraction of pixels selected in exactly one of the two selections.
    pub fn disagreement(&self, other: &Selection) -> f64 {
        assert_eq!(self.mask.len(), other.mask.len(), "selection size mismatch");
        let differ = self
            .mask
            .iter()
            .zip(&other.mask)
            .filter(|(a, b)| a != b)
            .count();
        differ as f64 / self.mask.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(h: usize, w: usize, data: &[f32]) -> PixelGrid {
        PixelGrid::new(h, w, data.to_vec()).unwrap()
    }

    #[test]
    fn half_of_four_selects_two_smallest() {
        let g = grid(2, 2, &[3.0, 1.0, 4.0, 2.0]);
        let sel = quantile_level(&g, 0.5).unwrap().selection(&g);
        assert_eq!(sel.mask(), &[false, true, false, true]);
    }

    #[test]
    fn zero_fraction_selects_nothing() {
        let g = grid(2, 2, &[3.0, 1.0, 4.0, 2.0]);
        let level = quantile_level(&g, 0.0).unwrap();
        assert_eq!(level, Level::Empty);
        assert_eq!(level.value(), f32::NEG_INFINITY);
        assert_eq!(level.selection(&g).count(), 0);
    }

    #[test]
    fn ties_resolve_by_row_major_index() {
        let g = grid(2, 3, &[1.0; 6]);
        let sel = quantile_level(&g, 0.5).unwrap().selection(&g);
        assert_eq!(sel.mask(), &[true, true, true, false, false, false]);
    }

    #[test]
    fn rejects_fraction_of_one() {
        let g = grid(1, 2, &[1.0, 2.0]);
        assert!(quantile_level(&g, 1.0).is_err());
        assert!(quantile_level(&g, -0.1).is_err());
    }

    #[test]
    fn decimal_fractions_count_as_intended() {
        // 0.95 * 20 is 18.999... in binary floating point
        assert_eq!(selected_count(0.95, 20), 19);
        assert_eq!(selected_count(0.7, 10), 7);
        assert_eq!(selected_count(0.05, 1024), 51);
        assert_eq!(selected_count(0.0, 1024), 0);
    }

    #[test]
    fn disagreement_counts_symmetric_difference() {
        let a = Selection::new(1, 4, vec![true, true, false, false]).unwrap();
        let b = Selection::new(1, 4, vec![true, false, true, false]).unwrap();
        assert_eq!(a.disagreement(&b), 0.5);
        assert_eq!(a.disagreement(&a), 0.0);
    }

    proptest! {
        #[test]
        fn count_is_exact(
            data in proptest::collection::vec(0u8..4, 1..200),
            pct in 0u32..100,
        ) {
            // coarse values force many ties
            let n = data.len();
            let g = PixelGrid::new(1, n, data.iter().map(|&v| v as f32).collect()).unwrap();
            let q = f64::from(pct) / 100.0;
            let sel = quantile_level(&g, q).unwrap().selection(&g);
            prop_assert_eq!(sel.count(), pct as usize * n / 100);
            // every selected pixel ranks below every unselected one
            for i in 0..n {
                for j in 0..n {
                    if sel.is_selected(i) && !sel.is_selected(j) {
                        prop_assert!(rank(g.data()[i], i, g.data()[j], j) == Ordering::Less);
                    }
                }
            }
        }
    }
}
