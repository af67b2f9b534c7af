use crate::error::{Error, Result};

/// Square low-pass filter, `(2r+1)×(2r+1)` non-negative weights summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    radius: usize,
    weights: Vec<f32>,
}

impl Kernel {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    /// Row-major weights, offset `(dy, dx)` stored at `(dy + r) * side + dx + r`.
    pub fn weights(&self) -> &[f32] {
        &self.weights
    }

    pub fn weight(&self, dy: isize, dx: isize) -> f32 {
        let r = self.radius as isize;
        self.weights[((dy + r) * (2 * r + 1) + dx + r) as usize]
    }
}

/// Normalized isotropic Gaussian: `w(dy, dx) ∝ exp(-(dx² + dy²) / 2σ²)`.
pub fn gaussian_kernel(sigma: f32, radius: usize) -> Result<Kernel> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "kernel sigma must be positive, got {sigma}"
        )));
    }
    if radius == 0 {
        return Err(Error::InvalidArgument(
            "kernel radius must be positive".into(),
        ));
    }
    let r = radius as i64;
    let two_var = 2.0 * f64::from(sigma).powi(2);
    let raw: Vec<f64> = (-r..=r)
        .flat_map(|dy| (-r..=r).map(move |dx| (-((dx * dx + dy * dy) as f64) / two_var).exp()))
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(Kernel {
        radius,
        weights: raw.into_iter().map(|w| (w / total) as f32).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_sigma_radius_one_center() {
        let k = gaussian_kernel(1.0, 1).unwrap();
        // 1 / (1 + 4e^-1/2 + 4e^-1)
        assert!(
            (k.weight(0, 0) - 0.204_180).abs() < 1e-5,
            "{}",
            k.weight(0, 0)
        );
        let sum: f32 = k.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-6);
    }

    #[test]
    fn wide_sigma_is_nearly_flat() {
        let k = gaussian_kernel(1e4, 1).unwrap();
        assert!(k.weights().iter().all(|w| (w - 1.0 / 9.0).abs() < 1e-3));
    }

    #[test]
    fn center_is_strict_max_and_rotation_symmetric() {
        for (sigma, radius) in [(0.3, 2), (1.0, 2), (5.0, 3)] {
            let k = gaussian_kernel(sigma, radius).unwrap();
            let r = radius as isize;
            for dy in -r..=r {
                for dx in -r..=r {
                    if (dy, dx) != (0, 0) {
                        assert!(k.weight(dy, dx) < k.weight(0, 0));
                    }
                    assert_eq!(k.weight(dy, dx), k.weight(dx, -dy));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gaussian_kernel(0.0, 1).is_err());
        assert!(gaussian_kernel(-1.0, 1).is_err());
        assert!(gaussian_kernel(f32::NAN, 1).is_err());
        assert!(gaussian_kernel(1.0, 0).is_err());
    }
}
