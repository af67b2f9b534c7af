use crate::error::{Error, Result};
use crate::imaging::{gaussian_kernel, Kernel};
use crate::model::SensitivityField;

/// Snapshot fractions of the reference figure: 0%, 5%, ..., 95% blurred.
pub const FIGURE_SCHEDULE: [f64; 8] = [0.0, 0.05, 0.10, 0.20, 0.30, 0.50, 0.75, 0.95];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Sensitivity frozen at the original image.
    Linear,
    /// Sensitivity recomputed at every step.
    Nonlinear,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Linear => "linear",
            Mode::Nonlinear => "nonlinear",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Mode::Linear),
            "nonlinear" => Ok(Mode::Nonlinear),
            _ => Err(Error::InvalidArgument(format!(
                "mode must be `linear` or `nonlinear`, got `{s}`"
            ))),
        }
    }
}

/// Scale applied to the sensitivity in each update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// `max_move / max(pixel_norm)`, so the most sensitive pixel moves by at
    /// most `max_move` per step.
    Auto {
        max_move: f32,
    },
    Fixed(f32),
}

impl StepSize {
    pub fn resolve(&self, field: &SensitivityField) -> f32 {
        match *self {
            StepSize::Fixed(h) => h,
            StepSize::Auto { max_move } => {
                let m = field.pixel_norm.max();
                if m > 0.0 {
                    max_move / m
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyConfig {
    pub step: StepSize,
    /// Strictly increasing blur fractions in `[0, 1)`.
    pub schedule: Vec<f64>,
    pub steps_per_fraction: usize,
    pub kernel_sigma: f32,
    pub kernel_radius: usize,
    pub background: Vec<f32>,
}

impl Default for SaliencyConfig {
    fn default() -> Self {
        SaliencyConfig {
            step: StepSize::Auto { max_move: 0.05 },
            schedule: FIGURE_SCHEDULE.to_vec(),
            steps_per_fraction: 25,
            kernel_sigma: 1.0,
            kernel_radius: 2,
            background: vec![1.0; 3],
        }
    }
}

impl SaliencyConfig {
    /// Checks the configuration against an image with `channels` channels and
    /// builds its blur kernel.
    pub fn validate(&self, channels: usize) -> Result<Kernel> {
        if self.schedule.is_empty() {
            return Err(Error::InvalidArgument("schedule is empty".into()));
        }
        if let Some(q) = self.schedule.iter().find(|q| !(0.0..1.0).contains(*q)) {
            return Err(Error::InvalidArgument(format!(
                "blur fraction {q} is outside [0, 1)"
            )));
        }
        if self.schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "schedule must be strictly increasing".into(),
            ));
        }
        if self.steps_per_fraction == 0 {
            return Err(Error::InvalidArgument(
                "steps per fraction must be positive".into(),
            ));
        }
        match self.step {
            StepSize::Fixed(h) if !(h >= 0.0 && h.is_finite()) => {
                return Err(Error::InvalidArgument(format!("step size {h} is negative")))
            }
            StepSize::Auto { max_move } if !(max_move > 0.0 && max_move.is_finite()) => {
                return Err(Error::InvalidArgument(format!(
                    "auto step needs a positive move, got {max_move}"
                )))
            }
            _ => {}
        }
        if self.background.len() != channels {
            return Err(Error::InvalidArgument(format!(
                "background has {} channels, image has {channels}",
                self.background.len()
            )));
        }
        if self.background.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument(
                "background must lie in [0, 1]".into(),
            ));
        }
        gaussian_kernel(self.kernel_sigma, self.kernel_radius)
    }

    pub fn total_steps(&self) -> usize {
        self.schedule.len() * self.steps_per_fraction
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        let cfg = SaliencyConfig::default();
        assert!(cfg.validate(3).is_ok());
        assert_eq!(cfg.total_steps(), 200);
        assert!(cfg.validate(1).is_err());
    }

    #[test]
    fn rejects_bad_schedules() {
        for schedule in [
            vec![],
            vec![0.1, 0.1],
            vec![0.5, 0.2],
            vec![0.0, 1.0],
            vec![-0.1],
        ] {
            let cfg = SaliencyConfig {
                schedule,
                ..Default::default()
            };
            assert!(cfg.validate(3).is_err());
        }
        let cfg = SaliencyConfig {
            step: StepSize::Fixed(-1.0),
            ..Default::default()
        };
        assert!(cfg.validate(3).is_err());
        let cfg = SaliencyConfig {
            steps_per_fraction: 0,
            ..Default::default()
        };
        assert!(cfg.validate(3).is_err());
    }

    #[test]
    fn mode_parses() {
        assert_eq!("linear".parse::<Mode>().unwrap(), Mode::Linear);
        assert!("both".parse::<Mode>().is_err());
    }
}
