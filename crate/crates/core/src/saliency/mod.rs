//! Linear and nonlinear saliency trajectories.
//!
//! Each step blurs the least sensitive pixels of the current image, pushes the
//! whole image along the class sensitivity, and clips to `[0, 1]`. The
//! nonlinear variant recomputes the sensitivity at every step; the linear
//! variant keeps the one computed at the original image. The saliency map of
//! a step is the updated image with the blurred pixels painted in the
//! background colour.

mod config;
mod filter;
mod level;
mod record;
mod trajectory;

pub use config::{Mode, SaliencyConfig, StepSize, FIGURE_SCHEDULE};
pub use filter::{
    blur_below_level, blur_selected, enhance_selected, enhancement_step, mask_below_level,
    mask_selected,
};
pub use level::{quantile_level, selected_count, Level, Selection};
pub use record::{trajectory_csv, write_record, CSV_HEADER};
pub use trajectory::{
    retrace_best, run, run_batch, run_linear, run_nonlinear, Job, SaliencyResult, TrajectoryRecord,
    TrajectoryStep,
};
