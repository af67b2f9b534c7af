//! Image files, blur kernels, and figure rendering.

mod codec;
mod kernel;
mod montage;
mod plot;

pub use codec::{decode_image, encode_png, encode_ppm, load_image, save_image, to_bytes_rgb8};
pub use kernel::{gaussian_kernel, Kernel};
pub use montage::{render_montage, Layout};
pub use plot::{render_trajectory_plot, PlotFrame, PLOT_FRAME};
