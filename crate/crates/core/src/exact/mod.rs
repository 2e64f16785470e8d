//! Closed-form one- and two-collision densities.

pub mod abel;
pub mod dilog;
pub mod one;
pub mod rect;
pub mod two;

pub use abel::inverse_abel;
pub use dilog::{dilog, re_dilog};
pub use one::{rho1_i, rho_proj1, rho_proj1_slope};
pub use rect::{conv2rect, conv3rect, rect, PiecewiseReport, Rect};
pub use two::{rho2_i, rho_proj2, rho_proj2_report};
