//! Densities of the three-dimensional isotropic random flight.
//!
//! Per-collision densities are built from Fourier cosine series whose
//! coefficients are summed in exact rational arithmetic. Closed forms cover
//! one and two collisions, and a Monte Carlo sampler provides an independent
//! check.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod cache;
pub mod cli;
pub mod coeffs;
pub mod error;
pub mod exact;
pub mod fourier;
pub mod moments;
pub mod montecarlo;
pub mod quadrature;
pub mod rational;
pub mod validate;

pub use assembly::{
    c_max, gaussian_approx, gaussian_variance, rho_i, rho_r, rho_s_parts, ro, DensityValue,
    TableSet,
};
pub use coeffs::{c_bounds, c_coeff, c_coeff_row, CoefficientRow};
pub use error::{Error, Result};
pub use exact::{dilog, re_dilog, rho1_i, rho2_i, rho_proj1, rho_proj2};
pub use fourier::{
    build_table, eval_rho_is_c, eval_rho_rs_c, extract_r_minus2, FourierTable, TruncationPolicy,
};
pub use moments::{even_moment_is, even_moment_rc, even_moment_s, PhysParams};
pub use montecarlo::{FlightSample, RngStream};
pub use rational::ExactRational;
