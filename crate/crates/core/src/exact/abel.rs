//! Radial density from a projected one via -(1/2 pi r) d/dr.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Two-level Richardson extrapolation of central differences with steps h, h/2, h/4.
pub fn richardson_derivative<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let (d0, d1, d2) = (d(h), d(0.5 * h), d(0.25 * h));
    let e1 = (4.0 * d1 - d0) / 3.0;
    let e2 = (4.0 * d2 - d1) / 3.0;
    (16.0 * e2 - e1) / 15.0
}

/// Same scheme for the second derivative at a point.
pub fn richardson_second<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    let fx = f(x);
    let d = |h: f64| (f(x + h) - 2.0 * fx + f(x - h)) / (h * h);
    let (d0, d1, d2) = (d(h), d(0.5 * h), d(0.25 * h));
    let e1 = (4.0 * d1 - d0) / 3.0;
    let e2 = (4.0 * d2 - d1) / 3.0;
    (16.0 * e2 - e1) / 15.0
}

/// Derivative whose stencil stays clear of every listed breakpoint.
///
/// The step is `h0`, shrunk to a quarter of the distance to the nearest
/// breakpoint when that is closer.
pub fn derivative_clear_of<F: Fn(f64) -> f64>(
    f: &F,
    x: f64,
    h0: f64,
    breakpoints: &[f64],
) -> Result<f64> {
    let nearest = breakpoints
        .iter()
        .map(|&p| (p, (x - p).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    let mut h = h0;
    if let Some((p, d)) = nearest {
        if d <= 1e-9 * h0 {
            return Err(Error::BreakpointStraddle { x, breakpoint: p });
        }
        h = h.min(0.25 * d);
    }
    Ok(richardson_derivative(f, x, h))
}

/// -(1/2 pi r) d/dx projected(x) at x = r.
pub fn inverse_abel<F: Fn(f64) -> f64>(
    projected: F,
    r: f64,
    h0: f64,
    breakpoints: &[f64],
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "inverse Abel needs r > 0, got {r}"
        )));
    }
    let slope = derivative_clear_of(&projected, r, h0, breakpoints)?;
    Ok(-slope / (2.0 * PI * r))
}
