//! Rectangle densities and their convolutions.

use crate::error::{Error, Result};

/// Uniform density of width `w` centred at 0.
pub fn rect(w: f64, x: f64) -> f64 {
    if x.abs() <= 0.5 * w {
        1.0 / w
    } else {
        0.0
    }
}

/// Continuous primitive of [`rect`], running from -1/2 to +1/2.
#[allow(non_snake_case)]
pub fn Rect(w: f64, x: f64) -> f64 {
    (x / w).clamp(-0.5, 0.5)
}

/// rect(w1) convolved with rect(w2): a trapezoid of base w1 + w2 and top w2 - w1.
pub fn conv2rect(w1: f64, w2: f64, x: f64) -> Result<f64> {
    if !(w1 > 0.0) || w1 > w2 {
        return Err(Error::WidthOrder(format!(
            "need 0 < w1 <= w2, got w1={w1}, w2={w2}"
        )));
    }
    Ok((Rect(w1, x + 0.5 * w2) - Rect(w1, x - 0.5 * w2)) / w2)
}

/// Triple convolution of rect(a), rect(b), rect(c) with a = 2vt - b - c and a < b < c.
///
/// Piecewise quadratic with breakpoints at the eight signed half-width sums.
pub fn conv3rect(vt: f64, c_len: f64, b_len: f64, x: f64) -> Result<f64> {
    let (c, b) = (c_len, b_len);
    let a = 2.0 * vt - b - c;
    let slack = 1e-12 * vt;
    if !(a > 0.0) || a > b + slack || b > c + slack || c >= 2.0 * vt {
        return Err(Error::OrderingViolation(format!(
            "a={a}, b={b}, c={c}, vt={vt}"
        )));
    }
    Ok(if c <= vt {
        f1(vt, c, b, x)
    } else {
        f2(vt, c, b, x)
    })
}

fn quad_side(vt: f64, c: f64, b: f64, y: f64) -> f64 {
    2.0 * b * b + 2.0 * b * (c - 2.0 * vt) + (c - vt + y).powi(2)
}

fn f1(vt: f64, c: f64, b: f64, x: f64) -> f64 {
    let a = 2.0 * vt - b - c;
    let bc = b * c;
    let v = if x <= -vt || x >= vt {
        0.0
    } else if x <= vt - b - c {
        (vt + x).powi(2) / (2.0 * bc)
    } else if x <= b - vt {
        (b + c + 2.0 * x) * a / (2.0 * bc)
    } else if x <= c - vt {
        -quad_side(vt, c, b, x) / (2.0 * bc)
    } else if x <= vt - c {
        -(b * b + b * (c - 2.0 * vt) + (c - vt).powi(2) + x * x) / bc
    } else if x <= vt - b {
        -quad_side(vt, c, b, -x) / (2.0 * bc)
    } else if x <= b + c - vt {
        (b + c - 2.0 * x) * a / (2.0 * bc)
    } else {
        (vt - x).powi(2) / (2.0 * bc)
    };
    v / a
}

fn f2(vt: f64, c: f64, b: f64, x: f64) -> f64 {
    let a = 2.0 * vt - b - c;
    let bc = b * c;
    let v = if x <= -vt || x >= vt {
        0.0
    } else if x <= vt - b - c {
        (vt + x).powi(2) / (2.0 * bc)
    } else if x <= b - vt {
        (b + c + 2.0 * x) * a / (2.0 * bc)
    } else if x <= vt - c {
        -quad_side(vt, c, b, x) / (2.0 * bc)
    } else if x <= c - vt {
        a / c
    } else if x <= vt - b {
        -quad_side(vt, c, b, -x) / (2.0 * bc)
    } else if x <= b + c - vt {
        (b + c - 2.0 * x) * a / (2.0 * bc)
    } else {
        (vt - x).powi(2) / (2.0 * bc)
    };
    v / a
}

/// Breakpoints of a piecewise function with one-sided limits on each side.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseReport {
    pub breakpoints: Vec<f64>,
    pub values_left: Vec<f64>,
    pub values_right: Vec<f64>,
    pub max_jump: f64,
}

impl PiecewiseReport {
    pub fn new(breakpoints: Vec<f64>, values_left: Vec<f64>, values_right: Vec<f64>) -> Self {
        debug_assert!(breakpoints.windows(2).all(|w| w[0] < w[1]));
        let max_jump = values_left
            .iter()
            .zip(&values_right)
            .map(|(l, r)| (l - r).abs())
            .fold(0.0, f64::max);
        PiecewiseReport {
            breakpoints,
            values_left,
            values_right,
            max_jump,
        }
    }

    /// Limits approximated by evaluating `delta` to either side.
    pub fn probe<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], delta: f64) -> Self {
        let left = breakpoints.iter().map(|&p| f(p - delta)).collect();
        let right = breakpoints.iter().map(|&p| f(p + delta)).collect();
        PiecewiseReport::new(breakpoints.to_vec(), left, right)
    }
}
