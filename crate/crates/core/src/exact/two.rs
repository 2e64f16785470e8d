//! Two-collision density in closed form.
//!
//! The projected density is the average of the triple rectangle convolution
//! over the admissible segment lengths. It is evaluated at vt = 1 and
//! u = -|x| in three regions, each the sum of four dilogarithm expressions,
//! then scaled by 1/vt.

use std::f64::consts::{LN_2, PI};
use std::sync::LazyLock;

use super::abel::{derivative_clear_of, richardson_derivative, richardson_second};
use super::dilog::re_dilog;
use super::rect::PiecewiseReport;
use crate::error::{Error, Result};

const PI2: f64 = PI * PI;

fn li2(x: f64) -> f64 {
    re_dilog(x)
}

fn ln(x: f64) -> f64 {
    x.ln()
}

fn atanh(x: f64) -> f64 {
    0.5 * ((1.0 + x) / (1.0 - x)).ln()
}

struct Constants {
    ln3: f64,
    ln4: f64,
    a1: f64,
    c3: f64,
}

static K: LazyLock<Constants> = LazyLock::new(|| {
    let ln3 = 3f64.ln();
    let a1 = PI2
        - 3.0 * LN_2 * LN_2
        - ln3 * (243.0f64 / 64.0).ln()
        - li2(1.0 / 9.0)
        - 6.0 * li2(2.0 / 3.0);
    let c3 = li2(-1.0 / 3.0) + 2.0 * li2(2.0 / 3.0);
    Constants {
        ln3,
        ln4: 4f64.ln(),
        a1,
        c3,
    }
});

fn a1(u: f64) -> f64 {
    let k = &*K;
    let p = 1.0 + u;
    if p == 0.0 {
        return 0.0;
    }
    let inner = (atanh(1.0 / (2.0 + u)) - atanh(u)) * k.ln4 + ln(p / (1.0 - u)) * ln(3.0 + u)
        - li2((1.0 - u) / 4.0)
        + li2((1.0 - u) / 2.0)
        + li2(-p / 2.0)
        + li2(p / (1.0 - u))
        - li2(0.5 + 1.0 / p);
    p * p / 8.0 * (k.a1 + ln(1.0 - u).powi(2) + 2.0 * inner)
}

fn a2(u: f64) -> f64 {
    let k = &*K;
    let p = 1.0 + u;
    let l1m = ln(1.0 - u);
    let l2u = ln(-2.0 * u);
    0.5 * (-1.0 - u - u * LN_2 * LN_2 + l1m - u * l1m + u * k.ln4 * l1m + u * l1m * l1m + u * ln(-1.0 / u)
        + u * ln(-8.0 * u)
        + u * l2u
        + u * k.ln4 * l2u
        - 2.0 * u * l1m * l2u
        + u * ln(-u)
        // -ln(1+u) - u ln(4(1+u))
        - p * ln(p)
        - u * k.ln4
        // 2u ln(-2u) ln((1+u)/2) - 2u ln(1-u) ln(1+u)
        + 2.0 * u * (-p / (1.0 - u)).ln_1p() * ln(p)
        - 2.0 * u * l2u * LN_2
        - 2.0 * u * li2((1.0 - u) / 2.0)
        + 2.0 * u * li2(-2.0 * u / (1.0 - u)))
}

fn a3(u: f64) -> f64 {
    let p = 1.0 + u;
    p - PI2 / 48.0 * p * p + u * ln((1.0 - u) / (-2.0 * u))
        - 0.25 * (1.0 - u).powi(2) * li2(p / (1.0 - u))
}

fn a4(u: f64) -> f64 {
    -(1.0 + u) / 2.0 + ln(2.0 / (1.0 - u))
}

fn b2(u: f64) -> f64 {
    let l1m = ln(1.0 - u);
    0.5 * (-1.0 - u - u * LN_2 * LN_2 + (1.0 - u) * ln(1.0 - u * u) + u * l1m * l1m)
        + u * ln(-2.0 * u) * (1.0 + ln((1.0 + u) / (1.0 - u)))
        - ln(1.0 + u)
        - u * l1m * ln((1.0 + u) / 2.0)
        + u * li2(-2.0 * u / (1.0 - u))
        - u * li2((1.0 - u) / 2.0)
}

fn c1(u: f64) -> f64 {
    let k = &*K;
    let lp = ln(1.0 + u);
    0.5 * u * (-lp) * (-1.0 - lp)
        + ((12.0 + PI2 - 6.0 * LN_2 * LN_2) * u - 6.0 * lp
            + 6.0 * (1.0 + (k.ln4 - 1.0) * u - 2.0 * u * lp) * ln(1.0 - u))
            / 12.0
        - u * li2((1.0 - u) / 2.0)
}

fn c2(u: f64) -> f64 {
    let l1m = ln(1.0 - u);
    let lp = ln(1.0 + u);
    let q = 5.0 + 2.0 * u + u * u;
    let bracket = q * l1m * l1m - 8.0 * u * lp + (1.0 - u).powi(2) * lp * lp
        - 2.0 * l1m * (-2.0 * u + (3.0 + u * u) * lp)
        + 4.0 * ln(-2.0 * u) * (u + (1.0 + u) * ln((1.0 + u) / (1.0 - u)));
    (-2.0 * (PI2 + 12.0 * u)
        + 3.0 * bracket
        + 12.0 * (1.0 + u) * li2(-2.0 * u / (1.0 - u))
        + 3.0 * q * li2((1.0 + u) / (1.0 - u))
        - 3.0 * (1.0 + u).powi(2) * li2(-1.0 + 2.0 / (1.0 + u)))
        / 12.0
}

fn c3(u: f64) -> f64 {
    let k = &*K;
    let s = 1.0 + u * u;
    let lp = ln(1.0 + u);
    let l2u = ln(-2.0 * u);
    let inner = -6.0 + s * (PI2 - 3.0 * k.ln3 * k.ln3) - 18.0 * u
        + 6.0 * s * (4.0f64 / 3.0).ln() * k.ln3
        - 3.0 * s * LN_2 * LN_2
        + 6.0 * l2u * (2.0 * u + s * ln((1.0 - u) / (1.0 + u)))
        + 3.0
            * (s * lp * lp + 2.0 * lp * (-2.0 * u + s * ln(-2.0 * u / (1.0 - u))) - 2.0 * s * k.c3)
        + 6.0 * s * (li2(u) - li2((1.0 + u) / 2.0) + li2(1.0 + u));
    -inner / 12.0
}

fn c4(u: f64) -> f64 {
    -(1.0 + u) / 2.0 - ln((1.0 - u) / 2.0)
}

/// The three analytic regions of the projected density in u = -|x|/vt.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// u in [-1, -1/2]
    Outer,
    /// u in [-1/2, -1/3]
    Middle,
    /// u in [-1/3, 0]
    Inner,
}

impl Region {
    pub fn of(u: f64) -> Region {
        if u <= -0.5 {
            Region::Outer
        } else if u <= -1.0 / 3.0 {
            Region::Middle
        } else {
            Region::Inner
        }
    }
}

/// Projected density at vt = 1 from the closed form of `region`, evaluated at u <= 0.
pub fn branch(region: Region, u: f64) -> f64 {
    if u <= -1.0 {
        return 0.0;
    }
    // the inner form carries u ln(-u) terms whose limit at 0 is 0
    let u = if u == 0.0 { -1e-300 } else { u };
    let s = match region {
        Region::Outer => a1(u) + a2(u) + a3(u) + a4(u),
        Region::Middle => a1(u) + b2(u) + a3(u) + a4(u),
        Region::Inner => c1(u) + c2(u) + c3(u) + c4(u),
    };
    3.0 * s
}

fn unit(y: f64) -> f64 {
    if y.abs() >= 1.0 {
        return 0.0;
    }
    let u = -y.abs();
    branch(Region::of(u), u)
}

/// Breakpoints of the projected density at vt = 1, x >= 0.
pub const BREAKPOINTS: [f64; 3] = [1.0 / 3.0, 0.5, 1.0];

/// Projection onto a diameter of the two-collision density.
pub fn rho_proj2(x: f64, t: f64, v: f64) -> Result<f64> {
    let vt = v * t;
    if !(vt > 0.0) {
        return Err(Error::InvalidArgument(format!("need v t > 0, got {vt}")));
    }
    if x.abs() > vt {
        return Err(Error::OutOfSupport { x, extent: vt });
    }
    Ok(unit(x / vt) / vt)
}

/// Left and right limits of the projected density at x = ±vt/2 and ±vt/3,
/// taken from the closed forms on either side.
pub fn rho_proj2_report(t: f64, v: f64) -> PiecewiseReport {
    let vt = v * t;
    let pairs = [
        (-0.5, Region::Outer, Region::Middle),
        (-1.0 / 3.0, Region::Middle, Region::Inner),
        (1.0 / 3.0, Region::Inner, Region::Middle),
        (0.5, Region::Middle, Region::Outer),
    ];
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (y, l, r) in pairs {
        let u = -f64::abs(y);
        left.push(branch(l, u) / vt);
        right.push(branch(r, u) / vt);
    }
    PiecewiseReport::new(pairs.iter().map(|p| p.0 * vt).collect(), left, right)
}

/// Step of the differentiation stencil relative to vt.
pub const STEP: f64 = 1e-4;

const EDGE_OFFSET: f64 = 1e-9;

/// Two-collision density as a function of radius, via the inverse Abel
/// transform of [`rho_proj2`] with Richardson-extrapolated differences.
pub fn rho2_i(r: f64, t: f64, v: f64) -> Result<f64> {
    let vt = v * t;
    if !(vt > 0.0) {
        return Err(Error::InvalidArgument(format!("need v t > 0, got {vt}")));
    }
    if r < 0.0 || r > vt {
        return Err(Error::OutOfSupport { x: r, extent: vt });
    }
    let y = r / vt;
    let scale = 1.0 / (2.0 * PI * vt.powi(3));
    if y == 0.0 {
        return Ok(-richardson_second(&unit, 0.0, STEP) * scale);
    }
    let slope = match derivative_clear_of(&unit, y, STEP, &BREAKPOINTS) {
        Ok(s) => s,
        Err(Error::BreakpointStraddle { breakpoint, .. }) => {
            // one-sided limits; the projected density is C1 at the inner breakpoints
            let left = richardson_derivative(&unit, breakpoint - EDGE_OFFSET, 0.25 * EDGE_OFFSET);
            if breakpoint >= 1.0 {
                left
            } else {
                let right =
                    richardson_derivative(&unit, breakpoint + EDGE_OFFSET, 0.25 * EDGE_OFFSET);
                0.5 * (left + right)
            }
        }
        Err(e) => return Err(e),
    };
    Ok(-slope / y * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rect::conv3rect;
    use crate::quadrature::integrate_with;

    // Average of the triple convolution over the admissible (c, b) domain.
    fn nested_oracle(x: f64) -> f64 {
        let inner = |c: f64| {
            let lo = (2.0 - c) / 2.0;
            let hi = c.min(2.0 - c);
            integrate_with(
                |b| conv3rect(1.0, c, b, x).unwrap_or(0.0),
                lo,
                hi,
                &[],
                1e-11,
                1e-10,
            )
            .unwrap()
            .value
        };
        3.0 * integrate_with(inner, 2.0 / 3.0, 2.0, &[1.0], 1e-10, 1e-9)
            .unwrap()
            .value
    }

    #[test]
    fn matches_nested_average() {
        // frozen from the independent nested quadrature
        for (u, want) in [
            (-0.8, 0.183112),
            (-0.6, 0.437687),
            (-0.4, 0.655042),
            (-0.2, 0.796797),
        ] {
            assert!((unit(u) - want).abs() < 2e-6, "u={u}: {}", unit(u));
        }
    }

    #[test]
    fn matches_live_nested_average() {
        for y in [0.1, 0.45] {
            assert!((unit(y) - nested_oracle(y)).abs() < 1e-6);
        }
    }

    #[test]
    fn continuous_at_breakpoints() {
        let rep = rho_proj2_report(1.0, 1.0);
        assert!(rep.max_jump < 1e-9, "{rep:?}");
        let rep = rho_proj2_report(3.0, 0.5);
        assert!(rep.max_jump < 1e-9);
    }

    #[test]
    fn vanishes_at_front() {
        assert_eq!(rho_proj2(1.0, 1.0, 1.0).unwrap(), 0.0);
        assert!(rho2_i(1.0, 1.0, 1.0).unwrap().abs() < 1e-6);
        assert!(matches!(
            rho_proj2(1.1, 1.0, 1.0),
            Err(Error::OutOfSupport { .. })
        ));
    }

    #[test]
    fn breakpoints_are_evaluated_from_both_sides() {
        for y in [1.0 / 3.0, 0.5] {
            let at = rho2_i(y, 1.0, 1.0).unwrap();
            let near = rho2_i(y + 1e-6, 1.0, 1.0).unwrap();
            assert!((at - near).abs() < 1e-4, "y={y}: {at} vs {near}");
        }
    }
}
