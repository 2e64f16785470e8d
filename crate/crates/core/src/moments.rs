//! Even moments of the conditional and full radial distributions.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::coeffs::c_coeff;
use crate::error::{Error, Result};
use crate::rational::ExactRational;

/// Speed and scattering rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub v: f64,
    pub lambda: f64,
}

impl PhysParams {
    pub fn new(v: f64, lambda: f64) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) || !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need v > 0 and lambda > 0, got v={v}, lambda={lambda}"
            )));
        }
        Ok(PhysParams { v, lambda })
    }
}

fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// <r^2m> of rho_c at vt = 1: c! (2m+1)! / (2m+c)! C(c, m).
pub fn even_moment_rc_exact(c: u32, m: u32) -> ExactRational {
    let (c, m) = (c as u64, m as u64);
    let f = ExactRational::new(factorial(c) * factorial(2 * m + 1), factorial(2 * m + c)).unwrap();
    &f * &c_coeff(c as u32, m as u32)
}

/// <r^2m> of the density conditional on c collisions.
pub fn even_moment_rc(c: u32, m: u32, vt: f64) -> f64 {
    even_moment_rc_exact(c, m).to_f64() * vt.powi(2 * m as i32)
}

/// <x^2m> of rho_Is,c on [-vt, vt]; m = 0 would be the inverse-square moment and is rejected.
pub fn even_moment_is(c: u32, m: u32, vt: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let (cu, mu) = (c as u64, m as u64);
    let f = ExactRational::new(
        factorial(cu) * factorial(2 * mu - 1),
        factorial(2 * mu - 2 + cu),
    )
    .unwrap();
    let exact = &f * &c_coeff(c, m - 1);
    Ok(exact.to_f64() * vt.powi(2 * m as i32 - 2) / (4.0 * PI))
}

/// <r^2m> of the full density, shell included, summed over collision counts
/// until the remaining tail is below 1e-12 of the sum.
pub fn even_moment_s(m: u32, t: f64, p: &PhysParams) -> f64 {
    let lt = p.lambda * t;
    let vt = p.v * t;
    let two_m = 2.0 * m as f64;
    // (2m+1)! e^{-lt} (lt)^c / (2m+c)!, built up multiplicatively
    let mut weight = (two_m + 1.0) * (-lt).exp();
    let mut sum = 0.0;
    let mut c: u32 = 0;
    loop {
        let term = weight * c_coeff(c, m).to_f64();
        sum += term;
        let next = lt / (two_m + c as f64 + 1.0);
        if c as f64 > lt && term > 0.0 {
            // the ratio of consecutive terms only shrinks from here on
            let growth = c_coeff(c + 1, m).to_f64() / c_coeff(c, m).to_f64();
            let r = next * growth;
            if r < 1.0 && term * r / (1.0 - r) <= 1e-12 * sum {
                break;
            }
        }
        if term == 0.0 && c as f64 > lt {
            break;
        }
        weight *= next;
        c += 1;
    }
    sum * vt.powi(2 * m as i32)
}
