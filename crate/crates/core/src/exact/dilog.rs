use std::f64::consts::PI;

use crate::error::{Error, Result};

const PI2_6: f64 = PI * PI / 6.0;

fn series(x: f64) -> f64 {
    // |x| <= 1/2
    let mut term = x;
    let mut sum = 0.0;
    for k in 1..200 {
        let add = term / (k * k) as f64;
        sum += add;
        if add.abs() <= 1e-18 * sum.abs() {
            break;
        }
        term *= x;
    }
    sum
}

fn li2(x: f64) -> f64 {
    if x == 1.0 {
        PI2_6
    } else if x == 0.0 {
        0.0
    } else if x.abs() <= 0.5 {
        series(x)
    } else if x > 0.5 {
        PI2_6 - x.ln() * (-x).ln_1p() - series(1.0 - x)
    } else if x >= -1.0 {
        // Landen: x/(x-1) lies in (1/3, 1/2]
        let l = (-x).ln_1p();
        -series(x / (x - 1.0)) - 0.5 * l * l
    } else {
        let l = (-x).ln();
        -PI2_6 - 0.5 * l * l - li2(1.0 / x)
    }
}

/// Real dilogarithm Li2(x) for x <= 1.
pub fn dilog(x: f64) -> Result<f64> {
    if x > 1.0 || x.is_nan() {
        return Err(Error::DilogDomain(x));
    }
    Ok(li2(x))
}

/// Real part of the principal dilogarithm, defined on the whole real line.
pub fn re_dilog(x: f64) -> f64 {
    if x <= 1.0 {
        li2(x)
    } else {
        let l = x.ln();
        2.0 * PI2_6 - 0.5 * l * l - li2(1.0 / x)
    }
}
