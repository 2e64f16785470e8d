//! Exact evaluation of the moment series behind the Fourier coefficients.
//!
//! A series sum_m b_m (-pi^2 h^2)^m with rational b_m is brought over one
//! integer denominator once. Each harmonic is then a Horner pass in integers
//! with pi replaced by its 21-digit rational, followed by a single rounding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::coeffs::shared_row;
use crate::error::{Error, Result};
use crate::rational::{ln_big, PI_DENOMINATOR, PI_NUMERATOR};

/// Magnitude above which a partial sum is reported as divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Largest admissible size of the first omitted term.
pub(crate) const TAIL_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    /// FS(rho_rs,c)(h)
    Radial,
    /// FS0(rho_Is,c)(h): the part of FS(rho_Is,c)(h) without the inverse-square moment
    IsotropicPartial,
}

pub(crate) struct MomentSeries {
    c: u32,
    m_max: u32,
    /// B_m * 10^(40 (M - m))
    scaled: Vec<BigInt>,
    denominator: BigInt,
    numerator_factor: BigInt,
    pi_sq: BigInt,
    ln_last: f64,
}

fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

impl MomentSeries {
    pub(crate) fn new(kind: SeriesKind, c: u32, m_max: u32) -> Self {
        let row = shared_row(c, m_max);
        let n = row.numerators();
        let cf = factorial(c as u64);
        // b_m = a_m / k_m with the row denominator factored out
        let (a, k): (Vec<BigInt>, Vec<BigInt>) = match kind {
            SeriesKind::Radial => (0..=m_max as u64)
                .map(|m| {
                    (
                        &cf * BigInt::from(2 * m + 1) * &n[m as usize],
                        factorial(2 * m + c as u64),
                    )
                })
                .unzip(),
            SeriesKind::IsotropicPartial => std::iter::once((BigInt::zero(), BigInt::one()))
                .chain((1..=m_max as u64).map(|m| {
                    (
                        &cf * &n[m as usize - 1],
                        BigInt::from(2 * m) * factorial(2 * m - 2 + c as u64),
                    )
                }))
                .unzip(),
        };
        let common = k.iter().fold(BigInt::one(), |acc, x| acc.lcm(x));
        let ten40 = BigInt::from(10u32).pow(40);
        let mut scaled = vec![BigInt::zero(); m_max as usize + 1];
        let mut shift = BigInt::one();
        for m in (0..=m_max as usize).rev() {
            scaled[m] = &a[m] * (&common / &k[m]) * &shift;
            shift *= &ten40;
        }
        // shift is now 10^(40 (M + 1))
        let mut denominator = common * row.denominator() * (shift / &ten40);
        let pi_num: BigInt = PI_NUMERATOR.parse().unwrap();
        let pi_den: BigInt = PI_DENOMINATOR.parse().unwrap();
        let mut numerator_factor = BigInt::one();
        if kind == SeriesKind::IsotropicPartial {
            numerator_factor = pi_den;
            denominator *= BigInt::from(4) * &pi_num;
        }
        let ln_last =
            ln_big(&a[m_max as usize]) - ln_big(&k[m_max as usize]) - ln_big(row.denominator())
                + if kind == SeriesKind::IsotropicPartial {
                    -(4.0 * std::f64::consts::PI).ln()
                } else {
                    0.0
                };
        MomentSeries {
            c,
            m_max,
            scaled,
            denominator,
            numerator_factor,
            pi_sq: &pi_num * &pi_num,
            ln_last,
        }
    }

    pub(crate) fn m_max(&self) -> u32 {
        self.m_max
    }

    /// Exact value at harmonic h, rounded once to the nearest double.
    pub(crate) fn value(&self, h: u32) -> f64 {
        let q = &self.pi_sq * BigInt::from(h as u64 * h as u64);
        let mut acc = self.scaled[self.m_max as usize].clone();
        for m in (0..self.m_max as usize).rev() {
            acc = &self.scaled[m] - acc * &q;
        }
        let num = acc * &self.numerator_factor;
        BigRational::new_raw(num, self.denominator.clone())
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    pub(crate) fn eval(&self, h: u32) -> Result<f64> {
        let v = self.value(h);
        if !v.is_finite() || v.abs() > DIVERGENCE_LIMIT {
            return Err(Error::SeriesDivergence {
                c: self.c,
                h,
                magnitude: v.abs(),
            });
        }
        Ok(v)
    }

    /// ln of the magnitude of the last retained term at harmonic h.
    pub(crate) fn tail_ln(&self, h: u32) -> f64 {
        self.ln_last + 2.0 * self.m_max as f64 * (std::f64::consts::PI * h as f64).ln()
    }

    /// Largest h whose last retained term stays below the tail tolerance.
    pub(crate) fn reliable_limit(&self) -> u32 {
        if self.m_max == 0 {
            return 0;
        }
        let bound = ((TAIL_TOLERANCE.ln() - self.ln_last) / (2.0 * self.m_max as f64)).exp()
            / std::f64::consts::PI;
        let mut h = bound.floor().max(0.0) as u32;
        while h > 0 && self.tail_ln(h) > TAIL_TOLERANCE.ln() {
            h -= 1;
        }
        while self.tail_ln(h + 1) <= TAIL_TOLERANCE.ln() {
            h += 1;
        }
        h
    }

    /// Raw values for h in `range`, computed in parallel.
    pub(crate) fn values(&self, range: std::ops::RangeInclusive<u32>) -> Vec<f64> {
        range
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|h| self.value(h))
            .collect()
    }
}

/// FS(rho_rs,c)(h): Fourier coefficient of the symmetrized radial density at vt = 1,
/// summed exactly up to m = m_max.
pub fn fs_rs_coeff(c: u32, h: u32, m_max: u32) -> Result<f64> {
    if c == 0 {
        return Err(Error::InvalidArgument(
            "collision count must be at least 1".into(),
        ));
    }
    MomentSeries::new(SeriesKind::Radial, c, m_max).eval(h)
}

/// FS0(rho_Is,c)(h) at vt = 1, summed exactly up to m = m_max.
pub fn fs0_is_coeff(c: u32, h: u32, m_max: u32) -> Result<f64> {
    if c == 0 {
        return Err(Error::InvalidArgument(
            "collision count must be at least 1".into(),
        ));
    }
    MomentSeries::new(SeriesKind::IsotropicPartial, c, m_max).eval(h)
}
