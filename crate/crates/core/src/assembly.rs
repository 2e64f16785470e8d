//! Full densities from the per-collision tables.
//!
//! The continuous part of the density is the Poisson mixture of the
//! conditional densities, truncated at c_max collisions and renormalized.
//! The unscattered fraction e^{-lt} sits on the sphere r = vt and is kept
//! apart as a weight and a radius.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{build_table, eval_rho_is_c, FourierTable, TruncationPolicy};
use crate::moments::PhysParams;

/// Below this value of lt the Fourier mixture is used as is.
pub const BLEND_START: f64 = 100.0;
/// Above this value of lt the Gaussian limit is used.
pub const BLEND_END: f64 = 105.0;
/// Radii beyond this fraction of vt are flagged: truncated series undershoot near the front.
pub const NEAR_FRONT_FRACTION: f64 = 0.98;

/// Continuous density plus the unscattered shell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityValue {
    pub continuous: f64,
    pub shell_weight: f64,
    pub shell_radius: f64,
}

/// Poisson weights (lt)^k e^{-lt}/k! for k = 0..=n.
fn poisson_weights(lt: f64, n: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n + 1);
    let mut p = (-lt).exp();
    w.push(p);
    for k in 1..=n {
        p *= lt / k as f64;
        w.push(p);
    }
    w
}

/// Smallest c such that the Poisson mass beyond c is at most `epsilon_r`.
pub fn c_max(lambda_t: f64, epsilon_r: f64) -> Result<u32> {
    if !(lambda_t > 0.0 && lambda_t.is_finite()) || !(epsilon_r > 0.0 && epsilon_r < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "c_max needs lt > 0 and epsilon in (0, 1), got {lambda_t}, {epsilon_r}"
        )));
    }
    // Sum the tail from far above the mode downward so nothing cancels.
    let n = (lambda_t + 40.0 * lambda_t.sqrt() + 60.0).ceil() as usize;
    let w = poisson_weights(lambda_t, n);
    let mut tail = 0.0;
    let mut answer = n as u32;
    for c in (0..n).rev() {
        tail += w[c + 1];
        if tail > epsilon_r {
            break;
        }
        answer = c as u32;
    }
    Ok(answer)
}

/// Conditional tables for c = 1, 2, ... at vt = 1.
///
/// One and two collisions use hMax = 100, mMax = 500. Higher counts use the
/// stored policy.
#[derive(Debug, Default)]
pub struct TableSet {
    policy: TruncationPolicy,
    tables: BTreeMap<u32, Arc<FourierTable>>,
    builds: AtomicUsize,
}

impl Clone for TableSet {
    fn clone(&self) -> Self {
        TableSet {
            policy: self.policy.clone(),
            tables: self.tables.clone(),
            builds: AtomicUsize::new(self.builds.load(Ordering::Relaxed)),
        }
    }
}

impl TableSet {
    pub fn new(policy: TruncationPolicy) -> Self {
        TableSet {
            policy,
            tables: BTreeMap::new(),
            builds: AtomicUsize::new(0),
        }
    }

    /// Policy actually used for collision count `c`.
    pub fn policy_for(policy: &TruncationPolicy, c: u32) -> TruncationPolicy {
        if c <= 2 {
            TruncationPolicy {
                epsilon_r: policy.epsilon_r,
                ..TruncationPolicy::fixed(100, 500)
            }
        } else {
            policy.clone()
        }
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    pub fn get(&self, c: u32) -> Option<&FourierTable> {
        self.tables.get(&c).map(|t| t.as_ref())
    }

    pub fn insert(&mut self, table: FourierTable) {
        self.tables.insert(table.c, Arc::new(table));
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn tables(&self) -> impl Iterator<Item = &FourierTable> {
        self.tables.values().map(|t| t.as_ref())
    }

    /// Number of tables computed (not inserted) by this set.
    pub fn build_count(&self) -> usize {
        self.builds.load(Ordering::Relaxed)
    }

    /// Builds every missing table for c = 1..=c_top in parallel.
    pub fn ensure(&mut self, c_top: u32) -> Result<()> {
        self.ensure_with(c_top, |_| {})
    }

    /// As [`TableSet::ensure`], calling `progress(c)` after each table is built.
    pub fn ensure_with<P: Fn(u32) + Sync>(&mut self, c_top: u32, progress: P) -> Result<()> {
        let missing: Vec<u32> = (1..=c_top)
            .filter(|c| !self.tables.contains_key(c))
            .collect();
        let built: Vec<Result<FourierTable>> = missing
            .par_iter()
            .map(|&c| {
                let t = build_table(c, &Self::policy_for(&self.policy, c));
                self.builds.fetch_add(1, Ordering::Relaxed);
                if t.is_ok() {
                    progress(c);
                }
                t
            })
            .collect();
        for t in built {
            self.insert(t?);
        }
        Ok(())
    }

    /// Set with c = 1..=c_top built.
    pub fn build(c_top: u32, policy: TruncationPolicy) -> Result<Self> {
        let mut set = TableSet::new(policy);
        set.ensure(c_top)?;
        Ok(set)
    }
}

/// Normalized isotropic density without the shell.
pub fn rho_i(r: f64, t: f64, p: &PhysParams, tables: &TableSet) -> Result<f64> {
    let vt = p.v * t;
    if !(t > 0.0) || !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need t > 0 and r >= 0, got t={t}, r={r}"
        )));
    }
    if r > vt * (1.0 + 1e-12) {
        return Err(Error::OutOfSupport { x: r, extent: vt });
    }
    let lt = p.lambda * t;
    let top = c_max(lt, tables.policy().epsilon_r)?;
    let w = poisson_weights(lt, top as usize);
    let mut num = 0.0;
    let mut den = 0.0;
    for c in 1..=top {
        let table = tables.get(c).ok_or(Error::MissingTable(c))?;
        num += w[c as usize] * 2.0 * eval_rho_is_c(table, r, t, p.v)?;
        den += w[c as usize];
    }
    Ok(num / den)
}

/// 4 pi r^2 rho_I.
pub fn rho_r(r: f64, t: f64, p: &PhysParams, tables: &TableSet) -> Result<f64> {
    Ok(4.0 * PI * r * r * rho_i(r, t, p, tables)?)
}

/// <r^2> of the continuous part, shell subtracted, not divided by its mass.
pub fn gaussian_variance(t: f64, p: &PhysParams) -> f64 {
    let lt = p.lambda * t;
    let l = p.v / p.lambda;
    let vt = p.v * t;
    // e^{-lt} - 1 + lt without cancellation at small lt
    2.0 * l * l * ((-lt).exp_m1() + lt) - (-lt).exp() * vt * vt
}

/// Gaussian with mass 1 - e^{-lt} and the second moment of the continuous part.
pub fn gaussian_approx(r: f64, t: f64, p: &PhysParams) -> f64 {
    let mass = -(-p.lambda * t).exp_m1();
    let s2 = gaussian_variance(t, p) / mass;
    mass * (3.0 / (2.0 * PI * s2)).powf(1.5) * (-1.5 * r * r / s2).exp()
}

/// Production density (1 - e^{-lt}) rho_I, switching to the Gaussian limit at large lt.
///
/// Between [`BLEND_START`] and [`BLEND_END`] (both included) the two are
/// interpolated linearly in lt.
pub fn ro(r: f64, t: f64, p: &PhysParams, tables: &TableSet) -> Result<f64> {
    if !(t > 0.0) || !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need t > 0 and r >= 0, got t={t}, r={r}"
        )));
    }
    if r > p.v * t {
        return Ok(0.0);
    }
    let lt = p.lambda * t;
    let series = || -> Result<f64> { Ok(-(-lt).exp_m1() * rho_i(r, t, p, tables)?) };
    if lt < BLEND_START {
        series()
    } else if lt > BLEND_END {
        Ok(gaussian_approx(r, t, p))
    } else {
        let w = (lt - BLEND_START) / (BLEND_END - BLEND_START);
        Ok((1.0 - w) * series()? + w * gaussian_approx(r, t, p))
    }
}

/// Continuous density and shell of the full distribution.
pub fn rho_s_parts(r: f64, t: f64, p: &PhysParams, tables: &TableSet) -> Result<DensityValue> {
    let lt = p.lambda * t;
    Ok(DensityValue {
        continuous: -(-lt).exp_m1() * rho_i(r, t, p, tables)?,
        shell_weight: (-lt).exp(),
        shell_radius: p.v * t,
    })
}

/// True where truncated series are known to undershoot.
pub fn near_front(r: f64, t: f64, v: f64) -> bool {
    r > NEAR_FRONT_FRACTION * v * t
}
