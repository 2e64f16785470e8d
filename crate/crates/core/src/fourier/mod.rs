//! Fourier tables of the per-collision densities.
//!
//! Tables are always built at vt = 1. For general (x, t) the scaling
//! rho_rs,c(x, t) = rho_rs,c(x/vt, 1/v)/vt and
//! rho_Is,c(x, t) = rho_Is,c(x/vt, 1/v)/(vt)^3 is applied at evaluation.

pub mod plateau;
pub mod series;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
pub use plateau::{find_plateau, Plateau};
pub use series::{fs0_is_coeff, fs_rs_coeff, DIVERGENCE_LIMIT};
use series::{MomentSeries, SeriesKind};

/// Harmonics required past hMax before the series is considered to diverge.
pub const ONSET_MARGIN: u32 = 5;

/// Truncation of the harmonic and moment sums.
///
/// With `h_max` unset, hMax is the first harmonic where the radial and isotropic
/// coefficients have fallen to `epsilon_r` of the first one. With `m_max`
/// unset, mMax starts at `m_max_factor * hMax` and grows by half until the
/// divergence onset sits [`ONSET_MARGIN`] harmonics past hMax.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub epsilon_r: f64,
    pub h_max: Option<u32>,
    pub m_max: Option<u32>,
    pub m_max_factor: f64,
    /// Upper limit for the mMax search.
    pub m_max_cap: u32,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            epsilon_r: 1e-3,
            h_max: None,
            m_max: None,
            m_max_factor: 9.0,
            m_max_cap: 2000,
        }
    }
}

impl TruncationPolicy {
    pub fn automatic(epsilon_r: f64) -> Self {
        TruncationPolicy {
            epsilon_r,
            ..Default::default()
        }
    }

    pub fn with_h_max(h_max: u32) -> Self {
        TruncationPolicy {
            h_max: Some(h_max),
            ..Default::default()
        }
    }

    /// Both cutoffs pinned; the decay rule is not applied.
    pub fn fixed(h_max: u32, m_max: u32) -> Self {
        TruncationPolicy {
            h_max: Some(h_max),
            m_max: Some(m_max),
            m_max_factor: m_max as f64 / h_max.max(1) as f64,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::InvalidArgument(s.to_string()));
        if !(self.epsilon_r > 0.0 && self.epsilon_r < 1.0) {
            return bad("epsilon_r must lie in (0, 1)");
        }
        if self.h_max == Some(0) {
            return bad("hMax must be at least 1");
        }
        if !(self.m_max_factor >= 1.0) {
            return bad("mMax factor must be at least 1");
        }
        if let (Some(h), Some(m)) = (self.h_max, self.m_max) {
            if (m as f64) < self.m_max_factor * h as f64 {
                return bad("mMax must be at least factor * hMax");
            }
        }
        Ok(())
    }

    /// Short stable digest identifying this policy in caches.
    pub fn hash(&self) -> String {
        let canon = format!(
            "eps={:e};h={:?};m={:?};f={:e};cap={}",
            self.epsilon_r, self.h_max, self.m_max, self.m_max_factor, self.m_max_cap
        );
        Sha256::digest(canon.as_bytes())
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Fourier coefficients of rho_rs,c and rho_Is,c at vt = 1.
///
/// `fs_rs[h]` and `fs_is[h]` are indexed by harmonic, `fs_rs[0] = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierTable {
    pub c: u32,
    pub h_max: u32,
    pub m_max: u32,
    pub fs_rs: Vec<f64>,
    pub fs_is: Vec<f64>,
    pub plateau: f64,
    pub r_minus2: f64,
}

impl FourierTable {
    /// Same table with only the first `h` harmonics.
    pub fn truncated(&self, h: u32) -> FourierTable {
        let h = h.min(self.h_max);
        FourierTable {
            h_max: h,
            fs_rs: self.fs_rs[..=h as usize].to_vec(),
            fs_is: self.fs_is[..=h as usize].to_vec(),
            ..self.clone()
        }
    }

    /// rho_rs,c(y, 1/v) on [-1, 1].
    pub fn rho_rs_unit(&self, y: f64) -> f64 {
        let s: f64 = self.fs_rs[1..]
            .iter()
            .enumerate()
            .map(|(i, a)| a * (PI * (i + 1) as f64 * y).cos())
            .sum();
        0.5 * (1.0 + 2.0 * s)
    }

    /// rho_Is,c(y, 1/v) on [-1, 1].
    pub fn rho_is_unit(&self, y: f64) -> f64 {
        self.fs_is
            .iter()
            .enumerate()
            .map(|(h, a)| a * (PI * h as f64 * y).cos())
            .sum()
    }
}

fn check_support(x: f64, vt: f64) -> Result<()> {
    if !(vt > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need vt > 0 and finite x, got vt={vt}, x={x}"
        )));
    }
    if x.abs() > vt * (1.0 + 1e-12) {
        return Err(Error::OutOfSupport { x, extent: vt });
    }
    Ok(())
}

pub fn eval_rho_rs_c(table: &FourierTable, x: f64, t: f64, v: f64) -> Result<f64> {
    let vt = v * t;
    check_support(x, vt)?;
    Ok(table.rho_rs_unit((x / vt).clamp(-1.0, 1.0)) / vt)
}

/// rho_Is,c(x, t); the full isotropic density rho_I,c is twice this.
pub fn eval_rho_is_c(table: &FourierTable, x: f64, t: f64, v: f64) -> Result<f64> {
    let vt = v * t;
    check_support(x, vt)?;
    Ok(table.rho_is_unit((x / vt).clamp(-1.0, 1.0)) / (vt * vt * vt))
}

/// First h past the initial decay where |a_h| exceeds ten times |a_1|.
/// `values[i]` is the coefficient of harmonic `i + 1`.
pub fn divergence_onset(values: &[f64]) -> Option<u32> {
    let first = values.first()?.abs();
    let mut decayed = false;
    for (i, v) in values.iter().enumerate().skip(1) {
        if !v.is_finite() {
            return Some(i as u32 + 1);
        }
        if v.abs() < first {
            decayed = true;
        } else if decayed && v.abs() > 10.0 * first {
            return Some(i as u32 + 1);
        }
    }
    None
}

struct Attempt {
    m_max: u32,
    reliable: u32,
    onset: u32,
    plateau: Plateau,
    fs_rs: Vec<f64>,
    fs0: Vec<f64>,
}

impl Attempt {
    fn fs_is(&self, h: u32) -> f64 {
        if h == 0 {
            -0.5 * self.plateau.value
        } else {
            self.fs0[h as usize - 1] - self.plateau.value
        }
    }
}

fn attempt(c: u32, m_max: u32) -> Result<Attempt> {
    let rs = MomentSeries::new(SeriesKind::Radial, c, m_max);
    let is = MomentSeries::new(SeriesKind::IsotropicPartial, c, m_max);
    let reliable = rs.reliable_limit().min(is.reliable_limit());
    let fs0 = is.values(1..=reliable.max(1));
    let mut fs_rs = rs.values(1..=reliable.max(1));
    let mut onset = divergence_onset(&fs_rs);
    let mut h = reliable;
    while onset.is_none() && h < 4 * reliable.max(4) {
        let next = rs.values(h + 1..=h + 8);
        fs_rs.extend(next);
        h += 8;
        onset = divergence_onset(&fs_rs);
    }
    fs_rs.truncate(reliable as usize);
    let onset = onset.unwrap_or(h + 1);
    let plateau = find_plateau(&fs0[..reliable as usize], 1).ok_or(Error::NoPlateau {
        c,
        onset: reliable + 1,
    })?;
    debug_assert_eq!(rs.m_max(), m_max);
    Ok(Attempt {
        m_max,
        reliable,
        onset,
        plateau,
        fs_rs,
        fs0,
    })
}

fn finish(c: u32, a: &Attempt, h_max: u32) -> FourierTable {
    let mut fs_rs = vec![1.0];
    fs_rs.extend_from_slice(&a.fs_rs[..h_max as usize]);
    let fs_is = (0..=h_max).map(|h| a.fs_is(h)).collect();
    FourierTable {
        c,
        h_max,
        m_max: a.m_max,
        fs_rs,
        fs_is,
        plateau: a.plateau.value,
        r_minus2: -4.0 * PI * a.plateau.value,
    }
}

/// First h where two consecutive coefficients of both series are below
/// `eps` times their first one.
fn decay_cutoff(a: &Attempt, eps: f64) -> Option<u32> {
    let is_scale = eps * a.fs_is(1).abs();
    let rs_scale = eps * a.fs_rs[0].abs();
    let small = |h: u32| a.fs_is(h).abs() <= is_scale && a.fs_rs[h as usize - 1].abs() <= rs_scale;
    (2..=a.reliable).find(|&h| small(h) && small(h - 1))
}

fn grow(m: u32) -> u32 {
    ((m as f64) * 1.5).ceil() as u32
}

/// Harmonics needed on top of hMax for the plateau window to fit.
fn start_m(policy: &TruncationPolicy, target_h: u32) -> u32 {
    let h = target_h.max(plateau::WINDOW as u32 + 2);
    (policy.m_max_factor * h as f64).ceil() as u32
}

pub fn build_table(c: u32, policy: &TruncationPolicy) -> Result<FourierTable> {
    if c == 0 {
        return Err(Error::InvalidArgument(
            "tables start at one collision".into(),
        ));
    }
    policy.validate()?;
    match (policy.h_max, policy.m_max) {
        (Some(h), Some(m)) => {
            let a = attempt(c, m)?;
            if a.reliable < h {
                return Err(Error::PolicyTooSmall {
                    c,
                    reason: format!(
                        "mMax={m} keeps only {} harmonics reliable, {h} requested",
                        a.reliable
                    ),
                });
            }
            Ok(finish(c, &a, h))
        }
        (Some(h), None) => {
            let mut m = start_m(policy, h);
            loop {
                if let Ok(a) = attempt(c, m) {
                    if a.reliable >= h && a.onset >= h + ONSET_MARGIN {
                        return Ok(finish(c, &a, h));
                    }
                }
                m = grow(m);
                if m > policy.m_max_cap {
                    return Err(Error::PolicyTooSmall {
                        c,
                        reason: format!("hMax={h} needs mMax above the cap"),
                    });
                }
            }
        }
        (None, fixed_m) => {
            let mut m = fixed_m.unwrap_or_else(|| start_m(policy, 0));
            loop {
                let a = attempt(c, m);
                if let Ok(a) = &a {
                    if let Some(h) = decay_cutoff(a, policy.epsilon_r) {
                        let needed = (policy.m_max_factor * h as f64).ceil() as u32;
                        if fixed_m.is_none() && m < needed {
                            m = needed;
                            if m > policy.m_max_cap {
                                return Err(Error::PolicyTooSmall {
                                    c,
                                    reason: format!("hMax={h} needs mMax={m}, above the cap"),
                                });
                            }
                            continue;
                        }
                        if a.onset >= h + ONSET_MARGIN {
                            return Ok(finish(c, a, h));
                        }
                    }
                }
                if fixed_m.is_some() {
                    a?;
                    return Err(Error::PolicyTooSmall {
                        c,
                        reason: format!(
                            "coefficients never fall below {} of the first within mMax={m}",
                            policy.epsilon_r
                        ),
                    });
                }
                m = grow(m);
                if m > policy.m_max_cap {
                    return Err(Error::PolicyTooSmall {
                        c,
                        reason: format!(
                            "decay to {} not reached below mMax cap {}",
                            policy.epsilon_r, policy.m_max_cap
                        ),
                    });
                }
            }
        }
    }
}

/// Inverse-square moment at vt = 1 and the FS0 limit it is read from.
pub fn extract_r_minus2(c: u32, policy: &TruncationPolicy) -> Result<(f64, f64)> {
    if c == 0 {
        return Err(Error::InvalidArgument(
            "collision count must be at least 1".into(),
        ));
    }
    policy.validate()?;
    let mut m = policy
        .m_max
        .unwrap_or_else(|| start_m(policy, policy.h_max.unwrap_or(0)));
    loop {
        match attempt(c, m) {
            Ok(a) => return Ok((-4.0 * PI * a.plateau.value, a.plateau.value)),
            Err(e) if policy.m_max.is_some() => return Err(e),
            Err(e) => {
                m = grow(m);
                if m > policy.m_max_cap {
                    return Err(e);
                }
            }
        }
    }
}

/// Inverse-square moment of rho_c at time t: r_minus2 / (vt)^2.
pub fn r_minus2_at(table: &FourierTable, t: f64, v: f64) -> f64 {
    table.r_minus2 / (v * t).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn onset_rule() {
        assert_eq!(divergence_onset(&[1.0, 2.0, 0.5, 0.1, 20.0]), Some(5));
        // growth before the first decay does not count
        assert_eq!(divergence_onset(&[1.0, 20.0, 0.5]), None);
        assert_eq!(divergence_onset(&[1.0, 0.5, f64::NAN]), Some(3));
    }

    #[test]
    fn policy_validation() {
        assert!(TruncationPolicy::default().validate().is_ok());
        assert!(TruncationPolicy::fixed(100, 500).validate().is_ok());
        assert!(TruncationPolicy {
            epsilon_r: 1.5,
            ..Default::default()
        }
        .validate()
        .is_err());
        let p = TruncationPolicy {
            h_max: Some(10),
            m_max: Some(20),
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn policy_hash_distinguishes() {
        let a = TruncationPolicy::default().hash();
        assert_eq!(a, TruncationPolicy::default().hash());
        assert_ne!(a, TruncationPolicy::fixed(100, 500).hash());
        assert_eq!(a.len(), 16);
    }

    #[test]
    fn c10_isotropic_list() {
        let t = build_table(10, &TruncationPolicy::with_h_max(12)).unwrap();
        let expect = [0.9236, 0.3286, 0.0331, -0.0045];
        for (h, e) in expect.iter().enumerate() {
            assert!(
                (t.fs_is[h + 1] - e).abs() < 5e-5,
                "h={} {}",
                h + 1,
                t.fs_is[h + 1]
            );
        }
        assert!((t.fs_is[0] - t.r_minus2 / (8.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn larger_c_needs_fewer_harmonics() {
        let p = TruncationPolicy::default();
        let t3 = build_table(3, &p).unwrap();
        let t10 = build_table(10, &p).unwrap();
        assert!(t10.h_max < t3.h_max, "{} vs {}", t10.h_max, t3.h_max);
        for t in [&t3, &t10] {
            assert!(t.fs_is[t.h_max as usize].abs() <= 1e-3 * t.fs_is[1].abs());
            assert!(t.m_max as f64 >= 9.0 * t.h_max as f64);
        }
    }

    #[test]
    fn unreachable_decay_is_reported() {
        let p = TruncationPolicy {
            m_max_cap: 200,
            ..Default::default()
        };
        assert!(matches!(
            build_table(1, &p),
            Err(Error::PolicyTooSmall { .. })
        ));
        assert!(build_table(1, &TruncationPolicy::fixed(80, 540)).is_ok());
    }

    #[test]
    fn support_is_enforced() {
        let t = build_table(10, &TruncationPolicy::with_h_max(8)).unwrap();
        assert!(matches!(
            eval_rho_rs_c(&t, 1.5, 1.0, 1.0),
            Err(Error::OutOfSupport { .. })
        ));
        let a = eval_rho_rs_c(&t, 0.3, 2.0, 0.5).unwrap();
        let b = eval_rho_rs_c(&t, -0.3, 2.0, 0.5).unwrap();
        assert_eq!(a, b);
    }
}
