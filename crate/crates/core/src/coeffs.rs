//! The combinatorial coefficients C(c, m).
//!
//! C(c, m) is the coefficient of x^m in f(x)^(c+1) with f(x) = sum x^i/(2i+1).
//! Rows are computed by binary powering of an integer polynomial sharing one
//! denominator, truncated at degree mMax and content-reduced after every
//! product. Computed rows are memoized per c.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::rational::ExactRational;

/// Exact coefficients C(c, 0..=m_max), stored as integer numerators over a
/// shared positive denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientRow {
    c: u32,
    numerators: Vec<BigInt>,
    denominator: BigInt,
}

impl CoefficientRow {
    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn m_max(&self) -> u32 {
        (self.numerators.len() - 1) as u32
    }

    pub fn get(&self, m: u32) -> Option<ExactRational> {
        self.numerators
            .get(m as usize)
            .map(|n| ExactRational::new(n.clone(), self.denominator.clone()).unwrap())
    }

    pub fn values(&self) -> Vec<ExactRational> {
        (0..=self.m_max()).map(|m| self.get(m).unwrap()).collect()
    }

    /// Numerators over [`Self::denominator`]; entry m is C(c,m) times the denominator.
    pub fn numerators(&self) -> &[BigInt] {
        &self.numerators
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// The first `m_max + 1` entries. Panics if the row is shorter.
    pub fn prefix(&self, m_max: u32) -> CoefficientRow {
        assert!(
            m_max <= self.m_max(),
            "row for c={} only reaches m={}",
            self.c,
            self.m_max()
        );
        let mut out = CoefficientRow {
            c: self.c,
            numerators: self.numerators[..=m_max as usize].to_vec(),
            denominator: self.denominator.clone(),
        };
        out.reduce();
        out
    }

    fn reduce(&mut self) {
        let mut g = self.denominator.clone();
        for n in &self.numerators {
            if g.is_one() {
                return;
            }
            g = g.gcd(n);
        }
        if !g.is_one() {
            for n in &mut self.numerators {
                *n /= &g;
            }
            self.denominator /= &g;
        }
    }
}

struct Poly {
    coef: Vec<BigInt>,
    denom: BigInt,
}

impl Poly {
    fn mul_truncated(&self, other: &Poly, deg: usize) -> Poly {
        let coef: Vec<BigInt> = (0..=deg)
            .into_par_iter()
            .map(|k| {
                let mut acc = BigInt::zero();
                for i in 0..=k {
                    acc += &self.coef[i] * &other.coef[k - i];
                }
                acc
            })
            .collect();
        let mut out = Poly {
            coef,
            denom: &self.denom * &other.denom,
        };
        out.reduce();
        out
    }

    fn reduce(&mut self) {
        let mut g = self.denom.clone();
        for n in &self.coef {
            if g.is_one() {
                return;
            }
            g = g.gcd(n);
        }
        if !g.is_one() {
            for n in &mut self.coef {
                *n /= &g;
            }
            self.denom /= &g;
        }
    }
}

/// f(x) = sum_{i<=deg} x^i/(2i+1) over the common denominator lcm(1,3,..,2deg+1).
fn base_poly(deg: usize) -> Poly {
    let mut l = BigInt::one();
    for i in 0..=deg {
        l = l.lcm(&BigInt::from(2 * i + 1));
    }
    let coef = (0..=deg).map(|i| &l / BigInt::from(2 * i + 1)).collect();
    Poly { coef, denom: l }
}

fn compute_row(c: u32, m_max: u32) -> CoefficientRow {
    let deg = m_max as usize;
    let mut base = base_poly(deg);
    let mut exp = c as u64 + 1;
    let mut acc: Option<Poly> = None;
    loop {
        if exp & 1 == 1 {
            acc = Some(match acc {
                None => Poly {
                    coef: base.coef.clone(),
                    denom: base.denom.clone(),
                },
                Some(a) => a.mul_truncated(&base, deg),
            });
        }
        exp >>= 1;
        if exp == 0 {
            break;
        }
        base = base.mul_truncated(&base, deg);
    }
    let p = acc.unwrap();
    let mut row = CoefficientRow {
        c,
        numerators: p.coef,
        denominator: p.denom,
    };
    row.reduce();
    row
}

static ROWS: LazyLock<RwLock<HashMap<u32, Arc<CoefficientRow>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Memoized row reaching at least `m_max`. The returned row may be longer.
pub fn shared_row(c: u32, m_max: u32) -> Arc<CoefficientRow> {
    if let Some(row) = ROWS.read().unwrap().get(&c) {
        if row.m_max() >= m_max {
            return Arc::clone(row);
        }
    }
    let row = Arc::new(compute_row(c, m_max));
    let mut map = ROWS.write().unwrap();
    match map.get(&c) {
        Some(existing) if existing.m_max() >= m_max => Arc::clone(existing),
        _ => {
            map.insert(c, Arc::clone(&row));
            row
        }
    }
}

/// Drops every memoized row.
pub fn clear_row_cache() {
    ROWS.write().unwrap().clear();
}

pub fn c_coeff_row(c: u32, m_max: u32) -> CoefficientRow {
    let row = shared_row(c, m_max);
    if row.m_max() == m_max {
        (*row).clone()
    } else {
        row.prefix(m_max)
    }
}

pub fn c_coeff(c: u32, m: u32) -> ExactRational {
    shared_row(c, m).get(m).unwrap()
}

fn binomial(n: u64, k: u64) -> BigInt {
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Lower and upper bounds on C(c, m):
/// binom(m+c, m) (1/(2m/(c+1) + 1))^(c+1) and binom(m+c, m)/(2m+1).
pub fn c_bounds(c: u32, m: u32) -> (ExactRational, ExactRational) {
    let (c, m) = (c as u64, m as u64);
    let b = ExactRational::from_integer(binomial(m + c, m));
    // 1/(2m/(c+1) + 1) = (c+1)/(2m+c+1)
    let ratio = ExactRational::new(c + 1, 2 * m + c + 1).unwrap();
    let lower = &b * &ratio.pow((c + 1) as i32);
    let upper = &b * &ExactRational::new(1, 2 * m + 1).unwrap();
    (lower, upper)
}
