//! Named validation suites run by the `validate` command.

use std::f64::consts::PI;

use serde::Serialize;

use crate::assembly::{c_max, TableSet};
use crate::coeffs::c_coeff;
use crate::error::{Error, Result};
use crate::exact::{dilog, rho1_i, rho2_i, rho_proj2, rho_proj2_report};
use crate::fourier::{eval_rho_rs_c, TruncationPolicy};
use crate::moments::even_moment_rc;
use crate::montecarlo::{cdf_from_density, ks_statistic, simulate_conditional, RngStream};
use crate::quadrature::integrate_with;
use crate::rational::ExactRational;

pub const SUITES: [&str; 6] = ["table1", "cmax", "ks", "exact", "moments", "dilog"];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<Check>) -> Self {
        SuiteReport {
            suite: suite.into(),
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

/// Options shared by the suites; only `ks` reads them.
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub c: u32,
    pub n: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            c: 3,
            n: 10_000,
            seed: 42,
        }
    }
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    let checks = match name {
        "table1" => table1(),
        "cmax" => cmax()?,
        "ks" => ks(opts)?,
        "exact" => exact()?,
        "moments" => moments()?,
        "dilog" => dilogs()?,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "unknown suite {name:?}; known: {}",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteReport::new(name, checks))
}

/// Reference coefficient values, rows c = 0..=5, columns m = 0..=4.
pub const TABLE1: [[&str; 5]; 6] = [
    ["1", "1/3", "1/5", "1/7", "1/9"],
    ["1", "2/3", "0.511", "0.419", "0.357"],
    ["1", "3/3", "0.933", "0.866", "0.806"],
    ["1", "4/3", "1.467", "1.520", "1.535"],
    ["1", "5/3", "2.111", "2.418", "2.636"],
    ["1", "6/3", "2.867", "3.598", "4.214"],
];

fn table1() -> Vec<Check> {
    let mut out = Vec::new();
    for (c, row) in TABLE1.iter().enumerate() {
        for (m, &cell) in row.iter().enumerate() {
            let got = c_coeff(c as u32, m as u32);
            let (pass, detail) = if cell.contains('.') {
                let want: f64 = cell.parse().unwrap();
                (
                    (got.to_f64() - want).abs() <= 1e-3,
                    format!("{:.6} vs {cell}", got.to_f64()),
                )
            } else {
                let want: ExactRational = cell.parse().unwrap();
                (got == want, format!("{got} vs {cell}"))
            };
            out.push(check(format!("C({c},{m})"), pass, detail));
        }
    }
    out
}

fn cmax() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (lt, want) in [(0.1, 2), (1.0, 5), (10.0, 21), (50.0, 73), (100.0, 132)] {
        let got = c_max(lt, 1e-3)?;
        out.push(check(
            format!("c_max({lt}, 1e-3)"),
            got == want,
            format!("{got} vs {want}"),
        ));
    }
    Ok(out)
}

fn ks(opts: &SuiteOptions) -> Result<Vec<Check>> {
    if opts.c == 0 || opts.n == 0 {
        return Err(Error::InvalidArgument("ks needs c >= 1 and n >= 1".into()));
    }
    let set = TableSet::build(opts.c, TruncationPolicy::default())?;
    let table = set.get(opts.c).ok_or(Error::MissingTable(opts.c))?;
    let cdf = cdf_from_density(
        |r| 2.0 * eval_rho_rs_c(table, r, 1.0, 1.0).unwrap_or(0.0),
        0.0,
        1.0,
        400,
        &[],
    )?;
    let radii: Vec<f64> =
        simulate_conditional(opts.n, opts.c, 1.0, 1.0, &RngStream::new(opts.seed, 0))
            .iter()
            .map(|s| s.radius)
            .collect();
    let d = ks_statistic(&radii, |r| cdf.eval(r), 0.0, 1.0)?;
    let limit = 1.63 / (opts.n as f64).sqrt();
    Ok(vec![check(
        format!("KS c={} n={} seed={}", opts.c, opts.n, opts.seed),
        d < limit,
        format!("D = {d:.5}, 99% limit {limit:.5}"),
    )])
}

fn exact() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let half = rho1_i(0.5, 1.0, 1.0)?;
    out.push(check(
        "rho1_I(vt/2)",
        (half - 0.17485).abs() < 5e-6,
        format!("{half:.6} vs 0.17485"),
    ));
    let edge = rho2_i(1.0, 1.0, 1.0)?;
    out.push(check(
        "rho2_I(vt)",
        edge.abs() <= 1e-6,
        format!("{edge:.3e}"),
    ));
    let rep = rho_proj2_report(1.0, 1.0);
    out.push(check(
        "rho_proj2 continuity",
        rep.max_jump <= 1e-9,
        format!("max jump {:.3e}", rep.max_jump),
    ));
    let norm = integrate_with(
        |x| rho_proj2(x, 1.0, 1.0).unwrap(),
        -1.0,
        1.0,
        &[-0.5, -1.0 / 3.0, 1.0 / 3.0, 0.5],
        1e-12,
        1e-12,
    )?
    .value;
    out.push(check(
        "rho_proj2 mass",
        (norm - 1.0).abs() <= 1e-6,
        format!("{norm:.9}"),
    ));
    Ok(out)
}

fn moments() -> Result<Vec<Check>> {
    let set = TableSet::build(5, TruncationPolicy::default())?;
    let mut out = Vec::new();
    for c in 1..=5 {
        let table = set.get(c).unwrap();
        for m in 1..=3u32 {
            let f = |x: f64| x.powi(2 * m as i32) * eval_rho_rs_c(table, x, 1.0, 1.0).unwrap();
            let q = integrate_with(f, -1.0, 1.0, &[0.0], 1e-13, 1e-12)?.value;
            let want = even_moment_rc(c, m, 1.0);
            let rel = (q / want - 1.0).abs();
            out.push(check(
                format!("<r^{}> c={c}", 2 * m),
                rel < 1e-3,
                format!("{q:.6} vs {want:.6}, rel {rel:.1e}"),
            ));
        }
    }
    Ok(out)
}

fn dilogs() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let one = dilog(1.0)?;
    out.push(check(
        "Li2(1)",
        (one - PI * PI / 6.0).abs() <= 1e-12,
        format!("{one:.15}"),
    ));
    let h = dilog(0.5)?;
    let want = PI * PI / 12.0 - std::f64::consts::LN_2.powi(2) / 2.0;
    out.push(check(
        "Li2(1/2)",
        (h - want).abs() <= 1e-12,
        format!("{h:.15}"),
    ));
    let mut worst: f64 = 0.0;
    for i in 1..=100 {
        let x = i as f64 / 101.0;
        let lhs = dilog(x)? + dilog(1.0 - x)?;
        worst = worst.max((lhs - (PI * PI / 6.0 - x.ln() * (1.0 - x).ln())).abs());
    }
    out.push(check(
        "reflection, 100 points",
        worst <= 1e-12,
        format!("max residual {worst:.1e}"),
    ));
    Ok(out)
}
