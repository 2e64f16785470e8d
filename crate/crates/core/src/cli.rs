//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::assembly::{c_max, near_front, ro, TableSet, BLEND_END};
use crate::cache::{resolve_dir, CacheFile, CacheRecord, CACHE_DIR_ENV};
use crate::coeffs::c_coeff_row;
use crate::error::{Error, Result};
use crate::exact::{rho1_i, rho2_i};
use crate::fourier::TruncationPolicy;
use crate::moments::PhysParams;
use crate::montecarlo::{simulate_conditional, simulate_poisson, RngStream};
use crate::validate::{run_suite, SuiteOptions, SUITES};

#[derive(Parser, Debug)]
#[command(
    name = "randflight",
    version,
    about = "Densities of the 3D isotropic random flight"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Scattering rate
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Speed
    #[arg(long, default_value_t = 1.0)]
    pub v: f64,
    /// Time
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct Grid {
    /// First radius; defaults to 0
    #[arg(long)]
    pub rmin: Option<f64>,
    /// Last radius; defaults to vt
    #[arg(long)]
    pub rmax: Option<f64>,
    /// Number of intervals between rmin and rmax
    #[arg(long, default_value_t = 100)]
    pub rsteps: usize,
}

impl Grid {
    fn points(&self, vt: f64) -> Result<Vec<f64>> {
        let lo = self.rmin.unwrap_or(0.0);
        let hi = self.rmax.unwrap_or(vt);
        if !(lo >= 0.0) || !(hi >= lo) || self.rsteps == 0 {
            return Err(Error::InvalidArgument(format!(
                "bad grid rmin={lo} rmax={hi} rsteps={}",
                self.rsteps
            )));
        }
        Ok((0..=self.rsteps)
            .map(|i| lo + (hi - lo) * i as f64 / self.rsteps as f64)
            .collect())
    }
}

#[derive(Args, Debug, Clone)]
pub struct CacheArgs {
    /// Cache directory
    #[arg(long, env = CACHE_DIR_ENV)]
    pub cache_dir: Option<PathBuf>,
    /// Relative tolerance for collision and harmonic truncation
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// C(c, m) for m = 0..=mmax. CSV columns: m,fraction,decimal
    Coeffs {
        #[arg(long)]
        c: u32,
        #[arg(long)]
        mmax: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Production density on a radius grid. CSV columns: r,ro,rho_r,near_front
    ///
    /// `ro` is (1 - e^{-lt}) rho_I (Gaussian limit above lt = 105), `rho_r`
    /// is 4 pi r^2 ro, `near_front` is 1 where r > 0.98 vt.
    Pdf {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        cache: CacheArgs,
        /// Build and store missing tables instead of failing
        #[arg(long)]
        build: bool,
    },
    /// Closed-form density for one or two collisions. CSV columns: r,rho_i,rho_r
    Exact {
        #[arg(long)]
        collisions: u32,
        #[arg(long, default_value_t = 1.0)]
        v: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Simulated flights. CSV columns: index,radius,collisions
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Fix the number of collisions instead of drawing it
        #[arg(long)]
        c: Option<u32>,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run a validation suite; exit status 0 iff every check passes
    Validate {
        /// One of table1, cmax, ks, exact, moments, dilog
        suite: String,
        #[arg(long, default_value_t = 3)]
        c: u32,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Manage the table cache
    Cache {
        #[command(subcommand)]
        action: CacheAction,
        #[command(flatten)]
        cache: CacheArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum CacheAction {
    /// Build tables for c = 1..=cmax; large cmax takes long
    Build {
        #[arg(long)]
        cmax: u32,
    },
    /// List stored records. CSV columns: c,policy,h_max,m_max,r_minus2
    List,
    /// Recompute three random coefficients per record
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(x.to_string())
    }
}

/// Writes rows as CSV or as a JSON array of records.
pub fn write_table<W: Write>(
    out: &mut W,
    format: Format,
    columns: &[&str],
    rows: &[Vec<Value>],
) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{}", columns.join(","))?;
            for row in rows {
                let cells: Vec<String> = row
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                writeln!(out, "{}", cells.join(","))?;
            }
        }
        Format::Json => {
            let records: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let m: Map<String, Value> = columns
                        .iter()
                        .map(|c| c.to_string())
                        .zip(row.iter().cloned())
                        .collect();
                    Value::Object(m)
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&records).unwrap())?;
        }
    }
    Ok(())
}

fn cmd_coeffs<W: Write>(out: &mut W, c: u32, mmax: u32, format: Format) -> Result<()> {
    let row = c_coeff_row(c, mmax);
    let rows: Vec<Vec<Value>> = row
        .values()
        .iter()
        .enumerate()
        .map(|(m, v)| vec![json!(m), Value::String(v.to_string()), num(v.to_f64())])
        .collect();
    write_table(out, format, &["m", "fraction", "decimal"], &rows)?;
    Ok(())
}

fn cmd_pdf<W: Write>(
    out: &mut W,
    common: &Common,
    grid: &Grid,
    cache: &CacheArgs,
    build: bool,
) -> Result<()> {
    let p = PhysParams::new(common.v, common.lambda)?;
    if !(common.t > 0.0) {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let vt = p.v * common.t;
    let lt = p.lambda * common.t;
    let policy = TruncationPolicy::automatic(cache.epsilon);
    policy.validate()?;
    let top = if lt > BLEND_END {
        0
    } else {
        c_max(lt, cache.epsilon)?
    };
    let dir = resolve_dir(cache.cache_dir.as_deref());
    let mut file = CacheFile::load(&dir)?;
    let mut set = file.table_set(&policy, top)?;
    if set.len() < top as usize {
        if !build {
            let missing = (1..=top).find(|&c| set.get(c).is_none()).unwrap();
            return Err(Error::MissingTable(missing));
        }
        set.ensure_with(top, |c| eprintln!("built table c={c}"))?;
        file.store_set(&set);
        file.save(&dir)?;
    }
    let rows = grid
        .points(vt)?
        .into_iter()
        .map(|r| {
            let value = ro(r, common.t, &p, &set)?;
            let flag = near_front(r, common.t, p.v) && r <= vt;
            Ok(vec![
                num(r),
                num(value),
                num(4.0 * std::f64::consts::PI * r * r * value),
                json!(flag as u8),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    write_table(
        out,
        common.format,
        &["r", "ro", "rho_r", "near_front"],
        &rows,
    )?;
    Ok(())
}

fn cmd_exact<W: Write>(
    out: &mut W,
    collisions: u32,
    v: f64,
    t: f64,
    grid: &Grid,
    format: Format,
) -> Result<()> {
    let f: fn(f64, f64, f64) -> Result<f64> = match collisions {
        1 => rho1_i,
        2 => rho2_i,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "closed forms exist for 1 or 2 collisions only; {collisions} needs the Fourier tables (see `pdf`)"
            )))
        }
    };
    let vt = v * t;
    let rows = grid
        .points(vt)?
        .into_iter()
        .map(|r| {
            let value = if r > vt {
                0.0
            } else {
                match f(r, t, v) {
                    Ok(x) => x,
                    Err(Error::Divergent(_)) => f64::INFINITY,
                    Err(e) => return Err(e),
                }
            };
            Ok(vec![
                num(r),
                num(value),
                num(4.0 * std::f64::consts::PI * r * r * value),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    write_table(out, format, &["r", "rho_i", "rho_r"], &rows)?;
    Ok(())
}

fn cmd_simulate<W: Write>(
    out: &mut W,
    common: &Common,
    c: Option<u32>,
    n: usize,
    seed: u64,
) -> Result<()> {
    let p = PhysParams::new(common.v, common.lambda)?;
    if !(common.t > 0.0) {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let stream = RngStream::new(seed, 0);
    let samples = match c {
        Some(c) => simulate_conditional(n, c, common.t, p.v, &stream),
        None => simulate_poisson(n, common.t, &p, &stream),
    };
    let rows: Vec<Vec<Value>> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| vec![json!(i), num(s.radius), json!(s.collisions)])
        .collect();
    write_table(
        out,
        common.format,
        &["index", "radius", "collisions"],
        &rows,
    )?;
    Ok(())
}

fn cmd_validate<W: Write>(
    out: &mut W,
    suite: &str,
    opts: &SuiteOptions,
    format: Format,
) -> Result<bool> {
    let report = run_suite(suite, opts)?;
    match format {
        Format::Csv => {
            for c in &report.checks {
                writeln!(
                    out,
                    "{} {}: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                )?;
            }
            writeln!(
                out,
                "{} {}",
                if report.pass { "PASS" } else { "FAIL" },
                report.suite
            )?;
        }
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report).unwrap())?,
    }
    Ok(report.pass)
}

fn cmd_cache<W: Write>(out: &mut W, action: &CacheAction, cache: &CacheArgs) -> Result<bool> {
    let dir = resolve_dir(cache.cache_dir.as_deref());
    let policy = TruncationPolicy::automatic(cache.epsilon);
    policy.validate()?;
    match action {
        CacheAction::Build { cmax } => {
            let mut file = CacheFile::load(&dir)?;
            let mut set = file.table_set(&policy, *cmax)?;
            set.ensure_with(*cmax, |c| eprintln!("built table c={c}"))?;
            file.store_set(&set);
            file.save(&dir)?;
            let rows: Vec<Vec<Value>> = (1..=*cmax)
                .map(|c| {
                    let t = set.get(c).unwrap();
                    vec![
                        json!(c),
                        json!(TableSet::policy_for(&policy, c).hash()),
                        json!(t.h_max),
                        json!(t.m_max),
                        num(t.r_minus2),
                    ]
                })
                .collect();
            write_table(
                out,
                Format::Csv,
                &["c", "policy", "h_max", "m_max", "r_minus2"],
                &rows,
            )?;
            Ok(true)
        }
        CacheAction::List => {
            let file = CacheFile::load(&dir)?;
            let rows: Vec<Vec<Value>> = file.records.iter().map(list_row).collect();
            write_table(
                out,
                Format::Csv,
                &["c", "policy", "h_max", "m_max", "r_minus2"],
                &rows,
            )?;
            Ok(true)
        }
        CacheAction::Verify { seed } => {
            let file = CacheFile::load(&dir)?;
            let reports = file.verify(3, *seed);
            let mut ok = true;
            for r in &reports {
                match &r.problem {
                    None => writeln!(
                        out,
                        "PASS c={} policy={} harmonics={:?}",
                        r.c, r.policy_hash, r.checked
                    )?,
                    Some(p) => {
                        ok = false;
                        writeln!(out, "FAIL c={} policy={}: {p}", r.c, r.policy_hash)?
                    }
                }
            }
            writeln!(
                out,
                "{} {} records",
                if ok { "PASS" } else { "FAIL" },
                reports.len()
            )?;
            Ok(ok)
        }
    }
}

fn list_row(r: &CacheRecord) -> Vec<Value> {
    vec![
        json!(r.c),
        json!(r.policy_hash),
        json!(r.h_max),
        json!(r.m_max),
        Value::String(r.r_minus2.clone()),
    ]
}

/// Runs a parsed command; `Ok(false)` means a check failed.
pub fn execute<W: Write>(cli: &Cli, out: &mut W) -> Result<bool> {
    match &cli.command {
        Command::Coeffs { c, mmax, format } => cmd_coeffs(out, *c, *mmax, *format).map(|_| true),
        Command::Pdf {
            common,
            grid,
            cache,
            build,
        } => cmd_pdf(out, common, grid, cache, *build).map(|_| true),
        Command::Exact {
            collisions,
            v,
            t,
            grid,
            format,
        } => cmd_exact(out, *collisions, *v, *t, grid, *format).map(|_| true),
        Command::Simulate { common, c, n, seed } => {
            cmd_simulate(out, common, *c, *n, *seed).map(|_| true)
        }
        Command::Validate {
            suite,
            c,
            n,
            seed,
            format,
        } => {
            if !SUITES.contains(&suite.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "unknown suite {suite:?}; known: {}",
                    SUITES.join(", ")
                )));
            }
            cmd_validate(
                out,
                suite,
                &SuiteOptions {
                    c: *c,
                    n: *n,
                    seed: *seed,
                },
                *format,
            )
        }
        Command::Cache { action, cache } => cmd_cache(out, action, cache),
    }
}

/// Entry point of the `randflight` binary.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let result = execute(&cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Error::InvalidArgument(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e @ Error::MissingTable(_)) => {
            eprintln!("error: {e}; pass --build or run `randflight cache build`");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
