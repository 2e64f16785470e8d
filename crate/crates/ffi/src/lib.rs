//! C interface to `randflight`.
//!
//! Every function returns an [`RfStatus`]; results go through out-pointers.
//! On failure the message is kept per thread and read with
//! [`rf_last_error_message`]. Table sets are opaque handles released with
//! [`rf_tables_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use randflight::assembly::{c_max, gaussian_approx, rho_i, ro, TableSet};
use randflight::cache::CacheFile;
use randflight::coeffs::c_coeff;
use randflight::exact::{dilog, re_dilog, rho1_i, rho2_i};
use randflight::fourier::TruncationPolicy;
use randflight::montecarlo::{simulate_conditional, RngStream};
use randflight::{Error, PhysParams};

/// Outcome of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RfStatus {
    Ok = 0,
    InvalidArgument = 1,
    OutOfSupport = 2,
    Divergent = 3,
    MissingTable = 4,
    Truncation = 5,
    Cache = 6,
    Io = 7,
    NullPointer = 8,
    Panic = 9,
}

/// Conditional Fourier tables for c = 1, 2, ...
pub struct RfTableSet {
    inner: TableSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RfStatus {
    match e {
        Error::InvalidArgument(_)
        | Error::WidthOrder(_)
        | Error::OrderingViolation(_)
        | Error::DilogDomain(_)
        | Error::EmptySamples => RfStatus::InvalidArgument,
        Error::OutOfSupport { .. } => RfStatus::OutOfSupport,
        Error::Divergent(_) => RfStatus::Divergent,
        Error::MissingTable(_) => RfStatus::MissingTable,
        Error::SeriesDivergence { .. }
        | Error::NoPlateau { .. }
        | Error::PolicyTooSmall { .. }
        | Error::BreakpointStraddle { .. } => RfStatus::Truncation,
        Error::Cache(_) => RfStatus::Cache,
        Error::Io(_) => RfStatus::Io,
    }
}

fn guard<F: FnOnce() -> Result<(), Error>>(f: F) -> RfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RfStatus::Ok,
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("panic inside randflight".into());
            RfStatus::Panic
        }
    }
}

fn write<T>(out: *mut T, value: T) -> Result<(), Error> {
    if out.is_null() {
        return Err(Error::InvalidArgument("null output pointer".into()));
    }
    unsafe { out.write(value) };
    Ok(())
}

macro_rules! non_null {
    ($($p:expr),+) => {
        if $($p.is_null())||+ {
            set_error("null pointer argument".into());
            return RfStatus::NullPointer;
        }
    };
}

/// Copies the last error of this thread into `buf` (NUL-terminated, truncated
/// to `len`). Returns the full message length, 0 when there is none.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn rf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// C(c, m) as a double.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rf_c_coeff(c: u32, m: u32, out: *mut f64) -> RfStatus {
    non_null!(out);
    guard(|| write(out, c_coeff(c, m).to_f64()))
}

/// Number of collisions kept for rate-time product `lambda_t`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rf_c_max(lambda_t: f64, epsilon: f64, out: *mut u32) -> RfStatus {
    non_null!(out);
    guard(|| write(out, c_max(lambda_t, epsilon)?))
}

/// Li2(x) for x <= 1.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rf_dilog(x: f64, out: *mut f64) -> RfStatus {
    non_null!(out);
    guard(|| write(out, dilog(x)?))
}

/// Real part of Li2 on the whole real line.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rf_re_dilog(x: f64, out: *mut f64) -> RfStatus {
    non_null!(out);
    guard(|| write(out, re_dilog(x)))
}

/// Closed-form density of one (`collisions` = 1) or two collisions at radius r.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rf_exact_rho_i(
    collisions: u32,
    r: f64,
    t: f64,
    v: f64,
    out: *mut f64,
) -> RfStatus {
    non_null!(out);
    guard(|| {
        let value = match collisions {
            1 => rho1_i(r, t, v)?,
            2 => rho2_i(r, t, v)?,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "no closed form for {collisions} collisions"
                )))
            }
        };
        write(out, value)
    })
}

/// Builds tables for c = 1..=c_top with truncation tolerance `epsilon`.
///
/// # Safety
/// `out` must be valid for writing; the handle is released with `rf_tables_free`.
#[no_mangle]
pub unsafe extern "C" fn rf_tables_build(
    c_top: u32,
    epsilon: f64,
    out: *mut *mut RfTableSet,
) -> RfStatus {
    non_null!(out);
    guard(|| {
        let policy = TruncationPolicy::automatic(epsilon);
        policy.validate()?;
        let inner = TableSet::build(c_top, policy)?;
        write(out, Box::into_raw(Box::new(RfTableSet { inner })))
    })
}

/// Loads cached tables for c = 1..=c_top from the cache directory `dir`.
/// Missing counts are left out; evaluation then reports `MissingTable`.
///
/// # Safety
/// `dir` must be a NUL-terminated UTF-8 path, `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rf_tables_load(
    dir: *const c_char,
    c_top: u32,
    epsilon: f64,
    out: *mut *mut RfTableSet,
) -> RfStatus {
    non_null!(dir, out);
    guard(|| {
        let dir = CStr::from_ptr(dir)
            .to_str()
            .map_err(|_| Error::InvalidArgument("path is not UTF-8".into()))?;
        let policy = TruncationPolicy::automatic(epsilon);
        policy.validate()?;
        let inner = CacheFile::load(Path::new(dir))?.table_set(&policy, c_top)?;
        write(out, Box::into_raw(Box::new(RfTableSet { inner })))
    })
}

/// Number of tables held.
///
/// # Safety
/// `set` must come from `rf_tables_build` or `rf_tables_load`.
#[no_mangle]
pub unsafe extern "C" fn rf_tables_len(set: *const RfTableSet, out: *mut usize) -> RfStatus {
    non_null!(set, out);
    guard(|| write(out, (*set).inner.len()))
}

/// Releases a table set; null is ignored.
///
/// # Safety
/// `set` must be null or an unreleased handle.
#[no_mangle]
pub unsafe extern "C" fn rf_tables_free(set: *mut RfTableSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Normalized continuous density rho_I(r, t).
///
/// # Safety
/// `set` must be a live handle, `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rf_rho_i(
    set: *const RfTableSet,
    r: f64,
    t: f64,
    v: f64,
    lambda: f64,
    out: *mut f64,
) -> RfStatus {
    non_null!(set, out);
    guard(|| {
        write(
            out,
            rho_i(r, t, &PhysParams::new(v, lambda)?, &(*set).inner)?,
        )
    })
}

/// Production density (1 - e^{-lt}) rho_I with the large-lt Gaussian blend.
///
/// # Safety
/// `set` must be a live handle, `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rf_ro(
    set: *const RfTableSet,
    r: f64,
    t: f64,
    v: f64,
    lambda: f64,
    out: *mut f64,
) -> RfStatus {
    non_null!(set, out);
    guard(|| write(out, ro(r, t, &PhysParams::new(v, lambda)?, &(*set).inner)?))
}

/// Large-lt Gaussian limit, with mass 1 - e^{-lt}.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rf_gaussian_approx(
    r: f64,
    t: f64,
    v: f64,
    lambda: f64,
    out: *mut f64,
) -> RfStatus {
    non_null!(out);
    guard(|| write(out, gaussian_approx(r, t, &PhysParams::new(v, lambda)?)))
}

/// Final radii of `n` flights with exactly `c` collisions, written to `radii`.
///
/// # Safety
/// `radii` must be valid for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn rf_simulate_conditional(
    c: u32,
    t: f64,
    v: f64,
    seed: u64,
    stream: u64,
    n: usize,
    radii: *mut f64,
) -> RfStatus {
    non_null!(radii);
    guard(|| {
        if !(t > 0.0 && v > 0.0) {
            return Err(Error::InvalidArgument("need t > 0 and v > 0".into()));
        }
        let samples = simulate_conditional(n, c, t, v, &RngStream::new(seed, stream));
        let out = std::slice::from_raw_parts_mut(radii, n);
        for (o, s) in out.iter_mut().zip(samples) {
            *o = s.radius;
        }
        Ok(())
    })
}
