//! C ABI over the jamdof library.
//!
//! Every function returns a [`JamdofStatus`]; results go through out
//! pointers. Handles are opaque and must be released with the matching
//! `_free` function. On failure the message is available from
//! [`jamdof_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jamdof::estimator::estimate;
use jamdof::region::{dof_mat, region_for, region_mat, sum_dof_dd_k, sum_dof_dp_k};
use jamdof::scheme::SchemeParams;
use jamdof::{Config, DofRegion, Error, JammerDistribution};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JamdofStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    InvalidDistribution = 4,
    UnsupportedDimension = 5,
    DegenerateMarginal = 6,
    NotSymmetric = 7,
    Numeric = 8,
    Starved = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

impl From<&Error> for JamdofStatus {
    fn from(e: &Error) -> Self {
        match e.root() {
            Error::InvalidArgument(_) => JamdofStatus::InvalidArgument,
            Error::InvalidDistribution(_) => JamdofStatus::InvalidDistribution,
            Error::UnsupportedDimension { .. } => JamdofStatus::UnsupportedDimension,
            Error::DegenerateMarginal { .. } => JamdofStatus::DegenerateMarginal,
            Error::NotSymmetric => JamdofStatus::NotSymmetric,
            Error::Numeric(_) => JamdofStatus::Numeric,
            Error::Starved { .. } => JamdofStatus::Starved,
            Error::Trial { .. } => unreachable!("root strips trial wrappers"),
        }
    }
}

/// Opaque jammer distribution.
pub struct JamdofDist(JammerDistribution);

/// Opaque DoF region.
pub struct JamdofRegion(DofRegion);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

struct Fail(JamdofStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(JamdofStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(JamdofStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> JamdofStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            JamdofStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            JamdofStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(JamdofStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn dist_ref<'a>(p: *const JamdofDist) -> Result<&'a JammerDistribution, Fail> {
    p.as_ref().map(|d| &d.0).ok_or_else(|| null("dist"))
}

unsafe fn region_ref<'a>(p: *const JamdofRegion) -> Result<&'a DofRegion, Fail> {
    p.as_ref().map(|r| &r.0).ok_or_else(|| null("region"))
}

unsafe fn config_arg(p: *const c_char) -> Result<Config, Fail> {
    Ok(str_arg(p, "config")?.parse::<Config>()?)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn jamdof_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn jamdof_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses the text form, e.g. `"00:0.3,01:0.3,10:0.3,11:0.1"`.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jamdof_dist_parse(text: *const c_char, out: *mut *mut JamdofDist) -> JamdofStatus {
    guard(|| {
        let d: JammerDistribution = str_arg(text, "text")?.parse()?;
        write(out, Box::into_raw(Box::new(JamdofDist(d))), "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jamdof_dist_two_user(
    l00: f64,
    l01: f64,
    l10: f64,
    l11: f64,
    out: *mut *mut JamdofDist,
) -> JamdofStatus {
    guard(|| {
        let d = JammerDistribution::two_user(l00, l01, l10, l11)?;
        write(out, Box::into_raw(Box::new(JamdofDist(d))), "out")
    })
}

/// Symmetric distribution from `k + 1` class probabilities.
///
/// # Safety
/// `eta` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jamdof_dist_symmetric(
    k: usize,
    eta: *const f64,
    len: usize,
    out: *mut *mut JamdofDist,
) -> JamdofStatus {
    guard(|| {
        let d = JammerDistribution::symmetric(k, slice_arg(eta, len, "eta")?.to_vec())?;
        write(out, Box::into_raw(Box::new(JamdofDist(d))), "out")
    })
}

/// # Safety
/// `dist` must come from a `jamdof_dist_*` constructor or be NULL.
#[no_mangle]
pub unsafe extern "C" fn jamdof_dist_free(dist: *mut JamdofDist) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jamdof_dist_num_receivers(dist: *const JamdofDist, out: *mut usize) -> JamdofStatus {
    guard(|| write(out, dist_ref(dist)?.num_receivers(), "out"))
}

/// Probability that `receiver` (0-based) is unjammed.
///
/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jamdof_dist_marginal(dist: *const JamdofDist, receiver: usize, out: *mut f64) -> JamdofStatus {
    guard(|| write(out, dist_ref(dist)?.marginal(receiver)?, "out"))
}

/// Region for a two-user configuration name such as `"DD"`.
///
/// # Safety
/// `config` must be NUL-terminated, `dist` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn jamdof_region_new(
    config: *const c_char,
    dist: *const JamdofDist,
    out: *mut *mut JamdofRegion,
) -> JamdofStatus {
    guard(|| {
        let r = region_for(config_arg(config)?, dist_ref(dist)?)?;
        write(out, Box::into_raw(Box::new(JamdofRegion(r))), "out")
    })
}

/// Region achieved with delayed CSIT and no jamming, `k` users.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jamdof_region_mat(k: usize, out: *mut *mut JamdofRegion) -> JamdofStatus {
    guard(|| {
        let r = region_mat(k)?;
        write(out, Box::into_raw(Box::new(JamdofRegion(r))), "out")
    })
}

/// # Safety
/// `region` must come from a `jamdof_region_*` constructor or be NULL.
#[no_mangle]
pub unsafe extern "C" fn jamdof_region_free(region: *mut JamdofRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}

/// # Safety
/// `region` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jamdof_region_dim(region: *const JamdofRegion, out: *mut usize) -> JamdofStatus {
    guard(|| write(out, region_ref(region)?.dim(), "out"))
}

/// # Safety
/// `point` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jamdof_region_contains(
    region: *const JamdofRegion,
    point: *const f64,
    len: usize,
    out: *mut bool,
) -> JamdofStatus {
    guard(|| {
        let inside = region_ref(region)?.contains(slice_arg(point, len, "point")?)?;
        write(out, inside, "out")
    })
}

/// # Safety
/// `region` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jamdof_region_max_sum(region: *const JamdofRegion, out: *mut f64) -> JamdofStatus {
    guard(|| write(out, region_ref(region)?.max_sum()?, "out"))
}

/// Writes the vertices of a 2-D region as `x0, y0, x1, y1, ...` in
/// counter-clockwise order starting at the origin. `count` receives
/// the number of vertices even when `capacity` (in vertices) is too small.
///
/// # Safety
/// `xy` must hold `2 * capacity` doubles; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jamdof_region_vertices(
    region: *const JamdofRegion,
    xy: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> JamdofStatus {
    guard(|| {
        let verts = region_ref(region)?.vertices_2d()?;
        write(count, verts.len(), "count")?;
        if verts.len() > capacity {
            return Err(Fail(
                JamdofStatus::BufferTooSmall,
                format!("{} vertices, capacity {capacity}", verts.len()),
            ));
        }
        if xy.is_null() {
            return Err(null("xy"));
        }
        for (i, v) in verts.iter().enumerate() {
            xy.add(2 * i).write(v[0]);
            xy.add(2 * i + 1).write(v[1]);
        }
        Ok(())
    })
}

/// Sum-DoF with delayed CSIT and no jamming, `k` users.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jamdof_dof_mat(k: usize, out: *mut f64) -> JamdofStatus {
    guard(|| write(out, dof_mat(k)?, "out"))
}

/// Optimal sum-DoF for any configuration, including `"DP-K"` and `"DD-K"`.
///
/// # Safety
/// `config` must be NUL-terminated, `dist` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn jamdof_sum_dof(config: *const c_char, dist: *const JamdofDist, out: *mut f64) -> JamdofStatus {
    guard(|| {
        let d = dist_ref(dist)?;
        let value = match config_arg(config)? {
            Config::DpK => sum_dof_dp_k(d)?,
            Config::DdK => sum_dof_dd_k(d)?,
            c => region_for(c, d)?.max_sum()?,
        };
        write(out, value, "out")
    })
}

/// Monte-Carlo DoF estimate. With `budgets_len > 0` every receiver gets
/// its symbol budget; otherwise the scheme runs for `n` slots.
/// `mean` and `stderr` each receive `out_len` doubles, which must equal
/// the number of receivers.
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn jamdof_estimate(
    config: *const c_char,
    dist: *const JamdofDist,
    budgets: *const u64,
    budgets_len: usize,
    n: u64,
    trials: usize,
    seed: u64,
    mean: *mut f64,
    stderr: *mut f64,
    out_len: usize,
) -> JamdofStatus {
    guard(|| {
        let config = config_arg(config)?;
        let d = dist_ref(dist)?;
        let params = if budgets_len > 0 {
            SchemeParams::with_budgets(slice_arg(budgets, budgets_len, "budgets")?.to_vec())
        } else {
            SchemeParams::with_n(n)
        };
        if out_len != d.num_receivers() {
            return Err(Fail(
                JamdofStatus::BufferTooSmall,
                format!("output length {out_len}, expected {}", d.num_receivers()),
            ));
        }
        if mean.is_null() {
            return Err(null("mean"));
        }
        if stderr.is_null() {
            return Err(null("stderr"));
        }
        let emp = estimate(config, d, &params, trials, seed)?;
        ptr::copy_nonoverlapping(emp.mean.as_ptr(), mean, out_len);
        ptr::copy_nonoverlapping(emp.stderr.as_ptr(), stderr, out_len);
        Ok(())
    })
}
