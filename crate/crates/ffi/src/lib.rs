//! C ABI over `dcmwalk`.
//!
//! Objects are opaque handles written through an out-pointer by the
//! constructors (`dcm_distribution_*`, `dcm_graph_*`, `dcm_stationary`) and
//! released with the matching `*_free`. Every fallible call returns a
//! [`DcmStatus`]; on failure `dcm_last_error` describes the cause.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dcmwalk::degree::{realize_sequence, toy_distribution, BiDegreeDistribution};
use dcmwalk::experiment::run_params;
use dcmwalk::graph::{sample_dcm, Multigraph};
use dcmwalk::rate::{rout_exponent, ExtReal};
use dcmwalk::walk::{stationary_with, StationaryOptions, StationaryResult};
use dcmwalk::Error;

/// Result codes. Numeric values 2, 3 and 4 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcmStatus {
    Ok = 0,
    Io = 1,
    Validation = 2,
    Numerical = 3,
    Capacity = 4,
    NullPointer = 5,
    Panic = 6,
}

pub struct DcmDistribution(BiDegreeDistribution);

pub struct DcmGraph(Multigraph);

pub struct DcmStationary(StationaryResult);

/// Scalars of the parameter report. Absent values are NaN; +∞ is INFINITY.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DcmParams {
    pub lambda: f64,
    pub nu: f64,
    pub s_minus: f64,
    pub nu_hat: f64,
    pub h_hat: f64,
    pub h_plus: f64,
    pub a0: f64,
    pub phi_a0: f64,
    pub exponent: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DcmStationarySummary {
    pub pi_min: f64,
    pub pi_max: f64,
    pub residual: f64,
    pub support_size: usize,
    pub exponent_observed: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> DcmStatus {
    match e.exit_code() {
        2 => DcmStatus::Validation,
        3 => DcmStatus::Numerical,
        4 => DcmStatus::Capacity,
        _ => DcmStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), DcmStatus>) -> DcmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DcmStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            DcmStatus::Panic
        }
    }
}

fn fail(e: Error) -> DcmStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null() -> DcmStatus {
    set_error("null pointer argument".into());
    DcmStatus::NullPointer
}

fn ext(v: ExtReal) -> f64 {
    match v {
        ExtReal::Finite(x) => x,
        ExtReal::PosInf => f64::INFINITY,
    }
}

/// Message for the last failed call on this thread. Valid until the next call
/// into this library from the same thread.
#[no_mangle]
pub extern "C" fn dcm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a distribution from a NUL-terminated `{"pmf": [...]}` JSON string.
///
/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcm_distribution_from_json(json: *const c_char, out: *mut *mut DcmDistribution) -> DcmStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| fail(Error::Argument("json is not UTF-8".into())))?;
        let d = BiDegreeDistribution::from_json_str(text).map_err(fail)?;
        *out = Box::into_raw(Box::new(DcmDistribution(d)));
        Ok(())
    })
}

/// The four-atom example law with in-degrees {0, 5} and out-degrees {2, 3}.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcm_distribution_toy(out: *mut *mut DcmDistribution) -> DcmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = Box::into_raw(Box::new(DcmDistribution(toy_distribution())));
        Ok(())
    })
}

/// # Safety
/// `d` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dcm_distribution_free(d: *mut DcmDistribution) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dcm_params(d: *const DcmDistribution, out: *mut DcmParams) -> DcmStatus {
    guard(|| {
        let (Some(d), false) = (d.as_ref(), out.is_null()) else {
            return Err(null());
        };
        let r = run_params(&d.0, 0).map_err(fail)?;
        *out = DcmParams {
            lambda: r.lambda,
            nu: r.nu,
            s_minus: r.s_minus,
            nu_hat: r.nu_hat,
            h_hat: r.h_hat.unwrap_or(f64::NAN),
            h_plus: r.h_plus.unwrap_or(f64::NAN),
            a0: r.a0.unwrap_or(f64::NAN),
            phi_a0: ext(r.phi_a0),
            exponent: r.exponent,
        };
        Ok(())
    })
}

/// Predicted exponent for the r-out digraph.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dcm_rout_exponent(r: u32, out: *mut f64) -> DcmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = rout_exponent(r).map_err(fail)?;
        Ok(())
    })
}

/// Realizes `d` at size `n` and samples a configuration with `seed`.
///
/// # Safety
/// `d` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dcm_graph_sample(
    d: *const DcmDistribution,
    n: usize,
    seed: u64,
    out: *mut *mut DcmGraph,
) -> DcmStatus {
    guard(|| {
        let (Some(d), false) = (d.as_ref(), out.is_null()) else {
            return Err(null());
        };
        let seq = realize_sequence(&d.0, n).map_err(fail)?;
        let g = sample_dcm(&seq, seed).map_err(fail)?;
        *out = Box::into_raw(Box::new(DcmGraph(g)));
        Ok(())
    })
}

/// Builds a graph on `n` vertices from `len` edges `src[i] -> dst[i]`.
///
/// # Safety
/// `src` and `dst` must point to `len` values each; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dcm_graph_from_edges(
    n: usize,
    src: *const u32,
    dst: *const u32,
    len: usize,
    out: *mut *mut DcmGraph,
) -> DcmStatus {
    guard(|| {
        if out.is_null() || (len > 0 && (src.is_null() || dst.is_null())) {
            return Err(null());
        }
        let (s, t) = if len == 0 {
            (&[][..], &[][..])
        } else {
            (std::slice::from_raw_parts(src, len), std::slice::from_raw_parts(dst, len))
        };
        let edges: Vec<(u32, u32)> = s.iter().copied().zip(t.iter().copied()).collect();
        let g = Multigraph::from_edges(n, &edges).map_err(fail)?;
        *out = Box::into_raw(Box::new(DcmGraph(g)));
        Ok(())
    })
}

/// Vertex count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn dcm_graph_n(g: *const DcmGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// Edge count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn dcm_graph_m(g: *const DcmGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.m())
}

/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dcm_graph_free(g: *mut DcmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Stationary distribution by lazy power iteration to tolerance `tol`.
///
/// # Safety
/// `g` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dcm_stationary(g: *const DcmGraph, tol: f64, out: *mut *mut DcmStationary) -> DcmStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            return Err(null());
        };
        let opts = StationaryOptions { tol, ..Default::default() };
        let r = stationary_with(&g.0, &opts).map_err(fail)?;
        *out = Box::into_raw(Box::new(DcmStationary(r)));
        Ok(())
    })
}

/// # Safety
/// `s` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dcm_stationary_summary(s: *const DcmStationary, out: *mut DcmStationarySummary) -> DcmStatus {
    guard(|| {
        let (Some(s), false) = (s.as_ref(), out.is_null()) else {
            return Err(null());
        };
        let r = &s.0;
        *out = DcmStationarySummary {
            pi_min: r.pi_min,
            pi_max: r.pi_max,
            residual: r.residual,
            support_size: r.support.len(),
            exponent_observed: r.exponent_observed(),
        };
        Ok(())
    })
}

/// Copies π into `buf`, which must hold `len` ≥ n values.
///
/// # Safety
/// `s` must be valid and `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dcm_stationary_pi(s: *const DcmStationary, buf: *mut f64, len: usize) -> DcmStatus {
    guard(|| {
        let (Some(s), false) = (s.as_ref(), buf.is_null()) else {
            return Err(null());
        };
        let pi = &s.0.pi;
        if len < pi.len() {
            return Err(fail(Error::Capacity(format!("buffer holds {len} values, need {}", pi.len()))));
        }
        ptr::copy_nonoverlapping(pi.as_ptr(), buf, pi.len());
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dcm_stationary_free(s: *mut DcmStationary) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
