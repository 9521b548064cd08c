//! C interface to the searchload optimizer.
//!
//! Problems and results are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every fallible call returns an
//! [`SlStatus`]; on failure a message is available from
//! [`sl_last_error_message`] until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use searchload::config::{preset, ScenarioConfig};
use searchload::solver::{optimize, OptimizationResult, Phase, Problem, SolverOptions};
use searchload::{DetectionContext, Error, SwerlingCase};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Infeasible = 4,
    NoConvergence = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// Opaque problem handle.
pub struct SlProblem {
    problem: Problem,
    options: SolverOptions,
}

/// Opaque result handle.
pub struct SlResult {
    result: OptimizationResult,
}

/// Optimum in dimensionless form. `phase` is 0, 1 or 2 for the 0->1, 1->2
/// and 2->3 regimes.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SlOptimum {
    pub r_theta: f64,
    pub eps: f64,
    pub r_d: f64,
    pub r_f: f64,
    pub r_s: f64,
    pub l_s: f64,
    pub l_tilde: f64,
    pub eta: f64,
    pub s0: f64,
    pub phase: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SlCurvePoint {
    pub r_s: f64,
    pub r_theta: f64,
    pub eps: f64,
    pub r_d: f64,
    pub l_tilde: f64,
    /// NaN where the cumulative requirement cannot be met.
    pub r_f: f64,
    pub l_s: f64,
    pub feasible: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: SlStatus, msg: impl Into<String>) -> SlStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> SlStatus {
    let status = match e {
        Error::Domain(_) => SlStatus::InvalidArgument,
        Error::Config(_) => SlStatus::Config,
        Error::Infeasible { .. } => SlStatus::Infeasible,
        Error::NoConvergence { .. } => SlStatus::NoConvergence,
    };
    fail(status, e.to_string())
}

fn guard<F: FnOnce() -> SlStatus>(f: F) -> SlStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(SlStatus::Panic, "internal panic"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, SlStatus> {
    if s.is_null() {
        return Err(fail(SlStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(SlStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn new_problem(cfg: ScenarioConfig, out: *mut *mut SlProblem) -> SlStatus {
    let built = cfg.problem().and_then(|problem| Ok((problem, cfg.solver_options()?)));
    match built {
        Ok((problem, options)) => {
            let handle = Box::new(SlProblem { problem, options });
            // SAFETY: checked non-null by the callers.
            unsafe { *out = Box::into_raw(handle) };
            SlStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Builds a problem from a shipped preset name such as `q1_swerling2`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_problem_from_preset(name: *const c_char, out: *mut *mut SlProblem) -> SlStatus {
    guard(|| {
        if out.is_null() {
            return fail(SlStatus::NullPointer, "out is NULL");
        }
        let name = match read_str(name, "name") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match preset(name) {
            Ok(cfg) => new_problem(cfg, out),
            Err(e) => from_error(e),
        }
    })
}

/// Builds a problem from the text of a flat TOML scenario file.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_problem_from_toml(text: *const c_char, out: *mut *mut SlProblem) -> SlStatus {
    guard(|| {
        if out.is_null() {
            return fail(SlStatus::NullPointer, "out is NULL");
        }
        let text = match read_str(text, "text") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match ScenarioConfig::from_toml_str(text) {
            Ok(cfg) => new_problem(cfg, out),
            Err(e) => from_error(e),
        }
    })
}

/// Overrides the `r_S` sampling step.
///
/// # Safety
/// `problem` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_problem_set_grid_step(problem: *mut SlProblem, step: f64) -> SlStatus {
    guard(|| {
        let Some(p) = problem.as_mut() else {
            return fail(SlStatus::NullPointer, "problem is NULL");
        };
        if !(step > 0.0 && step.is_finite()) {
            return fail(SlStatus::InvalidArgument, format!("grid step must be positive, got {step}"));
        }
        p.options.grid_step = step;
        SlStatus::Ok
    })
}

/// # Safety
/// `problem` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sl_problem_free(problem: *mut SlProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Solves the problem. On success `*out` receives a result handle.
///
/// # Safety
/// `problem` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_optimize(problem: *const SlProblem, out: *mut *mut SlResult) -> SlStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else {
            return fail(SlStatus::NullPointer, "problem is NULL");
        };
        if out.is_null() {
            return fail(SlStatus::NullPointer, "out is NULL");
        }
        match optimize(&p.problem, &p.options) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(SlResult { result }));
                SlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_result_optimum(result: *const SlResult, out: *mut SlOptimum) -> SlStatus {
    guard(|| {
        let (Some(r), Some(out)) = (result.as_ref(), out.as_mut()) else {
            return fail(SlStatus::NullPointer, "result or out is NULL");
        };
        let r = &r.result;
        *out = SlOptimum {
            r_theta: r.params.r_theta,
            eps: r.params.eps,
            r_d: r.params.r_d,
            r_f: r.params.r_f,
            r_s: r.r_s_star,
            l_s: r.l_s_star,
            l_tilde: r.l_tilde_star,
            eta: r.eta,
            s0: r.s0,
            phase: match r.phase {
                Phase::Phase01 => 0,
                Phase::Phase12 => 1,
                Phase::Phase23 => 2,
            },
        };
        SlStatus::Ok
    })
}

/// Number of `r_S` samples in the result curves; 0 for a NULL handle.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_result_curve_len(result: *const SlResult) -> usize {
    result.as_ref().map_or(0, |r| r.result.curves.len())
}

/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_result_curve_point(
    result: *const SlResult,
    index: usize,
    out: *mut SlCurvePoint,
) -> SlStatus {
    guard(|| {
        let (Some(r), Some(out)) = (result.as_ref(), out.as_mut()) else {
            return fail(SlStatus::NullPointer, "result or out is NULL");
        };
        let Some(c) = r.result.curves.get(index) else {
            return fail(SlStatus::OutOfRange, format!("curve index {index} out of range"));
        };
        *out = SlCurvePoint {
            r_s: c.r_s,
            r_theta: c.beam.r_theta,
            eps: c.beam.eps,
            r_d: c.beam.r_d,
            l_tilde: c.beam.l_tilde,
            r_f: c.r_f,
            l_s: c.l_s,
            feasible: c.feasible,
        };
        SlStatus::Ok
    })
}

/// # Safety
/// `result` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sl_result_free(result: *mut SlResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Single-look detection probability. `swerling` is 1 to 4.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_detection_probability(
    snr: f64,
    p_fa: f64,
    n_cpi: u32,
    swerling: u32,
    out: *mut f64,
) -> SlStatus {
    guard(|| {
        let Some(out) = out.as_mut() else {
            return fail(SlStatus::NullPointer, "out is NULL");
        };
        let case = match swerling {
            1 => SwerlingCase::I,
            2 => SwerlingCase::II,
            3 => SwerlingCase::III,
            4 => SwerlingCase::IV,
            other => return fail(SlStatus::InvalidArgument, format!("Swerling case must be 1-4, got {other}")),
        };
        match DetectionContext::new(p_fa, n_cpi, case).and_then(|ctx| searchload::pd(snr, &ctx)) {
            Ok(v) => {
                *out = v;
                SlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
