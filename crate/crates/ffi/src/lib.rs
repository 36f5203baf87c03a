//! C ABI for the macsig library.
//!
//! Model parameters live behind an opaque handle created by
//! [`macsig_params_new`] and released by [`macsig_params_free`]. Every
//! fallible entry point returns a [`MacsigStatus`]; when a call fails, a
//! thread-local detail message is available from
//! [`macsig_last_error_message`] until the next failure on the same
//! thread. All entry points catch panics and report them as
//! [`MacsigStatus::Panic`] instead of unwinding across the boundary.
//!
//! The generated header is written to `include/macsig.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use macsig::{
    error_probability, find_boundaries, high_snr_limit, optimal_allocation, p2_tilde, simulate,
    Case, Error, ModelParams, Policy, Scheme, SimConfig,
};

/// Opaque handle to a validated parameter set.
pub struct MacsigParams(ModelParams);

/// Outcome category of an FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacsigStatus {
    Ok = 0,
    /// A parameter violated its domain constraint.
    DomainError = 1,
    /// The operation is only defined in a different prior/noise case.
    CaseError = 2,
    /// Root isolation failed to produce a structurally valid root set.
    ConvergenceError = 3,
    /// A requested amplitude exceeds the sensor's power cap.
    CapError = 4,
    /// The scheme does not support the requested operation.
    SchemeError = 5,
    /// An output stream could not be read or written.
    IoError = 6,
    /// A required pointer argument was null.
    NullPointer = 7,
    /// The library panicked; treat the handle as poisoned.
    Panic = 8,
}

/// Which of the three prior/noise regimes the parameters fall in.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacsigCase {
    I = 1,
    II = 2,
    III = 3,
}

/// Amplitude selection rule for noise sweeps and limits.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacsigPolicy {
    /// The cap-constrained optimal allocation.
    Optimal = 0,
    /// Both sensors at full cap power.
    BothMax = 1,
    /// Sensor 1 at full cap power, sensor 2 silent.
    Sensor1Only = 2,
    /// Sensor 2 at full cap power, sensor 1 silent.
    Sensor2Only = 3,
}

/// Signaling schemes available to the Monte Carlo simulator.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacsigScheme {
    /// Skewed pairs on the shared channel at a chosen allocation.
    MacOptimalAsym = 0,
    /// Symmetric pairs at full cap power on the shared channel.
    MacSymmetricMax = 1,
    /// Symmetric BPSK at full cap power, one channel per sensor.
    OrthSymmetricBpsk = 2,
    /// Skewed pairs at full cap power, one channel per sensor.
    OrthAsymmetricBpsk = 3,
}

/// Prior classification against the two case thresholds.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MacsigClassification {
    pub case_: MacsigCase,
    pub lower_threshold: f64,
    pub upper_threshold: f64,
}

/// Cap-constrained optimal design and the error probability it achieves.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MacsigAllocation {
    pub case_: MacsigCase,
    /// Optimal amplitude scales; mean transmit powers are their squares.
    pub p1_star: f64,
    pub p2_star: f64,
    pub pe_star: f64,
    /// True when the power cap, rather than an interior optimum, sets
    /// `p2_star`.
    pub p2_capped: bool,
}

/// Empirical error rate with a binomial confidence interval.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MacsigSimReport {
    pub errors: u64,
    pub trials: u64,
    /// `errors / trials`.
    pub pe_hat: f64,
    /// 95% half-width under the normal approximation.
    pub ci95_halfwidth: f64,
    pub seed: u64,
    /// False when either error count is too small for the normal
    /// approximation.
    pub ci_reliable: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: MacsigStatus, detail: &str) -> MacsigStatus {
    let detail = CString::new(detail).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = detail);
    status
}

fn fail_with(err: &Error) -> MacsigStatus {
    let status = match err {
        Error::Domain(_) => MacsigStatus::DomainError,
        Error::Case { .. } => MacsigStatus::CaseError,
        Error::Convergence(_) => MacsigStatus::ConvergenceError,
        Error::Cap { .. } => MacsigStatus::CapError,
        Error::Scheme(_) => MacsigStatus::SchemeError,
        Error::Io(_) => MacsigStatus::IoError,
    };
    fail(status, &err.to_string())
}

/// Runs `body` with panics converted to [`MacsigStatus::Panic`].
fn guarded(body: impl FnOnce() -> MacsigStatus) -> MacsigStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(MacsigStatus::Panic, "internal panic"),
    }
}

fn case_out(case: Case) -> MacsigCase {
    match case {
        Case::I => MacsigCase::I,
        Case::II => MacsigCase::II,
        Case::III => MacsigCase::III,
    }
}

/// Detail message for the most recent failing call on this thread.
///
/// The pointer stays valid until the next failing call on the same
/// thread. Never returns null; before any failure it points at an empty
/// string.
#[no_mangle]
pub extern "C" fn macsig_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Static name of a status code, e.g. `"domain error"`.
#[no_mangle]
pub extern "C" fn macsig_status_name(status: MacsigStatus) -> *const c_char {
    let name: &[u8] = match status {
        MacsigStatus::Ok => b"ok\0",
        MacsigStatus::DomainError => b"domain error\0",
        MacsigStatus::CaseError => b"case error\0",
        MacsigStatus::ConvergenceError => b"convergence error\0",
        MacsigStatus::CapError => b"cap error\0",
        MacsigStatus::SchemeError => b"scheme error\0",
        MacsigStatus::IoError => b"io error\0",
        MacsigStatus::NullPointer => b"null pointer\0",
        MacsigStatus::Panic => b"panic\0",
    };
    name.as_ptr() as *const c_char
}

/// Validates a parameter set and writes a heap-allocated handle to
/// `out`. On any failure `out` is left untouched.
///
/// # Safety
/// `out` must be a valid pointer. The handle must be released with
/// [`macsig_params_free`] exactly once.
#[no_mangle]
pub unsafe extern "C" fn macsig_params_new(
    p1: f64,
    eps1: f64,
    eps2: f64,
    n0: f64,
    p1max: f64,
    p2max: f64,
    out: *mut *mut MacsigParams,
) -> MacsigStatus {
    if out.is_null() {
        return fail(MacsigStatus::NullPointer, "out is null");
    }
    guarded(|| match ModelParams::new(p1, eps1, eps2, n0, p1max, p2max) {
        Ok(params) => {
            *out = Box::into_raw(Box::new(MacsigParams(params)));
            MacsigStatus::Ok
        }
        Err(e) => fail_with(&e),
    })
}

/// Releases a handle from [`macsig_params_new`]. Null is a no-op.
///
/// # Safety
/// `params` must be null or a handle not yet freed; the handle must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn macsig_params_free(params: *mut MacsigParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

unsafe fn borrow<'a>(params: *const MacsigParams) -> Option<&'a ModelParams> {
    params.as_ref().map(|p| &p.0)
}

/// Classifies the prior against the two case thresholds.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn macsig_classify(
    params: *const MacsigParams,
    out: *mut MacsigClassification,
) -> MacsigStatus {
    let Some(p) = borrow(params) else {
        return fail(MacsigStatus::NullPointer, "params is null");
    };
    if out.is_null() {
        return fail(MacsigStatus::NullPointer, "out is null");
    }
    guarded(|| {
        let c = p.classify();
        *out = MacsigClassification {
            case_: case_out(c.case),
            lower_threshold: c.lower_threshold,
            upper_threshold: c.upper_threshold,
        };
        MacsigStatus::Ok
    })
}

/// Writes the interior-optimal sensor 2 amplitude for sensor 1 amplitude
/// `pa1`. Only defined in Case III.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn macsig_p2_tilde(
    params: *const MacsigParams,
    pa1: f64,
    out: *mut f64,
) -> MacsigStatus {
    let Some(p) = borrow(params) else {
        return fail(MacsigStatus::NullPointer, "params is null");
    };
    if out.is_null() {
        return fail(MacsigStatus::NullPointer, "out is null");
    }
    guarded(|| match p2_tilde(p, pa1) {
        Ok(v) => {
            *out = v;
            MacsigStatus::Ok
        }
        Err(e) => fail_with(&e),
    })
}

/// Writes the cap-constrained optimal allocation and its exact error
/// probability.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn macsig_optimal_allocation(
    params: *const MacsigParams,
    out: *mut MacsigAllocation,
) -> MacsigStatus {
    let Some(p) = borrow(params) else {
        return fail(MacsigStatus::NullPointer, "params is null");
    };
    if out.is_null() {
        return fail(MacsigStatus::NullPointer, "out is null");
    }
    guarded(|| match optimal_allocation(p) {
        Ok(a) => {
            *out = MacsigAllocation {
                case_: case_out(a.case),
                p1_star: a.p1_star,
                p2_star: a.p2_star,
                pe_star: a.pe_star,
                p2_capped: a.p2_capped,
            };
            MacsigStatus::Ok
        }
        Err(e) => fail_with(&e),
    })
}

/// Writes the exact detection error probability at amplitudes
/// `(pa1, pa2)`.
///
/// # Safety
/// `params` must be a live handle and `out_pe` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn macsig_error_probability(
    params: *const MacsigParams,
    pa1: f64,
    pa2: f64,
    out_pe: *mut f64,
) -> MacsigStatus {
    let Some(p) = borrow(params) else {
        return fail(MacsigStatus::NullPointer, "params is null");
    };
    if out_pe.is_null() {
        return fail(MacsigStatus::NullPointer, "out_pe is null");
    }
    guarded(|| match error_probability(p, pa1, pa2) {
        Ok(b) => {
            *out_pe = b.pe;
            MacsigStatus::Ok
        }
        Err(e) => fail_with(&e),
    })
}

/// Writes the decision boundary points, ascending, into `out_roots`
/// (capacity for 3 values) and their count into `out_count`.
///
/// # Safety
/// `params` must be a live handle, `out_roots` must point at at least 3
/// writable doubles, and `out_count` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn macsig_boundaries(
    params: *const MacsigParams,
    pa1: f64,
    pa2: f64,
    out_roots: *mut f64,
    out_count: *mut usize,
) -> MacsigStatus {
    let Some(p) = borrow(params) else {
        return fail(MacsigStatus::NullPointer, "params is null");
    };
    if out_roots.is_null() || out_count.is_null() {
        return fail(MacsigStatus::NullPointer, "out_roots or out_count is null");
    }
    guarded(|| match find_boundaries(p, pa1, pa2) {
        Ok(set) => {
            let roots = set.roots();
            for (i, &r) in roots.iter().enumerate() {
                *out_roots.add(i) = r;
            }
            *out_count = roots.len();
            MacsigStatus::Ok
        }
        Err(e) => fail_with(&e),
    })
}

/// Noise-free limit of the error probability under `policy`. Returns NaN
/// if `params` is null.
///
/// # Safety
/// `params` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn macsig_high_snr_limit(
    params: *const MacsigParams,
    policy: MacsigPolicy,
) -> f64 {
    let Some(p) = borrow(params) else {
        return f64::NAN;
    };
    let policy = match policy {
        MacsigPolicy::Optimal => Policy::Optimal,
        MacsigPolicy::BothMax => Policy::BothMax,
        MacsigPolicy::Sensor1Only => Policy::Sensor1Only,
        MacsigPolicy::Sensor2Only => Policy::Sensor2Only,
    };
    catch_unwind(AssertUnwindSafe(|| high_snr_limit(p, policy))).unwrap_or(f64::NAN)
}

/// Runs a seeded Monte Carlo simulation and writes the report to `out`.
/// `alloc1`/`alloc2` are the amplitude scales for
/// [`MacsigScheme::MacOptimalAsym`]; every other scheme transmits at full
/// cap power and ignores them.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn macsig_simulate(
    params: *const MacsigParams,
    scheme: MacsigScheme,
    alloc1: f64,
    alloc2: f64,
    trials: u64,
    seed: u64,
    out: *mut MacsigSimReport,
) -> MacsigStatus {
    let Some(p) = borrow(params) else {
        return fail(MacsigStatus::NullPointer, "params is null");
    };
    if out.is_null() {
        return fail(MacsigStatus::NullPointer, "out is null");
    }
    let scheme = match scheme {
        MacsigScheme::MacOptimalAsym => Scheme::MacOptimalAsym,
        MacsigScheme::MacSymmetricMax => Scheme::MacSymmetricMax,
        MacsigScheme::OrthSymmetricBpsk => Scheme::OrthSymmetricBpsk,
        MacsigScheme::OrthAsymmetricBpsk => Scheme::OrthAsymmetricBpsk,
    };
    guarded(|| {
        let config = SimConfig { trials, seed, scheme, alloc: (alloc1, alloc2) };
        match simulate(p, &config) {
            Ok(r) => {
                *out = MacsigSimReport {
                    errors: r.errors,
                    trials: r.trials,
                    pe_hat: r.pe_hat,
                    ci95_halfwidth: r.ci95_halfwidth,
                    seed: r.seed,
                    ci_reliable: r.ci_reliable,
                };
                MacsigStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}
