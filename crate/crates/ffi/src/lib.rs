//! C ABI over the `worldline` crate.
//!
//! Every fallible function returns a [`WlStatus`] and writes its result
//! through an out-pointer. On failure a description is available from
//! [`wl_last_error_message`] on the same thread. Objects are opaque handles
//! created by `*_new`/`*_from_json`/`*_run` functions and released with the
//! matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use worldline::analytic::wu_yang_solve;
use worldline::circuits::AnsatzConfig;
use worldline::evolution::vertex_amplitude;
use worldline::hamiltonian::{build, BuiltHamiltonian, HamiltonianSpec};
use worldline::vqe::{minimize, OptimizerSettings, VqeResult, DEFAULT_MAX_ITER, DEFAULT_SEED, DEFAULT_TOLERANCE};
use worldline::Error;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad input: malformed JSON, invalid spec, size mismatch.
    ConfigError = 3,
    /// Eigensolver, integrator or optimizer failure.
    NumericalError = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Built Hamiltonian matrix with its metadata.
pub struct WlHamiltonian {
    inner: BuiltHamiltonian,
}

/// Outcome of a variational run.
pub struct WlVqeResult {
    inner: VqeResult,
}

/// Optimizer knobs. Obtain defaults from [`wl_optimizer_settings_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct WlOptimizerSettings {
    pub max_iter: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub restarts: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: WlStatus, msg: impl Into<String>) -> WlStatus {
    set_last_error(msg);
    status
}

fn from_error(e: Error) -> WlStatus {
    let status = if e.is_config_error() { WlStatus::ConfigError } else { WlStatus::NumericalError };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> WlStatus) -> WlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(WlStatus::Panic, "internal panic"),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(WlStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Message for the most recent failure on this thread, or null. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a Hamiltonian from a JSON spec such as
/// `{"kind":"landau_cartesian","b_field":2.0}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wl_hamiltonian_from_json(json: *const c_char, out: *mut *mut WlHamiltonian) -> WlStatus {
    guard(|| {
        non_null!(json, out);
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(WlStatus::InvalidUtf8, "spec is not valid UTF-8");
        };
        match HamiltonianSpec::from_json(text).and_then(|spec| build(&spec)) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(WlHamiltonian { inner }));
                WlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `h` must come from [`wl_hamiltonian_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wl_hamiltonian_free(h: *mut WlHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wl_hamiltonian_dim(h: *const WlHamiltonian, out: *mut usize) -> WlStatus {
    non_null!(h, out);
    *out = (*h).inner.dim();
    WlStatus::Ok
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wl_hamiltonian_qubits(h: *const WlHamiltonian, out: *mut usize) -> WlStatus {
    non_null!(h, out);
    *out = (*h).inner.qubits;
    WlStatus::Ok
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wl_hamiltonian_is_hermitian(h: *const WlHamiltonian, out: *mut bool) -> WlStatus {
    non_null!(h, out);
    *out = (*h).inner.hermitian;
    WlStatus::Ok
}

/// Writes the spectrum, ordered by real part, into `re[0..dim]` and, when
/// `im` is non-null, the imaginary parts into `im[0..dim]`. `len` is the
/// capacity of each buffer.
///
/// # Safety
/// `h` must be a live handle; `re` (and `im` if non-null) must hold `len`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn wl_hamiltonian_eigenvalues(
    h: *const WlHamiltonian,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> WlStatus {
    guard(|| {
        non_null!(h, re);
        let h = &(*h).inner;
        if len < h.dim() {
            return fail(WlStatus::BufferTooSmall, format!("need {} slots, got {len}", h.dim()));
        }
        match h.spectrum() {
            Ok(values) => {
                for (k, v) in values.iter().enumerate() {
                    *re.add(k) = v.re;
                    if !im.is_null() {
                        *im.add(k) = v.im;
                    }
                }
                WlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Lowest eigenvalue (real part when the matrix is not Hermitian).
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wl_hamiltonian_lowest_eigenvalue(h: *const WlHamiltonian, out: *mut f64) -> WlStatus {
    guard(|| {
        non_null!(h, out);
        match (*h).inner.lowest_eigenvalue() {
            Ok(v) => {
                *out = v;
                WlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub extern "C" fn wl_optimizer_settings_default() -> WlOptimizerSettings {
    WlOptimizerSettings { max_iter: DEFAULT_MAX_ITER, tolerance: DEFAULT_TOLERANCE, seed: DEFAULT_SEED, restarts: 0 }
}

/// Runs the variational search with an Ry ansatz of the given depth.
///
/// # Safety
/// `h` must be a live handle; `settings` must point to a valid struct;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wl_vqe_run(
    h: *const WlHamiltonian,
    depth: usize,
    settings: *const WlOptimizerSettings,
    out: *mut *mut WlVqeResult,
) -> WlStatus {
    guard(|| {
        non_null!(h, settings, out);
        let h = &(*h).inner;
        let s = &*settings;
        let opt = OptimizerSettings {
            max_iter: s.max_iter,
            tolerance: s.tolerance,
            seed: s.seed,
            restarts: s.restarts,
            ..OptimizerSettings::default()
        };
        match minimize(h, &AnsatzConfig::zeros(h.qubits, depth), &opt) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(WlVqeResult { inner }));
                WlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `r` must come from [`wl_vqe_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wl_vqe_free(r: *mut WlVqeResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wl_vqe_energy(r: *const WlVqeResult, out: *mut f64) -> WlStatus {
    non_null!(r, out);
    *out = (*r).inner.energy;
    WlStatus::Ok
}

/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wl_vqe_converged(r: *const WlVqeResult, out: *mut bool) -> WlStatus {
    non_null!(r, out);
    *out = (*r).inner.converged;
    WlStatus::Ok
}

/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wl_vqe_iterations(r: *const WlVqeResult, out: *mut usize) -> WlStatus {
    non_null!(r, out);
    *out = (*r).inner.iterations;
    WlStatus::Ok
}

/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wl_vqe_param_count(r: *const WlVqeResult, out: *mut usize) -> WlStatus {
    non_null!(r, out);
    *out = (*r).inner.params.len();
    WlStatus::Ok
}

/// # Safety
/// `r` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn wl_vqe_params(r: *const WlVqeResult, buf: *mut f64, len: usize) -> WlStatus {
    non_null!(r, buf);
    copy_out(&(*r).inner.params, buf, len)
}

/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wl_vqe_trace_len(r: *const WlVqeResult, out: *mut usize) -> WlStatus {
    non_null!(r, out);
    *out = (*r).inner.trace.len();
    WlStatus::Ok
}

/// Energies of the accepted optimizer steps, in order.
///
/// # Safety
/// `r` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn wl_vqe_trace_energies(r: *const WlVqeResult, buf: *mut f64, len: usize) -> WlStatus {
    non_null!(r, buf);
    let energies: Vec<f64> = (*r).inner.trace.iter().map(|p| p.energy).collect();
    copy_out(&energies, buf, len)
}

unsafe fn copy_out(values: &[f64], buf: *mut f64, len: usize) -> WlStatus {
    if len < values.len() {
        return fail(WlStatus::BufferTooSmall, format!("need {} slots, got {len}", values.len()));
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    WlStatus::Ok
}

/// `⟨k1| exp(i p2 X) |k3⟩` between momentum states on an `n`-point grid.
///
/// # Safety
/// `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wl_vertex_amplitude(
    k1: usize,
    p2: f64,
    k3: usize,
    n: usize,
    re: *mut f64,
    im: *mut f64,
) -> WlStatus {
    guard(|| {
        non_null!(re, im);
        match vertex_amplitude(k1, p2, k3, n) {
            Ok(a) => {
                *re = a.re;
                *im = a.im;
                WlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Integrates the radial Wu-Yang equation with RK4 over `steps` intervals
/// and writes the `steps + 1` samples into `r`, `g`, `gprime`, each of
/// capacity `len`.
///
/// # Safety
/// `r`, `g` and `gprime` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn wl_wu_yang_solve(
    r_start: f64,
    r_end: f64,
    steps: usize,
    g_start: f64,
    gprime_start: f64,
    r: *mut f64,
    g: *mut f64,
    gprime: *mut f64,
    len: usize,
) -> WlStatus {
    guard(|| {
        non_null!(r, g, gprime);
        if len < steps.saturating_add(1) {
            return fail(WlStatus::BufferTooSmall, format!("need {} slots, got {len}", steps.saturating_add(1)));
        }
        match wu_yang_solve(r_start, r_end, steps, g_start, gprime_start) {
            Ok(samples) => {
                for (k, s) in samples.iter().enumerate() {
                    *r.add(k) = s.r;
                    *g.add(k) = s.g;
                    *gprime.add(k) = s.gprime;
                }
                WlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
