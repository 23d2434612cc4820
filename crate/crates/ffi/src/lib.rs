//! C ABI over `syncqkd`.
//!
//! Every fallible function returns a [`SyncqkdStatus`] and writes results
//! through out-pointers. On failure the message is kept per thread and can be
//! read with [`syncqkd_last_error_message`]. Handles are opaque and must be
//! released with their `_free` function; strings returned by the library are
//! released with [`syncqkd_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use syncqkd::adversary::{self, EveStats};
use syncqkd::bell;
use syncqkd::correlations::{self, Correlation, TABLE_LEN};
use syncqkd::protocol::{self, Device, ProtocolConfig, ProtocolOutcome, Variant};
use syncqkd::rigidity::{self, TwoProjectionForm};
use syncqkd::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyncqkdStatus {
    Ok = 0,
    NullPointer = 1,
    InputDomain = 2,
    Validation = 3,
    Consistency = 4,
    Precondition = 5,
    EstimationUndefined = 6,
    Singular = 7,
    NoThreshold = 8,
    Parse = 9,
    Io = 10,
    Panic = 11,
}

impl From<&Error> for SyncqkdStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InputDomain(_) => SyncqkdStatus::InputDomain,
            Error::Validation(_) => SyncqkdStatus::Validation,
            Error::Consistency(_) => SyncqkdStatus::Consistency,
            Error::Precondition { .. } => SyncqkdStatus::Precondition,
            Error::EstimationUndefined(_) => SyncqkdStatus::EstimationUndefined,
            Error::Singular(_) => SyncqkdStatus::Singular,
            Error::NoThreshold { .. } => SyncqkdStatus::NoThreshold,
            Error::Parse(_) => SyncqkdStatus::Parse,
            Error::Io(_) => SyncqkdStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: SyncqkdStatus, msg: impl Into<String>) -> SyncqkdStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (SyncqkdStatus, String)>) -> SyncqkdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SyncqkdStatus::Ok,
        Ok(Err((s, msg))) => fail(s, msg),
        Err(_) => fail(SyncqkdStatus::Panic, "panic inside syncqkd"),
    }
}

fn lift(e: Error) -> (SyncqkdStatus, String) {
    (SyncqkdStatus::from(&e), e.to_string())
}

fn null(what: &str) -> (SyncqkdStatus, String) {
    (SyncqkdStatus::NullPointer, format!("{what} is null"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), (SyncqkdStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (SyncqkdStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message for the last failed call on this thread, or null. Owned by the
/// library and valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn syncqkd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn syncqkd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub unsafe extern "C" fn syncqkd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// Correlations

/// Opaque correlation table.
pub struct SyncqkdCorrelation {
    inner: Correlation,
}

unsafe fn new_correlation(c: Correlation, out: *mut *mut SyncqkdCorrelation) -> Result<(), (SyncqkdStatus, String)> {
    write(out, Box::into_raw(Box::new(SyncqkdCorrelation { inner: c })), "out")
}

#[no_mangle]
pub unsafe extern "C" fn syncqkd_correlation_ideal(out: *mut *mut SyncqkdCorrelation) -> SyncqkdStatus {
    guard(|| new_correlation(Correlation::ideal(), out))
}

#[no_mangle]
pub unsafe extern "C" fn syncqkd_correlation_uniform(out: *mut *mut SyncqkdCorrelation) -> SyncqkdStatus {
    guard(|| new_correlation(Correlation::uniform(), out))
}

/// Builds a table from `len == 36` entries in `(2 y_A + y_B) * 9 + 3 x_A + x_B` order.
#[no_mangle]
pub unsafe extern "C" fn syncqkd_correlation_from_table(
    table: *const f64,
    len: usize,
    out: *mut *mut SyncqkdCorrelation,
) -> SyncqkdStatus {
    guard(|| {
        if table.is_null() {
            return Err(null("table"));
        }
        if len != TABLE_LEN {
            return Err((SyncqkdStatus::InputDomain, format!("table has {len} entries, expected 36")));
        }
        let mut t = [0.0; TABLE_LEN];
        t.copy_from_slice(std::slice::from_raw_parts(table, len));
        new_correlation(Correlation::new(t).map_err(lift)?, out)
    })
}

#[no_mangle]
pub unsafe extern "C" fn syncqkd_correlation_free(c: *mut SyncqkdCorrelation) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Copies the 36 entries into `out`.
#[no_mangle]
pub unsafe extern "C" fn syncqkd_correlation_table(c: *const SyncqkdCorrelation, out: *mut f64) -> SyncqkdStatus {
    guard(|| {
        let c = deref(c, "correlation")?;
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(c.inner.table().as_ptr(), out, TABLE_LEN);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn syncqkd_j3_effective(c: *const SyncqkdCorrelation, out: *mut f64) -> SyncqkdStatus {
    guard(|| write(out, bell::j3_effective(&deref(c, "correlation")?.inner), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn syncqkd_asynchronicity(c: *const SyncqkdCorrelation, out: *mut f64) -> SyncqkdStatus {
    guard(|| write(out, correlations::asynchronicity(&deref(c, "correlation")?.inner).total, "out"))
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SyncqkdBellReport {
    pub j: [f64; 4],
    pub classical: bool,
    pub quantum_feasible: bool,
    /// Index of the most negative violated functional, or -1.
    pub violated_index: i32,
}

#[no_mangle]
pub unsafe extern "C" fn syncqkd_classify(c: *const SyncqkdCorrelation, out: *mut SyncqkdBellReport) -> SyncqkdStatus {
    guard(|| {
        let r = bell::classify(&deref(c, "correlation")?.inner).map_err(lift)?;
        let report = SyncqkdBellReport {
            j: r.j,
            classical: r.classical,
            quantum_feasible: r.quantum_feasible,
            violated_index: r.violated_index.map_or(-1, |i| i as i32),
        };
        write(out, report, "out")
    })
}

// Protocol

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyncqkdVariant {
    A = 0,
    B = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyncqkdProtocolConfig {
    pub variant: SyncqkdVariant,
    pub n: u64,
    pub m: u64,
    pub lambda: f64,
    pub mu: f64,
    pub seed: u64,
    pub input_distribution: [f64; 3],
    pub abort_on_mismatch: bool,
}

impl From<&SyncqkdProtocolConfig> for ProtocolConfig {
    fn from(c: &SyncqkdProtocolConfig) -> Self {
        ProtocolConfig {
            variant: match c.variant {
                SyncqkdVariant::A => Variant::A,
                SyncqkdVariant::B => Variant::B,
            },
            n: c.n,
            m: c.m,
            lambda: c.lambda,
            mu: c.mu,
            seed: c.seed,
            input_distribution: c.input_distribution,
            abort_on_mismatch: c.abort_on_mismatch,
        }
    }
}

/// Defaults: n = 100000, m = 10, λ = μ = 0.01, seed 0, uniform inputs.
#[no_mangle]
pub extern "C" fn syncqkd_protocol_config_default(variant: SyncqkdVariant) -> SyncqkdProtocolConfig {
    SyncqkdProtocolConfig {
        variant,
        n: 100_000,
        m: 10,
        lambda: 0.01,
        mu: 0.01,
        seed: 0,
        input_distribution: [1.0 / 3.0; 3],
        abort_on_mismatch: true,
    }
}

/// Opaque protocol run result.
pub struct SyncqkdOutcome {
    inner: ProtocolOutcome,
}

/// Runs a protocol against a device whose behavior is the given table.
#[no_mangle]
pub unsafe extern "C" fn syncqkd_simulate(
    config: *const SyncqkdProtocolConfig,
    device: *const SyncqkdCorrelation,
    out: *mut *mut SyncqkdOutcome,
) -> SyncqkdStatus {
    guard(|| {
        let cfg = ProtocolConfig::from(deref(config, "config")?);
        let dev = Device::new(deref(device, "device")?.inner.clone());
        let o = protocol::run_protocol(&cfg, &dev).map_err(lift)?;
        write(out, Box::into_raw(Box::new(SyncqkdOutcome { inner: o })), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn syncqkd_outcome_free(o: *mut SyncqkdOutcome) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

#[no_mangle]
pub unsafe extern "C" fn syncqkd_outcome_accepted(o: *const SyncqkdOutcome, out: *mut bool) -> SyncqkdStatus {
    guard(|| write(out, deref(o, "outcome")?.inner.accepted(), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn syncqkd_outcome_j3_hat(o: *const SyncqkdOutcome, out: *mut f64) -> SyncqkdStatus {
    guard(|| write(out, deref(o, "outcome")?.inner.j3_hat, "out"))
}

/// Writes the asynchronicity estimate and whether one exists (variant B only).
#[no_mangle]
pub unsafe extern "C" fn syncqkd_outcome_s_hat(
    o: *const SyncqkdOutcome,
    has_value: *mut bool,
    out: *mut f64,
) -> SyncqkdStatus {
    guard(|| {
        let s = deref(o, "outcome")?.inner.s_hat;
        write(has_value, s.is_some(), "has_value")?;
        write(out, s.unwrap_or(f64::NAN), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn syncqkd_outcome_key_mismatches(o: *const SyncqkdOutcome, out: *mut u64) -> SyncqkdStatus {
    guard(|| write(out, deref(o, "outcome")?.inner.key_mismatches, "out"))
}

#[no_mangle]
pub unsafe extern "C" fn syncqkd_outcome_key_len(o: *const SyncqkdOutcome, out: *mut usize) -> SyncqkdStatus {
    guard(|| write(out, deref(o, "outcome")?.inner.raw_key.len(), "out"))
}

/// Copies up to `cap` key bits (one per byte) into `buf` and reports how many were written.
#[no_mangle]
pub unsafe extern "C" fn syncqkd_outcome_key_bits(
    o: *const SyncqkdOutcome,
    buf: *mut u8,
    cap: usize,
    written: *mut usize,
) -> SyncqkdStatus {
    guard(|| {
        let key = &deref(o, "outcome")?.inner.raw_key;
        let n = key.len().min(cap);
        if n > 0 {
            if buf.is_null() {
                return Err(null("buf"));
            }
            ptr::copy_nonoverlapping(key.as_ptr(), buf, n);
        }
        write(written, n, "written")
    })
}

/// The outcome summary document. Free with [`syncqkd_string_free`].
#[no_mangle]
pub unsafe extern "C" fn syncqkd_outcome_to_json(o: *const SyncqkdOutcome, out: *mut *mut c_char) -> SyncqkdStatus {
    guard(|| {
        let s = deref(o, "outcome")?.inner.summary_json();
        let c = CString::new(s).map_err(|e| (SyncqkdStatus::Validation, e.to_string()))?;
        write(out, c.into_raw(), "out")
    })
}

/// Toeplitz hash of `n` key bits down to `out_len` bits written into `out`.
#[no_mangle]
pub unsafe extern "C" fn syncqkd_privacy_amplify(
    key: *const u8,
    n: usize,
    out_len: usize,
    seed: u64,
    out: *mut u8,
) -> SyncqkdStatus {
    guard(|| {
        let key = if n == 0 {
            &[][..]
        } else if key.is_null() {
            return Err(null("key"));
        } else {
            std::slice::from_raw_parts(key, n)
        };
        let h = protocol::privacy_amplify(key, out_len, seed).map_err(lift)?;
        if !h.is_empty() {
            if out.is_null() {
                return Err(null("out"));
            }
            ptr::copy_nonoverlapping(h.as_ptr(), out, h.len());
        }
        Ok(())
    })
}

// Adversary

#[no_mangle]
pub unsafe extern "C" fn syncqkd_eve_epsilon_max(lambda: f64, mu: f64, out: *mut f64) -> SyncqkdStatus {
    guard(|| write(out, adversary::epsilon_max(lambda, mu).map_err(lift)?, "out"))
}

#[no_mangle]
pub unsafe extern "C" fn syncqkd_eve_epsilon_delta_max(
    delta: f64,
    lambda: f64,
    mu: f64,
    out: *mut f64,
) -> SyncqkdStatus {
    guard(|| write(out, adversary::epsilon_delta_max(delta, lambda, mu).map_err(lift)?, "out"))
}

/// Expected observed `(J_3, S)` for a strategy with `(j3, s)` at uncertainty `epsilon`.
#[no_mangle]
pub unsafe extern "C" fn syncqkd_eve_forward(
    j3: f64,
    s: f64,
    epsilon: f64,
    out_j3: *mut f64,
    out_s: *mut f64,
) -> SyncqkdStatus {
    guard(|| {
        let f = adversary::forward_stats(EveStats { j3, s }, epsilon).map_err(lift)?;
        write(out_j3, f.j3, "out_j3")?;
        write(out_s, f.s, "out_s")
    })
}

/// Eve's `(J̃_3, S̃)` given observed `J_3 = -1/8 + lambda` and `S = mu`.
#[no_mangle]
pub unsafe extern "C" fn syncqkd_eve_invert(
    lambda: f64,
    mu: f64,
    epsilon: f64,
    out_j3: *mut f64,
    out_s: *mut f64,
) -> SyncqkdStatus {
    guard(|| {
        let e = adversary::invert_stats(lambda, mu, epsilon).map_err(lift)?;
        write(out_j3, e.j3, "out_j3")?;
        write(out_s, e.s, "out_s")
    })
}

// Rigidity

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SyncqkdRigidityReport {
    pub d: usize,
    pub j3: f64,
    pub lambda: f64,
    pub l_over_d: f64,
    pub trace_deviation: f64,
    pub statistical_difference: f64,
    pub margin_junk: f64,
    pub margin_deviation: f64,
    pub margin_statistical: f64,
    pub identity_residual: f64,
    pub passed: bool,
}

/// Verifies the bounds on the form with junk dimensions `l[4]` and `k` block angles.
#[no_mangle]
pub unsafe extern "C" fn syncqkd_rigidity_verify(
    l: *const usize,
    angles: *const f64,
    k: usize,
    out: *mut SyncqkdRigidityReport,
) -> SyncqkdStatus {
    guard(|| {
        if l.is_null() {
            return Err(null("l"));
        }
        let l: [usize; 4] = std::slice::from_raw_parts(l, 4).try_into().expect("4 entries");
        let angles = if k == 0 {
            Vec::new()
        } else if angles.is_null() {
            return Err(null("angles"));
        } else {
            std::slice::from_raw_parts(angles, k).to_vec()
        };
        let form = TwoProjectionForm::new(l, angles).map_err(lift)?;
        let r = rigidity::verify_main_bound(&form).map_err(lift)?;
        let report = SyncqkdRigidityReport {
            d: r.d,
            j3: r.j3,
            lambda: r.lambda,
            l_over_d: r.junk.value,
            trace_deviation: r.deviation.value,
            statistical_difference: r.statistical.value,
            margin_junk: r.junk.margin,
            margin_deviation: r.deviation.margin,
            margin_statistical: r.statistical.margin,
            identity_residual: r.identity_residual,
            passed: r.passed(),
        };
        write(out, report, "out")
    })
}

/// Copies the last error message into a caller buffer, NUL-terminated and
/// truncated to `cap`. Returns the full message length, or 0 if none.
#[no_mangle]
pub unsafe extern "C" fn syncqkd_last_error_copy(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.to_bytes();
            if !buf.is_null() && cap > 0 {
                let n = bytes.len().min(cap - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                buf.add(n).write(0);
            }
            bytes.len()
        }
    })
}

#[doc(hidden)]
pub fn last_error() -> Option<String> {
    let p = syncqkd_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}
