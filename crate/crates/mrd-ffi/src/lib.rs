//! C ABI over the exact Riordan-array library.
//!
//! Conventions, chosen to match what hand-written C APIs usually do:
//!
//! * Specs live behind the opaque handle [`MrdSpec`]; constructors write the
//!   handle through an out-pointer and return a status code. Every handle is
//!   released with `mrd_spec_free`.
//! * Numbers cross the boundary as NUL-terminated `"p/q"` strings so no
//!   precision is lost; every string this library hands out is released
//!   with `mrd_string_free`.
//! * On failure the status code classifies the problem and a thread-local
//!   slot keeps the human-readable message, retrievable with
//!   `mrd_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};

use mrd::compress::{tp_check_with_budget, DEFAULT_MINOR_BUDGET};
use mrd::gfexpr::{eval_str, GfError};
use mrd::multiriordan::MultiRiordanSpec;
use mrd::rational::rat_to_string;
use mrd::riordan::RiordanSpec;
use mrd::series::Series;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MrdStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An expression failed to parse; the message carries the byte position.
    Syntax = 3,
    /// The inputs parse but the mathematics rejects them (wrong valuation,
    /// insufficient truncation, non-invertible series, mismatched specs).
    Domain = 4,
    /// An index lies outside the computed truncation.
    OutOfRange = 5,
}

enum SpecImpl {
    Classical(RiordanSpec),
    Multi(MultiRiordanSpec),
}

/// Opaque array spec: either a classical pair or a multiple spec with
/// `ell >= 2` multipliers.
pub struct MrdSpec(SpecImpl);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn remember(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    let stored = CString::new(text).expect("NUL bytes were just removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn fail(status: MrdStatus, message: impl Into<String>) -> MrdStatus {
    remember(message);
    status
}

fn gf_status(err: &GfError) -> MrdStatus {
    match err {
        GfError::Series(_) => MrdStatus::Domain,
        _ => MrdStatus::Syntax,
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, MrdStatus> {
    if ptr.is_null() {
        return Err(fail(MrdStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(MrdStatus::InvalidUtf8, "string argument is not valid UTF-8"))
}

unsafe fn give_string(out: *mut *mut c_char, text: String) -> MrdStatus {
    if out.is_null() {
        return fail(MrdStatus::NullArgument, "null output pointer");
    }
    let c = match CString::new(text) {
        Ok(c) => c,
        Err(_) => return fail(MrdStatus::Domain, "output text contained a NUL byte"),
    };
    *out = c.into_raw();
    MrdStatus::Ok
}

unsafe fn give_spec(out: *mut *mut MrdSpec, spec: SpecImpl) -> MrdStatus {
    if out.is_null() {
        return fail(MrdStatus::NullArgument, "null output pointer");
    }
    *out = Box::into_raw(Box::new(MrdSpec(spec)));
    MrdStatus::Ok
}

unsafe fn deref<'a>(spec: *const MrdSpec) -> Result<&'a MrdSpec, MrdStatus> {
    if spec.is_null() {
        return Err(fail(MrdStatus::NullArgument, "null spec handle"));
    }
    Ok(&*spec)
}

fn series_csv(series: &Series) -> String {
    series
        .coeffs()
        .iter()
        .map(rat_to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Copy of the most recent error message on this thread, or NULL if no
/// failure has happened yet. Release with `mrd_string_free`.
///
/// # Safety
/// Always safe to call; the returned pointer is either NULL or a fresh
/// NUL-terminated allocation owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn mrd_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(stored) => stored.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Release a string produced by this library.
///
/// # Safety
/// `text` must be NULL or a pointer previously returned by one of the
/// `mrd_*` functions, and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mrd_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Build a spec from generating-function expressions.
///
/// `f` points at `f_count` expression strings. One multiplier builds a
/// classical spec; two or more build a multiple spec with `ell = f_count`.
/// A nonzero `square` selects the square ("type") layout, where multipliers
/// keep a nonzero constant term. Every series is truncated at `order`.
///
/// # Safety
/// `g` and each of the `f_count` entries of `f` must be NUL-terminated
/// strings, and `out` must be a valid pointer. On success `*out` owns the
/// handle; release it with `mrd_spec_free`.
#[no_mangle]
pub unsafe extern "C" fn mrd_spec_new(
    g: *const c_char,
    f: *const *const c_char,
    f_count: usize,
    square: c_int,
    order: usize,
    out: *mut *mut MrdSpec,
) -> MrdStatus {
    let g_src = match read_str(g) {
        Ok(s) => s,
        Err(status) => return status,
    };
    if f.is_null() || f_count == 0 {
        return fail(MrdStatus::NullArgument, "at least one multiplier expression is required");
    }
    let g_series = match eval_str(g_src, order) {
        Ok(s) => s,
        Err(e) => return fail(gf_status(&e), format!("g: {e}")),
    };
    let mut multipliers = Vec::with_capacity(f_count);
    for i in 0..f_count {
        let src = match read_str(*f.add(i)) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match eval_str(src, order) {
            Ok(s) => multipliers.push(s),
            Err(e) => return fail(gf_status(&e), format!("f[{i}]: {e}")),
        }
    }
    let spec = if f_count == 1 {
        let f0 = multipliers.pop().expect("one multiplier");
        let built = if square != 0 {
            RiordanSpec::square(g_series, f0)
        } else {
            RiordanSpec::proper(g_series, f0)
        };
        match built {
            Ok(s) => SpecImpl::Classical(s),
            Err(e) => return fail(MrdStatus::Domain, e.to_string()),
        }
    } else {
        let built = if square != 0 {
            MultiRiordanSpec::square(f_count, g_series, multipliers)
        } else {
            MultiRiordanSpec::proper(f_count, g_series, multipliers)
        };
        match built {
            Ok(s) => SpecImpl::Multi(s),
            Err(e) => return fail(MrdStatus::Domain, e.to_string()),
        }
    };
    give_spec(out, spec)
}

/// Release a spec handle.
///
/// # Safety
/// `spec` must be NULL or a pointer from a spec-producing call, and must
/// not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mrd_spec_free(spec: *mut MrdSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Number of multipliers (1 for classical specs); 0 if `spec` is NULL.
///
/// # Safety
/// `spec` must be NULL or a live spec handle.
#[no_mangle]
pub unsafe extern "C" fn mrd_spec_ell(spec: *const MrdSpec) -> usize {
    match deref(spec) {
        Ok(handle) => match &handle.0 {
            SpecImpl::Classical(_) => 1,
            SpecImpl::Multi(s) => s.ell(),
        },
        Err(_) => 0,
    }
}

/// Entry `(n, k)` of the array as a `"p/q"` string.
///
/// # Safety
/// `spec` must be a live spec handle and `out` a valid pointer; on success
/// the caller owns `*out` and releases it with `mrd_string_free`.
#[no_mangle]
pub unsafe extern "C" fn mrd_spec_entry(
    spec: *const MrdSpec,
    n: usize,
    k: usize,
    out: *mut *mut c_char,
) -> MrdStatus {
    let handle = match deref(spec) {
        Ok(h) => h,
        Err(status) => return status,
    };
    let value = match &handle.0 {
        SpecImpl::Classical(s) => s.entry(n, k).map_err(|e| e.to_string()),
        SpecImpl::Multi(s) => s.entry(n, k).map_err(|e| e.to_string()),
    };
    match value {
        Ok(v) => give_string(out, rat_to_string(&v)),
        Err(message) => fail(MrdStatus::OutOfRange, message),
    }
}

/// The leading `rows x cols` block in CSV form, one text row per line,
/// cells as `"p/q"`.
///
/// # Safety
/// Same contract as `mrd_spec_entry`.
#[no_mangle]
pub unsafe extern "C" fn mrd_spec_build_csv(
    spec: *const MrdSpec,
    rows: usize,
    cols: usize,
    out: *mut *mut c_char,
) -> MrdStatus {
    let handle = match deref(spec) {
        Ok(h) => h,
        Err(status) => return status,
    };
    let block = match &handle.0 {
        SpecImpl::Classical(s) => s.build(rows, cols).map_err(|e| e.to_string()),
        SpecImpl::Multi(s) => s.mbuild(rows, cols).map_err(|e| e.to_string()),
    };
    match block {
        Ok(matrix) => give_string(out, matrix.to_csv()),
        Err(message) => fail(MrdStatus::Domain, message),
    }
}

/// Group product of two specs of the same shape.
///
/// # Safety
/// `a` and `b` must be live spec handles and `out` a valid pointer; on
/// success the caller owns `*out`.
#[no_mangle]
pub unsafe extern "C" fn mrd_spec_mul(
    a: *const MrdSpec,
    b: *const MrdSpec,
    out: *mut *mut MrdSpec,
) -> MrdStatus {
    let (left, right) = match (deref(a), deref(b)) {
        (Ok(l), Ok(r)) => (l, r),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    match (&left.0, &right.0) {
        (SpecImpl::Classical(x), SpecImpl::Classical(y)) => match x.mul(y) {
            Ok(p) => give_spec(out, SpecImpl::Classical(p)),
            Err(e) => fail(MrdStatus::Domain, e.to_string()),
        },
        (SpecImpl::Multi(x), SpecImpl::Multi(y)) => match x.mmul(y) {
            Ok(p) => give_spec(out, SpecImpl::Multi(p)),
            Err(e) => fail(MrdStatus::Domain, e.to_string()),
        },
        _ => fail(
            MrdStatus::Domain,
            "cannot multiply a classical spec by a multiple spec",
        ),
    }
}

/// Group inverse of a proper spec.
///
/// # Safety
/// Same contract as `mrd_spec_mul`.
#[no_mangle]
pub unsafe extern "C" fn mrd_spec_inverse(
    spec: *const MrdSpec,
    out: *mut *mut MrdSpec,
) -> MrdStatus {
    let handle = match deref(spec) {
        Ok(h) => h,
        Err(status) => return status,
    };
    match &handle.0 {
        SpecImpl::Classical(s) => match s.inv() {
            Ok(i) => give_spec(out, SpecImpl::Classical(i)),
            Err(e) => fail(MrdStatus::Domain, e.to_string()),
        },
        SpecImpl::Multi(s) => match s.minv() {
            Ok(i) => give_spec(out, SpecImpl::Multi(i)),
            Err(e) => fail(MrdStatus::Domain, e.to_string()),
        },
    }
}

/// A- and Z-sequence characterization as a JSON object
/// `{"ell", "stride", "A", "Z"}` with `terms` strided entries per sequence.
///
/// # Safety
/// Same contract as `mrd_spec_entry`.
#[no_mangle]
pub unsafe extern "C" fn mrd_spec_seq_json(
    spec: *const MrdSpec,
    terms: usize,
    out: *mut *mut c_char,
) -> MrdStatus {
    let handle = match deref(spec) {
        Ok(h) => h,
        Err(status) => return status,
    };
    let (ell, a, zs) = match &handle.0 {
        SpecImpl::Classical(s) => {
            let a = match s.a_sequence(terms) {
                Ok(a) => a,
                Err(e) => return fail(MrdStatus::Domain, e.to_string()),
            };
            let z = match s.z_sequence(terms) {
                Ok(z) => z,
                Err(e) => return fail(MrdStatus::Domain, e.to_string()),
            };
            (1usize, cells(&a), vec![cells(&z)])
        }
        SpecImpl::Multi(s) => {
            let seq = match s.mseq() {
                Ok(seq) => seq,
                Err(e) => return fail(MrdStatus::Domain, e.to_string()),
            };
            if seq.a().order() / s.ell() + 1 < terms {
                return fail(
                    MrdStatus::OutOfRange,
                    "truncation order too small for the requested term count",
                );
            }
            let strided = |series: &Series| -> Vec<String> {
                (0..terms)
                    .map(|j| rat_to_string(&series.coeffs()[j * s.ell()]))
                    .collect()
            };
            (s.ell(), strided(seq.a()), seq.z_all().iter().map(strided).collect())
        }
    };
    let json = serde_json::json!({ "ell": ell, "stride": ell, "A": a, "Z": zs });
    give_string(out, json.to_string())
}

fn cells(series: &Series) -> Vec<String> {
    series.coeffs().iter().map(rat_to_string).collect()
}

/// Minor-positivity report for the leading `rows x rows` block, as the
/// same JSON object the CLI prints: `{"order", "block", "ok", "witness"}`
/// plus `"budget"` when the enumeration was refused. Pass `budget = 0` for
/// the default limit.
///
/// # Safety
/// Same contract as `mrd_spec_entry`.
#[no_mangle]
pub unsafe extern "C" fn mrd_spec_tp_json(
    spec: *const MrdSpec,
    rows: usize,
    max_order: usize,
    budget: u64,
    out: *mut *mut c_char,
) -> MrdStatus {
    let handle = match deref(spec) {
        Ok(h) => h,
        Err(status) => return status,
    };
    let block = match &handle.0 {
        SpecImpl::Classical(s) => s.build(rows, rows).map_err(|e| e.to_string()),
        SpecImpl::Multi(s) => s.mbuild(rows, rows).map_err(|e| e.to_string()),
    };
    let block = match block {
        Ok(b) => b,
        Err(message) => return fail(MrdStatus::Domain, message),
    };
    let limit = if budget == 0 { DEFAULT_MINOR_BUDGET } else { budget };
    let report = tp_check_with_budget(&block, max_order, limit);
    match serde_json::to_string(&report) {
        Ok(json) => give_string(out, json),
        Err(e) => fail(MrdStatus::Domain, e.to_string()),
    }
}

/// Evaluate a generating-function expression to `order` and return the
/// coefficients as one CSV line of `"p/q"` cells.
///
/// # Safety
/// `expr` must be a NUL-terminated string and `out` a valid pointer; on
/// success the caller owns `*out`.
#[no_mangle]
pub unsafe extern "C" fn mrd_eval_csv(
    expr: *const c_char,
    order: usize,
    out: *mut *mut c_char,
) -> MrdStatus {
    let src = match read_str(expr) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match eval_str(src, order) {
        Ok(series) => give_string(out, series_csv(&series)),
        Err(e) => fail(gf_status(&e), e.to_string()),
    }
}
