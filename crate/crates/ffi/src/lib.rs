//! C ABI over `eginv`.
//!
//! Handles are opaque and owned by the caller once returned; release them with
//! the matching `*_free`. Every function returns an [`EgStatus`]; on failure
//! `eg_last_error()` describes the problem (thread-local, valid until the next call).

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use eginv::io::{dataset_value, element_file_value, parse_dataset, to_text, AnyElement, ElementCodec};
use eginv::solver::{generate_random_instance, invert_omega, solve_auto, solve_canonical, solve_general, SolveReport, SolveStatus};
use eginv::{check_conditions, Algebra, AnyDataSet, DataSet, Error, InstanceKind, SequenceAlgebra, Tolerances, TriangularAlgebra};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EgStatus {
    Ok = 0,
    /// a required pointer argument was null
    NullArgument = 1,
    /// text or file could not be parsed
    ParseError = 2,
    /// arguments out of range (dimensions, indices, method)
    InvalidArgument = 3,
    /// the data violates the compatibility conditions
    ConditionFail = 4,
    /// the data admit no solution
    NoSolution = 5,
    /// the requested method does not apply to these data
    Refused = 6,
    /// numerical failure or internal error
    Internal = 7,
    /// a panic was caught at the boundary
    Panic = 8,
}

/// Instance kinds.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EgInstance {
    Matrix = 0,
    Sequence = 1,
}

/// Solver choice for `eg_solve`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EgMethod {
    Auto = 0,
    Canonical = 1,
    General = 2,
}

/// Opaque data set {alpha, beta, gamma, delta}.
pub struct EgDataSet {
    inner: AnyDataSet,
}

/// Opaque algebra element (a solution g).
pub struct EgElement {
    inner: AnyElement,
    p: usize,
    q: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> EgStatus {
    match e {
        Error::Parse { .. } | Error::Io(_) => EgStatus::ParseError,
        Error::ConditionsViolated { .. } => EgStatus::ConditionFail,
        Error::Instance(_) | Error::DimensionMismatch { .. } => EgStatus::InvalidArgument,
        _ => EgStatus::Internal,
    }
}

fn fail(e: Error) -> EgStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn guard(f: impl FnOnce() -> EgStatus) -> EgStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("panic inside eginv");
            EgStatus::Panic
        }
    }
}

fn tolerances(tol: c_double) -> Tolerances {
    if tol > 0.0 {
        Tolerances::with_tolerance(tol)
    } else {
        Tolerances::default()
    }
}

unsafe fn c_str<'a>(s: *const c_char) -> Option<&'a str> {
    if s.is_null() {
        return None;
    }
    CStr::from_ptr(s).to_str().ok()
}

/// Version string of the library (static, do not free).
#[no_mangle]
pub extern "C" fn eg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the last failure on this thread, or null. Valid until the next eg_* call.
#[no_mangle]
pub extern "C" fn eg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parse a data-set JSON document.
#[no_mangle]
pub unsafe extern "C" fn eg_dataset_from_json(text: *const c_char, out: *mut *mut EgDataSet) -> EgStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is null");
            return EgStatus::NullArgument;
        }
        let Some(text) = c_str(text) else {
            set_error("text is null or not UTF-8");
            return EgStatus::NullArgument;
        };
        match parse_dataset(text, "<memory>") {
            Ok(f) => {
                *out = Box::into_raw(Box::new(EgDataSet { inner: f.data }));
                EgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Read a data-set JSON file.
#[no_mangle]
pub unsafe extern "C" fn eg_dataset_from_file(path: *const c_char, out: *mut *mut EgDataSet) -> EgStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is null");
            return EgStatus::NullArgument;
        }
        let Some(path) = c_str(path) else {
            set_error("path is null or not UTF-8");
            return EgStatus::NullArgument;
        };
        match eginv::io::read_dataset(Path::new(path)) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(EgDataSet { inner: f.data }));
                EgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn eg_dataset_free(ds: *mut EgDataSet) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

fn dims(ds: &AnyDataSet) -> (EgInstance, usize, usize) {
    match ds {
        AnyDataSet::Matrix(d) => (EgInstance::Matrix, d.alg().p(), d.alg().q()),
        AnyDataSet::Sequence(d) => (EgInstance::Sequence, d.alg().p(), d.alg().q()),
    }
}

/// Instance kind and dimensions of a data set. Any output pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn eg_dataset_info(ds: *const EgDataSet, kind: *mut EgInstance, p: *mut usize, q: *mut usize) -> EgStatus {
    guard(|| {
        let Some(ds) = ds.as_ref() else {
            set_error("dataset is null");
            return EgStatus::NullArgument;
        };
        let (k, pp, qq) = dims(&ds.inner);
        if !kind.is_null() {
            *kind = k;
        }
        if !p.is_null() {
            *p = pp;
        }
        if !q.is_null() {
            *q = qq;
        }
        EgStatus::Ok
    })
}

/// Serialize a data set to JSON. Free the string with `eg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn eg_dataset_to_json(ds: *const EgDataSet, out: *mut *mut c_char) -> EgStatus {
    guard(|| {
        let (Some(ds), false) = (ds.as_ref(), out.is_null()) else {
            set_error("null argument");
            return EgStatus::NullArgument;
        };
        *out = into_c_string(to_text(&dataset_value(&ds.inner, None)));
        EgStatus::Ok
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

#[no_mangle]
pub unsafe extern "C" fn eg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Evaluate C1-C6. `residuals` (may be null) receives six values; NaN marks a
/// condition that could not be evaluated. Returns EG_STATUS_CONDITION_FAIL when C1-C3 fail.
#[no_mangle]
pub unsafe extern "C" fn eg_check(ds: *const EgDataSet, tolerance: c_double, residuals: *mut c_double, all_pass: *mut c_int) -> EgStatus {
    guard(|| {
        let Some(ds) = ds.as_ref() else {
            set_error("dataset is null");
            return EgStatus::NullArgument;
        };
        let tol = tolerances(tolerance);
        let rep = match &ds.inner {
            AnyDataSet::Matrix(d) => check_conditions(d, &tol),
            AnyDataSet::Sequence(d) => check_conditions(d, &tol),
        };
        if !residuals.is_null() {
            for (k, r) in rep.residuals.iter().enumerate() {
                *residuals.add(k) = r.unwrap_or(f64::NAN);
            }
        }
        if !all_pass.is_null() {
            *all_pass = rep.all_pass() as c_int;
        }
        if rep.c123_pass() {
            EgStatus::Ok
        } else {
            set_error(format!("conditions fail: residuals {:?}", rep.residuals));
            EgStatus::ConditionFail
        }
    })
}

fn run_solve<A: ElementCodec>(d: &DataSet<A>, method: EgMethod, tol: &Tolerances) -> Result<SolveReport<A::Elem>, Error> {
    match method {
        EgMethod::Auto => solve_auto(d, tol),
        EgMethod::Canonical => solve_canonical(d, tol),
        EgMethod::General => solve_general(d, None, tol),
    }
}

fn solve_outcome<A: ElementCodec>(rep: SolveReport<A::Elem>, alg: &A, g_out: *mut *mut EgElement, inclusion: *mut c_double) -> EgStatus {
    unsafe {
        if let (Some(r), false) = (rep.inclusion_residuals, inclusion.is_null()) {
            for (k, x) in r.iter().enumerate() {
                *inclusion.add(k) = *x;
            }
        }
    }
    match (rep.status, rep.g) {
        (SolveStatus::Solved, Some(g)) => {
            unsafe { *g_out = Box::into_raw(Box::new(EgElement { inner: A::wrap(&g), p: alg.p(), q: alg.q() })) };
            EgStatus::Ok
        }
        (SolveStatus::Refused, _) => {
            set_error(rep.message);
            EgStatus::Refused
        }
        _ => {
            set_error(rep.message);
            EgStatus::NoSolution
        }
    }
}

/// Solve for g. On EG_STATUS_OK `*g_out` holds the solution. `inclusion` (may be null)
/// receives the four inclusion residuals when they were computed.
/// `tolerance <= 0` selects the default.
#[no_mangle]
pub unsafe extern "C" fn eg_solve(
    ds: *const EgDataSet,
    method: EgMethod,
    tolerance: c_double,
    g_out: *mut *mut EgElement,
    inclusion: *mut c_double,
) -> EgStatus {
    guard(|| {
        let (Some(ds), false) = (ds.as_ref(), g_out.is_null()) else {
            set_error("null argument");
            return EgStatus::NullArgument;
        };
        *g_out = ptr::null_mut();
        let tol = tolerances(tolerance);
        match &ds.inner {
            AnyDataSet::Matrix(d) => match run_solve(d, method, &tol) {
                Ok(rep) => solve_outcome(rep, d.alg(), g_out, inclusion),
                Err(e) => fail(e),
            },
            AnyDataSet::Sequence(d) => match run_solve(d, method, &tol) {
                Ok(rep) => solve_outcome(rep, d.alg(), g_out, inclusion),
                Err(e) => fail(e),
            },
        }
    })
}

fn invert_with<A: ElementCodec>(d: &DataSet<A>, g: &AnyElement, tol: &Tolerances, res: &mut [f64; 2]) -> EgStatus {
    let Some(g) = A::unwrap(g) else {
        set_error("element and data set are of different instances");
        return EgStatus::InvalidArgument;
    };
    match invert_omega(d, &g, None, tol) {
        Ok(inv) => {
            *res = [inv.omega_r_residual, inv.r_omega_residual];
            EgStatus::Ok
        }
        Err(Error::Precondition(m)) => {
            let s = if m.starts_with("item (a)") {
                EgStatus::Refused
            } else if m.starts_with("item (b)") {
                EgStatus::ConditionFail
            } else {
                EgStatus::NoSolution
            };
            set_error(m);
            s
        }
        Err(e) => fail(e),
    }
}

/// Structured inverse of Omega(g). `residuals` (may be null) receives
/// ||Omega R - I||_F and ||R Omega - I||_F.
#[no_mangle]
pub unsafe extern "C" fn eg_invert(ds: *const EgDataSet, g: *const EgElement, tolerance: c_double, residuals: *mut c_double) -> EgStatus {
    guard(|| {
        let (Some(ds), Some(g)) = (ds.as_ref(), g.as_ref()) else {
            set_error("null argument");
            return EgStatus::NullArgument;
        };
        let tol = tolerances(tolerance);
        let mut res = [f64::NAN; 2];
        let s = match &ds.inner {
            AnyDataSet::Matrix(d) => invert_with(d, &g.inner, &tol, &mut res),
            AnyDataSet::Sequence(d) => invert_with(d, &g.inner, &tol, &mut res),
        };
        if !residuals.is_null() {
            *residuals = res[0];
            *residuals.add(1) = res[1];
        }
        s
    })
}

/// Random data set and its generating g (deterministic in `seed`).
#[no_mangle]
pub unsafe extern "C" fn eg_generate(
    kind: EgInstance,
    p: usize,
    q: usize,
    degree: usize,
    seed: u64,
    ds_out: *mut *mut EgDataSet,
    g_out: *mut *mut EgElement,
) -> EgStatus {
    guard(|| {
        if ds_out.is_null() || g_out.is_null() {
            set_error("null argument");
            return EgStatus::NullArgument;
        }
        let tol = Tolerances::default();
        let made = match kind {
            EgInstance::Matrix if p != q => Err(Error::Instance(format!("matrix instance needs p = q, got {p}x{q}"))),
            EgInstance::Matrix => TriangularAlgebra::new(p)
                .and_then(|a| generate_random_instance(&a, degree, seed, &tol))
                .map(|i| (AnyDataSet::Matrix(i.data), AnyElement::Matrix(i.g))),
            EgInstance::Sequence => SequenceAlgebra::new(p, q)
                .and_then(|a| generate_random_instance(&a, degree, seed, &tol))
                .map(|i| (AnyDataSet::Sequence(i.data), AnyElement::Sequence(i.g))),
        };
        match made {
            Ok((d, g)) => {
                *ds_out = Box::into_raw(Box::new(EgDataSet { inner: d }));
                *g_out = Box::into_raw(Box::new(EgElement { inner: g, p, q }));
                EgStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn eg_element_free(g: *mut EgElement) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Entry (row, col) of coefficient j (use j = 0 for the matrix instance).
#[no_mangle]
pub unsafe extern "C" fn eg_element_entry(
    g: *const EgElement,
    j: i64,
    row: usize,
    col: usize,
    re: *mut c_double,
    im: *mut c_double,
) -> EgStatus {
    guard(|| {
        let (Some(g), false, false) = (g.as_ref(), re.is_null(), im.is_null()) else {
            set_error("null argument");
            return EgStatus::NullArgument;
        };
        if row >= g.p || col >= g.q {
            set_error(format!("entry ({row}, {col}) outside {}x{}", g.p, g.q));
            return EgStatus::InvalidArgument;
        }
        let z = match &g.inner {
            AnyElement::Matrix(m) if j == 0 => m[(row, col)],
            AnyElement::Matrix(_) => {
                set_error("matrix-instance elements only have j = 0");
                return EgStatus::InvalidArgument;
            }
            AnyElement::Sequence(s) => s.coeff(j)[(row, col)],
        };
        *re = z.re;
        *im = z.im;
        EgStatus::Ok
    })
}

/// Serialize an element as an element-file JSON document. Free with `eg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn eg_element_to_json(g: *const EgElement, out: *mut *mut c_char) -> EgStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            set_error("null argument");
            return EgStatus::NullArgument;
        };
        let kind = match g.inner {
            AnyElement::Matrix(_) => InstanceKind::TriangularMatrix,
            AnyElement::Sequence(_) => InstanceKind::Sequence,
        };
        *out = into_c_string(to_text(&element_file_value(kind, g.p, g.q, "g", &g.inner, None)));
        EgStatus::Ok
    })
}
