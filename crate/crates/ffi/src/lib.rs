//! C ABI over `gxbtc`.
//!
//! Theories are passed as opaque `GxTheoryHandle` pointers owned by the
//! caller and released with [`gx_theory_free`]. Every fallible call returns a
//! [`GxStatus`]; on failure [`gx_last_error`] yields a message for the calling
//! thread. Strings returned through out-pointers are released with
//! [`gx_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use gxbtc::consistency::{check_all, CheckOptions};
use gxbtc::constructions::{fixtures, trivial_extension};
use gxbtc::equivalence::theories_equivalent;
use gxbtc::groups::cohomology::{cohomology, CoefficientModule};
use gxbtc::groups::{CochainFile, FiniteGroup, FiniteModule, PhaseCochain};
use gxbtc::phase::lcm;
use gxbtc::torsor::{apply_torsor, solve_cocycleator, t_from_file, TorsorInput};
use gxbtc::{Error, GxTheory};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON, unreadable file, or data violating the theory's rules.
    InvalidData = 3,
    /// A precondition of the requested operation does not hold.
    Precondition = 4,
    /// The requested root order cannot represent the needed classes.
    RootOrderTooSmall = 5,
    /// The search budget ran out before a decision.
    BudgetExceeded = 6,
    /// The relative obstruction of `t` is not a coboundary.
    Obstructed = 7,
    /// Internal failure, including caught panics.
    Internal = 8,
}

/// Opaque handle to a G-crossed braided theory.
pub struct GxTheoryHandle {
    theory: GxTheory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(GxStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::RootOrderTooSmall { .. } => GxStatus::RootOrderTooSmall,
            Error::BudgetExceeded(_) => GxStatus::BudgetExceeded,
            Error::Precondition(_) => GxStatus::Precondition,
            Error::MatchFailure(_)
            | Error::RepresentativeDependent { .. }
            | Error::RestrictionMismatch(_)
            | Error::Overflow => GxStatus::Internal,
            _ => GxStatus::InvalidData,
        };
        Fail(status, e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(GxStatus::InvalidData, e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status and last-error message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GxStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            GxStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(GxStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(GxStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn theory_arg<'a>(p: *const GxTheoryHandle, what: &str) -> Result<&'a GxTheory, Fail> {
    p.as_ref()
        .map(|h| &h.theory)
        .ok_or_else(|| Fail(GxStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(GxStatus::NullPointer, format!("{what} is null")));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_theory(out: *mut *mut GxTheoryHandle, theory: GxTheory) -> Result<(), Fail> {
    write_out(out, Box::into_raw(Box::new(GxTheoryHandle { theory })), "out")
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(GxStatus::Internal, "string contains NUL".into()))?;
    write_out(out, c.into_raw(), "out")
}

fn group(spec: &str) -> Result<Arc<FiniteGroup>, Fail> {
    Ok(Arc::new(FiniteGroup::parse(spec)?))
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a theory handle. Null is ignored.
///
/// # Safety
/// `t` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gx_theory_free(t: *mut GxTheoryHandle) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Parses a theory from its JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_theory_from_json(json: *const c_char, out: *mut *mut GxTheoryHandle) -> GxStatus {
    guard(|| write_theory(out, GxTheory::from_json(str_arg(json, "json")?)?))
}

/// Loads a theory from a JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_theory_load(path: *const c_char, out: *mut *mut GxTheoryHandle) -> GxStatus {
    guard(|| write_theory(out, GxTheory::load(str_arg(path, "path")?)?))
}

/// Builds a named fixture (`toric-code`, `semion`, `double-semion`, `z4`, ...).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_theory_fixture(name: *const c_char, out: *mut *mut GxTheoryHandle) -> GxStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let th = fixtures::by_name(name).ok_or_else(|| Fail(GxStatus::InvalidData, format!("unknown fixture {name}")))?;
        write_theory(out, th)
    })
}

/// Serializes a theory to JSON; free the result with [`gx_string_free`].
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_theory_to_json(t: *const GxTheoryHandle, out: *mut *mut c_char) -> GxStatus {
    guard(|| write_string(out, theory_arg(t, "theory")?.to_json()))
}

/// Number of simple objects, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gx_theory_num_charges(t: *const GxTheoryHandle) -> usize {
    t.as_ref().map_or(0, |h| h.theory.num_charges())
}

/// Order of the symmetry group, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gx_theory_group_order(t: *const GxTheoryHandle) -> usize {
    t.as_ref().map_or(0, |h| h.theory.group().order())
}

/// Runs every consistency equation with up to `max_defects` nontrivial
/// defects. Writes the worst residual and whether all equations passed
/// within `tol`. Table validation failures count as not passed.
///
/// # Safety
/// `t` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_theory_check(
    t: *const GxTheoryHandle,
    tol: f64,
    max_defects: usize,
    out_worst: *mut f64,
    out_passed: *mut bool,
) -> GxStatus {
    guard(|| {
        let th = theory_arg(t, "theory")?;
        if !(tol > 0.0) || max_defects > 4 {
            return Err(Fail(GxStatus::InvalidData, "tol must be positive and max_defects at most 4".into()));
        }
        let reports = check_all(th, &CheckOptions { tol, max_defects });
        let worst = reports.iter().map(|r| r.worst_residual).fold(0.0, f64::max);
        let passed = th.validate().is_empty() && reports.iter().all(|r| r.passed());
        write_out(out_worst, worst, "out_worst")?;
        write_out(out_passed, passed, "out_passed")
    })
}

/// Trivial extension of `c0` by the group described by `group_spec`
/// (for example `"Z2"`, `"Z2xZ3"`, `"S3"`).
///
/// # Safety
/// `c0` must be a live handle, `group_spec` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gx_trivial_extension(
    c0: *const GxTheoryHandle,
    group_spec: *const c_char,
    out: *mut *mut GxTheoryHandle,
) -> GxStatus {
    guard(|| {
        let c0 = theory_arg(c0, "c0")?;
        let g = group(str_arg(group_spec, "group_spec")?)?;
        write_theory(out, trivial_extension(c0, g)?)
    })
}

/// Applies the torsor `(t, X)` given as cochain JSON documents. When `x_json`
/// is null a cocycleator is solved for with root order `root_order` (0 picks
/// the lcm of |G|, the number of abelian charges and 8); an obstructed `t`
/// returns [`GxStatus::Obstructed`].
///
/// # Safety
/// `theory` must be a live handle, `t_json` a NUL-terminated string,
/// `x_json` null or a NUL-terminated string, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gx_apply_torsor(
    theory: *const GxTheoryHandle,
    t_json: *const c_char,
    x_json: *const c_char,
    root_order: u64,
    out: *mut *mut GxTheoryHandle,
) -> GxStatus {
    guard(|| {
        let th = theory_arg(theory, "theory")?;
        let t_file: CochainFile = serde_json::from_str(str_arg(t_json, "t_json")?)?;
        let t = t_from_file(th, &t_file)?;
        let x = if x_json.is_null() {
            let n = match root_order {
                0 => lcm(lcm(th.group().order() as u64, th.abelian_subgroup()?.order() as u64), 8),
                n => n,
            };
            solve_cocycleator(th, &t, n)?
                .ok_or_else(|| Fail(GxStatus::Obstructed, "the relative obstruction of t is not a coboundary".into()))?
        } else {
            let file: CochainFile = serde_json::from_str(str_arg(x_json, "x_json")?)?;
            PhaseCochain::from_file(&file, th.group().clone())?
        };
        write_theory(out, apply_torsor(th, &TorsorInput::with_x(t, x))?)
    })
}

/// Decides gauge-and-relabeling equivalence. `budget` bounds the number of
/// relabelings visited; running out returns [`GxStatus::BudgetExceeded`].
///
/// # Safety
/// `a` and `b` must be live handles; `out_equivalent` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gx_theories_equivalent(
    a: *const GxTheoryHandle,
    b: *const GxTheoryHandle,
    budget: usize,
    tol: f64,
    out_equivalent: *mut bool,
) -> GxStatus {
    guard(|| {
        let (a, b) = (theory_arg(a, "a")?, theory_arg(b, "b")?);
        let w = theories_equivalent(a, b, budget, tol)?;
        write_out(out_equivalent, w.is_some(), "out_equivalent")
    })
}

/// Structure of `H^degree(G, M)` as text such as `"Z2xZ2"` or `"0"`. `coeff`
/// is `"u1"` (with `root_order`, 0 for the default) or `"z<N>"` with trivial
/// action. Free the result with [`gx_string_free`].
///
/// # Safety
/// `group_spec` and `coeff` must be NUL-terminated strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gx_cohomology_structure(
    group_spec: *const c_char,
    coeff: *const c_char,
    degree: usize,
    root_order: u64,
    out: *mut *mut c_char,
) -> GxStatus {
    guard(|| {
        let g = group(str_arg(group_spec, "group_spec")?)?;
        let coeff = str_arg(coeff, "coeff")?;
        let module = match coeff {
            "u1" => CoefficientModule::RootsOfUnity(match root_order {
                0 => lcm(g.order() as u64, 8),
                n => n,
            }),
            z if z.starts_with('z') || z.starts_with('Z') => {
                let n: u64 = z[1..]
                    .parse()
                    .map_err(|_| Fail(GxStatus::InvalidData, format!("bad coefficient {coeff}")))?;
                CoefficientModule::AbelianCharges(FiniteModule::trivial(&[n], g.order()))
            }
            _ => return Err(Fail(GxStatus::InvalidData, format!("bad coefficient {coeff}"))),
        };
        write_string(out, cohomology(degree, g, &module)?.structure())
    })
}
