//! C ABI over the sprbench core.
//!
//! Structures and colorings cross the boundary as opaque handles; everything
//! else is JSON text. Every function returns an [`SprStatus`]; on an error
//! status `spr_last_error` describes what went wrong. Strings returned
//! through out-parameters are owned by the caller and released with
//! `spr_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde_json::json;
use sprbench::arrow::{arrow_check, ArrowQuery, Mode, Outcome};
use sprbench::colorings::{find_type_homogeneous, random_coloring, Coloring};
use sprbench::structures::{make_canonical, BignessLevel, ClassKind, FinStructure};
use sprbench::types::enumerate_types;
use sprbench::Error;

/// Result codes. The first three mirror the command-line exit statuses.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SprStatus {
    /// Success, or the relation holds.
    Ok = 0,
    /// The relation fails, or no homogeneous set exists.
    Fails = 1,
    /// Undecided within the budget.
    Unknown = 2,
    NullPointer = 3,
    InvalidArgument = 4,
    Parse = 5,
    Precondition = 6,
    TooLarge = 7,
    Internal = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SprMode {
    Exhaustive = 0,
    /// `effort` is the number of sampled colorings.
    Randomized = 1,
    /// `effort` is the number of proposed flips.
    CounterexampleSearch = 2,
}

/// Opaque handle to a finite structure.
pub struct SprStructure(FinStructure);

/// Opaque handle to a coloring; it keeps its own copy of the base structure.
pub struct SprColoring(Coloring);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> SprStatus {
    match e {
        Error::InvalidClass(_)
        | Error::ElementOutOfRange { .. }
        | Error::NotIncreasing(_)
        | Error::InvalidSelection(_)
        | Error::NotMember(_) => SprStatus::InvalidArgument,
        Error::Schema(_) | Error::Json(_) => SprStatus::Parse,
        Error::Precondition(_) | Error::SupportOverflow(_) => SprStatus::Precondition,
        Error::TooLarge(_) | Error::ExhaustiveCeiling { .. } => SprStatus::TooLarge,
        Error::Internal(_) | Error::Io(_) => SprStatus::Internal,
    }
}

struct Fail(SprStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `body`, turning errors and panics into a status plus last-error text.
fn guard(body: impl FnOnce() -> Result<SprStatus, Fail>) -> SprStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => {
            set_error("");
            status
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside sprbench");
            SprStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(SprStatus::NullPointer, "null pointer argument".into())
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(SprStatus::Parse, "argument is not UTF-8".into()))
}

unsafe fn class_arg(p: *const c_char) -> Result<ClassKind, Fail> {
    let kind: ClassKind = serde_json::from_str(text(p)?).map_err(Error::from)?;
    kind.validate()?;
    Ok(kind)
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    *out = CString::new(s).map_err(|_| Fail(SprStatus::Internal, "nul byte in output".into()))?.into_raw();
    Ok(())
}

unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn spr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn spr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Canonical `lambda`-big member of the class given as JSON, e.g.
/// `{"kind":"chi_or","chi":2}`.
///
/// # Safety
/// `class_json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spr_structure_canonical(
    class_json: *const c_char,
    lambda: u32,
    out: *mut *mut SprStructure,
) -> SprStatus {
    guard(|| {
        let s = make_canonical(class_arg(class_json)?, BignessLevel(lambda))?;
        put(out, SprStructure(s))?;
        Ok(SprStatus::Ok)
    })
}

/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spr_structure_from_json(json: *const c_char, out: *mut *mut SprStructure) -> SprStatus {
    guard(|| {
        let s = FinStructure::from_json(text(json)?)?;
        put(out, SprStructure(s))?;
        Ok(SprStatus::Ok)
    })
}

/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spr_structure_to_json(s: *const SprStructure, out: *mut *mut c_char) -> SprStatus {
    guard(|| {
        let text = get(s)?.0.to_json();
        put_string(out, text)?;
        Ok(SprStatus::Ok)
    })
}

/// Universe size, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spr_structure_size(s: *const SprStructure) -> usize {
    s.as_ref().map_or(0, |s| s.0.size())
}

/// # Safety
/// `s` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn spr_structure_free(s: *mut SprStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of increasing `arity`-types of the class, read at bigness `level`.
///
/// # Safety
/// `class_json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spr_type_count(class_json: *const c_char, arity: usize, level: u32, out: *mut usize) -> SprStatus {
    guard(|| {
        let n = enumerate_types(class_arg(class_json)?, arity, BignessLevel(level))?.len();
        if out.is_null() {
            return Err(null());
        }
        *out = n;
        Ok(SprStatus::Ok)
    })
}

/// Seeded uniform coloring of the increasing `arity`-tuples of `s`.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spr_coloring_random(
    s: *const SprStructure,
    arity: usize,
    colors: u32,
    seed: u64,
    out: *mut *mut SprColoring,
) -> SprStatus {
    guard(|| {
        let col = random_coloring(&get(s)?.0, arity, colors, seed)?;
        put(out, SprColoring(col))?;
        Ok(SprStatus::Ok)
    })
}

/// # Safety
/// `s` must be a live handle, `json` a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spr_coloring_from_json(
    s: *const SprStructure,
    json: *const c_char,
    out: *mut *mut SprColoring,
) -> SprStatus {
    guard(|| {
        let col = Coloring::from_json(&get(s)?.0, text(json)?)?;
        put(out, SprColoring(col))?;
        Ok(SprStatus::Ok)
    })
}

/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spr_coloring_to_json(c: *const SprColoring, out: *mut *mut c_char) -> SprStatus {
    guard(|| {
        let text = get(c)?.0.to_json();
        put_string(out, text)?;
        Ok(SprStatus::Ok)
    })
}

/// # Safety
/// `c` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn spr_coloring_free(c: *mut SprColoring) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Searches for the lexicographically least `level`-big type-homogeneous
/// subset. Returns `Ok` and writes `{"subset", "witness", "nodes"}` when one
/// is found, `Fails` when the search proved there is none, and `Unknown`
/// when the node budget ran out. `out_json` is only written on `Ok`.
///
/// # Safety
/// `c` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spr_find_homogeneous(
    c: *const SprColoring,
    level: u32,
    budget: u64,
    out_json: *mut *mut c_char,
) -> SprStatus {
    guard(|| {
        let res = find_type_homogeneous(&get(c)?.0, BignessLevel(level), budget)?;
        match res.found {
            Some((subset, witness)) => {
                let doc = json!({"subset": subset, "witness": witness, "nodes": res.nodes});
                put_string(out_json, doc.to_string())?;
                Ok(SprStatus::Ok)
            }
            None if res.exhaustive => Ok(SprStatus::Fails),
            None => Ok(SprStatus::Unknown),
        }
    })
}

/// Decides `(lambda) -> (mu)^arity_colors` on the canonical member of the
/// class. The verdict JSON, including any refuting coloring, is written to
/// `out_json`; the status is `Ok`, `Fails` or `Unknown` accordingly.
///
/// # Safety
/// `class_json` must be a valid C string and `out_json` a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn spr_arrow_check(
    class_json: *const c_char,
    lambda: u32,
    mu: u32,
    arity: usize,
    colors: u32,
    mode: SprMode,
    effort: u64,
    seed: u64,
    out_json: *mut *mut c_char,
) -> SprStatus {
    guard(|| {
        let mode = match mode {
            SprMode::Exhaustive => Mode::Exhaustive,
            SprMode::Randomized => Mode::Randomized { samples: effort, seed },
            SprMode::CounterexampleSearch => Mode::CounterexampleSearch { budget: effort, seed },
        };
        let v = arrow_check(&ArrowQuery::new(class_arg(class_json)?, lambda, mu, arity, colors, mode))?;
        put_string(out_json, serde_json::to_string(&v.to_doc()).map_err(Error::from)?)?;
        Ok(match v.outcome {
            Outcome::Holds => SprStatus::Ok,
            Outcome::Fails(_) => SprStatus::Fails,
            Outcome::Unknown => SprStatus::Unknown,
        })
    })
}
