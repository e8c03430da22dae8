//! C interface to `towerlen`.
//!
//! Every entry point returns a [`TowerlenStatus`]. On failure the message is
//! kept per thread and read back with [`towerlen_last_error`]. Strings handed
//! out by this library must be released with [`towerlen_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString, OsString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use towerlen::cli::verify::{run_suite, VerifyConfig};
use towerlen::ordinals::Ordinal;
use towerlen::towers::verdict::{self, Depths};
use towerlen::towers::{Tower, TowerSpec};
use towerlen::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TowerlenStatus {
    Ok = 0,
    Parse = 1,
    Shape = 2,
    Precondition = 3,
    Inexact = 4,
    NullArgument = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

/// A built tower. Create with [`towerlen_tower_from_json`], release with
/// [`towerlen_tower_free`].
pub struct TowerlenTower {
    tower: Tower,
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

fn status_of(e: &Error) -> TowerlenStatus {
    match e {
        Error::Parse(_) => TowerlenStatus::Parse,
        Error::Shape(_) => TowerlenStatus::Shape,
        Error::Precondition(_) => TowerlenStatus::Precondition,
        Error::Inexact(_) => TowerlenStatus::Inexact,
    }
}

struct Fail(TowerlenStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TowerlenStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TowerlenStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            TowerlenStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(TowerlenStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(TowerlenStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn give_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(TowerlenStatus::NullArgument, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|_| Fail(TowerlenStatus::Shape, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn to_json<T: serde::Serialize + ?Sized>(v: &T) -> Result<String, Fail> {
    serde_json::to_string(v).map_err(|e| Fail(TowerlenStatus::Shape, e.to_string()))
}

fn depths(depth: u32) -> Depths {
    let mut d = Depths::default();
    if depth > 0 {
        d.depth = depth as usize;
    }
    d
}

/// Message for the last failed call on this thread, or null. Owned by the
/// library and valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn towerlen_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn towerlen_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a tower from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn towerlen_tower_from_json(json: *const c_char, out: *mut *mut TowerlenTower) -> TowerlenStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(TowerlenStatus::NullArgument, "output pointer is null".into()));
        }
        let spec = TowerSpec::from_json(text(json, "json")?)?;
        let tower = Tower::new(&spec)?;
        *out = Box::into_raw(Box::new(TowerlenTower { tower }));
        Ok(())
    })
}

/// Releases a tower. Null is ignored.
///
/// # Safety
/// `t` must come from [`towerlen_tower_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn towerlen_tower_free(t: *mut TowerlenTower) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Rank of level `n`.
///
/// # Safety
/// `t` must be a live tower and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn towerlen_tower_dim(t: *const TowerlenTower, n: usize, out: *mut usize) -> TowerlenStatus {
    guard(|| {
        let t = t.as_ref().ok_or(Fail(TowerlenStatus::NullArgument, "tower is null".into()))?;
        let out = out.as_mut().ok_or(Fail(TowerlenStatus::NullArgument, "output pointer is null".into()))?;
        *out = t.tower.dim(n);
        Ok(())
    })
}

/// Mittag-Leffler verdict as JSON. A `depth` of zero picks the default.
///
/// # Safety
/// `t` must be a live tower and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn towerlen_tower_mittag_leffler(
    t: *const TowerlenTower,
    depth: u32,
    out: *mut *mut c_char,
) -> TowerlenStatus {
    guard(|| {
        let t = t.as_ref().ok_or(Fail(TowerlenStatus::NullArgument, "tower is null".into()))?;
        let v = verdict::mittag_leffler(&t.tower, &depths(depth))?;
        give_string(out, to_json(&v)?)
    })
}

/// Mittag-Leffler length report as JSON, searching ordinals up to `max_alpha`
/// (null means `w`). A `depth` of zero picks the default.
///
/// # Safety
/// `t` must be a live tower, `max_alpha` null or a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn towerlen_tower_length(
    t: *const TowerlenTower,
    max_alpha: *const c_char,
    depth: u32,
    out: *mut *mut c_char,
) -> TowerlenStatus {
    guard(|| {
        let t = t.as_ref().ok_or(Fail(TowerlenStatus::NullArgument, "tower is null".into()))?;
        let max = if max_alpha.is_null() { Ordinal::omega() } else { text(max_alpha, "max_alpha")?.parse::<Ordinal>()? };
        let r = verdict::ml_length(&t.tower, &max, &depths(depth))?;
        give_string(out, to_json(&r)?)
    })
}

/// Runs a named verification suite and writes its report as JSON.
/// A `depth` of zero picks the suite default.
///
/// # Safety
/// `suite` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn towerlen_verify(
    suite: *const c_char,
    seed: u64,
    depth: u32,
    out: *mut *mut c_char,
) -> TowerlenStatus {
    guard(|| {
        let cfg = VerifyConfig { seed, depth: (depth > 0).then_some(depth as usize), alpha: None };
        let r = run_suite(text(suite, "suite")?, &cfg)?;
        give_string(out, to_json(&r)?)
    })
}

/// Runs the command line with `args_json`, a JSON array of argument strings
/// without the program name. Output goes to `out` and the process exit code to
/// `exit_code`.
///
/// # Safety
/// `args_json` must be a NUL-terminated string; `out` and `exit_code` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn towerlen_run(
    args_json: *const c_char,
    out: *mut *mut c_char,
    exit_code: *mut i32,
) -> TowerlenStatus {
    guard(|| {
        let exit = exit_code.as_mut().ok_or(Fail(TowerlenStatus::NullArgument, "exit_code is null".into()))?;
        let args: Vec<String> = serde_json::from_str(text(args_json, "args_json")?)
            .map_err(|e| Fail(TowerlenStatus::Parse, format!("args_json: {e}")))?;
        let argv = std::iter::once(OsString::from("towerlen")).chain(args.into_iter().map(OsString::from));
        let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
        *exit = towerlen::cli::run(argv, &mut stdout, &mut stderr);
        if *exit != 0 && !stderr.is_empty() {
            set_error(String::from_utf8_lossy(&stderr).trim_end().to_string());
        }
        give_string(out, String::from_utf8_lossy(&stdout).into_owned())
    })
}
