use std::ffi::{c_char, CStr, CString};
use std::ptr;

use serde_json::Value;
use towerlen_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(p: *mut c_char) -> Value {
    assert!(!p.is_null());
    let v = serde_json::from_str(CStr::from_ptr(p).to_str().unwrap()).unwrap();
    towerlen_string_free(p);
    v
}

unsafe fn last_error() -> String {
    let p = towerlen_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

const XP: &str = r#"{"tail": {"kind": "constant", "dim": 1, "bond": {"rows": [[3]]}}}"#;

#[test]
fn tower_handle_round_trip() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(towerlen_tower_from_json(c(XP).as_ptr(), &mut t), TowerlenStatus::Ok);
        assert!(towerlen_last_error().is_null());

        let mut dim = 0usize;
        assert_eq!(towerlen_tower_dim(t, 4, &mut dim), TowerlenStatus::Ok);
        assert_eq!(dim, 1);

        let mut out = ptr::null_mut();
        assert_eq!(towerlen_tower_length(t, c("w").as_ptr(), 16, &mut out), TowerlenStatus::Ok);
        let v = take(out);
        assert_eq!(v["length"]["exactly"], "1");

        let mut out = ptr::null_mut();
        assert_eq!(towerlen_tower_mittag_leffler(t, 0, &mut out), TowerlenStatus::Ok);
        assert_eq!(take(out)["verdict"], "fails");

        towerlen_tower_free(t);
        towerlen_tower_free(ptr::null_mut());
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(towerlen_tower_from_json(c("{oops").as_ptr(), &mut t), TowerlenStatus::Parse);
        assert!(t.is_null());
        assert!(last_error().contains("parse"));

        assert_eq!(towerlen_tower_from_json(ptr::null(), &mut t), TowerlenStatus::NullArgument);
        assert_eq!(towerlen_tower_from_json(c(XP).as_ptr(), ptr::null_mut()), TowerlenStatus::NullArgument);

        let bad = [0xffu8, 0];
        assert_eq!(towerlen_tower_from_json(bad.as_ptr() as *const c_char, &mut t), TowerlenStatus::InvalidUtf8);

        let mut out = ptr::null_mut();
        assert_eq!(towerlen_verify(c("nope").as_ptr(), 1, 0, &mut out), TowerlenStatus::Parse);
        assert!(out.is_null());

        let mut dim = 0usize;
        assert_eq!(towerlen_tower_dim(ptr::null(), 0, &mut dim), TowerlenStatus::NullArgument);
    }
}

#[test]
fn verify_suite_is_deterministic() {
    unsafe {
        let run = || {
            let mut out = ptr::null_mut();
            assert_eq!(towerlen_verify(c("ordinals").as_ptr(), 7, 0, &mut out), TowerlenStatus::Ok);
            take(out)
        };
        let a = run();
        assert_eq!(a["pass"], true);
        assert_eq!(a, run());
    }
}

#[test]
fn command_line_entry_point() {
    unsafe {
        let mut out = ptr::null_mut();
        let mut code = -1;
        let args = c(r#"["ord", "fundamental", "w^2", "2", "--json"]"#);
        assert_eq!(towerlen_run(args.as_ptr(), &mut out, &mut code), TowerlenStatus::Ok);
        assert_eq!(code, 0);
        assert_eq!(take(out)["result"]["value"], "w*3+1");

        let mut out = ptr::null_mut();
        let args = c(r#"["tree", "index", "0", "--json"]"#);
        assert_eq!(towerlen_run(args.as_ptr(), &mut out, &mut code), TowerlenStatus::Ok);
        assert_eq!(code, 3);
        towerlen_string_free(out);
        assert!(!last_error().is_empty());

        assert_eq!(towerlen_run(c("[1]").as_ptr(), &mut out, &mut code), TowerlenStatus::Parse);
    }
}
