//! Drives the C surface the way a foreign caller would: everything goes
//! through the extern "C" functions, strings cross as NUL-terminated
//! buffers, and every output is freed through the library.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use mrd_ffi::{
    mrd_eval_csv, mrd_last_error_message, mrd_spec_build_csv, mrd_spec_ell, mrd_spec_entry,
    mrd_spec_free, mrd_spec_inverse, mrd_spec_mul, mrd_spec_new, mrd_spec_seq_json,
    mrd_spec_tp_json, mrd_string_free, MrdSpec, MrdStatus,
};

unsafe fn take_string(owned: *mut c_char) -> String {
    assert!(!owned.is_null(), "expected a string, got NULL");
    let text = CStr::from_ptr(owned).to_str().expect("library strings are UTF-8").to_owned();
    mrd_string_free(owned);
    text
}

unsafe fn last_error() -> String {
    take_string(mrd_last_error_message())
}

fn build_spec(g: &str, multipliers: &[&str], square: bool, order: usize) -> *mut MrdSpec {
    let g_c = CString::new(g).unwrap();
    let f_c: Vec<CString> = multipliers.iter().map(|s| CString::new(*s).unwrap()).collect();
    let f_ptrs: Vec<*const c_char> = f_c.iter().map(|s| s.as_ptr()).collect();
    let mut spec: *mut MrdSpec = ptr::null_mut();
    let status = unsafe {
        mrd_spec_new(
            g_c.as_ptr(),
            f_ptrs.as_ptr(),
            f_ptrs.len(),
            square as i32,
            order,
            &mut spec,
        )
    };
    assert_eq!(status, MrdStatus::Ok, "spec construction failed: {}", unsafe { last_error() });
    spec
}

unsafe fn entry(spec: *const MrdSpec, n: usize, k: usize) -> String {
    let mut cell: *mut c_char = ptr::null_mut();
    assert_eq!(mrd_spec_entry(spec, n, k, &mut cell), MrdStatus::Ok);
    take_string(cell)
}

#[test]
fn pascal_round_trip_through_the_c_surface() {
    let pascal = build_spec("1/(1-t)", &["t/(1-t)"], false, 12);
    unsafe {
        assert_eq!(mrd_spec_ell(pascal), 1);
        assert_eq!(entry(pascal, 4, 2), "6");
        assert_eq!(entry(pascal, 6, 3), "20");

        let mut csv: *mut c_char = ptr::null_mut();
        assert_eq!(mrd_spec_build_csv(pascal, 4, 4, &mut csv), MrdStatus::Ok);
        let text = take_string(csv);
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().last().unwrap(), "1,3,3,1");

        // The inverse carries signed binomials, and the product with it
        // returns to the identity.
        let mut inverse: *mut MrdSpec = ptr::null_mut();
        assert_eq!(mrd_spec_inverse(pascal, &mut inverse), MrdStatus::Ok);
        assert_eq!(entry(inverse, 2, 1), "-2");
        assert_eq!(entry(inverse, 4, 1), "-4");

        let mut product: *mut MrdSpec = ptr::null_mut();
        assert_eq!(mrd_spec_mul(pascal, inverse, &mut product), MrdStatus::Ok);
        for n in 0..6 {
            for k in 0..=n {
                let expected = if n == k { "1" } else { "0" };
                assert_eq!(entry(product, n, k), expected, "product entry ({n}, {k})");
            }
        }

        mrd_spec_free(product);
        mrd_spec_free(inverse);
        mrd_spec_free(pascal);
    }
}

#[test]
fn multiple_spec_exposes_the_strided_characterization() {
    let cyclic = build_spec(
        "1/(1-t^3)",
        &["t/(1-t^3)", "t*(1+t^3)", "t/(1+t^3)"],
        false,
        27,
    );
    unsafe {
        assert_eq!(mrd_spec_ell(cyclic), 3);

        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(mrd_spec_seq_json(cyclic, 4, &mut json), MrdStatus::Ok);
        let parsed: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(parsed["ell"], 3);
        assert_eq!(parsed["stride"], 3);
        assert_eq!(parsed["A"], serde_json::json!(["1", "1", "0", "0"]));
        assert_eq!(parsed["Z"][0], serde_json::json!(["1", "0", "0", "0"]));
        assert_eq!(parsed["Z"][1], serde_json::json!(["2", "-1", "1", "-1"]));
        assert_eq!(parsed["Z"][2], serde_json::json!(["3", "-4", "8", "-16"]));

        mrd_spec_free(cyclic);
    }
}

#[test]
fn positivity_reports_serialize_with_budget_refusals() {
    let pascal = build_spec("1/(1-t)", &["t/(1-t)"], false, 12);
    unsafe {
        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(mrd_spec_tp_json(pascal, 6, 2, 0, &mut json), MrdStatus::Ok);
        let clean: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(clean["order"], 2);
        assert_eq!(clean["block"], 6);
        assert_eq!(clean["ok"], true);
        assert!(clean["witness"].is_null());

        // 6 choose 1 squared plus 6 choose 2 squared minors; a budget of 50
        // refuses the enumeration but the report still serializes.
        let mut refused: *mut c_char = ptr::null_mut();
        assert_eq!(mrd_spec_tp_json(pascal, 6, 2, 50, &mut refused), MrdStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take_string(refused)).unwrap();
        assert_eq!(report["ok"], false);
        assert_eq!(report["budget"]["required"], "261");
        assert_eq!(report["budget"]["limit"], 50);

        mrd_spec_free(pascal);
    }
}

#[test]
fn expression_evaluation_returns_csv_cells() {
    unsafe {
        let expr = CString::new("catalan()").unwrap();
        let mut csv: *mut c_char = ptr::null_mut();
        assert_eq!(mrd_eval_csv(expr.as_ptr(), 5, &mut csv), MrdStatus::Ok);
        assert_eq!(take_string(csv), "1,1,2,5,14,42");
    }
}

#[test]
fn failures_map_to_status_codes_and_messages() {
    unsafe {
        // Syntax errors carry the byte position through the message slot.
        let broken = CString::new("t^").unwrap();
        let mut sink: *mut c_char = ptr::null_mut();
        assert_eq!(mrd_eval_csv(broken.as_ptr(), 4, &mut sink), MrdStatus::Syntax);
        assert!(sink.is_null());
        assert!(last_error().contains("byte 2"), "message should name the byte");

        // Null arguments are rejected before anything runs.
        let mut spec: *mut MrdSpec = ptr::null_mut();
        assert_eq!(
            mrd_spec_new(ptr::null(), ptr::null(), 0, 0, 8, &mut spec),
            MrdStatus::NullArgument
        );
        assert!(spec.is_null());

        // Non-UTF-8 bytes are refused rather than lossily decoded.
        let latin1 = CString::new(vec![0xffu8]).unwrap();
        assert_eq!(mrd_eval_csv(latin1.as_ptr(), 4, &mut sink), MrdStatus::InvalidUtf8);

        // Domain errors: a multiplier with the wrong valuation.
        let g = CString::new("1/(1-t)").unwrap();
        let bad_f = CString::new("1+t").unwrap();
        let fs = [bad_f.as_ptr()];
        assert_eq!(
            mrd_spec_new(g.as_ptr(), fs.as_ptr(), 1, 0, 8, &mut spec),
            MrdStatus::Domain
        );

        // Out-of-range entries name the truncation problem.
        let pascal = build_spec("1/(1-t)", &["t/(1-t)"], false, 6);
        let mut cell: *mut c_char = ptr::null_mut();
        assert_eq!(mrd_spec_entry(pascal, 40, 1, &mut cell), MrdStatus::OutOfRange);
        assert!(cell.is_null());

        // Shape mismatches in the group law.
        let cyclic = build_spec("1/(1-t^3)", &["t", "t", "t"], false, 9);
        let mut product: *mut MrdSpec = ptr::null_mut();
        assert_eq!(mrd_spec_mul(pascal, cyclic, &mut product), MrdStatus::Domain);
        assert!(last_error().contains("classical"));

        mrd_spec_free(cyclic);
        mrd_spec_free(pascal);
    }
}
