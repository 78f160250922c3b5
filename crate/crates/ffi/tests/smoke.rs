//! Exercises the C surface end to end from Rust: handle lifecycle, status
//! codes, last-error messages, and the JSON documents, including agreement
//! with the underlying library on a normal form.

use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use symtensor::json::normal_form_to_json;
use symtensor::lang::{normalize, parse, CurvatureClass};
use symtensor_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    st_string_free(p);
    s
}

unsafe fn last_error() -> String {
    CStr::from_ptr(st_last_error_message()).to_str().unwrap().to_string()
}

#[test]
fn geometry_handles_and_null_checks() {
    unsafe {
        let mut geo: *mut StGeometry = ptr::null_mut();
        assert_eq!(st_geometry_flat(2, 1, &mut geo), StStatus::StOk);
        assert_eq!(st_geometry_dim(geo), 3);
        assert!(st_geometry_is_flat(geo));

        // null handles degrade, never crash
        assert_eq!(st_geometry_dim(ptr::null()), 0);
        assert!(!st_geometry_is_flat(ptr::null()));
        let mut t: *mut StTensor = ptr::null_mut();
        let text = cstr("u1");
        assert_eq!(
            st_tensor_parse(ptr::null(), text.as_ptr(), &mut t),
            StStatus::StNullPointer
        );
        assert_eq!(
            st_geometry_flat(2, 1, ptr::null_mut()),
            StStatus::StNullPointer
        );

        let mut hyp: *mut StGeometry = ptr::null_mut();
        assert_eq!(st_geometry_hyperbolic(2, &mut hyp), StStatus::StOk);
        assert!(!st_geometry_is_flat(hyp));
        st_geometry_free(hyp);
        st_geometry_free(geo);
        st_geometry_free(ptr::null_mut());
    }
}

#[test]
fn tensor_parse_apply_render_roundtrip() {
    unsafe {
        let mut geo: *mut StGeometry = ptr::null_mut();
        assert_eq!(st_geometry_flat(2, 1, &mut geo), StStatus::StOk);

        let mut t: *mut StTensor = ptr::null_mut();
        let text = cstr("u1^2 + x1*u2");
        assert_eq!(st_tensor_parse(geo, text.as_ptr(), &mut t), StStatus::StOk);
        assert!(!st_tensor_is_zero(t));

        // the number operator scales each rank part by its rank
        let mut nt: *mut StTensor = ptr::null_mut();
        let nexpr = cstr("N");
        assert_eq!(st_apply(nexpr.as_ptr(), t, &mut nt), StStatus::StOk);
        let mut expect: *mut StTensor = ptr::null_mut();
        let etext = cstr("2*u1^2 + x1*u2");
        assert_eq!(st_tensor_parse(geo, etext.as_ptr(), &mut expect), StStatus::StOk);
        assert!(st_tensor_equal(nt, expect));

        // render parses back to the same tensor
        let mut rendered: *mut c_char = ptr::null_mut();
        assert_eq!(st_tensor_render(nt, &mut rendered), StStatus::StOk);
        let s = take_string(rendered);
        let round = cstr(&s);
        let mut back: *mut StTensor = ptr::null_mut();
        assert_eq!(st_tensor_parse(geo, round.as_ptr(), &mut back), StStatus::StOk);
        assert!(st_tensor_equal(back, nt));

        // arithmetic: (t + t) - t == t
        let mut sum: *mut StTensor = ptr::null_mut();
        assert_eq!(st_tensor_add(t, t, &mut sum), StStatus::StOk);
        let mut diff: *mut StTensor = ptr::null_mut();
        assert_eq!(st_tensor_sub(sum, t, &mut diff), StStatus::StOk);
        assert!(st_tensor_equal(diff, t));

        for h in [t, nt, expect, back, sum, diff] {
            st_tensor_free(h);
        }
        st_geometry_free(geo);
    }
}

#[test]
fn parse_failure_reports_position() {
    unsafe {
        let mut geo: *mut StGeometry = ptr::null_mut();
        assert_eq!(st_geometry_flat(2, 0, &mut geo), StStatus::StOk);
        let mut t: *mut StTensor = ptr::null_mut();
        let bad = cstr("u1 +* 3");
        assert_eq!(st_tensor_parse(geo, bad.as_ptr(), &mut t), StStatus::StParseError);
        assert!(t.is_null());
        assert!(last_error().contains("parse error at byte"), "{}", last_error());
        st_geometry_free(geo);
    }
}

#[test]
fn singular_weight_is_reported() {
    unsafe {
        let mut geo: *mut StGeometry = ptr::null_mut();
        assert_eq!(st_geometry_flat(2, 0, &mut geo), StStatus::StOk);
        let mut t: *mut StTensor = ptr::null_mut();
        let text = cstr("u1");
        assert_eq!(st_tensor_parse(geo, text.as_ptr(), &mut t), StStatus::StOk);

        // rank one in two flat dimensions sits exactly on C = 1
        let mut out: *mut StTensor = ptr::null_mut();
        let expr = cstr("inv(C - 1)");
        assert_eq!(st_apply(expr.as_ptr(), t, &mut out), StStatus::StSingularSpectrum);
        assert!(!last_error().is_empty());

        st_tensor_free(t);
        st_geometry_free(geo);
    }
}

#[test]
fn verify_json_passes_on_curved_background() {
    unsafe {
        let mut geo: *mut StGeometry = ptr::null_mut();
        assert_eq!(st_geometry_hyperbolic(2, &mut geo), StStatus::StOk);
        let suite = cstr("sp2");
        let mut doc: *mut c_char = ptr::null_mut();
        assert_eq!(
            st_verify_json(geo, suite.as_ptr(), 11, 2, 3, 2, &mut doc),
            StStatus::StOk
        );
        let v: serde_json::Value = serde_json::from_str(&take_string(doc)).unwrap();
        assert_eq!(v["pass"], serde_json::Value::Bool(true));
        assert!(v["identities"].as_array().unwrap().len() >= 3);

        let bad = cstr("nonsense");
        let mut doc2: *mut c_char = ptr::null_mut();
        assert_eq!(
            st_verify_json(geo, bad.as_ptr(), 11, 2, 3, 2, &mut doc2),
            StStatus::StInvalidArgument
        );
        st_geometry_free(geo);
    }
}

#[test]
fn normalize_json_matches_library() {
    unsafe {
        let expr = cstr("tr g");
        let mut doc: *mut c_char = ptr::null_mut();
        assert_eq!(st_normalize_json(expr.as_ptr(), 3, true, &mut doc), StStatus::StOk);
        let got = take_string(doc);

        let nf = normalize(&parse("tr g").unwrap(), 3, CurvatureClass::Flat);
        let want = serde_json::to_string_pretty(&normal_form_to_json(&nf)).unwrap();
        assert_eq!(got, want);

        let mut doc2: *mut c_char = ptr::null_mut();
        assert_eq!(
            st_normalize_json(expr.as_ptr(), 0, true, &mut doc2),
            StStatus::StInvalidArgument
        );
    }
}

#[test]
fn decompose_json_lists_slices() {
    unsafe {
        let mut geo: *mut StGeometry = ptr::null_mut();
        assert_eq!(st_geometry_flat(3, 0, &mut geo), StStatus::StOk);
        let mut t: *mut StTensor = ptr::null_mut();
        assert_eq!(st_tensor_random(geo, 5, 2, 1, &mut t), StStatus::StOk);
        assert!(!st_tensor_is_zero(t));

        let mut doc: *mut c_char = ptr::null_mut();
        assert_eq!(st_decompose_json(t, &mut doc), StStatus::StOk);
        let v: serde_json::Value = serde_json::from_str(&take_string(doc)).unwrap();
        assert!(!v.as_array().unwrap().is_empty());

        st_tensor_free(t);
        st_geometry_free(geo);
    }
}

#[test]
fn trace_power_report_json() {
    unsafe {
        let mut doc: *mut c_char = ptr::null_mut();
        assert_eq!(st_trace_power_report_json(1, 3, &mut doc), StStatus::StOk);
        let v: serde_json::Value = serde_json::from_str(&take_string(doc)).unwrap();
        assert_eq!(v["verdict"], "constant_ratio");
        assert_eq!(v["constant"], "-16");
        assert_eq!(v["falling_form_matches"], true);

        let mut doc2: *mut c_char = ptr::null_mut();
        assert_eq!(st_trace_power_report_json(0, 3, &mut doc2), StStatus::StInvalidArgument);
    }
}

#[test]
fn detour_report_flat_only() {
    unsafe {
        let mut flat: *mut StGeometry = ptr::null_mut();
        assert_eq!(st_geometry_flat(3, 0, &mut flat), StStatus::StOk);
        let mut doc: *mut c_char = ptr::null_mut();
        assert_eq!(st_detour_report_json(flat, 9, 2, &mut doc), StStatus::StOk);
        let v: serde_json::Value = serde_json::from_str(&take_string(doc)).unwrap();
        assert_eq!(v["dim"], 3);
        assert!(!v["gauge"].as_array().unwrap().is_empty());

        let mut hyp: *mut StGeometry = ptr::null_mut();
        assert_eq!(st_geometry_hyperbolic(3, &mut hyp), StStatus::StOk);
        let mut doc2: *mut c_char = ptr::null_mut();
        assert_eq!(st_detour_report_json(hyp, 9, 2, &mut doc2), StStatus::StUnsupported);

        st_geometry_free(hyp);
        st_geometry_free(flat);
    }
}

#[test]
fn simulate_json_conserves_energy() {
    unsafe {
        let mut geo: *mut StGeometry = ptr::null_mut();
        assert_eq!(st_geometry_flat(2, 0, &mut geo), StStatus::StOk);
        let x = [0.1, 0.2];
        let pi = [0.3, -0.4];
        let zr = [0.5, 0.1];
        let zi = [-0.2, 0.3];
        let mut doc: *mut c_char = ptr::null_mut();
        assert_eq!(
            st_simulate_json(
                geo,
                x.as_ptr(),
                pi.as_ptr(),
                zr.as_ptr(),
                zi.as_ptr(),
                1e-2,
                100,
                &mut doc
            ),
            StStatus::StOk
        );
        let v: serde_json::Value = serde_json::from_str(&take_string(doc)).unwrap();
        assert_eq!(v["steps"], 100);
        assert!(v["drift"]["max"].as_f64().unwrap() <= 1e-10);
        assert!((v["final_state"]["time"].as_f64().unwrap() - 1.0).abs() < 1e-12);

        let mut doc2: *mut c_char = ptr::null_mut();
        assert_eq!(
            st_simulate_json(
                geo,
                x.as_ptr(),
                pi.as_ptr(),
                zr.as_ptr(),
                zi.as_ptr(),
                0.0,
                100,
                &mut doc2
            ),
            StStatus::StInvalidArgument
        );
        st_geometry_free(geo);
    }
}
