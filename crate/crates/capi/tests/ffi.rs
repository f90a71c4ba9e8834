//! Exercises the C ABI exactly as a foreign caller would: through raw
//! pointers and status codes.

use std::ffi::{c_char, CStr};
use std::ptr;

use zeta_blocks_capi::{
    zb_certificate_build, zb_certificate_free, zb_certificate_json, zb_certificate_passed,
    zb_certificate_verify, zb_last_error_message, zb_status_message, zb_string_free, zb_version,
    zb_word_blocks, ZbCertificate, ZbStatus,
};

fn cstr(s: &str) -> Vec<c_char> {
    s.bytes().map(|b| b as c_char).chain(std::iter::once(0)).collect()
}

fn read_static(ptr: *const c_char) -> String {
    assert!(!ptr.is_null());
    unsafe { CStr::from_ptr(ptr) }.to_str().expect("utf-8").to_string()
}

#[test]
fn version_matches_crate_metadata() {
    assert_eq!(read_static(zb_version()), env!("CARGO_PKG_VERSION"));
}

#[test]
fn word_blocks_roundtrip_and_sizing() {
    let word = cstr("01100101010010101");
    let mut written = 0usize;

    // sizing call: NULL buffer reports the required capacity
    let status = unsafe { zb_word_blocks(word.as_ptr(), ptr::null_mut(), 0, &mut written) };
    assert_eq!(status, ZbStatus::BufferTooSmall);
    assert_eq!(written, 4);

    let mut lengths = vec![0u32; written];
    let status = unsafe {
        zb_word_blocks(word.as_ptr(), lengths.as_mut_ptr(), lengths.len(), &mut written)
    };
    assert_eq!(status, ZbStatus::Ok);
    assert_eq!(lengths, vec![2, 2, 7, 6]);
}

#[test]
fn word_blocks_rejects_bad_input() {
    let mut written = 0usize;
    let mut buffer = [0u32; 8];

    let status = unsafe {
        zb_word_blocks(ptr::null(), buffer.as_mut_ptr(), buffer.len(), &mut written)
    };
    assert_eq!(status, ZbStatus::NullArgument);
    assert!(!read_static(zb_last_error_message()).is_empty());

    let junk = cstr("01201");
    let status = unsafe {
        zb_word_blocks(junk.as_ptr(), buffer.as_mut_ptr(), buffer.len(), &mut written)
    };
    assert_eq!(status, ZbStatus::InvalidInput);

    let leading_one = cstr("101");
    let status = unsafe {
        zb_word_blocks(leading_one.as_ptr(), buffer.as_mut_ptr(), buffer.len(), &mut written)
    };
    assert_eq!(status, ZbStatus::InvalidInput);
}

#[test]
fn certificate_lifecycle_with_verification() {
    let blocks = [2u32, 2, 2];
    let mut cert: *mut ZbCertificate = ptr::null_mut();
    let status = unsafe { zb_certificate_build(blocks.as_ptr(), blocks.len(), &mut cert) };
    assert_eq!(status, ZbStatus::Ok);
    assert!(!cert.is_null());

    // the verdict is unavailable until a numeric record exists
    let mut passed = false;
    let status = unsafe { zb_certificate_passed(cert, &mut passed) };
    assert_eq!(status, ZbStatus::NotVerified);

    // verify with a lighter-than-default context to keep the test quick
    let status = unsafe { zb_certificate_verify(cert, 128, 64, 10_000, ptr::null()) };
    assert_eq!(status, ZbStatus::Ok, "{}", read_static(zb_last_error_message()));
    let status = unsafe { zb_certificate_passed(cert, &mut passed) };
    assert_eq!(status, ZbStatus::Ok);
    assert!(passed);

    let mut json: *mut c_char = ptr::null_mut();
    let status = unsafe { zb_certificate_json(cert, &mut json) };
    assert_eq!(status, ZbStatus::Ok);
    let document: serde_json::Value =
        serde_json::from_str(&read_static(json)).expect("valid json");
    assert_eq!(document["blocks"], serde_json::json!([2, 2, 2]));
    assert_eq!(document["circ"], "+");
    assert_eq!(document["numeric"]["pass"], true);
    assert_eq!(document["lhs"].as_array().map(|a| a.len()), Some(6));
    unsafe { zb_string_free(json) };

    unsafe { zb_certificate_free(cert) };
}

#[test]
fn certificate_build_rejects_bad_lengths() {
    let mut cert: *mut ZbCertificate = ptr::null_mut();

    let status = unsafe { zb_certificate_build(ptr::null(), 3, &mut cert) };
    assert_eq!(status, ZbStatus::NullArgument);

    let too_small = [2u32, 1];
    let status = unsafe { zb_certificate_build(too_small.as_ptr(), too_small.len(), &mut cert) };
    assert_eq!(status, ZbStatus::InvalidInput);
    assert!(cert.is_null());

    let empty = [0u32; 1];
    let status = unsafe { zb_certificate_build(empty.as_ptr(), 0, &mut cert) };
    assert_eq!(status, ZbStatus::InvalidInput);
}

#[test]
fn verify_validates_arguments() {
    let status =
        unsafe { zb_certificate_verify(ptr::null_mut(), 0, 0, 0, ptr::null()) };
    assert_eq!(status, ZbStatus::NullArgument);

    let blocks = [3u32];
    let mut cert: *mut ZbCertificate = ptr::null_mut();
    assert_eq!(
        unsafe { zb_certificate_build(blocks.as_ptr(), blocks.len(), &mut cert) },
        ZbStatus::Ok
    );

    // precision below the supported floor
    let status = unsafe { zb_certificate_verify(cert, 16, 0, 0, ptr::null()) };
    assert_eq!(status, ZbStatus::InvalidInput);

    let junk_tolerance = cstr("around 1e-10");
    let status = unsafe { zb_certificate_verify(cert, 0, 0, 0, junk_tolerance.as_ptr()) };
    assert_eq!(status, ZbStatus::InvalidInput);

    unsafe { zb_certificate_free(cert) };
}

#[test]
fn status_messages_are_static_strings() {
    for status in [
        ZbStatus::Ok,
        ZbStatus::NullArgument,
        ZbStatus::InvalidInput,
        ZbStatus::Divergent,
        ZbStatus::BudgetExceeded,
        ZbStatus::BufferTooSmall,
        ZbStatus::NotVerified,
        ZbStatus::InternalPanic,
    ] {
        assert!(!read_static(zb_status_message(status)).is_empty());
    }
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        zb_certificate_free(ptr::null_mut());
        zb_string_free(ptr::null_mut());
    }
}
