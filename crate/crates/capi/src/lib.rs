//! C ABI over the zeta-blocks library.
//!
//! The surface is deliberately small: decompose a binary word into block
//! lengths, build an identity certificate from block lengths, optionally
//! verify it numerically, and read the result back as JSON. All functions
//! return a [`ZbStatus`] code; `zb_last_error_message` carries the detail of
//! the most recent failure on the calling thread.
//!
//! Conventions:
//! - strings passed in are NUL-terminated UTF-8; strings passed out are
//!   allocated here and must be released with `zb_string_free`,
//! - certificates are opaque handles released with `zb_certificate_free`,
//! - no function aborts on bad input; panics are caught and reported as
//!   [`ZbStatus::InternalPanic`].
//!
//! The generated header lives at `include/zeta_blocks.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use zeta_blocks::eval::{parse_decimal_rational, EvalContext, Evaluator};
use zeta_blocks::formal::{build_certificate, IdentityCertificate};
use zeta_blocks::word::{block_decompose, BinaryWord, BlockLengths};
use zeta_blocks::Error;

/// Result code of every C-ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZbStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// An argument failed to parse or violated a documented precondition.
    InvalidInput = 2,
    /// The requested value diverges and has no finite evaluation.
    Divergent = 3,
    /// An internal enumeration or evaluation budget was exceeded.
    BudgetExceeded = 4,
    /// The caller-provided buffer is too small; the required size was
    /// written to the size output parameter.
    BufferTooSmall = 5,
    /// The certificate has no numeric record yet; call
    /// `zb_certificate_verify` first.
    NotVerified = 6,
    /// An internal invariant failed; please report. Details are in
    /// `zb_last_error_message`.
    InternalPanic = 7,
}

/// An identity certificate: block lengths, the star-index left side, the
/// formal right side, and (after verification) a numeric record. Opaque to
/// C callers.
pub struct ZbCertificate {
    inner: IdentityCertificate,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NULs removed");
    });
}

fn fail(status: ZbStatus, message: &str) -> ZbStatus {
    set_last_error(message);
    status
}

fn fail_with(error: &Error) -> ZbStatus {
    let status = match error {
        Error::Divergent { .. } => ZbStatus::Divergent,
        Error::Budget { .. } => ZbStatus::BudgetExceeded,
        _ => ZbStatus::InvalidInput,
    };
    fail(status, &error.to_string())
}

/// Catches panics so they surface as a status code instead of unwinding
/// (or aborting) across the ABI boundary.
fn guarded<F: FnOnce() -> ZbStatus>(body: F) -> ZbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let detail = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            fail(ZbStatus::InternalPanic, &detail)
        }
    }
}

/// Reads a NUL-terminated UTF-8 argument.
///
/// # Safety
/// `ptr` must be NULL or point to a NUL-terminated string.
unsafe fn utf8_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, ZbStatus> {
    if ptr.is_null() {
        return Err(fail(ZbStatus::NullArgument, &format!("{name} is NULL")));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| fail(ZbStatus::InvalidInput, &format!("{name} is not UTF-8")))
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn zb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// A static description of a status code; do not free.
#[no_mangle]
pub extern "C" fn zb_status_message(status: ZbStatus) -> *const c_char {
    let text: &'static str = match status {
        ZbStatus::Ok => "ok\0",
        ZbStatus::NullArgument => "required pointer argument is NULL\0",
        ZbStatus::InvalidInput => "invalid input\0",
        ZbStatus::Divergent => "value diverges\0",
        ZbStatus::BudgetExceeded => "internal budget exceeded\0",
        ZbStatus::BufferTooSmall => "output buffer too small\0",
        ZbStatus::NotVerified => "certificate has no numeric record\0",
        ZbStatus::InternalPanic => "internal panic\0",
    };
    text.as_ptr() as *const c_char
}

/// Detail of the most recent failure on this thread; empty if none. The
/// pointer stays valid until the next zeta-blocks call on the same thread.
/// Do not free.
#[no_mangle]
pub extern "C" fn zb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Decomposes the binary word `word` (an ASCII string of `0`s and `1`s)
/// into its block lengths.
///
/// Writes the number of blocks to `*written`. When `out` is non-NULL and
/// `capacity` suffices, fills `out` with the lengths and returns `Ok`;
/// otherwise returns `BufferTooSmall` (call once with `out = NULL` to size
/// the buffer). A word of n letters has at most n blocks.
///
/// # Safety
/// `word` must be NUL-terminated. `out`, when non-NULL, must point to at
/// least `capacity` writable `uint32_t`s. `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zb_word_blocks(
    word: *const c_char,
    out: *mut u32,
    capacity: usize,
    written: *mut usize,
) -> ZbStatus {
    guarded(|| {
        if written.is_null() {
            return fail(ZbStatus::NullArgument, "written is NULL");
        }
        let text = match unsafe { utf8_arg(word, "word") } {
            Ok(t) => t,
            Err(status) => return status,
        };
        let parsed: BinaryWord = match text.parse() {
            Ok(w) => w,
            Err(e) => return fail_with(&e),
        };
        let blocks = match block_decompose(&parsed) {
            Ok(b) => b,
            Err(e) => return fail_with(&e),
        };
        let lengths = blocks.lengths();
        unsafe { *written = lengths.len() };
        if out.is_null() || capacity < lengths.len() {
            return fail(
                ZbStatus::BufferTooSmall,
                &format!("{} block lengths to write", lengths.len()),
            );
        }
        unsafe { slice::from_raw_parts_mut(out, lengths.len()) }.copy_from_slice(lengths);
        ZbStatus::Ok
    })
}

/// Builds the identity certificate for the given block lengths (each ≥ 2)
/// and stores a handle in `*out`. Release it with `zb_certificate_free`.
///
/// # Safety
/// `blocks` must point to `len` readable `uint32_t`s and `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zb_certificate_build(
    blocks: *const u32,
    len: usize,
    out: *mut *mut ZbCertificate,
) -> ZbStatus {
    guarded(|| {
        if out.is_null() {
            return fail(ZbStatus::NullArgument, "out is NULL");
        }
        if blocks.is_null() {
            return fail(ZbStatus::NullArgument, "blocks is NULL");
        }
        let lengths = unsafe { slice::from_raw_parts(blocks, len) }.to_vec();
        let lengths = match BlockLengths::new(lengths) {
            Ok(l) => l,
            Err(e) => return fail_with(&e),
        };
        match build_certificate(&lengths) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(ZbCertificate { inner })) };
                ZbStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Evaluates both sides of the certificate's identity and records the
/// residual, the rigorous error bound, and the pass verdict in place.
///
/// Pass 0 for `precision_bits`, `series_terms`, or `oracle_cutoff` to use
/// the built-in defaults, and NULL for `tolerance` to use `1e-10`
/// (otherwise a decimal or scientific-notation string like `"2.5e-12"`).
/// Returns `Ok` whether or not the verdict passes; read the verdict with
/// `zb_certificate_passed`.
///
/// # Safety
/// `cert` must be a handle from `zb_certificate_build` that has not been
/// freed. `tolerance` must be NULL or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn zb_certificate_verify(
    cert: *mut ZbCertificate,
    precision_bits: u32,
    series_terms: u32,
    oracle_cutoff: u64,
    tolerance: *const c_char,
) -> ZbStatus {
    guarded(|| {
        if cert.is_null() {
            return fail(ZbStatus::NullArgument, "cert is NULL");
        }
        let ctx = match EvalContext::new(
            if precision_bits == 0 {
                EvalContext::DEFAULT_PRECISION
            } else {
                precision_bits
            },
            if series_terms == 0 {
                EvalContext::DEFAULT_SERIES_TERMS
            } else {
                series_terms
            },
            if oracle_cutoff == 0 {
                EvalContext::DEFAULT_ORACLE_CUTOFF
            } else {
                oracle_cutoff
            },
        ) {
            Ok(ctx) => ctx,
            Err(e) => return fail_with(&e),
        };
        let tolerance = if tolerance.is_null() {
            parse_decimal_rational("1e-10").expect("literal parses")
        } else {
            let text = match unsafe { utf8_arg(tolerance, "tolerance") } {
                Ok(t) => t,
                Err(status) => return status,
            };
            match parse_decimal_rational(text) {
                Ok(t) => t,
                Err(e) => return fail_with(&e),
            }
        };
        let handle = unsafe { &mut *cert };
        match Evaluator::new(ctx).verify_certificate(&handle.inner, &tolerance) {
            Ok(verified) => {
                handle.inner = verified;
                ZbStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Reads the verdict of a verified certificate into `*out`.
///
/// # Safety
/// `cert` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zb_certificate_passed(
    cert: *const ZbCertificate,
    out: *mut bool,
) -> ZbStatus {
    guarded(|| {
        if cert.is_null() || out.is_null() {
            return fail(ZbStatus::NullArgument, "cert and out must be non-NULL");
        }
        match &unsafe { &*cert }.inner.numeric {
            Some(record) => {
                unsafe { *out = record.pass };
                ZbStatus::Ok
            }
            None => fail(ZbStatus::NotVerified, "call zb_certificate_verify first"),
        }
    })
}

/// Serializes the certificate (and its numeric record, if verified) as a
/// JSON document. The returned string must be released with
/// `zb_string_free`.
///
/// # Safety
/// `cert` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zb_certificate_json(
    cert: *const ZbCertificate,
    out: *mut *mut c_char,
) -> ZbStatus {
    guarded(|| {
        if cert.is_null() || out.is_null() {
            return fail(ZbStatus::NullArgument, "cert and out must be non-NULL");
        }
        let json = serde_json::to_string_pretty(&unsafe { &*cert }.inner)
            .expect("certificates serialize");
        let owned = CString::new(json).expect("JSON has no NULs");
        unsafe { *out = owned.into_raw() };
        ZbStatus::Ok
    })
}

/// Releases a certificate handle. NULL is a no-op.
///
/// # Safety
/// `cert` must be NULL or a handle from `zb_certificate_build` that has not
/// already been freed.
#[no_mangle]
pub unsafe extern "C" fn zb_certificate_free(cert: *mut ZbCertificate) {
    if !cert.is_null() {
        drop(unsafe { Box::from_raw(cert) });
    }
}

/// Releases a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a string returned by this library that has not
/// already been freed.
#[no_mangle]
pub unsafe extern "C" fn zb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
