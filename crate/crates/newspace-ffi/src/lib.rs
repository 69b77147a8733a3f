//! C interface to the certification library.
//!
//! All entry points are panic-safe, return a [`NewspaceStatus`] code, and
//! hand results back either through opaque [`NewspaceSpace`] handles or as
//! heap-allocated JSON strings that the caller releases with
//! [`newspace_string_free`]. The JSON payloads are exactly the report and
//! matrix schemas of the `newspace` CLI.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use newspace_core::cache::SpaceCache;
use newspace_core::runner::{
    emit_operator, run_check, run_local, space_summary, CheckSelector, EmitParams, LocalAction,
    RunOutput,
};
use newspace_core::Error;

/// Status codes mirroring the CLI exit contract.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NewspaceStatus {
    /// The call succeeded and every executed check passed.
    Ok = 0,
    /// The call succeeded but at least one certified identity failed.
    CheckFailed = 1,
    /// Invalid parameters (bad primes, level shape, unknown names).
    InvalidArgument = 2,
    /// Internal error (allocation, serialization, panic).
    Internal = 3,
    /// A required pointer argument was null.
    NullPointer = 4,
}

/// Opaque handle to a symbol space at one `(level, weight)`, together with
/// the cache of lower-level spaces its computations need.
pub struct NewspaceSpace {
    cache: SpaceCache,
    level: u32,
    weight: u32,
}

fn status_of_error(e: &Error) -> NewspaceStatus {
    match e {
        Error::InvalidParameter(_) | Error::ShapeMismatch(_) | Error::SizeBound(_) => {
            NewspaceStatus::InvalidArgument
        }
        _ => NewspaceStatus::Internal,
    }
}

fn into_c_string(s: String, out: *mut *mut c_char) -> NewspaceStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            NewspaceStatus::Ok
        }
        Err(_) => NewspaceStatus::Internal,
    }
}

fn guarded<F: FnOnce() -> NewspaceStatus>(f: F) -> NewspaceStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(NewspaceStatus::Internal)
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn newspace_version() -> *const c_char {
    concat!("newspace ", env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Release a string returned by any `*_json` function.
///
/// # Safety
/// `s` must be a pointer previously returned through an out-parameter of
/// this library and not yet freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn newspace_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build the symbol space at `(level, weight)` and return an opaque handle.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn newspace_space_new(
    level: u32,
    weight: u32,
    out: *mut *mut NewspaceSpace,
) -> NewspaceStatus {
    if out.is_null() {
        return NewspaceStatus::NullPointer;
    }
    guarded(|| {
        let cache = SpaceCache::in_memory();
        match cache.get(level, weight) {
            Ok(_) => {
                let handle = Box::new(NewspaceSpace { cache, level, weight });
                unsafe { *out = Box::into_raw(handle) };
                NewspaceStatus::Ok
            }
            Err(e) => status_of_error(&e),
        }
    })
}

/// Release a space handle; null is ignored.
///
/// # Safety
/// `space` must come from [`newspace_space_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn newspace_space_free(space: *mut NewspaceSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Dimensions of the space behind a handle: the full quotient, the cuspidal
/// subspace, and the new subspace of the cuspidal space.
///
/// # Safety
/// `space` must be a live handle; out-pointers may be null to skip a field.
#[no_mangle]
pub unsafe extern "C" fn newspace_space_dims(
    space: *const NewspaceSpace,
    full_dim: *mut usize,
    cuspidal_dim: *mut usize,
    new_dim: *mut usize,
) -> NewspaceStatus {
    if space.is_null() {
        return NewspaceStatus::NullPointer;
    }
    let handle = unsafe { &*space };
    guarded(|| match space_summary(&handle.cache, handle.level, handle.weight) {
        Ok((full, cuspidal, new)) => {
            if !full_dim.is_null() {
                unsafe { *full_dim = full };
            }
            if !cuspidal_dim.is_null() {
                unsafe { *cuspidal_dim = cuspidal };
            }
            if !new_dim.is_null() {
                unsafe { *new_dim = new };
            }
            NewspaceStatus::Ok
        }
        Err(e) => status_of_error(&e),
    })
}

fn run_local_to_json(p: u64, n: u32, action: LocalAction, out: *mut *mut c_char) -> NewspaceStatus {
    match run_local(p, n, action) {
        Ok(RunOutput::Reports(set)) => {
            let pass = set.all_pass();
            let status = into_c_string(set.to_json(), out);
            if status != NewspaceStatus::Ok {
                status
            } else if pass {
                NewspaceStatus::Ok
            } else {
                NewspaceStatus::CheckFailed
            }
        }
        Ok(RunOutput::Table(t)) => {
            let verified = t.all_verified();
            match serde_json::to_string_pretty(&t) {
                Ok(s) => {
                    let status = into_c_string(s, out);
                    if status != NewspaceStatus::Ok || verified {
                        status
                    } else {
                        NewspaceStatus::CheckFailed
                    }
                }
                Err(_) => NewspaceStatus::Internal,
            }
        }
        Err(e) => status_of_error(&e),
    }
}

/// Verify the finite Hecke algebra relations at `(p, n)`; the JSON report
/// lands in `out_json`.
///
/// # Safety
/// `out_json` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn newspace_local_verify(
    p: u64,
    n: u32,
    out_json: *mut *mut c_char,
) -> NewspaceStatus {
    if out_json.is_null() {
        return NewspaceStatus::NullPointer;
    }
    guarded(|| run_local_to_json(p, n, LocalAction::Verify, out_json))
}

/// Eigenvector table of the finite Hecke algebra at `(p, n)` as JSON.
///
/// # Safety
/// `out_json` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn newspace_local_table(
    p: u64,
    n: u32,
    out_json: *mut *mut c_char,
) -> NewspaceStatus {
    if out_json.is_null() {
        return NewspaceStatus::NullPointer;
    }
    guarded(|| run_local_to_json(p, n, LocalAction::Table, out_json))
}

/// Decomposition of the induced representation at `(p, n)` as a JSON report.
///
/// # Safety
/// `out_json` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn newspace_local_decompose(
    p: u64,
    n: u32,
    out_json: *mut *mut c_char,
) -> NewspaceStatus {
    if out_json.is_null() {
        return NewspaceStatus::NullPointer;
    }
    guarded(|| run_local_to_json(p, n, LocalAction::Decompose, out_json))
}

/// Run a theorem or lemma family on a space handle.
///
/// `theorem` is one of `auto`, `T1`, `T2`, `T2prime`, `T3`, `T5`, `lemmas`,
/// `section6`; `star_restrict != 0` reports multiplicity-one dimensions.
///
/// # Safety
/// `space` must be a live handle, `theorem` a NUL-terminated string, and
/// `out_json` valid writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn newspace_check(
    space: *const NewspaceSpace,
    theorem: *const c_char,
    star_restrict: u8,
    out_json: *mut *mut c_char,
) -> NewspaceStatus {
    if space.is_null() || theorem.is_null() || out_json.is_null() {
        return NewspaceStatus::NullPointer;
    }
    let handle = unsafe { &*space };
    let Ok(theorem) = unsafe { CStr::from_ptr(theorem) }.to_str() else {
        return NewspaceStatus::InvalidArgument;
    };
    guarded(|| {
        let Some(selector) = CheckSelector::parse(theorem) else {
            return NewspaceStatus::InvalidArgument;
        };
        match run_check(&handle.cache, handle.level, handle.weight, selector, star_restrict != 0) {
            Ok(set) => {
                let pass = set.all_pass();
                let status = into_c_string(set.to_json(), out_json);
                if status != NewspaceStatus::Ok {
                    status
                } else if pass {
                    NewspaceStatus::Ok
                } else {
                    NewspaceStatus::CheckFailed
                }
            }
            Err(e) => status_of_error(&e),
        }
    })
}

/// Export an operator matrix from a space handle as exact rationals in the
/// `newspace.matrix/1` JSON schema. Integer parameters follow the CLI flags
/// of `newspace emit`; pass 0 for parameters the operator does not use.
///
/// # Safety
/// `space` must be a live handle, `op` a NUL-terminated string, and
/// `out_json` valid writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn newspace_emit(
    space: *const NewspaceSpace,
    op: *const c_char,
    p: u64,
    q: u64,
    r: u32,
    j: u32,
    d: u32,
    out_json: *mut *mut c_char,
) -> NewspaceStatus {
    if space.is_null() || op.is_null() || out_json.is_null() {
        return NewspaceStatus::NullPointer;
    }
    let handle = unsafe { &*space };
    let Ok(op) = unsafe { CStr::from_ptr(op) }.to_str() else {
        return NewspaceStatus::InvalidArgument;
    };
    guarded(|| {
        let params = EmitParams {
            p: (p != 0).then_some(p),
            q: (q != 0).then_some(q),
            r: (r != 0).then_some(r),
            j: (j != 0).then_some(j),
            d: (d != 0).then_some(d),
        };
        match emit_operator(&handle.cache, handle.level, handle.weight, op, params) {
            Ok(payload) => into_c_string(payload, out_json),
            Err(e) => status_of_error(&e),
        }
    })
}
