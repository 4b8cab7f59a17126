//! C ABI for the skillmatch engine.
//!
//! Conventions:
//!
//! - The engine is an opaque handle created by [`sm_engine_new`] and
//!   released by [`sm_engine_free`].
//! - Every fallible call returns an [`SmStatus`]; on failure a
//!   thread-local message is readable through [`sm_last_error`].
//! - Structured results come back as JSON in a newly allocated,
//!   NUL-terminated string the caller must release with
//!   [`sm_string_free`]. The JSON schemas are the ones the CLI prints.
//!
//! The matching header is generated by cbindgen into
//! `include/skillmatch.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use skillmatch::config::OntologyRole;
use skillmatch::docstore::DocKind;
use skillmatch::screenrank::InterestWeights;
use skillmatch::{Engine, Error, RunConfig};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    /// Null pointer, invalid UTF-8, or malformed argument.
    InvalidArgument = 1,
    /// Document or concept not found.
    NotFound = 2,
    /// Schema or semantic validation failure.
    Validation = 3,
    /// Config or data file failed to parse.
    Parse = 4,
    Io = 5,
    /// Unexpected internal failure (a bug; see `sm_last_error`).
    Internal = 6,
}

/// Opaque engine handle.
pub struct SmEngine {
    inner: Engine,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let sanitized: Vec<u8> = msg.bytes().filter(|&b| b != 0).collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(sanitized).expect("no interior NULs"));
    });
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
}

fn status_of(err: &Error) -> SmStatus {
    match err {
        Error::NotFound(_) | Error::UnknownConcept(_) => SmStatus::NotFound,
        Error::Schema { .. }
        | Error::DuplicateId(_)
        | Error::Validation(_)
        | Error::AllZeroWeights
        | Error::ZeroNorm
        | Error::OutOfVocabulary(_)
        | Error::NoVectors => SmStatus::Validation,
        Error::Parse { .. }
        | Error::DimensionMismatch { .. }
        | Error::EmptyVectorFile(_)
        | Error::SuperTopicCycle(_)
        | Error::Json { .. }
        | Error::Config(_) => SmStatus::Parse,
        Error::Io { .. } => SmStatus::Io,
    }
}

fn fail(err: &Error) -> SmStatus {
    set_last_error(&err.to_string());
    status_of(err)
}

/// # Safety
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn str_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, SmStatus> {
    if ptr.is_null() {
        set_last_error(&format!("{name} is null"));
        return Err(SmStatus::InvalidArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error(&format!("{name} is not valid UTF-8"));
        SmStatus::InvalidArgument
    })
}

fn out_string(out: *mut *mut c_char, value: String) -> SmStatus {
    let sanitized: Vec<u8> = value.into_bytes().into_iter().filter(|&b| b != 0).collect();
    let cstring = CString::new(sanitized).expect("no interior NULs");
    if out.is_null() {
        set_last_error("output pointer is null");
        return SmStatus::InvalidArgument;
    }
    unsafe {
        *out = cstring.into_raw();
    }
    SmStatus::Ok
}

fn guarded(f: impl FnOnce() -> SmStatus) -> SmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            SmStatus::Internal
        }
    }
}

/// ABI revision; bump on any breaking change to this surface.
#[no_mangle]
pub extern "C" fn sm_abi_version() -> u32 {
    1
}

/// Last error message for this thread, or null when the previous call
/// succeeded. The pointer stays valid until the next failing call on the
/// same thread; do not free it.
#[no_mangle]
pub extern "C" fn sm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |s| s.as_ptr())
    })
}

/// Create an engine from a config file (see the repo docs for the format).
/// On success writes the handle to `out_engine` and returns `SM_STATUS_OK`.
///
/// # Safety
/// `config_path` must be a valid NUL-terminated string; `out_engine` must
/// point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn sm_engine_new(
    config_path: *const c_char,
    out_engine: *mut *mut SmEngine,
) -> SmStatus {
    guarded(|| {
        clear_last_error();
        if out_engine.is_null() {
            set_last_error("out_engine is null");
            return SmStatus::InvalidArgument;
        }
        let path = match str_arg(config_path, "config_path") {
            Ok(s) => PathBuf::from(s),
            Err(status) => return status,
        };
        let config = match RunConfig::load(&path) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        match Engine::from_config(&config) {
            Ok(engine) => {
                *out_engine = Box::into_raw(Box::new(SmEngine { inner: engine }));
                SmStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release an engine. Null is a no-op.
///
/// # Safety
/// `engine` must be a pointer from [`sm_engine_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_engine_free(engine: *mut SmEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Release a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be a string pointer returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn engine_arg<'a>(engine: *const SmEngine) -> Result<&'a Engine, SmStatus> {
    if engine.is_null() {
        set_last_error("engine is null");
        return Err(SmStatus::InvalidArgument);
    }
    Ok(&(*engine).inner)
}

fn weights_arg(spec: Option<&str>) -> Result<Option<InterestWeights>, SmStatus> {
    match spec {
        None => Ok(None),
        Some(s) => InterestWeights::parse(s).map(Some).map_err(|e| fail(&e)),
    }
}

/// One-to-one match. `weights` is `skills=2,domain=2,culture=2,required=0`
/// or null for the config default; `explain` adds per-axis evidence. The
/// report JSON lands in `out_json`.
///
/// # Safety
/// Pointer arguments must satisfy the conventions above.
#[no_mangle]
pub unsafe extern "C" fn sm_match_one(
    engine: *const SmEngine,
    cv_id: *const c_char,
    job_id: *const c_char,
    weights: *const c_char,
    explain: bool,
    out_json: *mut *mut c_char,
) -> SmStatus {
    guarded(|| {
        clear_last_error();
        let engine = match engine_arg(engine) {
            Ok(e) => e,
            Err(s) => return s,
        };
        let (cv, job) = match (str_arg(cv_id, "cv_id"), str_arg(job_id, "job_id")) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let weights_spec = if weights.is_null() {
            None
        } else {
            match str_arg(weights, "weights") {
                Ok(s) => Some(s),
                Err(s) => return s,
            }
        };
        let parsed = match weights_arg(weights_spec) {
            Ok(w) => w,
            Err(s) => return s,
        };
        match engine.match_one(cv, job, parsed.as_ref(), explain) {
            Ok(report) => out_string(
                out_json,
                serde_json::to_string_pretty(&report).expect("report serializes"),
            ),
            Err(e) => fail(&e),
        }
    })
}

/// Many-to-one ranking. `cv_ids` is a comma-separated id list or null for
/// every stored CV; the `RankedList` JSON lands in `out_json`.
///
/// # Safety
/// Pointer arguments must satisfy the conventions above.
#[no_mangle]
pub unsafe extern "C" fn sm_rank(
    engine: *const SmEngine,
    job_id: *const c_char,
    cv_ids: *const c_char,
    weights: *const c_char,
    out_json: *mut *mut c_char,
) -> SmStatus {
    guarded(|| {
        clear_last_error();
        let engine = match engine_arg(engine) {
            Ok(e) => e,
            Err(s) => return s,
        };
        let job = match str_arg(job_id, "job_id") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let ids: Option<Vec<String>> = if cv_ids.is_null() {
            None
        } else {
            match str_arg(cv_ids, "cv_ids") {
                Ok(list) => Some(
                    list.split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect(),
                ),
                Err(s) => return s,
            }
        };
        let weights_spec = if weights.is_null() {
            None
        } else {
            match str_arg(weights, "weights") {
                Ok(s) => Some(s),
                Err(s) => return s,
            }
        };
        let parsed = match weights_arg(weights_spec) {
            Ok(w) => w,
            Err(s) => return s,
        };
        match engine.rank(job, ids.as_deref(), parsed.as_ref()) {
            Ok(list) => out_string(
                out_json,
                serde_json::to_string_pretty(&list).expect("ranking serializes"),
            ),
            Err(e) => fail(&e),
        }
    })
}

/// Extract a concept graph from raw text against the general (0) or
/// domain (1) ontology; the graph JSON lands in `out_json`.
///
/// # Safety
/// Pointer arguments must satisfy the conventions above.
#[no_mangle]
pub unsafe extern "C" fn sm_extract(
    engine: *const SmEngine,
    text: *const c_char,
    ontology: u32,
    out_json: *mut *mut c_char,
) -> SmStatus {
    guarded(|| {
        clear_last_error();
        let engine = match engine_arg(engine) {
            Ok(e) => e,
            Err(s) => return s,
        };
        let text = match str_arg(text, "text") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let role = match ontology {
            0 => OntologyRole::General,
            1 => OntologyRole::Domain,
            _ => {
                set_last_error("ontology must be 0 (general) or 1 (domain)");
                return SmStatus::InvalidArgument;
            }
        };
        let graph = engine.extract(text, role);
        out_string(
            out_json,
            serde_json::to_string_pretty(&graph).expect("graph serializes"),
        )
    })
}

/// Validate and store one document given as JSON; `kind` is 0 for CV,
/// 1 for job post. The stored id lands in `out_id`.
///
/// # Safety
/// Pointer arguments must satisfy the conventions above.
#[no_mangle]
pub unsafe extern "C" fn sm_ingest_json(
    engine: *const SmEngine,
    doc_json: *const c_char,
    kind: u32,
    overwrite: bool,
    out_id: *mut *mut c_char,
) -> SmStatus {
    guarded(|| {
        clear_last_error();
        let engine = match engine_arg(engine) {
            Ok(e) => e,
            Err(s) => return s,
        };
        let json = match str_arg(doc_json, "doc_json") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let expected = match kind {
            0 => DocKind::Cv,
            1 => DocKind::JobPost,
            _ => {
                set_last_error("kind must be 0 (cv) or 1 (job_post)");
                return SmStatus::InvalidArgument;
            }
        };
        let doc: skillmatch::docstore::Document = match serde_json::from_str(json) {
            Ok(d) => d,
            Err(e) => {
                set_last_error(&format!("document JSON does not parse: {e}"));
                return SmStatus::Parse;
            }
        };
        if doc.kind != expected {
            set_last_error("document kind does not match the kind argument");
            return SmStatus::Validation;
        }
        match engine.ingest_document(doc, overwrite) {
            Ok(id) => out_string(out_id, id),
            Err(e) => fail(&e),
        }
    })
}
