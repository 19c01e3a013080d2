//! C ABI over the `contrafact` library.
//!
//! Every fallible function returns a [`CfStatus`] and writes its result
//! through an out-pointer. On failure, [`cf_last_error_message`] describes
//! the error on the calling thread. Handles are opaque and must be released
//! with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use contrafact::similarity::SearchResult;
use contrafact::{
    build_model, load_corpus, nearest_songs, ChordClass, CooccurrenceModel, Corpus, Error, MembraneParams,
};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    UnknownSong = 5,
    EmptyCorpus = 6,
    InvalidArgument = 7,
    ModelMismatch = 8,
    Panic = 9,
}

/// A loaded corpus.
pub struct CfCorpus(Corpus);

/// A co-occurrence model.
pub struct CfModel(CooccurrenceModel);

/// Ranked search output.
pub struct CfSearchResult {
    ids: Vec<CString>,
    titles: Vec<CString>,
    distances: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => CfStatus::Io,
            Error::Chord(_)
            | Error::MalformedRecord { .. }
            | Error::BadSymbol { .. }
            | Error::InvalidModelFile(_)
            | Error::UnknownClassLabel(_) => CfStatus::Parse,
            Error::UnknownSong(_) => CfStatus::UnknownSong,
            Error::EmptyCorpus => CfStatus::EmptyCorpus,
            Error::ModelMismatch => CfStatus::ModelMismatch,
            _ => CfStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CfStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CfStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CfStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(CfStatus::NullPointer, "null pointer argument".into())
}

unsafe fn string<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(CfStatus::InvalidUtf8, "argument is not valid UTF-8".into()))
}

unsafe fn reference<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

fn params(samples: u32) -> Result<MembraneParams, Failure> {
    let params = if samples == 0 { MembraneParams::default() } else { MembraneParams::with_samples(samples as usize) };
    params.validate()?;
    Ok(params)
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a JSON-lines corpus.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_corpus_load(path: *const c_char, out: *mut *mut CfCorpus) -> CfStatus {
    guard(|| {
        let corpus = load_corpus(string(path)?)?;
        write(out, Box::into_raw(Box::new(CfCorpus(corpus))))
    })
}

/// Number of songs in the corpus (0 for NULL).
///
/// # Safety
/// `corpus` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_corpus_len(corpus: *const CfCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `corpus` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn cf_corpus_free(corpus: *mut CfCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Builds the co-occurrence model of a corpus.
///
/// # Safety
/// `corpus` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_model_build(corpus: *const CfCorpus, out: *mut *mut CfModel) -> CfStatus {
    guard(|| {
        let model = build_model(&reference(corpus)?.0)?;
        write(out, Box::into_raw(Box::new(CfModel(model))))
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_model_load(path: *const c_char, out: *mut *mut CfModel) -> CfStatus {
    guard(|| {
        let model = CooccurrenceModel::load(string(path)?)?;
        write(out, Box::into_raw(Box::new(CfModel(model))))
    })
}

/// # Safety
/// `model` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cf_model_save(model: *const CfModel, path: *const c_char) -> CfStatus {
    guard(|| Ok(reference(model)?.0.save(string(path)?)?))
}

/// # Safety
/// `model` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn cf_model_free(model: *mut CfModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Index (0..63) of a class label such as `bii7`, `iim` or `<START>`.
///
/// # Safety
/// `label` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_class_index_from_label(label: *const c_char, out: *mut u32) -> CfStatus {
    guard(|| {
        let class = ChordClass::from_label(string(label)?)?;
        write(out, class.index() as u32)
    })
}

fn class(index: u32) -> Result<ChordClass, Failure> {
    ChordClass::from_index(index as usize)
        .ok_or_else(|| Failure(CfStatus::InvalidArgument, format!("class index {index} out of range")))
}

/// Cosine similarity between two class embeddings.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_model_cosine(model: *const CfModel, a: u32, b: u32, out: *mut f64) -> CfStatus {
    guard(|| {
        let model = &reference(model)?.0;
        write(out, model.cosine_similarity(class(a)?, class(b)?))
    })
}

/// Membrane-area distance between two songs. `samples` = 0 selects the
/// default resolution.
///
/// # Safety
/// Handles must be live, ids NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn cf_distance(
    corpus: *const CfCorpus,
    model: *const CfModel,
    song_a: *const c_char,
    song_b: *const c_char,
    samples: u32,
    out: *mut f64,
) -> CfStatus {
    guard(|| {
        let params = params(samples)?;
        let corpus = &reference(corpus)?.0;
        let model = &reference(model)?.0;
        let (a, b) = (string(song_a)?, string(song_b)?);
        let index = contrafact::similarity::PathIndex::build(corpus, model, params.boundary_beats)?;
        write(out, index.distance(a, b, &params)?)
    })
}

/// The `k` songs closest to `query`, nearest first.
///
/// # Safety
/// Handles must be live, `query` NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn cf_search(
    corpus: *const CfCorpus,
    model: *const CfModel,
    query: *const c_char,
    k: u32,
    samples: u32,
    out: *mut *mut CfSearchResult,
) -> CfStatus {
    guard(|| {
        let params = params(samples)?;
        let result: SearchResult =
            nearest_songs(string(query)?, &reference(corpus)?.0, &reference(model)?.0, &params, k as usize)?;
        let cstring = |s: &str| CString::new(s.replace('\0', " ")).unwrap_or_default();
        let handle = CfSearchResult {
            ids: result.ranked.iter().map(|n| cstring(&n.id)).collect(),
            titles: result.ranked.iter().map(|n| cstring(&n.title)).collect(),
            distances: result.ranked.iter().map(|n| n.distance).collect(),
        };
        write(out, Box::into_raw(Box::new(handle)))
    })
}

/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_search_result_len(result: *const CfSearchResult) -> usize {
    result.as_ref().map_or(0, |r| r.distances.len())
}

/// Song id at `rank` (0-based), or NULL when out of range. Owned by the
/// result handle.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_search_result_id(result: *const CfSearchResult, rank: usize) -> *const c_char {
    result.as_ref().and_then(|r| r.ids.get(rank)).map_or(ptr::null(), |s| s.as_ptr())
}

/// Song title at `rank`, or NULL when out of range.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_search_result_title(result: *const CfSearchResult, rank: usize) -> *const c_char {
    result.as_ref().and_then(|r| r.titles.get(rank)).map_or(ptr::null(), |s| s.as_ptr())
}

/// Distance at `rank`, or NaN when out of range.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_search_result_distance(result: *const CfSearchResult, rank: usize) -> f64 {
    result.as_ref().and_then(|r| r.distances.get(rank)).copied().unwrap_or(f64::NAN)
}

/// # Safety
/// `result` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn cf_search_result_free(result: *mut CfSearchResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
