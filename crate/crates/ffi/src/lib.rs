//! C interface to the writeright engine.
//!
//! Every fallible function returns a [`WrStatus`]; on anything other than
//! `WR_STATUS_OK` a description is available from [`wr_last_error`] on the
//! same thread. Strings returned through out-parameters are owned by the
//! caller and must be released with [`wr_string_free`]. Handles are opaque
//! and released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use writeright::align::{diff, Classifier};
use writeright::corpus::{parse_tree, read_m2, tokenize, write_m2, AnnotatedSentence};
use writeright::corrector::{Corrector, RuleSet};
use writeright::features::{frazier_score, yngve_depth, FeatureVector};
use writeright::geceval::score_m2;
use writeright::lexicon::Dictionary;
use writeright::rubric::RUBRICS;
use writeright::scorer::{qwk_with_range, ScoreModel};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WrStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    ParseError = 4,
    IoError = 5,
    ModelError = 6,
    BackendError = 7,
    Panic = 8,
}

/// Scores on the 0-100 scale; `rubrics` follows the order of [`wr_rubric_name`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WrScores {
    pub overall: f64,
    pub rubrics: [f64; 8],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WrGecReport {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
    /// Set when neither side has any edit; the scores are then 1.0.
    pub degenerate: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WrTreeMetrics {
    pub leaves: usize,
    pub yngve_mean: f64,
    pub yngve_max: f64,
    pub frazier_mean: f64,
}

/// Opaque rule and dictionary corrector.
pub struct WrCorrector {
    inner: Corrector,
}

/// Opaque trained scoring model.
pub struct WrScoreModel {
    inner: ScoreModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(WrStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn fail<T>(status: WrStatus, msg: impl Into<String>) -> FfiResult<T> {
    Err(Failure(status, msg.into()))
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> WrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            WrStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            WrStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(WrStatus::NullArgument, format!("{name} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(WrStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn opt_path(p: *const c_char, name: &str) -> FfiResult<Option<PathBuf>> {
    if p.is_null() {
        return Ok(None);
    }
    str_arg(p, name).map(|s| Some(PathBuf::from(s)))
}

fn out_arg<T>(p: *mut T, name: &str) -> FfiResult<*mut T> {
    if p.is_null() {
        fail(WrStatus::NullArgument, format!("{name} is null"))
    } else {
        Ok(p)
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Description of the last failure on this thread, or null. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn wr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn wr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` is null or a string returned by this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Name of rubric `index` (0-7), statically allocated; null when out of range.
#[no_mangle]
pub extern "C" fn wr_rubric_name(index: usize) -> *const c_char {
    const NAMES: [&CStr; 8] = [
        c"content",
        c"organization",
        c"word_choice",
        c"sentence_fluency",
        c"conventions",
        c"prompt_adherence",
        c"language",
        c"narrativity",
    ];
    debug_assert!(NAMES.iter().zip(RUBRICS).all(|(c, r)| c.to_str() == Ok(r)));
    NAMES.get(index).map_or(ptr::null(), |c| c.as_ptr())
}

/// Creates a corrector from a rule file and a dictionary; either path may
/// be null to use the bundled resources.
///
/// # Safety
/// Path arguments are null or valid strings; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wr_corrector_new(rules_path: *const c_char, dictionary_path: *const c_char, out: *mut *mut WrCorrector) -> WrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let rules = opt_path(rules_path, "rules_path")?;
        let dict = opt_path(dictionary_path, "dictionary_path")?;
        let set = RuleSet::load(rules.as_deref(), dict.as_deref()).or_else(|e| fail(WrStatus::IoError, e.to_string()))?;
        *out = Box::into_raw(Box::new(WrCorrector {
            inner: Corrector::rules(set),
        }));
        Ok(())
    })
}

/// # Safety
/// `h` is null or a handle from [`wr_corrector_new`] that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wr_corrector_free(h: *mut WrCorrector) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Corrects one sentence; `out` receives the corrected tokens joined by spaces.
///
/// # Safety
/// `h` is a live corrector, `sentence` a valid string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wr_corrector_correct(h: *const WrCorrector, sentence: *const c_char, out: *mut *mut c_char) -> WrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let c = h.as_ref().ok_or(Failure(WrStatus::NullArgument, "corrector is null".into()))?;
        let text = str_arg(sentence, "sentence")?;
        let r = c.inner.correct(&tokenize(text)).or_else(|e| fail(WrStatus::BackendError, e.to_string()))?;
        *out = into_c_string(r.corrected.joined());
        Ok(())
    })
}

/// Corrects one sentence; `out` receives the source and its edits as an M2 block.
///
/// # Safety
/// As for [`wr_corrector_correct`].
#[no_mangle]
pub unsafe extern "C" fn wr_corrector_correct_m2(h: *const WrCorrector, sentence: *const c_char, out: *mut *mut c_char) -> WrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let c = h.as_ref().ok_or(Failure(WrStatus::NullArgument, "corrector is null".into()))?;
        let text = str_arg(sentence, "sentence")?;
        let r = c.inner.correct(&tokenize(text)).or_else(|e| fail(WrStatus::BackendError, e.to_string()))?;
        *out = into_c_string(write_m2(&[AnnotatedSentence::new(r.source).with_annotator(0, r.edits)]));
        Ok(())
    })
}

/// Loads a model written by `writeright train-awe`.
///
/// # Safety
/// `path` is a valid string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wr_score_model_load(path: *const c_char, out: *mut *mut WrScoreModel) -> WrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let p = str_arg(path, "path")?;
        let m = ScoreModel::load(p.as_ref()).or_else(|e| fail(WrStatus::ModelError, format!("{p}: {e}")))?;
        *out = Box::into_raw(Box::new(WrScoreModel { inner: m }));
        Ok(())
    })
}

/// # Safety
/// `h` is null or a handle from [`wr_score_model_load`] that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wr_score_model_free(h: *mut WrScoreModel) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Scores one feature vector, given as the JSON object produced by
/// `writeright featurize` (the `features` field of each line).
///
/// # Safety
/// `h` is a live model, `features_json` a valid string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wr_score_model_predict(h: *const WrScoreModel, features_json: *const c_char, prompt_id: u8, out: *mut WrScores) -> WrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let m = h.as_ref().ok_or(Failure(WrStatus::NullArgument, "model is null".into()))?;
        let json = str_arg(features_json, "features_json")?;
        let fv: FeatureVector = serde_json::from_str(json).or_else(|e| fail(WrStatus::ParseError, format!("features: {e}")))?;
        let s = m.inner.predict(&fv, prompt_id).or_else(|e| fail(WrStatus::ModelError, e.to_string()))?;
        let mut scores = WrScores {
            overall: s.overall,
            ..WrScores::default()
        };
        for (slot, name) in scores.rubrics.iter_mut().zip(RUBRICS) {
            *slot = s.rubrics[name];
        }
        *out = scores;
        Ok(())
    })
}

/// Aligns a source and a corrected sentence and writes their edits as an
/// M2 block, typed against the bundled dictionary.
///
/// # Safety
/// `source` and `target` are valid strings; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wr_extract_edits_m2(source: *const c_char, target: *const c_char, out: *mut *mut c_char) -> WrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let src = tokenize(str_arg(source, "source")?);
        let tgt = tokenize(str_arg(target, "target")?);
        let dict = Dictionary::english();
        let edits = diff(&src, &tgt, &Classifier::new(&dict));
        *out = into_c_string(write_m2(&[AnnotatedSentence::new(src).with_annotator(0, edits)]));
        Ok(())
    })
}

/// Precision, recall and F-beta of a hypothesis M2 document against gold.
///
/// # Safety
/// `hyp_m2` and `gold_m2` are valid strings; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wr_evaluate_m2(hyp_m2: *const c_char, gold_m2: *const c_char, beta: f64, out: *mut WrGecReport) -> WrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let parse = |p, name| -> FfiResult<_> {
            let s = str_arg(p, name)?;
            read_m2(s).or_else(|e| fail(WrStatus::ParseError, format!("{name} line {}: {e}", e.line())))
        };
        let hyp = parse(hyp_m2, "hyp_m2")?;
        let gold = parse(gold_m2, "gold_m2")?;
        if !(beta.is_finite() && beta > 0.0) {
            return fail(WrStatus::InvalidArgument, "beta must be positive");
        }
        let r = score_m2(&hyp, &gold, beta).or_else(|e| fail(WrStatus::InvalidArgument, e.to_string()))?;
        *out = WrGecReport {
            tp: r.tp,
            fp: r.fp,
            fn_: r.fn_,
            precision: r.precision,
            recall: r.recall,
            f_beta: r.f_beta,
            degenerate: r.degenerate,
        };
        Ok(())
    })
}

/// Quadratic weighted kappa of `n` rating pairs over `min..=max`.
///
/// # Safety
/// `gold` and `pred` point to `n` readable values; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wr_qwk(gold: *const i64, pred: *const i64, n: usize, min: i64, max: i64, out: *mut f64) -> WrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        if n == 0 {
            return fail(WrStatus::InvalidArgument, "no ratings");
        }
        if gold.is_null() || pred.is_null() {
            return fail(WrStatus::NullArgument, "rating array is null");
        }
        let g = std::slice::from_raw_parts(gold, n);
        let p = std::slice::from_raw_parts(pred, n);
        *out = qwk_with_range(g, p, min, max).or_else(|e| fail(WrStatus::InvalidArgument, e.to_string()))?;
        Ok(())
    })
}

/// Yngve and Frazier metrics of one bracketed constituency tree.
///
/// # Safety
/// `bracketed` is a valid string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wr_tree_metrics(bracketed: *const c_char, out: *mut WrTreeMetrics) -> WrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let t = parse_tree(str_arg(bracketed, "bracketed")?).or_else(|e| fail(WrStatus::ParseError, e.to_string()))?;
        let (yngve_mean, yngve_max) = yngve_depth(&t);
        *out = WrTreeMetrics {
            leaves: t.leaves().len(),
            yngve_mean,
            yngve_max,
            frazier_mean: frazier_score(&t).0,
        };
        Ok(())
    })
}
