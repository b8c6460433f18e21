//! Token alignment between a source and a corrected sentence, and the edits
//! derived from it.

mod classify;
mod dp;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TokenizedSentence;

pub use classify::{classify_edit, Classifier};
pub use dp::{align, align_with, AlignCosts, AlignOp, AlignmentScript, OpKind};

/// Error type code such as `R:SPELL` or `M:PUNCT`. Stored verbatim so that
/// codes read from M2 files written by other tools survive a round trip.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ErrorType(String);

impl ErrorType {
    pub fn new(code: impl Into<String>) -> Self {
        Self(code.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `M`, `U` or `R`, if the code carries a tier prefix.
    pub fn tier(&self) -> Option<Tier> {
        match self.0.split(':').next()? {
            "M" => Some(Tier::Missing),
            "U" => Some(Tier::Unnecessary),
            "R" => Some(Tier::Replacement),
            _ => None,
        }
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    /// Insertion (source span empty).
    Missing,
    /// Deletion (replacement empty).
    Unnecessary,
    Replacement,
}

impl Tier {
    pub fn code(self) -> &'static str {
        match self {
            Tier::Missing => "M",
            Tier::Unnecessary => "U",
            Tier::Replacement => "R",
        }
    }
}

/// Replace source tokens `start..end` with `replacement`.
/// `start == end` is an insertion, an empty replacement a deletion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edit {
    pub start: usize,
    pub end: usize,
    pub replacement: Vec<String>,
    pub etype: ErrorType,
}

impl Edit {
    pub fn new<S: Into<String>>(start: usize, end: usize, replacement: impl IntoIterator<Item = S>) -> Self {
        let replacement: Vec<String> = replacement.into_iter().map(Into::into).collect();
        let tier = if start == end {
            Tier::Missing
        } else if replacement.is_empty() {
            Tier::Unnecessary
        } else {
            Tier::Replacement
        };
        Self {
            start,
            end,
            replacement,
            etype: ErrorType::new(format!("{}:OTHER", tier.code())),
        }
    }

    pub fn with_type(mut self, etype: impl Into<String>) -> Self {
        self.etype = ErrorType::new(etype);
        self
    }

    pub fn tier(&self) -> Tier {
        if self.start == self.end {
            Tier::Missing
        } else if self.replacement.is_empty() {
            Tier::Unnecessary
        } else {
            Tier::Replacement
        }
    }

    /// Span and replacement, the identity used when matching edits.
    pub fn key(&self) -> (usize, usize, &[String]) {
        (self.start, self.end, &self.replacement)
    }

    /// Checks the span is in range, the replacement has no internal
    /// whitespace and the edit actually changes something.
    pub fn is_valid_for(&self, source: &[String]) -> bool {
        self.start <= self.end
            && self.end <= source.len()
            && self.replacement.iter().all(|t| !t.is_empty() && !t.contains(char::is_whitespace))
            && source[self.start..self.end] != self.replacement[..]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("edit {index} overlaps or precedes the previous edit")]
    OverlappingEdits { index: usize },
    #[error("edit {index} span {start}..{end} is outside a sentence of {len} tokens")]
    SpanOutOfRange {
        index: usize,
        start: usize,
        end: usize,
        len: usize,
    },
}

/// Checks edits are in range, sorted and non-overlapping.
pub fn check_edits(len: usize, edits: &[Edit]) -> Result<(), ApplyError> {
    for (i, e) in edits.iter().enumerate() {
        if e.start > e.end || e.end > len {
            return Err(ApplyError::SpanOutOfRange {
                index: i,
                start: e.start,
                end: e.end,
                len,
            });
        }
        if i > 0 {
            let prev = &edits[i - 1];
            if e.start < prev.end || e.start < prev.start {
                return Err(ApplyError::OverlappingEdits { index: i });
            }
        }
    }
    Ok(())
}

/// Splices the replacements into the source, right to left.
pub fn apply_edits(src: &TokenizedSentence, edits: &[Edit]) -> Result<TokenizedSentence, ApplyError> {
    Ok(TokenizedSentence::from_tokens(apply_to_tokens(&src.tokens, edits)?))
}

pub fn apply_to_tokens(src: &[String], edits: &[Edit]) -> Result<Vec<String>, ApplyError> {
    check_edits(src.len(), edits)?;
    let mut tokens = src.to_vec();
    for e in edits.iter().rev() {
        tokens.splice(e.start..e.end, e.replacement.iter().cloned());
    }
    Ok(tokens)
}

/// Turns an alignment into edits. A maximal run of non-match operations
/// becomes one edit, except that a run made only of substitutions yields one
/// single-token edit per substitution. Edit types get the basic
/// (dictionary-free) classification.
pub fn extract_edits(script: &AlignmentScript, src: &TokenizedSentence, tgt: &TokenizedSentence) -> Vec<Edit> {
    extract_edits_with(script, src, tgt, &Classifier::default())
}

pub fn extract_edits_with(
    script: &AlignmentScript,
    src: &TokenizedSentence,
    tgt: &TokenizedSentence,
    classifier: &Classifier<'_>,
) -> Vec<Edit> {
    let mut edits = Vec::new();
    let ops = &script.ops;
    let mut i = 0;
    while i < ops.len() {
        if ops[i].kind == OpKind::Match {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < ops.len() && ops[i].kind != OpKind::Match {
            i += 1;
        }
        let run = &ops[run_start..i];
        if run.iter().all(|op| op.kind == OpKind::Sub) {
            for op in run {
                edits.push(Edit::new(op.src, op.src + 1, [tgt.tokens[op.tgt].clone()]));
            }
        } else {
            let start = run[0].src;
            let consumed = run.iter().filter(|op| matches!(op.kind, OpKind::Sub | OpKind::Del)).count();
            let replacement: Vec<String> = run
                .iter()
                .filter(|op| matches!(op.kind, OpKind::Sub | OpKind::Ins))
                .map(|op| tgt.tokens[op.tgt].clone())
                .collect();
            edits.push(Edit::new(start, start + consumed, replacement));
        }
    }
    for e in &mut edits {
        e.etype = classify_edit(e, &src.tokens, classifier);
    }
    edits
}

/// `align` followed by `extract_edits_with`.
pub fn diff(src: &TokenizedSentence, tgt: &TokenizedSentence, classifier: &Classifier<'_>) -> Vec<Edit> {
    let script = align(src, tgt);
    extract_edits_with(&script, src, tgt, classifier)
}
