//! Span-based GEC scoring against M2 gold annotations.
//!
//! A hypothesis edit is a true positive when its span and replacement
//! match a gold edit exactly; error types are ignored. For each sentence the
//! gold annotator that maximizes `(tp, -fp, -fn)` is chosen (lowest id on
//! ties), counts are summed over the corpus and precision, recall and F-beta
//! are computed from the sums.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::Edit;
use crate::corpus::AnnotatedSentence;

pub const DEFAULT_BETA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GecEvalError {
    #[error("sentence {0} has no annotators")]
    NoAnnotators(usize),
    #[error("hypothesis has {hyp} sentences but gold has {gold}")]
    SentenceCountMismatch { hyp: usize, gold: usize },
    #[error("sentence {0}: hypothesis and gold source tokens differ")]
    SourceMismatch(usize),
    #[error("beta must be positive and finite")]
    InvalidBeta,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl std::ops::AddAssign for EditCounts {
    fn add_assign(&mut self, o: Self) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
    }
}

/// Set-based comparison of hypothesis and gold edits.
pub fn match_edits(hyp: &[Edit], gold: &[Edit]) -> EditCounts {
    let h: HashSet<_> = hyp.iter().map(Edit::key).collect();
    let g: HashSet<_> = gold.iter().map(Edit::key).collect();
    let tp = h.intersection(&g).count() as u64;
    EditCounts {
        tp,
        fp: h.len() as u64 - tp,
        fn_: g.len() as u64 - tp,
    }
}

/// Precision, recall and F-beta from counts. Empty denominators give 1.0;
/// F-beta is 0 only when precision and recall are both 0.
pub fn prf(counts: EditCounts, beta: f64) -> (f64, f64, f64) {
    let EditCounts { tp, fp, fn_ } = counts;
    let p = if tp + fp == 0 { 1.0 } else { tp as f64 / (tp + fp) as f64 };
    let r = if tp + fn_ == 0 { 1.0 } else { tp as f64 / (tp + fn_) as f64 };
    let b2 = beta * beta;
    let f = if p + r == 0.0 { 0.0 } else { (1.0 + b2) * p * r / (b2 * p + r) };
    (p, r, f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
    pub beta: f64,
    /// No edits on either side: precision and recall fall back to 1.0.
    pub degenerate: bool,
}

impl EvalReport {
    pub fn from_counts(counts: EditCounts, beta: f64) -> Self {
        let (precision, recall, f_beta) = prf(counts, beta);
        Self {
            tp: counts.tp,
            fp: counts.fp,
            fn_: counts.fn_,
            precision,
            recall,
            f_beta,
            beta,
            degenerate: counts.tp + counts.fp + counts.fn_ == 0,
        }
    }

    /// Fixed 4-decimal `key: value` lines.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "TP: {}", self.tp);
        let _ = writeln!(s, "FP: {}", self.fp);
        let _ = writeln!(s, "FN: {}", self.fn_);
        let _ = writeln!(s, "Precision: {:.4}", self.precision);
        let _ = writeln!(s, "Recall: {:.4}", self.recall);
        let _ = writeln!(s, "F{}: {:.4}", self.beta, self.f_beta);
        if self.degenerate {
            s.push_str("Note: no edits in hypothesis or gold; precision and recall default to 1.0\n");
        }
        s
    }
}

/// Best gold annotator for one sentence by `(tp, -fp, -fn)`.
pub fn best_annotator(hyp: &[Edit], gold: &AnnotatedSentence) -> Option<(u32, EditCounts)> {
    let mut best: Option<(u32, EditCounts)> = None;
    for (&id, edits) in &gold.annotations {
        let c = match_edits(hyp, edits);
        let better = match best {
            None => true,
            Some((_, b)) => (c.tp, std::cmp::Reverse(c.fp), std::cmp::Reverse(c.fn_)) > (b.tp, std::cmp::Reverse(b.fp), std::cmp::Reverse(b.fn_)),
        };
        if better {
            best = Some((id, c));
        }
    }
    best
}

pub fn score_corpus<'a, I>(pairs: I, beta: f64) -> Result<EvalReport, GecEvalError>
where
    I: IntoIterator<Item = (&'a [Edit], &'a AnnotatedSentence)>,
{
    if !(beta.is_finite() && beta > 0.0) {
        return Err(GecEvalError::InvalidBeta);
    }
    let mut total = EditCounts::default();
    for (i, (hyp, gold)) in pairs.into_iter().enumerate() {
        let (_, c) = best_annotator(hyp, gold).ok_or(GecEvalError::NoAnnotators(i))?;
        total += c;
    }
    Ok(EvalReport::from_counts(total, beta))
}

/// Scores a hypothesis M2 (first annotator of each entry, none = no edits)
/// against a gold M2 with matching sentences.
pub fn score_m2(hyp: &[AnnotatedSentence], gold: &[AnnotatedSentence], beta: f64) -> Result<EvalReport, GecEvalError> {
    if hyp.len() != gold.len() {
        return Err(GecEvalError::SentenceCountMismatch {
            hyp: hyp.len(),
            gold: gold.len(),
        });
    }
    let mut hyp_edits = Vec::with_capacity(hyp.len());
    for (i, (h, g)) in hyp.iter().zip(gold).enumerate() {
        if h.source.tokens != g.source.tokens {
            return Err(GecEvalError::SourceMismatch(i));
        }
        hyp_edits.push(h.annotations.values().next().cloned().unwrap_or_default());
    }
    score_corpus(hyp_edits.iter().map(Vec::as_slice).zip(gold.iter()), beta)
}
