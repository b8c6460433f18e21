//! Integrated automated writing evaluation and grammatical error correction.
//!
//! A learner essay goes in; inline corrective edits, one overall score and
//! eight rubric scores come out. The crate also carries the evaluation
//! harnesses used to check each half of the pipeline:
//!
//! - [`corpus`]: tokenizer, sentence splitter, bracketed trees, essay TSV
//!   ingestion, placeholder/encoding noise handling and the M2 format.
//! - [`align`]: token alignment, edit extraction, error typing, edit application.
//! - [`geceval`]: span-matching precision / recall / F-beta over M2 gold.
//! - [`corrector`]: rule + dictionary baseline and an HTTP client for external models.
//! - [`features`]: complexity, syntactic, fluency and accuracy features.
//! - [`scorer`]: ridge regression per rubric, min-max scaling, QWK and the
//!   leave-one-prompt-out harness.
//! - [`service`]: submission store, processing workers, teacher review and the HTTP API.
//! - [`cli`]: the batch entry points behind the `writeright` binary.

pub mod align;
pub mod cli;
pub mod corpus;
pub mod corrector;
pub mod features;
pub mod geceval;
pub mod lexicon;
pub mod rubric;
pub mod scorer;
pub mod service;
pub mod text;

pub use align::{Edit, ErrorType};
pub use corpus::{tokenize, AnnotatedSentence, ParseTree, TokenizedSentence};
pub use lexicon::Dictionary;
