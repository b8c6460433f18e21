//! Add-k smoothed n-gram language model and the fluency score built on it.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const BOS: &str = "<s>";
pub const UNK: &str = "<unk>";
const CHECKPOINT_FORMAT: &str = "writeright-ngram";
const CHECKPOINT_VERSION: u32 = 1;
const PROB_FLOOR: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum NgramError {
    #[error("order must be at least 1")]
    BadOrder,
    #[error("smoothing constant must be finite and non-negative")]
    BadSmoothing,
    #[error("unsupported checkpoint ({0})")]
    BadCheckpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Counts of `token` after each (order-1)-token context. Tokens are
/// lowercased, contexts are padded with `<s>` and there is no end marker.
/// Unseen words map to `<unk>`, which is always in the vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramModel {
    order: usize,
    k: f64,
    vocab: BTreeSet<String>,
    counts: BTreeMap<Vec<String>, BTreeMap<String, u64>>,
    context_totals: BTreeMap<Vec<String>, u64>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format: String,
    version: u32,
    order: usize,
    k: f64,
    vocabulary: Vec<String>,
    // context tokens joined by single spaces
    counts: BTreeMap<String, BTreeMap<String, u64>>,
}

impl NgramModel {
    pub fn train<'a, I>(sentences: I, order: usize, k: f64) -> Result<Self, NgramError>
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        if order == 0 {
            return Err(NgramError::BadOrder);
        }
        if !(k.is_finite() && k >= 0.0) {
            return Err(NgramError::BadSmoothing);
        }
        let mut vocab = BTreeSet::from([UNK.to_string()]);
        let mut counts: BTreeMap<Vec<String>, BTreeMap<String, u64>> = BTreeMap::new();
        for s in sentences {
            let toks: Vec<String> = s.iter().map(|t| t.to_lowercase()).collect();
            vocab.extend(toks.iter().cloned());
            for i in 0..toks.len() {
                let ctx = context(&toks, i, order);
                *counts.entry(ctx).or_default().entry(toks[i].clone()).or_default() += 1;
            }
        }
        Ok(Self::assemble(order, k, vocab, counts))
    }

    fn assemble(order: usize, k: f64, vocab: BTreeSet<String>, counts: BTreeMap<Vec<String>, BTreeMap<String, u64>>) -> Self {
        let context_totals = counts.iter().map(|(c, m)| (c.clone(), m.values().sum())).collect();
        Self {
            order,
            k,
            vocab,
            counts,
            context_totals,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.vocab.iter().map(String::as_str)
    }

    fn map_token<'a>(&'a self, t: &'a str) -> &'a str {
        if t == BOS || self.vocab.contains(t) {
            t
        } else {
            UNK
        }
    }

    /// `(c(ctx, w) + k) / (c(ctx) + k|V|)`, uniform when the denominator is 0.
    /// `context` and `token` are expected lowercase.
    pub fn prob(&self, context: &[String], token: &str) -> f64 {
        let ctx: Vec<String> = context.iter().map(|t| self.map_token(t).to_string()).collect();
        let w = self.map_token(token);
        let v = self.vocab.len() as f64;
        let c = self.counts.get(&ctx).and_then(|m| m.get(w)).copied().unwrap_or(0) as f64;
        let total = self.context_totals.get(&ctx).copied().unwrap_or(0) as f64;
        let denom = total + self.k * v;
        if denom == 0.0 {
            1.0 / v
        } else {
            (c + self.k) / denom
        }
    }

    /// Per-token cross-entropy in bits over all tokens of `sentences`, or
    /// `None` when there are no tokens.
    pub fn cross_entropy<'a, I>(&self, sentences: I) -> Option<f64>
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        let mut sum = 0.0;
        let mut n = 0usize;
        for s in sentences {
            let toks: Vec<String> = s.iter().map(|t| t.to_lowercase()).collect();
            for i in 0..toks.len() {
                let p = self.prob(&context(&toks, i, self.order), &toks[i]).max(PROB_FLOOR);
                sum += p.log2();
                n += 1;
            }
        }
        (n > 0).then(|| -sum / n as f64)
    }

    pub fn to_json(&self) -> String {
        let ck = Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            order: self.order,
            k: self.k,
            vocabulary: self.vocab.iter().cloned().collect(),
            counts: self.counts.iter().map(|(c, m)| (c.join(" "), m.clone())).collect(),
        };
        serde_json::to_string_pretty(&ck).expect("checkpoint serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, NgramError> {
        let ck: Checkpoint = serde_json::from_str(s)?;
        if ck.format != CHECKPOINT_FORMAT || ck.version != CHECKPOINT_VERSION {
            return Err(NgramError::BadCheckpoint(format!("{} v{}", ck.format, ck.version)));
        }
        if ck.order == 0 {
            return Err(NgramError::BadOrder);
        }
        if !(ck.k.is_finite() && ck.k >= 0.0) {
            return Err(NgramError::BadSmoothing);
        }
        let mut vocab: BTreeSet<String> = ck.vocabulary.into_iter().collect();
        vocab.insert(UNK.into());
        let mut counts = BTreeMap::new();
        for (c, m) in ck.counts {
            let ctx: Vec<String> = c.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect();
            if ctx.len() != ck.order - 1 {
                return Err(NgramError::BadCheckpoint(format!("context {c:?} has wrong length")));
            }
            counts.insert(ctx, m);
        }
        Ok(Self::assemble(ck.order, ck.k, vocab, counts))
    }

    pub fn save(&self, path: &Path) -> Result<(), NgramError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, NgramError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

fn context(toks: &[String], i: usize, order: usize) -> Vec<String> {
    (0..order - 1)
        .map(|back| {
            let d = order - 1 - back;
            if i >= d {
                toks[i - d].clone()
            } else {
                BOS.to_string()
            }
        })
        .collect()
}

/// `1 / (1 + max(0, H))` for per-token cross-entropy `H` in bits.
pub fn fluency_from_entropy(h: f64) -> f64 {
    1.0 / (1.0 + h.max(0.0))
}

/// Fluency of `sentences` under `model`, `None` for an empty essay.
pub fn fluency<'a, I>(sentences: I, model: &NgramModel) -> Option<f64>
where
    I: IntoIterator<Item = &'a [String]>,
{
    model.cross_entropy(sentences).map(fluency_from_entropy)
}
