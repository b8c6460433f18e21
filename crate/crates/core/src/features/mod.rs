//! Essay features for the scorer: complexity (counts, lengths, lexical
//! variety, Yngve and Frazier tree metrics), fluency under an n-gram
//! language model, and accuracy derived from the corrector's edits.

pub mod ngram;
pub mod syntax;

use std::collections::HashSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::Tier;
use crate::corpus::{ParseTree, TokenizedSentence};
use crate::corrector::CorrectionResult;
use crate::text::is_punct_token;

pub use ngram::{fluency, fluency_from_entropy, NgramError, NgramModel};
pub use syntax::{frazier_score, frazier_word_scores, yngve_depth, yngve_word_depths};

pub const SCHEMA_VERSION: &str = "features-v1";

/// Emitted feature names in their fixed order.
pub const SCHEMA: [&str; 15] = [
    "token_count",
    "sentence_count",
    "mean_sentence_length",
    "mean_word_length",
    "type_token_ratio",
    "yngve_mean",
    "yngve_max",
    "frazier_mean",
    "trees_missing",
    "fluency",
    "edit_density",
    "edited_sentence_ratio",
    "m_density",
    "u_density",
    "r_density",
];

/// Reserved for a developmental-level scale; never emitted.
pub const RESERVED: [&str; 1] = ["d_level"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("essay has no tokens")]
    EmptyEssay,
    #[error("{sentences} sentences but {corrections} correction results")]
    LengthMismatch { sentences: usize, corrections: usize },
}

pub type Partial = IndexMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: IndexMap<String, f64>,
    pub schema_version: String,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    /// Values in schema order.
    pub fn to_vec(&self) -> Vec<f64> {
        self.values.values().copied().collect()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn complexity_features(essay: &[TokenizedSentence]) -> Result<Partial, FeatureError> {
    let tokens: Vec<&String> = essay.iter().flat_map(|s| &s.tokens).collect();
    if tokens.is_empty() {
        return Err(FeatureError::EmptyEssay);
    }
    let n = tokens.len() as f64;
    let words: Vec<&String> = tokens.iter().copied().filter(|t| !is_punct_token(t)).collect();
    let word_chars: usize = words.iter().map(|w| w.chars().count()).sum();
    let types: HashSet<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
    let mut out = Partial::new();
    out.insert("token_count".into(), n);
    out.insert("sentence_count".into(), essay.len() as f64);
    out.insert("mean_sentence_length".into(), n / essay.len() as f64);
    out.insert("mean_word_length".into(), ratio(word_chars as f64, words.len() as f64));
    out.insert("type_token_ratio".into(), types.len() as f64 / n);
    Ok(out)
}

/// Word-pooled Yngve mean/max and Frazier mean over the essay's trees. With
/// no trees the metrics are 0 and `trees_missing` is 1.
pub fn tree_features(trees: &[ParseTree]) -> Partial {
    let depths: Vec<usize> = trees.iter().flat_map(yngve_word_depths).collect();
    let fraz: Vec<f64> = trees.iter().flat_map(frazier_word_scores).collect();
    let missing = depths.is_empty();
    let mut out = Partial::new();
    out.insert("yngve_mean".into(), ratio(depths.iter().sum::<usize>() as f64, depths.len() as f64));
    out.insert("yngve_max".into(), depths.iter().copied().max().unwrap_or(0) as f64);
    out.insert("frazier_mean".into(), ratio(fraz.iter().sum(), fraz.len() as f64));
    out.insert("trees_missing".into(), if missing { 1.0 } else { 0.0 });
    out
}

pub fn accuracy_features(src: &[TokenizedSentence], corrections: &[CorrectionResult]) -> Result<Partial, FeatureError> {
    if src.len() != corrections.len() {
        return Err(FeatureError::LengthMismatch {
            sentences: src.len(),
            corrections: corrections.len(),
        });
    }
    let tokens: usize = src.iter().map(TokenizedSentence::len).sum();
    let edits = corrections.iter().flat_map(|c| &c.edits);
    let (mut total, mut m, mut u, mut r) = (0usize, 0usize, 0usize, 0usize);
    for e in edits {
        total += 1;
        match e.tier() {
            Tier::Missing => m += 1,
            Tier::Unnecessary => u += 1,
            Tier::Replacement => r += 1,
        }
    }
    let edited = corrections.iter().filter(|c| !c.edits.is_empty()).count();
    let t = tokens as f64;
    let mut out = Partial::new();
    out.insert("edit_density".into(), ratio(total as f64, t));
    out.insert("edited_sentence_ratio".into(), ratio(edited as f64, src.len() as f64));
    out.insert("m_density".into(), ratio(m as f64, t));
    out.insert("u_density".into(), ratio(u as f64, t));
    out.insert("r_density".into(), ratio(r as f64, t));
    Ok(out)
}

/// Assembles full feature vectors; holds the optional fluency model.
#[derive(Debug, Clone, Default)]
pub struct Featurizer {
    pub lm: Option<NgramModel>,
}

impl Featurizer {
    pub fn new(lm: Option<NgramModel>) -> Self {
        Self { lm }
    }

    /// Without a language model `fluency` is 0.
    pub fn featurize(
        &self,
        essay: &[TokenizedSentence],
        corrections: &[CorrectionResult],
        trees: &[ParseTree],
    ) -> Result<FeatureVector, FeatureError> {
        let mut all = complexity_features(essay)?;
        all.extend(tree_features(trees));
        let flu = match &self.lm {
            Some(lm) => fluency(essay.iter().map(|s| s.tokens.as_slice()), lm).ok_or(FeatureError::EmptyEssay)?,
            None => 0.0,
        };
        all.insert("fluency".into(), flu);
        all.extend(accuracy_features(essay, corrections)?);
        let values: IndexMap<String, f64> = SCHEMA
            .iter()
            .map(|name| (name.to_string(), all.get(*name).copied().expect("every schema feature computed")))
            .collect();
        debug_assert!(values.values().all(|v| v.is_finite()));
        Ok(FeatureVector {
            values,
            schema_version: SCHEMA_VERSION.into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_tree, tokenize};
    use crate::corrector::{correct_rules, RuleSet};

    fn sent(t: &[&str]) -> TokenizedSentence {
        TokenizedSentence::from_tokens(t.iter().copied())
    }

    #[test]
    fn complexity_examples() {
        let f = complexity_features(&[sent(&["I", "ran", "."])]).unwrap();
        assert_eq!(f["token_count"], 3.0);
        assert_eq!(f["sentence_count"], 1.0);
        assert_eq!(f["mean_sentence_length"], 3.0);
        assert_eq!(f["mean_word_length"], 2.0);
        let f = complexity_features(&[sent(&["a", "b", "c", "d"]), sent(&["a", "b", "c", "d", "e", "f"])]).unwrap();
        assert_eq!(f["mean_sentence_length"], 5.0);
        let f = complexity_features(&[sent(&["a", "a", "b"])]).unwrap();
        assert!((f["type_token_ratio"] - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(complexity_features(&[]), Err(FeatureError::EmptyEssay));
    }

    #[test]
    fn accuracy_examples() {
        let rs = RuleSet::english();
        let s = tokenize("I gess almost people cannot speaking English.");
        let c = correct_rules(&s, &rs);
        let f = accuracy_features(std::slice::from_ref(&s), std::slice::from_ref(&c)).unwrap();
        assert_eq!(f["edit_density"], 0.375);
        assert_eq!(f["r_density"], 0.375);
        assert_eq!(f["edited_sentence_ratio"], 1.0);

        let ok = tokenize("It is fine.");
        let c2 = correct_rules(&ok, &rs);
        let f = accuracy_features(std::slice::from_ref(&ok), std::slice::from_ref(&c2)).unwrap();
        assert!(f.values().all(|v| *v == 0.0));
        let f = accuracy_features(&[s, ok], &[c, c2]).unwrap();
        assert_eq!(f["edited_sentence_ratio"], 0.5);
        assert!(accuracy_features(&[], &[correct_rules(&tokenize("x"), &rs)]).is_err());
    }

    #[test]
    fn full_vector_follows_schema() {
        let essay = [tokenize("The cat sat.")];
        let corr: Vec<_> = essay.iter().map(|s| correct_rules(s, &RuleSet::english())).collect();
        let fz = Featurizer::default();
        let v = fz.featurize(&essay, &corr, &[]).unwrap();
        assert_eq!(v.names().collect::<Vec<_>>(), SCHEMA);
        assert_eq!(v.get("trees_missing"), Some(1.0));
        assert!(v.get("d_level").is_none());
        let tree = parse_tree("(S (NP (DT the) (NN cat)) (VP (VBD sat)))").unwrap();
        let v = fz.featurize(&essay, &corr, &[tree]).unwrap();
        assert_eq!(v.get("yngve_mean"), Some(1.0));
        assert_eq!(v.get("frazier_mean"), Some(1.5));
        assert_eq!(v.get("trees_missing"), Some(0.0));
    }
}
