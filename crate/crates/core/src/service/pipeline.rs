use thiserror::Error;

use super::segments::sentence_segments;
use super::{FeedbackDocument, SentenceFeedback};
use crate::corpus::{tokenize, EntitySubstituter, NamePool, ParseTree, SentenceSplitter, TokenizedSentence};
use crate::corrector::{CorrectError, CorrectionResult, Corrector};
use crate::features::{FeatureError, FeatureVector, Featurizer};
use crate::scorer::{ScoreModel, ScorerError};

#[derive(Debug, Error)]
pub enum ProcessError {
    #[error("correction failed: {0}")]
    Correction(#[from] CorrectError),
    #[error("scoring failed: {0}")]
    Features(#[from] FeatureError),
    #[error("scoring failed: {0}")]
    Scoring(#[from] ScorerError),
}

/// Immutable processing resources shared by the workers.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub splitter: SentenceSplitter,
    pub names: NamePool,
    pub corrector: Corrector,
    pub featurizer: Featurizer,
    pub model: ScoreModel,
    /// Seed for placeholder name assignment.
    pub seed: u64,
}

/// Everything derived from an essay before scoring.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub sentences: Vec<TokenizedSentence>,
    pub corrections: Vec<CorrectionResult>,
    pub features: FeatureVector,
}

impl Pipeline {
    pub fn sentences(&self, text: &str) -> Vec<TokenizedSentence> {
        let mut subst = EntitySubstituter::new(&self.names, self.seed);
        self.splitter
            .split(text)
            .iter()
            .map(|s| subst.substitute(&tokenize(s)))
            .filter(|s| !s.is_empty())
            .collect()
    }

    /// Split, correct and featurize one essay.
    pub fn analyze(&self, text: &str, trees: &[ParseTree]) -> Result<Analysis, ProcessError> {
        let sentences = self.sentences(text);
        let corrections = self.corrector.correct_batch(&sentences)?;
        let features = self.featurizer.featurize(&sentences, &corrections, trees)?;
        Ok(Analysis {
            sentences,
            corrections,
            features,
        })
    }

    /// Analyze and score one essay and lay out its feedback.
    pub fn process(&self, id: &str, prompt_id: u8, text: &str) -> Result<FeedbackDocument, ProcessError> {
        let Analysis { corrections, features, .. } = self.analyze(text, &[])?;
        let scores = self.model.predict(&features, prompt_id)?;
        let backend = corrections.first().map(|c| c.backend.clone()).unwrap_or_default();
        let sentences: Vec<SentenceFeedback> = corrections
            .into_iter()
            .map(|c| SentenceFeedback {
                source: c.source.tokens,
                edits: c.edits,
                corrected: c.corrected.tokens,
            })
            .collect();
        let segments = sentences
            .iter()
            .enumerate()
            .flat_map(|(i, s)| sentence_segments(i, &s.source, &s.edits))
            .collect();
        Ok(FeedbackDocument {
            submission_id: id.to_string(),
            prompt_id,
            sentences,
            scores,
            segments,
            backend,
            review: None,
        })
    }
}
