//! Hypothesis corrections: the rule + dictionary baseline and a batch HTTP
//! client for external correction models. Whatever the backend, edits are
//! recomputed locally by aligning the source with the returned sentence.

pub mod rules;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{diff, Classifier, Edit};
use crate::corpus::{tokenize, TokenizedSentence};

pub use rules::{apply_rules, correct_rules, parse_rules, spell_pass, Rule, RuleError, RuleSet, RULES_BACKEND};

pub const EXTERNAL_BACKEND: &str = "external";
pub const FALLBACK_BACKEND: &str = "fallback-rules";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionResult {
    pub source: TokenizedSentence,
    pub corrected: TokenizedSentence,
    pub edits: Vec<Edit>,
    pub backend: String,
}

/// Where and how to reach an external correction model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExternalConfig {
    /// Scheme, host and port, e.g. `http://127.0.0.1:9000`.
    pub base_url: String,
    pub path: String,
    pub auth_header: Option<String>,
    pub auth_token: Option<String>,
    pub batch_size: usize,
    pub timeout_ms: u64,
    /// Upper bound on batches in flight at once.
    pub max_in_flight: usize,
}

impl Default for ExternalConfig {
    fn default() -> Self {
        Self {
            base_url: "http://127.0.0.1:9000".into(),
            path: "/correct".into(),
            auth_header: None,
            auth_token: None,
            batch_size: 32,
            timeout_ms: 10_000,
            max_in_flight: 4,
        }
    }
}

impl ExternalConfig {
    pub fn endpoint(&self) -> String {
        format!("{}/{}", self.base_url.trim_end_matches('/'), self.path.trim_start_matches('/'))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExternalError {
    #[error("backend did not answer within {0} ms")]
    Timeout(u64),
    #[error("malformed backend response: {0}")]
    BadResponse(String),
    #[error("sent {sent} sentences but received {received}")]
    LengthMismatch { sent: usize, received: usize },
    #[error("backend returned HTTP {0}")]
    HttpStatus(u16),
    #[error("transport error: {0}")]
    Transport(String),
}

#[derive(Serialize)]
struct BatchRequest<'a> {
    sentences: Vec<&'a str>,
}

#[derive(Deserialize)]
struct BatchResponse {
    corrections: Vec<String>,
}

fn agent(config: &ExternalConfig) -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
        .http_status_as_error(false)
        .build()
        .into()
}

fn post_batch(agent: &ureq::Agent, config: &ExternalConfig, batch: &[TokenizedSentence]) -> Result<Vec<String>, ExternalError> {
    let body = serde_json::to_string(&BatchRequest {
        sentences: batch.iter().map(|s| s.text.as_str()).collect(),
    })
    .expect("string list serializes");
    let mut req = agent.post(config.endpoint()).header("content-type", "application/json");
    if let (Some(name), Some(token)) = (&config.auth_header, &config.auth_token) {
        req = req.header(name.as_str(), token.as_str());
    }
    let map_err = |e: ureq::Error| match e {
        ureq::Error::Timeout(_) => ExternalError::Timeout(config.timeout_ms),
        other => ExternalError::Transport(other.to_string()),
    };
    let mut resp = req.send(body).map_err(map_err)?;
    let status = resp.status().as_u16();
    if !(200..300).contains(&status) {
        return Err(ExternalError::HttpStatus(status));
    }
    let text = resp.body_mut().read_to_string().map_err(map_err)?;
    let parsed: BatchResponse = serde_json::from_str(&text).map_err(|e| ExternalError::BadResponse(e.to_string()))?;
    if parsed.corrections.len() != batch.len() {
        return Err(ExternalError::LengthMismatch {
            sent: batch.len(),
            received: parsed.corrections.len(),
        });
    }
    Ok(parsed.corrections)
}

/// Sends `src` in batches of `config.batch_size`, several batches at a
/// time, and reassembles results in input order. Returned sentences are
/// re-tokenized and diffed against the source.
pub fn correct_external(
    src: &[TokenizedSentence],
    config: &ExternalConfig,
    classifier: &Classifier<'_>,
) -> Result<Vec<CorrectionResult>, ExternalError> {
    let agent = agent(config);
    let batches: Vec<&[TokenizedSentence]> = src.chunks(config.batch_size.max(1)).collect();
    let mut corrections = Vec::with_capacity(src.len());
    for wave in batches.chunks(config.max_in_flight.max(1)) {
        let answers: Vec<_> = std::thread::scope(|s| {
            let handles: Vec<_> = wave.iter().map(|b| s.spawn(|| post_batch(&agent, config, b))).collect();
            handles.into_iter().map(|h| h.join().expect("batch worker panicked")).collect()
        });
        for a in answers {
            corrections.extend(a?);
        }
    }
    Ok(src
        .iter()
        .zip(corrections)
        .map(|(s, text)| {
            let corrected = tokenize(&text);
            CorrectionResult {
                edits: diff(s, &corrected, classifier),
                source: s.clone(),
                corrected,
                backend: EXTERNAL_BACKEND.to_string(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Rules,
    External,
}

#[derive(Debug, Error)]
pub enum CorrectError {
    #[error("backend unavailable: {0}")]
    BackendUnavailable(#[source] ExternalError),
    #[error("external backend selected but not configured")]
    NotConfigured,
}

/// Backend selection plus everything each backend needs.
#[derive(Debug, Clone)]
pub struct Corrector {
    pub rules: RuleSet,
    pub backend: Backend,
    pub external: Option<ExternalConfig>,
    /// On external failure, answer with the rule baseline instead of an error.
    pub fallback: bool,
}

impl Corrector {
    pub fn rules(rules: RuleSet) -> Self {
        Self {
            rules,
            backend: Backend::Rules,
            external: None,
            fallback: true,
        }
    }

    pub fn external(rules: RuleSet, config: ExternalConfig, fallback: bool) -> Self {
        Self {
            rules,
            backend: Backend::External,
            external: Some(config),
            fallback,
        }
    }

    pub fn correct(&self, src: &TokenizedSentence) -> Result<CorrectionResult, CorrectError> {
        let mut out = self.correct_batch(std::slice::from_ref(src))?;
        Ok(out.pop().expect("one result per sentence"))
    }

    pub fn correct_batch(&self, src: &[TokenizedSentence]) -> Result<Vec<CorrectionResult>, CorrectError> {
        let rules = || src.iter().map(|s| correct_rules(s, &self.rules)).collect::<Vec<_>>();
        match self.backend {
            Backend::Rules => Ok(rules()),
            Backend::External => {
                let config = self.external.as_ref().ok_or(CorrectError::NotConfigured)?;
                match correct_external(src, config, &self.rules.classifier()) {
                    Ok(r) => Ok(r),
                    Err(e) if self.fallback => {
                        log::warn!("external corrector failed, using rules: {e}");
                        let mut r = rules();
                        r.iter_mut().for_each(|c| c.backend = FALLBACK_BACKEND.to_string());
                        Ok(r)
                    }
                    Err(e) => Err(CorrectError::BackendUnavailable(e)),
                }
            }
        }
    }
}
