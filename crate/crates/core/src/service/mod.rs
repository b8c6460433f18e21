//! Submission handling: store essays, process them on worker threads into
//! feedback documents (corrections, diff segments, scores) and gate release
//! behind optional teacher review.
//!
//! Status moves `received → processed → released`, or
//! `processed → returned → received` when a teacher sends an essay back.
//! With review mode off, learners read documents as soon as they are processed.

pub mod http;
pub mod pipeline;
pub mod segments;
pub mod store;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::sync::{Arc, Mutex, RwLock};
use std::thread::JoinHandle;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{apply_to_tokens, check_edits, Edit};
use crate::corpus::{NamePool, SentenceSplitter};
use crate::corrector::{Backend, Corrector, ExternalConfig, RuleSet};
use crate::features::{Featurizer, NgramModel, SCHEMA, SCHEMA_VERSION};
use crate::rubric;
use crate::scorer::{RubricScoreSet, ScoreModel};

pub use pipeline::{Analysis, Pipeline, ProcessError};
pub use segments::{corrected_side, sentence_segments, source_side, Segment, SegmentKind};
pub use store::Store;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Received,
    Processed,
    Released,
    Returned,
}

impl Status {
    pub fn can_become(self, next: Status) -> bool {
        use Status::*;
        matches!(
            (self, next),
            (Received, Processed) | (Processed, Released) | (Processed, Returned) | (Returned, Received)
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Received => "received",
            Status::Processed => "processed",
            Status::Released => "released",
            Status::Returned => "returned",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    #[default]
    Learner,
    Teacher,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceFeedback {
    pub source: Vec<String>,
    pub edits: Vec<Edit>,
    pub corrected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackDocument {
    pub submission_id: String,
    pub prompt_id: u8,
    pub sentences: Vec<SentenceFeedback>,
    pub scores: RubricScoreSet,
    pub segments: Vec<Segment>,
    pub backend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub review: Option<ReviewRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditDecision {
    pub sentence: usize,
    pub edit: usize,
    pub accept: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReviewAction {
    #[default]
    Release,
    Return,
}

/// A teacher's decision on a processed document. Edits without a decision
/// are kept.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReviewRecord {
    pub reviewer: String,
    pub decisions: Vec<EditDecision>,
    pub overrides: BTreeMap<String, f64>,
    pub note: Option<String>,
    pub action: ReviewAction,
    /// Milliseconds since the Unix epoch; set by the service.
    pub decided_at: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submission {
    pub id: String,
    pub learner_id: String,
    pub prompt_id: u8,
    pub text: String,
    pub created_at: u64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback: Option<FeedbackDocument>,
}

/// Status view without the essay or its feedback.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmissionStatus {
    pub id: String,
    pub learner_id: String,
    pub prompt_id: u8,
    pub created_at: u64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl From<&Submission> for SubmissionStatus {
    fn from(s: &Submission) -> Self {
        Self {
            id: s.id.clone(),
            learner_id: s.learner_id.clone(),
            prompt_id: s.prompt_id,
            created_at: s.created_at,
            status: s.status,
            error: s.error.clone(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("essay text is empty")]
    EmptyText,
    #[error("unknown prompt {0}")]
    UnknownPrompt(u8),
    #[error("no submission {0}")]
    NotFound(String),
    #[error("feedback not available yet (status {})", .0.as_str())]
    NotYetAvailable(Status),
    #[error("submission is {}, not processed", .0.as_str())]
    NotProcessed(Status),
    #[error("submission was already released")]
    AlreadyReleased,
    #[error("review mode is disabled")]
    ReviewDisabled,
    #[error("invalid review: {0}")]
    InvalidReview(String),
    #[error("storage error: {0}")]
    Storage(#[from] std::io::Error),
    #[error("configuration error: {0}")]
    Config(String),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::EmptyText => "EmptyText",
            ServiceError::UnknownPrompt(_) => "UnknownPrompt",
            ServiceError::NotFound(_) => "NotFound",
            ServiceError::NotYetAvailable(_) => "NotYetAvailable",
            ServiceError::NotProcessed(_) => "NotProcessed",
            ServiceError::AlreadyReleased => "AlreadyReleased",
            ServiceError::ReviewDisabled => "ReviewDisabled",
            ServiceError::InvalidReview(_) => "InvalidReview",
            ServiceError::Storage(_) => "Storage",
            ServiceError::Config(_) => "Config",
        }
    }
}

/// Deployment configuration, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    pub bind: String,
    pub port: u16,
    pub workers: usize,
    pub review_mode: bool,
    pub prompts: Vec<u8>,
    pub model_path: Option<PathBuf>,
    pub lm_path: Option<PathBuf>,
    pub rules_path: Option<PathBuf>,
    pub dictionary_path: Option<PathBuf>,
    pub backend: Backend,
    pub fallback: bool,
    pub external: ExternalConfig,
    /// Replacement names per placeholder category; the built-in pool if unset.
    pub name_pool: Option<BTreeMap<String, Vec<String>>>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            data_dir: PathBuf::from("writeright-data"),
            bind: "127.0.0.1".into(),
            port: 8080,
            workers: 2,
            review_mode: false,
            prompts: (1..=8).collect(),
            model_path: None,
            lm_path: None,
            rules_path: None,
            dictionary_path: None,
            backend: Backend::Rules,
            fallback: true,
            external: ExternalConfig::default(),
            name_pool: None,
        }
    }
}

impl ServiceConfig {
    pub fn load(path: &Path) -> Result<Self, ServiceError> {
        let s = std::fs::read_to_string(path)?;
        toml::from_str(&s).map_err(|e| ServiceError::Config(format!("{}: {e}", path.display())))
    }

    /// Loads every model and resource the configuration names.
    pub fn build_pipeline(&self) -> Result<Pipeline, ServiceError> {
        let cfg = |e: &dyn std::fmt::Display| ServiceError::Config(e.to_string());
        let rules = RuleSet::load(self.rules_path.as_deref(), self.dictionary_path.as_deref()).map_err(|e| cfg(&e))?;
        let corrector = Corrector {
            rules,
            backend: self.backend,
            external: Some(self.external.clone()),
            fallback: self.fallback,
        };
        let lm = match &self.lm_path {
            Some(p) => Some(NgramModel::load(p).map_err(|e| cfg(&e))?),
            None => None,
        };
        let model = match &self.model_path {
            Some(p) => ScoreModel::load(p).map_err(|e| cfg(&e))?,
            None => {
                log::warn!("no score model configured; every score will be 50");
                ScoreModel::constant(&SCHEMA, SCHEMA_VERSION, 0.5)
            }
        };
        let names = match &self.name_pool {
            Some(m) => NamePool::new(m.clone()).map_err(|e| cfg(&e))?,
            None => NamePool::default(),
        };
        Ok(Pipeline {
            splitter: SentenceSplitter::default(),
            names,
            corrector,
            featurizer: Featurizer::new(lm),
            model,
            seed: 0,
        })
    }
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

struct Inner {
    review_mode: bool,
    prompts: HashSet<u8>,
    pipeline: Pipeline,
    store: Store,
    subs: RwLock<HashMap<String, Submission>>,
    // serializes every mutation of `subs` together with its disk write
    writer: Mutex<()>,
    in_flight: Mutex<HashSet<String>>,
    queue: Mutex<Option<mpsc::Sender<String>>>,
}

impl Inner {
    fn get(&self, id: &str) -> Result<Submission, ServiceError> {
        self.subs
            .read()
            .expect("lock poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(id.to_string()))
    }

    /// Persists `sub`, then publishes it to readers.
    fn put(&self, sub: Submission) -> Result<(), ServiceError> {
        self.store.save(&sub)?;
        self.subs.write().expect("lock poisoned").insert(sub.id.clone(), sub);
        Ok(())
    }

    fn enqueue(&self, id: &str) {
        if let Some(tx) = self.queue.lock().expect("lock poisoned").as_ref() {
            let _ = tx.send(id.to_string());
        }
    }

    fn work(&self, id: &str) {
        if !self.in_flight.lock().expect("lock poisoned").insert(id.to_string()) {
            return;
        }
        if let Ok(sub) = self.get(id) {
            if sub.status == Status::Received {
                let result = self.pipeline.process(&sub.id, sub.prompt_id, &sub.text);
                let _w = self.writer.lock().expect("lock poisoned");
                if let Ok(mut cur) = self.get(id) {
                    if cur.status == Status::Received && cur.text == sub.text {
                        match result {
                            Ok(doc) => {
                                cur.status = Status::Processed;
                                cur.error = None;
                                cur.feedback = Some(doc);
                            }
                            Err(e) => {
                                log::error!("processing {id} failed: {e}");
                                cur.error = Some(e.to_string());
                            }
                        }
                        if let Err(e) = self.put(cur) {
                            log::error!("cannot store {id}: {e}");
                        }
                    }
                }
            }
        }
        self.in_flight.lock().expect("lock poisoned").remove(id);
    }
}

/// The submission service. Cloning shares the same state and workers.
#[derive(Clone)]
pub struct Service {
    inner: Arc<Inner>,
    workers: Arc<Mutex<Vec<JoinHandle<()>>>>,
}

impl Service {
    /// Opens the store, loads every stored submission, starts `workers`
    /// processing threads and re-queues anything still `received`.
    pub fn start(config: &ServiceConfig, pipeline: Pipeline) -> Result<Self, ServiceError> {
        let store = Store::open(&config.data_dir)?;
        let existing = store.load_all()?;
        let (tx, rx) = mpsc::channel::<String>();
        let inner = Arc::new(Inner {
            review_mode: config.review_mode,
            prompts: config.prompts.iter().copied().collect(),
            pipeline,
            store,
            subs: RwLock::new(existing.iter().map(|s| (s.id.clone(), s.clone())).collect()),
            writer: Mutex::new(()),
            in_flight: Mutex::new(HashSet::new()),
            queue: Mutex::new(Some(tx)),
        });
        let rx = Arc::new(Mutex::new(rx));
        let handles = (0..config.workers.max(1))
            .map(|_| {
                let inner = Arc::clone(&inner);
                let rx = Arc::clone(&rx);
                std::thread::spawn(move || loop {
                    let next = rx.lock().expect("lock poisoned").recv();
                    match next {
                        Ok(id) => inner.work(&id),
                        Err(_) => break,
                    }
                })
            })
            .collect();
        for s in existing.iter().filter(|s| s.status == Status::Received) {
            inner.enqueue(&s.id);
        }
        Ok(Self {
            inner,
            workers: Arc::new(Mutex::new(handles)),
        })
    }

    pub fn review_mode(&self) -> bool {
        self.inner.review_mode
    }

    /// Stops accepting work and waits for the workers to drain the queue.
    pub fn shutdown(&self) {
        self.inner.queue.lock().expect("lock poisoned").take();
        let handles = std::mem::take(&mut *self.workers.lock().expect("lock poisoned"));
        for h in handles {
            let _ = h.join();
        }
    }

    pub fn submit(&self, learner_id: &str, prompt_id: u8, text: &str) -> Result<Submission, ServiceError> {
        if text.trim().is_empty() {
            return Err(ServiceError::EmptyText);
        }
        if !self.inner.prompts.contains(&prompt_id) {
            return Err(ServiceError::UnknownPrompt(prompt_id));
        }
        let sub = Submission {
            id: uuid::Uuid::new_v4().to_string(),
            learner_id: learner_id.to_string(),
            prompt_id,
            text: text.to_string(),
            created_at: now_ms(),
            status: Status::Received,
            error: None,
            feedback: None,
        };
        {
            let _w = self.inner.writer.lock().expect("lock poisoned");
            self.inner.put(sub.clone())?;
        }
        self.inner.enqueue(&sub.id);
        Ok(sub)
    }

    /// Replaces the text of a returned submission and processes it again.
    pub fn resubmit(&self, id: &str, text: &str) -> Result<Submission, ServiceError> {
        if text.trim().is_empty() {
            return Err(ServiceError::EmptyText);
        }
        let sub = {
            let _w = self.inner.writer.lock().expect("lock poisoned");
            let mut sub = self.inner.get(id)?;
            if sub.status != Status::Returned {
                return Err(ServiceError::NotProcessed(sub.status));
            }
            sub.status = Status::Received;
            sub.text = text.to_string();
            sub.error = None;
            sub.feedback = None;
            self.inner.put(sub.clone())?;
            sub
        };
        self.inner.enqueue(id);
        Ok(sub)
    }

    pub fn status(&self, id: &str) -> Result<SubmissionStatus, ServiceError> {
        self.inner.get(id).map(|s| SubmissionStatus::from(&s))
    }

    pub fn submission(&self, id: &str) -> Result<Submission, ServiceError> {
        self.inner.get(id)
    }

    pub fn get_feedback(&self, id: &str, role: Role) -> Result<FeedbackDocument, ServiceError> {
        let sub = self.inner.get(id)?;
        use Status::*;
        let visible = match role {
            Role::Teacher => matches!(sub.status, Processed | Released | Returned),
            Role::Learner if self.inner.review_mode => matches!(sub.status, Released | Returned),
            Role::Learner => matches!(sub.status, Processed | Released | Returned),
        };
        match (visible, sub.feedback) {
            (true, Some(doc)) => Ok(doc),
            _ => Err(ServiceError::NotYetAvailable(sub.status)),
        }
    }

    /// Processed submissions awaiting review, oldest first.
    pub fn review_queue(&self) -> Result<Vec<SubmissionStatus>, ServiceError> {
        if !self.inner.review_mode {
            return Err(ServiceError::ReviewDisabled);
        }
        let subs = self.inner.subs.read().expect("lock poisoned");
        let mut out: Vec<SubmissionStatus> = subs.values().filter(|s| s.status == Status::Processed).map(SubmissionStatus::from).collect();
        out.sort_by(|a, b| (a.created_at, &a.id).cmp(&(b.created_at, &b.id)));
        Ok(out)
    }

    pub fn review(&self, id: &str, mut record: ReviewRecord) -> Result<FeedbackDocument, ServiceError> {
        if !self.inner.review_mode {
            return Err(ServiceError::ReviewDisabled);
        }
        let _w = self.inner.writer.lock().expect("lock poisoned");
        let mut sub = self.inner.get(id)?;
        match sub.status {
            Status::Processed => {}
            Status::Released => return Err(ServiceError::AlreadyReleased),
            other => return Err(ServiceError::NotProcessed(other)),
        }
        let mut doc = sub.feedback.clone().ok_or(ServiceError::NotProcessed(sub.status))?;
        record.decided_at = now_ms();
        apply_review(&mut doc, &record)?;
        sub.status = match record.action {
            ReviewAction::Release => Status::Released,
            ReviewAction::Return => Status::Returned,
        };
        doc.review = Some(record);
        sub.feedback = Some(doc.clone());
        self.inner.put(sub)?;
        Ok(doc)
    }
}

/// Drops rejected edits, rebuilds corrections and segments, and applies
/// score overrides.
pub fn apply_review(doc: &mut FeedbackDocument, record: &ReviewRecord) -> Result<(), ServiceError> {
    let invalid = |m: String| ServiceError::InvalidReview(m);
    for (name, v) in &record.overrides {
        if !rubric::is_score_name(name) {
            return Err(invalid(format!("unknown score {name:?}")));
        }
        if !(0.0..=100.0).contains(v) {
            return Err(invalid(format!("override {name}={v} outside [0, 100]")));
        }
    }
    let mut rejected: HashSet<(usize, usize)> = HashSet::new();
    for d in &record.decisions {
        let ok = doc.sentences.get(d.sentence).is_some_and(|s| d.edit < s.edits.len());
        if !ok {
            return Err(invalid(format!("no edit {} in sentence {}", d.edit, d.sentence)));
        }
        if !d.accept {
            rejected.insert((d.sentence, d.edit));
        }
    }
    for (i, s) in doc.sentences.iter_mut().enumerate() {
        let kept: Vec<Edit> = s.edits.iter().enumerate().filter(|(j, _)| !rejected.contains(&(i, *j))).map(|(_, e)| e.clone()).collect();
        check_edits(s.source.len(), &kept).map_err(|e| invalid(e.to_string()))?;
        s.corrected = apply_to_tokens(&s.source, &kept).map_err(|e| invalid(e.to_string()))?;
        s.edits = kept;
    }
    doc.segments = doc.sentences.iter().enumerate().flat_map(|(i, s)| sentence_segments(i, &s.source, &s.edits)).collect();
    for (name, v) in &record.overrides {
        doc.scores.set(name, *v);
        doc.scores.native.remove(name);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::time::{Duration, Instant};

    fn service(dir: &Path, review_mode: bool) -> Service {
        let config = ServiceConfig {
            data_dir: dir.to_path_buf(),
            review_mode,
            ..Default::default()
        };
        Service::start(&config, config.build_pipeline().unwrap()).unwrap()
    }

    fn settle(svc: &Service, id: &str) -> Status {
        let t0 = Instant::now();
        loop {
            let s = svc.status(id).unwrap();
            if s.status != Status::Received || s.error.is_some() || t0.elapsed() > Duration::from_secs(10) {
                return s.status;
            }
            std::thread::sleep(Duration::from_millis(5));
        }
    }

    #[test]
    fn submit_validation_and_ids() {
        let dir = tempfile::tempdir().unwrap();
        let svc = service(dir.path(), false);
        assert!(matches!(svc.submit("l", 1, "  "), Err(ServiceError::EmptyText)));
        assert!(matches!(svc.submit("l", 9, "It is."), Err(ServiceError::UnknownPrompt(9))));
        let a = svc.submit("l", 1, "It is good there.").unwrap();
        let b = svc.submit("l", 1, "It is good there.").unwrap();
        assert_ne!(a.id, b.id);
        assert_eq!(a.status, Status::Received);
        assert!(matches!(svc.get_feedback("nope", Role::Learner), Err(ServiceError::NotFound(_))));
        assert_eq!(settle(&svc, &a.id), Status::Processed);
        let doc = svc.get_feedback(&a.id, Role::Learner).unwrap();
        assert!(doc.segments.iter().all(|s| s.kind == SegmentKind::Plain));
        assert_eq!(doc.scores.iter().count(), 9);
        assert!(matches!(svc.review(&a.id, ReviewRecord::default()), Err(ServiceError::ReviewDisabled)));
        svc.shutdown();
    }

    #[test]
    fn review_flow() {
        let dir = tempfile::tempdir().unwrap();
        let svc = service(dir.path(), true);
        let sub = svc.submit("l", 2, "I gess almost people cannot speaking English.").unwrap();
        assert_eq!(settle(&svc, &sub.id), Status::Processed);
        assert!(matches!(svc.get_feedback(&sub.id, Role::Learner), Err(ServiceError::NotYetAvailable(Status::Processed))));
        let doc = svc.get_feedback(&sub.id, Role::Teacher).unwrap();
        let idx = doc.sentences[0].edits.iter().position(|e| e.replacement == ["most"]).unwrap();
        assert_eq!(svc.review_queue().unwrap().len(), 1);

        let bad = ReviewRecord {
            overrides: [("content".to_string(), 120.0)].into_iter().collect(),
            ..Default::default()
        };
        assert!(matches!(svc.review(&sub.id, bad), Err(ServiceError::InvalidReview(_))));

        let record = ReviewRecord {
            reviewer: "t1".into(),
            decisions: vec![EditDecision { sentence: 0, edit: idx, accept: false }],
            overrides: [("content".to_string(), 72.0)].into_iter().collect(),
            ..Default::default()
        };
        let released = svc.review(&sub.id, record).unwrap();
        assert_eq!(released.scores.get("content"), Some(72.0));
        assert_eq!(released.scores.overall, doc.scores.overall);
        assert!(released.segments.iter().any(|s| s.kind == SegmentKind::Plain && s.text.contains("almost")));
        assert!(!released.sentences[0].corrected.contains(&"most".to_string()));
        assert!(matches!(svc.review(&sub.id, ReviewRecord::default()), Err(ServiceError::AlreadyReleased)));
        assert_eq!(svc.get_feedback(&sub.id, Role::Learner).unwrap(), released);
        assert!(svc.review_queue().unwrap().is_empty());
        svc.shutdown();

        let again = service(dir.path(), true);
        assert_eq!(again.get_feedback(&sub.id, Role::Learner).unwrap(), released);
        again.shutdown();
    }

    #[test]
    fn return_and_resubmit() {
        let dir = tempfile::tempdir().unwrap();
        let svc = service(dir.path(), true);
        let sub = svc.submit("l", 3, "It are good.").unwrap();
        settle(&svc, &sub.id);
        let rec = ReviewRecord {
            action: ReviewAction::Return,
            note: Some("try again".into()),
            ..Default::default()
        };
        svc.review(&sub.id, rec).unwrap();
        assert_eq!(svc.status(&sub.id).unwrap().status, Status::Returned);
        assert!(svc.resubmit(&sub.id, "").is_err());
        svc.resubmit(&sub.id, "It is good.").unwrap();
        assert_eq!(settle(&svc, &sub.id), Status::Processed);
        svc.shutdown();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn only_declared_transitions(from in 0usize..4, to in 0usize..4) {
            use Status::*;
            let all = [Received, Processed, Released, Returned];
            let allowed = [(0, 1), (1, 2), (1, 3), (3, 0)];
            prop_assert_eq!(all[from].can_become(all[to]), allowed.contains(&(from, to)));
        }
    }
}
