//! Rubric scoring. Features are z-scored, gold scores are min-max scaled
//! to [0, 1] per (prompt, rubric), one ridge model is fitted per rubric and
//! predictions are clipped and reported on a 0-100 scale.

pub mod crossprompt;
pub mod normalize;
pub mod qwk;
pub mod ridge;

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureVector;
use crate::rubric::{self, OVERALL, RUBRICS};

pub use crossprompt::{cross_prompt_eval, dev_prompt, CrossPromptConfig, FoldResult, QwkReport, QwkScale};
pub use normalize::{denorm, minmax, round_half_up, Scaled};
pub use qwk::{qwk, qwk_with_range, QwkError};
pub use ridge::{ridge, LinearFit, RidgeError, Standardizer};

const CHECKPOINT_FORMAT: &str = "writeright-score-model";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("prompt {prompt}, {rubric}: score range is degenerate (min == max == {value})")]
    DegenerateRange { prompt: u8, rubric: String, value: f64 },
    #[error("{rubric}: need at least 2 essays with gold scores, found {found}")]
    InsufficientData { rubric: String, found: usize },
    #[error("feature schema mismatch: expected {expected:?}, got {got:?}")]
    SchemaMismatch { expected: Vec<String>, got: Vec<String> },
    #[error("prompt {0} has no essays")]
    MissingPrompt(u8),
    #[error("no lambda values to search")]
    EmptyGrid,
    #[error("range table line {line}: {reason}")]
    BadRangeLine { line: usize, reason: String },
    #[error("unsupported checkpoint ({0})")]
    BadCheckpoint(String),
    #[error(transparent)]
    Qwk(#[from] QwkError),
    #[error(transparent)]
    Ridge(#[from] RidgeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreRange {
    pub min: f64,
    pub max: f64,
}

/// prompt → score name → native range.
pub type RangeTable = BTreeMap<u8, BTreeMap<String, ScoreRange>>;

/// Reads `prompt<TAB>rubric<TAB>min<TAB>max` lines; `#` comments allowed.
pub fn read_range_table<R: Read>(mut reader: R) -> Result<RangeTable, ScorerError> {
    let mut s = String::new();
    reader.read_to_string(&mut s)?;
    let mut table = RangeTable::new();
    for (i, raw) in s.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: &str| ScorerError::BadRangeLine {
            line: i + 1,
            reason: reason.to_string(),
        };
        let f: Vec<&str> = line.split('\t').map(str::trim).collect();
        let [p, r, lo, hi] = f[..] else {
            return Err(bad("expected 4 tab-separated fields"));
        };
        let prompt: u8 = p.parse().map_err(|_| bad("bad prompt id"))?;
        let name = rubric::canonical(r).ok_or_else(|| bad("unknown rubric"))?;
        let min: f64 = lo.parse().map_err(|_| bad("bad min"))?;
        let max: f64 = hi.parse().map_err(|_| bad("bad max"))?;
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(bad("min must be below max"));
        }
        table.entry(prompt).or_default().insert(name.to_string(), ScoreRange { min, max });
    }
    Ok(table)
}

/// One essay's features and whatever gold scores it has.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub essay_id: String,
    pub prompt_id: u8,
    pub features: FeatureVector,
    pub gold: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lambda: f64,
    /// Known native ranges; anything missing is taken from the observed
    /// gold minimum and maximum of that prompt.
    pub ranges: RangeTable,
    /// Score names to fit; names left out are predicted by the overall model.
    pub rubrics: Vec<String>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            ranges: RangeTable::new(),
            rubrics: rubric::all_score_names().map(str::to_string).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RubricModel {
    pub fit: LinearFit,
    pub n_train: usize,
}

/// Overall score and the eight rubric scores, all on 0-100.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RubricScoreSet {
    pub overall: f64,
    pub rubrics: IndexMap<String, f64>,
    /// Scores mapped back to the prompt's native scale where a range is known.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub native: BTreeMap<String, f64>,
}

impl RubricScoreSet {
    pub fn get(&self, name: &str) -> Option<f64> {
        if name == OVERALL {
            Some(self.overall)
        } else {
            self.rubrics.get(name).copied()
        }
    }

    /// Sets one score; returns false for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        if name == OVERALL {
            self.overall = value;
            true
        } else if let Some(v) = self.rubrics.get_mut(name) {
            *v = value;
            true
        } else {
            false
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        std::iter::once((OVERALL, self.overall)).chain(self.rubrics.iter().map(|(k, v)| (k.as_str(), *v)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreModel {
    pub format: String,
    pub version: u32,
    pub schema: Vec<String>,
    pub schema_version: String,
    pub standardizer: Standardizer,
    pub lambda: f64,
    pub rubrics: BTreeMap<String, RubricModel>,
    pub ranges: RangeTable,
}

fn check_schema(schema: &[String], fv: &FeatureVector) -> Result<(), ScorerError> {
    if fv.values.len() != schema.len() || !fv.names().zip(schema).all(|(a, b)| a == b) {
        return Err(ScorerError::SchemaMismatch {
            expected: schema.to_vec(),
            got: fv.names().map(str::to_string).collect(),
        });
    }
    Ok(())
}

/// Native range for each prompt that has gold `rubric` scores: the table
/// entry if present, otherwise the observed extremes.
pub fn resolve_ranges<'a, I>(examples: I, rubric: &str, table: &RangeTable) -> Result<BTreeMap<u8, ScoreRange>, ScorerError>
where
    I: IntoIterator<Item = &'a TrainingExample>,
{
    let mut observed: BTreeMap<u8, ScoreRange> = BTreeMap::new();
    for e in examples {
        let Some(&g) = e.gold.get(rubric) else { continue };
        let r = observed.entry(e.prompt_id).or_insert(ScoreRange { min: g, max: g });
        r.min = r.min.min(g);
        r.max = r.max.max(g);
    }
    let mut out = BTreeMap::new();
    for (p, obs) in observed {
        let r = table.get(&p).and_then(|m| m.get(rubric)).copied().unwrap_or(obs);
        if r.min >= r.max {
            return Err(ScorerError::DegenerateRange {
                prompt: p,
                rubric: rubric.to_string(),
                value: r.min,
            });
        }
        out.insert(p, r);
    }
    Ok(out)
}

impl ScoreModel {
    pub fn train(examples: &[TrainingExample], config: &TrainConfig) -> Result<Self, ScorerError> {
        let first = examples.first().ok_or_else(|| ScorerError::InsufficientData {
            rubric: OVERALL.into(),
            found: 0,
        })?;
        let schema: Vec<String> = first.features.names().map(str::to_string).collect();
        for e in examples {
            check_schema(&schema, &e.features)?;
        }
        let raw: Vec<Vec<f64>> = examples.iter().map(|e| e.features.to_vec()).collect();
        let standardizer = Standardizer::fit(&raw)?;
        let z: Vec<Vec<f64>> = raw.iter().map(|r| standardizer.transform(r)).collect();
        let live: Vec<usize> = (0..schema.len()).filter(|&j| !standardizer.constant[j]).collect();

        let mut names: Vec<&str> = config.rubrics.iter().map(String::as_str).collect();
        if !names.contains(&OVERALL) {
            names.insert(0, OVERALL);
        }
        let mut rubrics = BTreeMap::new();
        let mut ranges = RangeTable::new();
        for name in names {
            let idx: Vec<usize> = (0..examples.len()).filter(|&i| examples[i].gold.contains_key(name)).collect();
            if idx.len() < 2 {
                if name == OVERALL {
                    return Err(ScorerError::InsufficientData {
                        rubric: name.into(),
                        found: idx.len(),
                    });
                }
                log::info!("{name}: {} essays with gold scores, using the overall model", idx.len());
                continue;
            }
            let prompt_ranges = resolve_ranges(idx.iter().map(|&i| &examples[i]), name, &config.ranges)?;
            let rows: Vec<Vec<f64>> = idx.iter().map(|&i| live.iter().map(|&j| z[i][j]).collect()).collect();
            let y: Vec<f64> = idx
                .iter()
                .map(|&i| {
                    let e = &examples[i];
                    let r = prompt_ranges[&e.prompt_id];
                    minmax(e.gold[name], r.min, r.max).value
                })
                .collect();
            let fit = ridge(&rows, &y, config.lambda)?;
            let mut weights = vec![0.0; schema.len()];
            for (w, &j) in fit.weights.iter().zip(&live) {
                weights[j] = *w;
            }
            rubrics.insert(
                name.to_string(),
                RubricModel {
                    fit: LinearFit { weights, bias: fit.bias },
                    n_train: idx.len(),
                },
            );
            for (p, r) in prompt_ranges {
                ranges.entry(p).or_default().insert(name.to_string(), r);
            }
        }
        // table entries for prompts absent from training still help denormalize
        for (p, m) in &config.ranges {
            for (name, r) in m {
                ranges.entry(*p).or_default().entry(name.clone()).or_insert(*r);
            }
        }
        Ok(Self {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            schema,
            schema_version: first.features.schema_version.clone(),
            standardizer,
            lambda: config.lambda,
            rubrics,
            ranges,
        })
    }

    fn model_for(&self, name: &str) -> &RubricModel {
        self.rubrics.get(name).unwrap_or_else(|| &self.rubrics[OVERALL])
    }

    /// Clipped [0, 1] prediction for one score name.
    pub fn predict_unit(&self, features: &FeatureVector, name: &str) -> Result<f64, ScorerError> {
        check_schema(&self.schema, features)?;
        let z = self.standardizer.transform(&features.to_vec());
        Ok(self.model_for(name).fit.predict(&z).clamp(0.0, 1.0))
    }

    pub fn predict(&self, features: &FeatureVector, prompt: u8) -> Result<RubricScoreSet, ScorerError> {
        check_schema(&self.schema, features)?;
        let z = self.standardizer.transform(&features.to_vec());
        let mut native = BTreeMap::new();
        let mut score = |name: &str| {
            let u = self.model_for(name).fit.predict(&z).clamp(0.0, 1.0);
            if let Some(r) = self.ranges.get(&prompt).and_then(|m| m.get(name)) {
                native.insert(name.to_string(), denorm(u, r.min, r.max).value);
            }
            u * 100.0
        };
        let overall = score(OVERALL);
        let rubrics = RUBRICS.iter().map(|r| (r.to_string(), score(r))).collect();
        Ok(RubricScoreSet {
            overall,
            rubrics,
            native,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ScorerError> {
        let m: Self = serde_json::from_str(s)?;
        if m.format != CHECKPOINT_FORMAT || m.version != CHECKPOINT_VERSION {
            return Err(ScorerError::BadCheckpoint(format!("{} v{}", m.format, m.version)));
        }
        if !m.rubrics.contains_key(OVERALL) {
            return Err(ScorerError::BadCheckpoint("no overall model".into()));
        }
        let d = m.schema.len();
        if m.standardizer.dim() != d || m.rubrics.values().any(|r| r.fit.weights.len() != d) {
            return Err(ScorerError::BadCheckpoint("weight length differs from schema".into()));
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<(), ScorerError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ScorerError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// A model with zero weights and a fixed bias for every score; mostly
    /// useful as a stand-in before a trained model exists.
    pub fn constant(schema: &[&str], schema_version: &str, bias: f64) -> Self {
        let d = schema.len();
        let rubrics = rubric::all_score_names()
            .map(|n| {
                (
                    n.to_string(),
                    RubricModel {
                        fit: LinearFit {
                            weights: vec![0.0; d],
                            bias,
                        },
                        n_train: 0,
                    },
                )
            })
            .collect();
        Self {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            schema: schema.iter().map(|s| s.to_string()).collect(),
            schema_version: schema_version.into(),
            standardizer: Standardizer {
                mean: vec![0.0; d],
                std: vec![1.0; d],
                constant: vec![false; d],
            },
            lambda: 0.0,
            rubrics,
            ranges: RangeTable::new(),
        }
    }
}
