//! Essay TSV ingestion (ASAP layout by default).

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rubric;

#[derive(Debug, Error)]
pub enum EssayError {
    #[error("missing required column {0:?}")]
    MissingColumn(String),
    #[error("line {line}, column {column:?}: {reason}")]
    BadField {
        line: usize,
        column: String,
        reason: String,
    },
    #[error("line {line}: prompt {prompt} is not in the configured prompt set")]
    UnknownPrompt { line: usize, prompt: i64 },
    #[error("score column {column:?} maps to unknown rubric {rubric:?}")]
    UnknownRubric { column: String, rubric: String },
    #[error("tsv: {0}")]
    Csv(#[from] csv::Error),
}

impl EssayError {
    pub fn line(&self) -> Option<usize> {
        match self {
            EssayError::BadField { line, .. } | EssayError::UnknownPrompt { line, .. } => Some(*line),
            EssayError::Csv(e) => e.position().map(|p| p.line() as usize),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssayRecord {
    pub essay_id: String,
    pub prompt_id: u8,
    pub text: String,
    #[serde(default)]
    pub gold_scores: BTreeMap<String, f64>,
}

/// Column mapping for the essay TSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    pub id_column: String,
    pub prompt_column: String,
    pub text_column: String,
    /// TSV column -> rubric name.
    pub score_columns: BTreeMap<String, String>,
    pub prompts: Vec<u8>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        let mut score_columns: BTreeMap<String, String> = rubric::all_score_names()
            .map(|n| (n.to_string(), n.to_string()))
            .collect();
        score_columns.insert("domain1_score".into(), rubric::OVERALL.into());
        Self {
            id_column: "essay_id".into(),
            prompt_column: "essay_set".into(),
            text_column: "essay".into(),
            score_columns,
            prompts: (1..=8).collect(),
        }
    }
}

/// Reads a UTF-8, tab-separated essay file with a header row. Quote
/// characters are literal (essays contain them). Empty score cells are
/// treated as absent; score columns missing from the header are skipped.
pub fn read_essays<R: Read>(reader: R, config: &IngestConfig) -> Result<Vec<EssayRecord>, EssayError> {
    for (col, rub) in &config.score_columns {
        if !rubric::is_score_name(rub) {
            return Err(EssayError::UnknownRubric {
                column: col.clone(),
                rubric: rub.clone(),
            });
        }
    }
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| EssayError::MissingColumn(name.to_string()))
    };
    let id_col = find(&config.id_column)?;
    let prompt_col = find(&config.prompt_column)?;
    let text_col = find(&config.text_column)?;
    let score_cols: Vec<(usize, &str, &str)> = config
        .score_columns
        .iter()
        .filter_map(|(col, rub)| find(col).ok().map(|i| (i, col.as_str(), rub.as_str())))
        .collect();

    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        let field = |i: usize, name: &str| {
            rec.get(i).ok_or_else(|| EssayError::BadField {
                line,
                column: name.to_string(),
                reason: "missing field".into(),
            })
        };
        let essay_id = field(id_col, &config.id_column)?.trim().to_string();
        let raw_prompt = field(prompt_col, &config.prompt_column)?.trim();
        let prompt: i64 = raw_prompt.parse().map_err(|_| EssayError::BadField {
            line,
            column: config.prompt_column.clone(),
            reason: format!("not an integer: {raw_prompt:?}"),
        })?;
        let prompt_id = u8::try_from(prompt)
            .ok()
            .filter(|p| config.prompts.contains(p))
            .ok_or(EssayError::UnknownPrompt { line, prompt })?;
        let text = field(text_col, &config.text_column)?.trim().to_string();
        let mut gold_scores = BTreeMap::new();
        for &(i, col, rub) in &score_cols {
            let cell = rec.get(i).unwrap_or("").trim();
            if cell.is_empty() {
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| EssayError::BadField {
                line,
                column: col.to_string(),
                reason: format!("not a number: {cell:?}"),
            })?;
            if !v.is_finite() {
                return Err(EssayError::BadField {
                    line,
                    column: col.to_string(),
                    reason: "score is not finite".into(),
                });
            }
            gold_scores.insert(rub.to_string(), v);
        }
        out.push(EssayRecord {
            essay_id,
            prompt_id,
            text,
            gold_scores,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_asap_layout() {
        let tsv = "essay_id\tessay_set\tessay\tdomain1_score\tcontent\n\
                   1\t1\tDear \"local\" paper, @PERSON1 says hi.\t8\t\n\
                   2\t3\tAnother essay.\t2\t3\n";
        let got = read_essays(tsv.as_bytes(), &IngestConfig::default()).unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].text, "Dear \"local\" paper, @PERSON1 says hi.");
        assert_eq!(got[0].gold_scores.get("overall"), Some(&8.0));
        assert!(!got[0].gold_scores.contains_key("content"));
        assert_eq!(got[1].gold_scores.get("content"), Some(&3.0));
        assert_eq!(got[1].prompt_id, 3);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let tsv = "essay_id\tessay_set\tessay\n1\t9\tx\n";
        let err = read_essays(tsv.as_bytes(), &IngestConfig::default()).unwrap_err();
        assert!(matches!(err, EssayError::UnknownPrompt { line: 2, prompt: 9 }));

        let tsv = "essay_id\tessay_set\tessay\tdomain1_score\n1\t1\tx\tabc\n";
        let err = read_essays(tsv.as_bytes(), &IngestConfig::default()).unwrap_err();
        assert_eq!(err.line(), Some(2));

        let tsv = "id\tessay_set\tessay\n";
        let err = read_essays(tsv.as_bytes(), &IngestConfig::default()).unwrap_err();
        assert!(matches!(err, EssayError::MissingColumn(c) if c == "essay_id"));
    }

    #[test]
    fn custom_mapping_is_validated() {
        let mut cfg = IngestConfig::default();
        cfg.score_columns.insert("rater1".into(), "style".into());
        let err = read_essays("essay_id\tessay_set\tessay\n".as_bytes(), &cfg).unwrap_err();
        assert!(matches!(err, EssayError::UnknownRubric { .. }));
    }
}
