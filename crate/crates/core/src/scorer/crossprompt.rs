//! Leave-one-prompt-out evaluation over prompts 1..=8: one prompt is held
//! out for testing, the one before it (cyclically) tunes lambda and the
//! remaining six train.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{denorm, minmax, qwk_with_range, resolve_ranges, round_half_up, RangeTable, ScoreModel, ScoreRange, ScorerError, TrainConfig, TrainingExample};
use crate::rubric::OVERALL;

pub const PROMPTS: std::ops::RangeInclusive<u8> = 1..=8;

/// Dev prompt for test prompt `p`: 1 → 8, 2 → 1, ..., 8 → 7.
pub fn dev_prompt(p: u8) -> u8 {
    ((p + 6) % 8) + 1
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QwkScale {
    /// Denormalize to the prompt's integer scale and round half up.
    #[default]
    Native,
    /// Round the 0-100 scaled prediction and gold.
    Hundred,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossPromptConfig {
    pub lambdas: Vec<f64>,
    pub scale: QwkScale,
    pub rubric: String,
    pub ranges: RangeTable,
}

impl Default for CrossPromptConfig {
    fn default() -> Self {
        Self {
            lambdas: vec![0.0, 0.01, 0.1, 1.0, 10.0],
            scale: QwkScale::Native,
            rubric: OVERALL.into(),
            ranges: RangeTable::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub test_prompt: u8,
    pub dev_prompt: u8,
    pub lambda: f64,
    pub dev_qwk: f64,
    pub qwk: f64,
    pub n_train: usize,
    pub n_test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QwkReport {
    pub rubric: String,
    pub scale: QwkScale,
    pub folds: Vec<FoldResult>,
    pub average: f64,
}

impl QwkReport {
    /// Prompts 1-8 and the average as columns, one QWK row.
    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{:<8}", "Prompt");
        for f in &self.folds {
            let _ = write!(s, "{:>8}", f.test_prompt);
        }
        let _ = writeln!(s, "{:>8}", "Avg");
        let _ = write!(s, "{:<8}", "QWK");
        for f in &self.folds {
            let _ = write!(s, "{:>8.4}", f.qwk);
        }
        let _ = writeln!(s, "{:>8.4}", self.average);
        s
    }
}

fn fold_qwk(model: &ScoreModel, eval: &[&TrainingExample], rubric: &str, range: ScoreRange, scale: QwkScale) -> Result<f64, ScorerError> {
    let mut gold = Vec::with_capacity(eval.len());
    let mut pred = Vec::with_capacity(eval.len());
    for e in eval {
        let u = model.predict_unit(&e.features, rubric)?;
        let g = e.gold[rubric];
        match scale {
            QwkScale::Native => {
                gold.push(round_half_up(g) as i64);
                pred.push(round_half_up(denorm(u, range.min, range.max).value) as i64);
            }
            QwkScale::Hundred => {
                gold.push(round_half_up(minmax(g, range.min, range.max).value * 100.0) as i64);
                pred.push(round_half_up(u * 100.0) as i64);
            }
        }
    }
    let (lo, hi) = match scale {
        QwkScale::Native => (round_half_up(range.min) as i64, round_half_up(range.max) as i64),
        QwkScale::Hundred => (0, 100),
    };
    Ok(qwk_with_range(&gold, &pred, lo, hi)?)
}

pub fn cross_prompt_eval(data: &[TrainingExample], config: &CrossPromptConfig) -> Result<QwkReport, ScorerError> {
    if config.lambdas.is_empty() {
        return Err(ScorerError::EmptyGrid);
    }
    let rubric = config.rubric.as_str();
    let mut by_prompt: BTreeMap<u8, Vec<&TrainingExample>> = BTreeMap::new();
    for e in data.iter().filter(|e| e.gold.contains_key(rubric)) {
        by_prompt.entry(e.prompt_id).or_default().push(e);
    }
    if let Some(p) = PROMPTS.clone().find(|p| !by_prompt.contains_key(p)) {
        return Err(ScorerError::MissingPrompt(p));
    }
    let ranges = resolve_ranges(by_prompt.values().flatten().copied(), rubric, &config.ranges)?;
    let mut grid = config.lambdas.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut folds = Vec::new();
    for test in PROMPTS {
        let dev = dev_prompt(test);
        let train: Vec<TrainingExample> = PROMPTS
            .filter(|p| *p != test && *p != dev)
            .flat_map(|p| by_prompt[&p].iter().map(|e| (*e).clone()))
            .collect();
        let mut best: Option<(f64, f64, ScoreModel)> = None;
        for &lambda in &grid {
            let cfg = TrainConfig {
                lambda,
                ranges: config.ranges.clone(),
                rubrics: vec![rubric.to_string()],
            };
            let model = ScoreModel::train(&train, &cfg)?;
            let q = fold_qwk(&model, &by_prompt[&dev], rubric, ranges[&dev], config.scale)?;
            if best.as_ref().is_none_or(|(_, bq, _)| q > *bq) {
                best = Some((lambda, q, model));
            }
        }
        let (lambda, dev_qwk, model) = best.expect("grid is non-empty");
        let qwk = fold_qwk(&model, &by_prompt[&test], rubric, ranges[&test], config.scale)?;
        log::info!("test prompt {test}: dev {dev}, lambda {lambda}, qwk {qwk:.4}");
        folds.push(FoldResult {
            test_prompt: test,
            dev_prompt: dev,
            lambda,
            dev_qwk,
            qwk,
            n_train: train.len(),
            n_test: by_prompt[&test].len(),
        });
    }
    let average = folds.iter().map(|f| f.qwk).sum::<f64>() / folds.len() as f64;
    Ok(QwkReport {
        rubric: rubric.to_string(),
        scale: config.scale,
        folds,
        average,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureVector;

    #[test]
    fn rotation() {
        assert_eq!(dev_prompt(1), 8);
        assert_eq!(dev_prompt(2), 1);
        assert_eq!(dev_prompt(8), 7);
        let devs: std::collections::BTreeSet<u8> = PROMPTS.map(dev_prompt).collect();
        assert_eq!(devs.len(), 8);
    }

    fn example(prompt: u8, i: usize) -> TrainingExample {
        let x = (i % 10) as f64;
        let y = (i / 10 % 3) as f64;
        TrainingExample {
            essay_id: format!("{prompt}-{i}"),
            prompt_id: prompt,
            features: FeatureVector {
                values: [("x".to_string(), x), ("y".to_string(), y)].into_iter().collect(),
                schema_version: "t".into(),
            },
            gold: [(OVERALL.to_string(), x + y)].into_iter().collect(),
        }
    }

    #[test]
    fn small_planted_run() {
        let data: Vec<_> = PROMPTS.flat_map(|p| (0..30).map(move |i| example(p, i))).collect();
        let r = cross_prompt_eval(&data, &CrossPromptConfig::default()).unwrap();
        assert_eq!(r.folds.len(), 8);
        assert!(r.folds.iter().all(|f| f.qwk > 0.99), "{r:?}");
        let table = r.render_table();
        assert_eq!(table.lines().count(), 2);
        assert!(table.starts_with("Prompt"));
        let mean = r.folds.iter().map(|f| f.qwk).sum::<f64>() / 8.0;
        assert_eq!(r.average, mean);

        let partial: Vec<_> = data.into_iter().filter(|e| e.prompt_id != 5).collect();
        assert!(matches!(cross_prompt_eval(&partial, &CrossPromptConfig::default()), Err(ScorerError::MissingPrompt(5))));
    }
}
