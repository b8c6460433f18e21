use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QwkError {
    #[error("rating vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no ratings")]
    Empty,
    #[error("rating {rating} outside [{min}, {max}]")]
    OutOfRange { rating: i64, min: i64, max: i64 },
}

/// Quadratic weighted kappa over the rating range spanned by both vectors.
pub fn qwk(gold: &[i64], pred: &[i64]) -> Result<f64, QwkError> {
    let (min, max) = gold
        .iter()
        .chain(pred)
        .fold((i64::MAX, i64::MIN), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    if min > max {
        return Err(QwkError::Empty);
    }
    qwk_with_range(gold, pred, min, max)
}

/// Quadratic weighted kappa with weights `(i-j)^2 / (K-1)^2` over ratings
/// `min..=max`. When the expected weighted disagreement is zero (a single
/// rating level, or both raters constant on the same value) the result is 1.
pub fn qwk_with_range(gold: &[i64], pred: &[i64], min: i64, max: i64) -> Result<f64, QwkError> {
    if gold.len() != pred.len() {
        return Err(QwkError::LengthMismatch(gold.len(), pred.len()));
    }
    if gold.is_empty() {
        return Err(QwkError::Empty);
    }
    if let Some(&rating) = gold.iter().chain(pred).find(|r| !(min..=max).contains(*r)) {
        return Err(QwkError::OutOfRange { rating, min, max });
    }
    let k = (max - min + 1) as usize;
    if k == 1 {
        return Ok(1.0);
    }
    let mut observed = vec![0.0; k * k];
    let mut hist_g = vec![0.0; k];
    let mut hist_p = vec![0.0; k];
    for (&g, &p) in gold.iter().zip(pred) {
        let (i, j) = ((g - min) as usize, (p - min) as usize);
        observed[i * k + j] += 1.0;
        hist_g[i] += 1.0;
        hist_p[j] += 1.0;
    }
    let n = gold.len() as f64;
    let denom_w = ((k - 1) * (k - 1)) as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..k {
        for j in 0..k {
            let w = ((i as f64) - (j as f64)).powi(2) / denom_w;
            num += w * observed[i * k + j];
            den += w * hist_g[i] * hist_p[j] / n;
        }
    }
    if den == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - num / den)
}
