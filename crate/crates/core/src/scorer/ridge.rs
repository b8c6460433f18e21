use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RidgeError {
    #[error("no training rows")]
    Empty,
    #[error("row {row} has {got} features, expected {expected}")]
    Ragged { row: usize, got: usize, expected: usize },
    #[error("{rows} rows but {targets} targets")]
    LengthMismatch { rows: usize, targets: usize },
    #[error("lambda must be finite and non-negative")]
    BadLambda,
}

/// Per-feature z-scoring with population standard deviation. Features with
/// zero spread are flagged constant and map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub constant: Vec<bool>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self, RidgeError> {
        let d = check_rows(rows)?;
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for r in rows {
            for j in 0..d {
                var[j] += (r[j] - mean[j]).powi(2);
            }
        }
        let std: Vec<f64> = var.iter().map(|v| (v / n).sqrt()).collect();
        // spread below rounding noise of the mean counts as constant
        let constant = std.iter().zip(&mean).map(|(s, m)| *s <= 1e-12 * m.abs().max(1.0)).collect();
        Ok(Self { mean, std, constant })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, v)| if self.constant[j] { 0.0 } else { (v - self.mean[j]) / self.std[j] })
            .collect()
    }
}

fn check_rows(rows: &[Vec<f64>]) -> Result<usize, RidgeError> {
    let d = rows.first().ok_or(RidgeError::Empty)?.len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != d {
            return Err(RidgeError::Ragged {
                row: i,
                got: r.len(),
                expected: d,
            });
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearFit {
    pub fn predict(&self, row: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>()
    }
}

/// Minimizes `|y - Xw - b|^2 + lambda |w|^2`; the bias is not penalized.
/// Solved on centered data through the normal equations.
pub fn ridge(rows: &[Vec<f64>], y: &[f64], lambda: f64) -> Result<LinearFit, RidgeError> {
    let d = check_rows(rows)?;
    if rows.len() != y.len() {
        return Err(RidgeError::LengthMismatch {
            rows: rows.len(),
            targets: y.len(),
        });
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(RidgeError::BadLambda);
    }
    let n = rows.len() as f64;
    let mut xm = vec![0.0; d];
    for r in rows {
        for (m, v) in xm.iter_mut().zip(r) {
            *m += v / n;
        }
    }
    let ym = y.iter().sum::<f64>() / n;
    let mut a = vec![vec![0.0; d]; d];
    let mut b = vec![0.0; d];
    for (r, &t) in rows.iter().zip(y) {
        let xc: Vec<f64> = r.iter().zip(&xm).map(|(v, m)| v - m).collect();
        let yc = t - ym;
        for i in 0..d {
            b[i] += xc[i] * yc;
            for j in 0..=i {
                a[i][j] += xc[i] * xc[j];
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            a[j][i] = a[i][j];
        }
        a[i][i] += lambda;
    }
    let weights = solve_symmetric(a, b);
    let bias = ym - weights.iter().zip(&xm).map(|(w, m)| w * m).sum::<f64>();
    Ok(LinearFit { weights, bias })
}

/// Cholesky for positive definite systems; falls back to Gaussian
/// elimination with partial pivoting, setting free variables to 0.
pub fn solve_symmetric(a: Vec<Vec<f64>>, b: Vec<f64>) -> Vec<f64> {
    cholesky_solve(&a, &b).unwrap_or_else(|| gauss_solve(a, b))
}

fn cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = (0..n).map(|i| a[i][i].abs()).fold(0.0, f64::max).max(1.0);
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if s <= 1e-12 * scale {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut z = vec![0.0; n];
    for i in 0..n {
        z[i] = (b[i] - (0..i).map(|k| l[i][k] * z[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (z[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    Some(x)
}

fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let tol = 1e-10 * scale;
    let mut pivot_col = vec![None; n];
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())) else { break };
        if a[p][col].abs() <= tol {
            continue;
        }
        a.swap(row, p);
        b.swap(row, p);
        for r in row + 1..n {
            let f = a[r][col] / a[row][col];
            for c in col..n {
                a[r][c] -= f * a[row][c];
            }
            b[r] -= f * b[row];
        }
        pivot_col[row] = Some(col);
        row += 1;
    }
    let mut x = vec![0.0; n];
    for r in (0..row).rev() {
        let col = pivot_col[r].expect("pivot rows are contiguous");
        let s: f64 = (col + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[col] = (b[r] - s) / a[r][col];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_feature_example() {
        let rows = vec![vec![1.0], vec![2.0], vec![3.0]];
        let fit = ridge(&rows, &[0.2, 0.4, 0.6], 0.0).unwrap();
        assert!((fit.weights[0] - 0.2).abs() < 1e-12);
        assert!(fit.bias.abs() < 1e-12);
        assert!((fit.predict(&[4.0]) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn huge_lambda_gives_mean() {
        let rows = vec![vec![1.0, 0.0], vec![2.0, 1.0], vec![3.0, 5.0]];
        let fit = ridge(&rows, &[1.0, 2.0, 6.0], 1e14).unwrap();
        assert!(fit.weights.iter().all(|w| w.abs() < 1e-6));
        assert!((fit.bias - 3.0).abs() < 1e-6);
    }

    #[test]
    fn singular_system_falls_back() {
        // second column duplicates the first
        let rows = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![4.0, 4.0]];
        let fit = ridge(&rows, &[1.0, 2.0, 4.0], 0.0).unwrap();
        for (r, t) in rows.iter().zip([1.0, 2.0, 4.0]) {
            assert!((fit.predict(r) - t).abs() < 1e-9);
        }
    }

    #[test]
    fn standardizer_flags_constants() {
        let s = Standardizer::fit(&[vec![1.0, 7.0], vec![3.0, 7.0]]).unwrap();
        assert_eq!(s.constant, [false, true]);
        assert_eq!(s.transform(&[3.0, 9.0]), [1.0, 0.0]);
        assert!(matches!(Standardizer::fit(&[]), Err(RidgeError::Empty)));
    }
}
