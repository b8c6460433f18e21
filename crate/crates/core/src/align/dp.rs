use serde::{Deserialize, Serialize};

use crate::corpus::TokenizedSentence;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Match,
    Sub,
    Ins,
    Del,
}

/// One step of an alignment path. `src`/`tgt` are the DP coordinates before
/// the step: the tokens consumed by match/sub are `src[src]`, `tgt[tgt]`;
/// a deletion consumes `src[src]`, an insertion `tgt[tgt]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignOp {
    pub kind: OpKind,
    pub src: usize,
    pub tgt: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentScript {
    pub ops: Vec<AlignOp>,
    pub total_cost: f64,
}

/// Unit costs for insertion, deletion and substitution; substitutions that
/// only change letter case cost `case_sub`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignCosts {
    pub case_sub: f64,
}

impl Default for AlignCosts {
    fn default() -> Self {
        Self { case_sub: 0.25 }
    }
}

impl AlignCosts {
    pub fn sub_cost(&self, a: &str, b: &str) -> f64 {
        if a.to_lowercase() == b.to_lowercase() {
            self.case_sub
        } else {
            1.0
        }
    }

    pub fn op_cost(&self, kind: OpKind, a: &str, b: &str) -> f64 {
        match kind {
            OpKind::Match => 0.0,
            OpKind::Sub => self.sub_cost(a, b),
            OpKind::Ins | OpKind::Del => 1.0,
        }
    }
}

pub fn align(src: &TokenizedSentence, tgt: &TokenizedSentence) -> AlignmentScript {
    align_with(&src.tokens, &tgt.tokens, &AlignCosts::default())
}

/// Minimum-cost alignment. The backtrace prefers, at every cell, match, then
/// substitution, then deletion, then insertion among the optimal moves.
pub fn align_with(src: &[String], tgt: &[String], costs: &AlignCosts) -> AlignmentScript {
    let (n, m) = (src.len(), tgt.len());
    let w = m + 1;
    let mut d = vec![0.0f64; (n + 1) * w];
    for j in 0..=m {
        d[j] = j as f64;
    }
    for i in 1..=n {
        d[i * w] = i as f64;
        for j in 1..=m {
            let diag = d[(i - 1) * w + j - 1];
            let diag_cost = if src[i - 1] == tgt[j - 1] {
                diag
            } else {
                diag + costs.sub_cost(&src[i - 1], &tgt[j - 1])
            };
            d[i * w + j] = diag_cost.min(d[(i - 1) * w + j] + 1.0).min(d[i * w + j - 1] + 1.0);
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * w + j];
        if i > 0 && j > 0 {
            let diag = d[(i - 1) * w + j - 1];
            if src[i - 1] == tgt[j - 1] {
                if (diag - here).abs() < EPS {
                    ops.push(AlignOp { kind: OpKind::Match, src: i - 1, tgt: j - 1 });
                    i -= 1;
                    j -= 1;
                    continue;
                }
            } else if (diag + costs.sub_cost(&src[i - 1], &tgt[j - 1]) - here).abs() < EPS {
                ops.push(AlignOp { kind: OpKind::Sub, src: i - 1, tgt: j - 1 });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && (d[(i - 1) * w + j] + 1.0 - here).abs() < EPS {
            ops.push(AlignOp { kind: OpKind::Del, src: i - 1, tgt: j });
            i -= 1;
            continue;
        }
        debug_assert!(j > 0 && (d[i * w + j - 1] + 1.0 - here).abs() < EPS);
        ops.push(AlignOp { kind: OpKind::Ins, src: i, tgt: j - 1 });
        j -= 1;
    }
    ops.reverse();
    AlignmentScript {
        ops,
        total_cost: d[n * w + m],
    }
}

impl AlignmentScript {
    /// Sum of per-operation costs; equals `total_cost` for scripts from `align_with`.
    pub fn recompute_cost(&self, src: &[String], tgt: &[String], costs: &AlignCosts) -> f64 {
        self.ops
            .iter()
            .map(|op| match op.kind {
                OpKind::Match | OpKind::Sub => costs.op_cost(op.kind, &src[op.src], &tgt[op.tgt]),
                OpKind::Ins | OpKind::Del => 1.0,
            })
            .sum()
    }
}
