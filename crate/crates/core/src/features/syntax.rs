//! Tree-based complexity metrics.

use crate::corpus::ParseTree;

const SENTENCE_LABELS: [&str; 5] = ["S", "SBAR", "SBARQ", "SINV", "SQ"];
const SENTENCE_WEIGHT: f64 = 1.5;

/// Per-word Yngve depths, left to right. Children are numbered right to left
/// from 0 and a word's depth is the sum of the numbers on its root path.
pub fn yngve_word_depths(tree: &ParseTree) -> Vec<usize> {
    fn walk(t: &ParseTree, depth: usize, out: &mut Vec<usize>) {
        if t.is_preterminal() {
            out.push(depth);
            return;
        }
        let n = t.children.len();
        for (i, c) in t.children.iter().enumerate() {
            walk(c, depth + (n - 1 - i), out);
        }
    }
    let mut out = Vec::new();
    walk(tree.unwrap_root(), 0, &mut out);
    out
}

/// (mean, max) Yngve depth over the words of `tree`.
pub fn yngve_depth(tree: &ParseTree) -> (f64, f64) {
    let d = yngve_word_depths(tree);
    if d.is_empty() {
        return (0.0, 0.0);
    }
    let mean = d.iter().sum::<usize>() as f64 / d.len() as f64;
    (mean, *d.iter().max().unwrap() as f64)
}

fn base_label(label: &str) -> &str {
    label.split(['-', '=']).next().unwrap_or(label)
}

fn frazier_weight(label: &str) -> f64 {
    if SENTENCE_LABELS.contains(&base_label(label)) {
        SENTENCE_WEIGHT
    } else {
        1.0
    }
}

/// Per-word Frazier scores. Starting at the preterminal, each node that is
/// its parent's leftmost child (or the root) adds 1, or 1.5 for sentence
/// labels; the walk stops at the first node that is neither.
pub fn frazier_word_scores(tree: &ParseTree) -> Vec<f64> {
    // path holds (node, index among its parent's children)
    fn walk<'a>(t: &'a ParseTree, idx: usize, path: &mut Vec<(&'a ParseTree, usize)>, out: &mut Vec<f64>) {
        path.push((t, idx));
        if t.is_preterminal() {
            let mut score = 0.0;
            for (k, (node, i)) in path.iter().enumerate().rev() {
                if k == 0 || *i == 0 {
                    score += frazier_weight(&node.label);
                } else {
                    break;
                }
            }
            out.push(score);
        } else {
            for (i, c) in t.children.iter().enumerate() {
                walk(c, i, path, out);
            }
        }
        path.pop();
    }
    let mut out = Vec::new();
    walk(tree.unwrap_root(), 0, &mut Vec::new(), &mut out);
    out
}

/// (mean, total) Frazier score over the words of `tree`.
pub fn frazier_score(tree: &ParseTree) -> (f64, f64) {
    let s = frazier_word_scores(tree);
    if s.is_empty() {
        return (0.0, 0.0);
    }
    let total: f64 = s.iter().sum();
    (total / s.len() as f64, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_tree;

    #[test]
    fn reference_tree() {
        let t = parse_tree("(S (NP (DT the) (NN cat)) (VP (VBD sat)))").unwrap();
        assert_eq!(yngve_word_depths(&t), [2, 1, 0]);
        assert_eq!(yngve_depth(&t), (1.0, 2.0));
        assert_eq!(frazier_word_scores(&t), [3.5, 0.0, 1.0]);
        assert_eq!(frazier_score(&t), (1.5, 4.5));
    }

    #[test]
    fn single_leaf_and_wrappers() {
        let t = parse_tree("(S (NN hi))").unwrap();
        assert_eq!(yngve_depth(&t), (0.0, 0.0));
        assert_eq!(frazier_word_scores(&t), [2.5]);
        let wrapped = parse_tree("( (S-TPC (NN hi)))").unwrap();
        assert_eq!(frazier_word_scores(&wrapped), [2.5]);
    }
}
