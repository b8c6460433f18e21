use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Positions are 1-based character positions in the bracketed input; an
/// error at end of input reports one past the last character.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("unbalanced parentheses at position {0}")]
    UnbalancedParens(usize),
    #[error("node without children or leaf at position {0}")]
    EmptyNode(usize),
    #[error("unexpected token at position {0}")]
    UnexpectedToken(usize),
    #[error("empty input")]
    EmptyInput,
}

/// A constituency tree node. Either `leaf` is set (preterminal) or
/// `children` is non-empty, never both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseTree {
    pub label: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ParseTree>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf: Option<String>,
}

impl ParseTree {
    pub fn preterminal(label: impl Into<String>, word: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            children: Vec::new(),
            leaf: Some(word.into()),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<ParseTree>) -> Self {
        Self {
            label: label.into(),
            children,
            leaf: None,
        }
    }

    pub fn is_preterminal(&self) -> bool {
        self.leaf.is_some()
    }

    /// Leaf tokens left to right.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match &self.leaf {
            Some(w) => out.push(w),
            None => self.children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Strips unlabeled single-child wrappers such as the Penn Treebank `( (S ...))`.
    pub fn unwrap_root(&self) -> &ParseTree {
        let mut t = self;
        while t.label.is_empty() && t.leaf.is_none() && t.children.len() == 1 {
            t = &t.children[0];
        }
        t
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.label)?;
        if let Some(w) = &self.leaf {
            write!(f, " {w}")?;
        }
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 || !self.label.is_empty() {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open(usize),
    Close(usize),
    Atom(String, usize),
}

fn lex(s: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    let mut atom = String::new();
    let mut atom_pos = 0;
    for (pos, c) in (1..).zip(s.chars()) {
        if c == '(' || c == ')' || c.is_whitespace() {
            if !atom.is_empty() {
                out.push(Tok::Atom(std::mem::take(&mut atom), atom_pos));
            }
            match c {
                '(' => out.push(Tok::Open(pos)),
                ')' => out.push(Tok::Close(pos)),
                _ => {}
            }
        } else {
            if atom.is_empty() {
                atom_pos = pos;
            }
            atom.push(c);
        }
    }
    if !atom.is_empty() {
        out.push(Tok::Atom(atom, atom_pos));
    }
    out
}

/// Parses one tree in parenthesized label notation,
/// e.g. `(S (NP (DT the) (NN cat)) (VP (VBD sat)))`.
pub fn parse_tree(bracketed: &str) -> Result<ParseTree, TreeError> {
    let toks = lex(bracketed);
    let eof = bracketed.chars().count() + 1;
    if toks.is_empty() {
        return Err(TreeError::EmptyInput);
    }
    let mut pos = 0;
    let tree = parse_node(&toks, &mut pos, eof)?;
    match toks.get(pos) {
        None => Ok(tree),
        Some(Tok::Close(p)) => Err(TreeError::UnbalancedParens(*p)),
        Some(Tok::Open(p)) | Some(Tok::Atom(_, p)) => Err(TreeError::UnexpectedToken(*p)),
    }
}

fn parse_node(toks: &[Tok], pos: &mut usize, eof: usize) -> Result<ParseTree, TreeError> {
    let open_at = match toks.get(*pos) {
        Some(Tok::Open(p)) => *p,
        Some(Tok::Close(p)) => return Err(TreeError::UnbalancedParens(*p)),
        Some(Tok::Atom(_, p)) => return Err(TreeError::UnexpectedToken(*p)),
        None => return Err(TreeError::UnbalancedParens(eof)),
    };
    *pos += 1;
    let label = match toks.get(*pos) {
        Some(Tok::Atom(a, _)) => {
            *pos += 1;
            a.clone()
        }
        _ => String::new(),
    };
    let mut node = ParseTree::node(label, Vec::new());
    loop {
        match toks.get(*pos) {
            None => return Err(TreeError::UnbalancedParens(eof)),
            Some(Tok::Close(_)) => {
                *pos += 1;
                break;
            }
            Some(Tok::Open(_)) => {
                if node.leaf.is_some() {
                    let Tok::Open(p) = toks[*pos] else { unreachable!() };
                    return Err(TreeError::UnexpectedToken(p));
                }
                let child = parse_node(toks, pos, eof)?;
                node.children.push(child);
            }
            Some(Tok::Atom(a, p)) => {
                if node.leaf.is_some() || !node.children.is_empty() {
                    return Err(TreeError::UnexpectedToken(*p));
                }
                node.leaf = Some(a.clone());
                *pos += 1;
            }
        }
    }
    if node.leaf.is_none() && node.children.is_empty() {
        return Err(TreeError::EmptyNode(open_at));
    }
    Ok(node)
}

/// Canonical whitespace for bracketed text: single spaces between items, none
/// after `(` or before `)`. `parse_tree(s)?.to_string() == normalize_bracketed(s)`.
pub fn normalize_bracketed(s: &str) -> String {
    let mut out = String::new();
    let mut prev_open = true;
    for t in lex(s) {
        match t {
            Tok::Open(_) => {
                if !prev_open {
                    out.push(' ');
                }
                out.push('(');
                prev_open = true;
            }
            Tok::Close(_) => {
                out.push(')');
                prev_open = false;
            }
            Tok::Atom(a, _) => {
                if !prev_open {
                    out.push(' ');
                }
                out.push_str(&a);
                prev_open = false;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const REF: &str = "(S (NP (DT the) (NN cat)) (VP (VBD sat)))";

    #[test]
    fn parses_reference_tree() {
        let t = parse_tree(REF).unwrap();
        assert_eq!(t.label, "S");
        assert_eq!(t.leaves(), ["the", "cat", "sat"]);
        assert_eq!(t.to_string(), REF);
        let one = parse_tree("(S (NP (DT the)))").unwrap();
        assert_eq!(one.leaves(), ["the"]);
    }

    #[test]
    fn error_positions() {
        assert_eq!(parse_tree("(S (NP"), Err(TreeError::UnbalancedParens(7)));
        assert_eq!(parse_tree("(S (NP x)))"), Err(TreeError::UnbalancedParens(11)));
        assert_eq!(parse_tree("(S (NP))"), Err(TreeError::EmptyNode(4)));
        assert_eq!(parse_tree("()"), Err(TreeError::EmptyNode(1)));
        assert_eq!(parse_tree("(NP the cat)"), Err(TreeError::UnexpectedToken(9)));
        assert_eq!(parse_tree("  "), Err(TreeError::EmptyInput));
    }

    #[test]
    fn penn_wrapper() {
        let t = parse_tree("( (S (NN hi)))").unwrap();
        assert_eq!(t.to_string(), "((S (NN hi)))");
        assert_eq!(t.unwrap_root().label, "S");
    }

    fn arb_tree() -> impl Strategy<Value = ParseTree> {
        let leaf = ("[A-Z]{1,3}", "[a-z]{1,5}").prop_map(|(l, w)| ParseTree::preterminal(l, w));
        leaf.prop_recursive(4, 24, 4, |inner| {
            ("[A-Z]{1,4}", prop::collection::vec(inner, 1..4))
                .prop_map(|(l, c)| ParseTree::node(l, c))
        })
    }

    proptest! {
        #[test]
        fn round_trip_with_noisy_whitespace(t in arb_tree(), pad in "[ \\t\\n]{1,3}") {
            let canonical = t.to_string();
            let noisy = canonical.replace(' ', &pad).replace('(', &format!("({pad}")) ;
            let parsed = parse_tree(&noisy).unwrap();
            prop_assert_eq!(&parsed, &t);
            prop_assert_eq!(parsed.to_string(), normalize_bracketed(&noisy));
        }
    }
}
