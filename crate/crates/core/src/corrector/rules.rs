use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::CorrectionResult;
use crate::align::{diff, Classifier};
use crate::corpus::TokenizedSentence;
use crate::lexicon::{Dictionary, DictionaryError};
use crate::text::{is_spellable, match_case};

const DEFAULT_RULES: &str = include_str!("../../resources/rules.txt");

pub const RULES_BACKEND: &str = "rules";

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("rules line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Dictionary(#[from] DictionaryError),
}

/// Literal token pattern and its replacement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub pattern: Vec<String>,
    pub replacement: Vec<String>,
}

/// Ordered rewrite rules plus the speller's dictionary.
#[derive(Debug, Clone)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub dictionary: Dictionary,
    /// Largest character edit distance the speller will bridge.
    pub max_spell_distance: usize,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>, dictionary: Dictionary) -> Self {
        Self {
            rules,
            dictionary,
            max_spell_distance: 1,
        }
    }

    /// Bundled rules and the bundled English dictionary.
    pub fn english() -> Self {
        Self::new(parse_rules(DEFAULT_RULES).expect("bundled rules are well-formed"), Dictionary::english())
    }

    pub fn load(rules: Option<&Path>, dictionary: Option<&Path>) -> Result<Self, RuleError> {
        let rules = match rules {
            Some(p) => {
                let s = std::fs::read_to_string(p).map_err(|source| RuleError::Io {
                    path: p.display().to_string(),
                    source,
                })?;
                parse_rules(&s)?
            }
            None => parse_rules(DEFAULT_RULES)?,
        };
        let dictionary = match dictionary {
            Some(p) => Dictionary::load(p)?,
            None => Dictionary::english(),
        };
        Ok(Self::new(rules, dictionary))
    }

    pub fn classifier(&self) -> Classifier<'_> {
        Classifier::new(&self.dictionary)
    }
}

/// One rule per line: `pattern tokens => replacement tokens`. `#` comments
/// and blank lines are skipped; the replacement may be empty.
pub fn parse_rules(contents: &str) -> Result<Vec<Rule>, RuleError> {
    let mut rules = Vec::new();
    for (i, raw) in contents.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((lhs, rhs)) = line.split_once("=>") else {
            return Err(RuleError::BadLine {
                line: i + 1,
                reason: "missing `=>`".into(),
            });
        };
        let pattern: Vec<String> = lhs.split_whitespace().map(str::to_string).collect();
        if pattern.is_empty() {
            return Err(RuleError::BadLine {
                line: i + 1,
                reason: "empty pattern".into(),
            });
        }
        rules.push(Rule {
            pattern,
            replacement: rhs.split_whitespace().map(str::to_string).collect(),
        });
    }
    Ok(rules)
}

/// One left-to-right pass: at each position the first listed rule whose
/// pattern matches is applied and scanning resumes after the match.
pub fn apply_rules(tokens: &[String], rules: &[Rule]) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    'scan: while i < tokens.len() {
        for r in rules {
            let n = r.pattern.len();
            if i + n <= tokens.len() && tokens[i..i + n] == r.pattern[..] {
                out.extend(r.replacement.iter().cloned());
                i += n;
                continue 'scan;
            }
        }
        out.push(tokens[i].clone());
        i += 1;
    }
    out
}

/// Replaces each out-of-dictionary alphabetic token by its best dictionary
/// neighbour, keeping the original capitalisation pattern.
pub fn spell_pass(tokens: &[String], dictionary: &Dictionary, max_distance: usize) -> Vec<String> {
    tokens
        .iter()
        .map(|t| {
            if !is_spellable(t) || dictionary.contains(t) {
                return t.clone();
            }
            match dictionary.best_candidate(t, max_distance) {
                Some(c) => match_case(t, c),
                None => t.clone(),
            }
        })
        .collect()
}

/// Rule pass, then spelling pass; edits are derived by aligning the
/// source with the final output.
pub fn correct_rules(src: &TokenizedSentence, rules: &RuleSet) -> CorrectionResult {
    let after_rules = apply_rules(&src.tokens, &rules.rules);
    let corrected = TokenizedSentence::from_tokens(spell_pass(&after_rules, &rules.dictionary, rules.max_spell_distance));
    let edits = diff(src, &corrected, &rules.classifier());
    CorrectionResult {
        source: src.clone(),
        corrected,
        edits,
        backend: RULES_BACKEND.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::apply_edits;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn spelling_examples() {
        let rs = RuleSet::new(vec![], Dictionary::from_entries([("i", 500), ("guess", 50), ("it", 400)]));
        let r = correct_rules(&TokenizedSentence::from_tokens(["I", "gess", "it"]), &rs);
        assert_eq!(r.corrected.tokens, ["I", "guess", "it"]);
        assert_eq!(r.edits.len(), 1);
        assert_eq!(r.edits[0].etype.as_str(), "R:SPELL");

        let rs = RuleSet::new(vec![], Dictionary::from_entries([("the", 100), ("ten", 10), ("cat", 5)]));
        let r = correct_rules(&TokenizedSentence::from_tokens(["teh", "cat"]), &rs);
        assert_eq!(r.corrected.tokens, ["the", "cat"]);

        let r = correct_rules(&TokenizedSentence::from_tokens(["the", "cat"]), &rs);
        assert!(r.edits.is_empty());
        assert_eq!(r.backend, "rules");
    }

    #[test]
    fn speller_leaves_protected_tokens() {
        let dict = Dictionary::from_entries([("a", 9), ("b", 9)]);
        let tokens = toks("@PERSON1 1990 , n't x-y Zq");
        let out = spell_pass(&tokens, &dict, 1);
        assert_eq!(&out[..5], &tokens[..5]);
    }

    #[test]
    fn rules_leftmost_first_non_overlapping() {
        let rules = parse_rules("# comment\nalmost people => most people\ncould of => could have\na a => b\n").unwrap();
        assert_eq!(apply_rules(&toks("almost people could of"), &rules), toks("most people could have"));
        assert_eq!(apply_rules(&toks("a a a"), &rules), toks("b a"));
        assert!(parse_rules("nothing here").is_err());
        assert!(parse_rules(" => x").is_err());
    }

    #[test]
    fn bundled_rules_fix_the_learner_sentence() {
        let rs = RuleSet::english();
        let src = crate::corpus::tokenize("I gess almost people cannot speaking English.");
        let r = correct_rules(&src, &rs);
        assert_eq!(r.corrected.joined(), "I guess most people cannot speak English .");
        assert_eq!(r.edits.len(), 3);
    }

    proptest! {
        #[test]
        fn result_round_trips(words in prop::collection::vec("[a-e]{1,4}", 0..10)) {
            let rs = RuleSet::new(
                parse_rules("ab => ba\nc d => e").unwrap(),
                Dictionary::from_entries([("ab", 3), ("abc", 2), ("de", 5), ("e", 1)]),
            );
            let src = TokenizedSentence::from_tokens(words);
            let r = correct_rules(&src, &rs);
            prop_assert_eq!(apply_edits(&src, &r.edits).unwrap().tokens, r.corrected.tokens.clone());
            for e in &r.edits {
                prop_assert!(e.is_valid_for(&src.tokens));
            }
        }

        #[test]
        fn in_dictionary_substitution_rules_are_idempotent(words in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "aa", "bb"]), 0..10)) {
            let dict = Dictionary::from_entries(["a", "b", "c", "d", "aa", "bb"].map(|w| (w, 1)));
            let rs = RuleSet::new(parse_rules("a b => bb\nc => d").unwrap(), dict);
            let once = correct_rules(&TokenizedSentence::from_tokens(words), &rs).corrected;
            let twice = correct_rules(&once, &rs).corrected;
            prop_assert_eq!(once.tokens, twice.tokens);
        }
    }
}
