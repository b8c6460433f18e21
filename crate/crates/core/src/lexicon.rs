//! Word-frequency dictionary used by the speller and the error classifier.

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::text::edit_distance_within;

const DEFAULT_DICTIONARY: &str = include_str!("../resources/dictionary.txt");

#[derive(Debug, Error)]
pub enum DictionaryError {
    #[error("dictionary line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("cannot read dictionary {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Lowercase word forms with corpus frequency counts.
#[derive(Debug, Clone, Default)]
pub struct Dictionary {
    freq: HashMap<String, u64>,
    // char length -> (word chars, word, freq)
    by_len: HashMap<usize, Vec<(Vec<char>, String, u64)>>,
}

impl Dictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// The compact English lexicon bundled with the crate.
    pub fn english() -> Self {
        Self::parse(DEFAULT_DICTIONARY).expect("bundled dictionary is well-formed")
    }

    pub fn from_entries<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut d = Self::new();
        for (w, f) in entries {
            d.insert(w.as_ref(), f);
        }
        d
    }

    /// Parses `word` or `word<whitespace>count` lines; `#` starts a comment.
    pub fn parse(contents: &str) -> Result<Self, DictionaryError> {
        let mut d = Self::new();
        for (i, raw) in contents.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let word = parts.next().unwrap_or_default();
            let freq = match parts.next() {
                Some(f) => f.parse::<u64>().map_err(|e| DictionaryError::BadLine {
                    line: i + 1,
                    reason: format!("bad frequency {f:?}: {e}"),
                })?,
                None => 1,
            };
            if parts.next().is_some() {
                return Err(DictionaryError::BadLine {
                    line: i + 1,
                    reason: "expected `word [count]`".into(),
                });
            }
            d.insert(word, freq);
        }
        Ok(d)
    }

    pub fn load(path: &Path) -> Result<Self, DictionaryError> {
        let s = std::fs::read_to_string(path).map_err(|source| DictionaryError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&s)
    }

    /// Adds `word` (lowercased); repeated inserts accumulate counts.
    pub fn insert(&mut self, word: &str, freq: u64) {
        let w = word.to_lowercase();
        let entry = self.freq.entry(w.clone()).or_insert(0);
        *entry += freq;
        let total = *entry;
        let chars: Vec<char> = w.chars().collect();
        let bucket = self.by_len.entry(chars.len()).or_default();
        match bucket.iter_mut().find(|(_, word, _)| *word == w) {
            Some(slot) => slot.2 = total,
            None => bucket.push((chars, w, total)),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.freq.contains_key(&word.to_lowercase())
    }

    pub fn frequency(&self, word: &str) -> Option<u64> {
        self.freq.get(&word.to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.freq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq.is_empty()
    }

    /// Entries sorted by word.
    pub fn entries(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.freq.iter().map(|(w, f)| (w.as_str(), *f)).collect();
        v.sort_unstable();
        v
    }

    /// Highest-frequency word within `max_distance` character edits of
    /// `word` (compared lowercase); frequency ties go to the
    /// lexicographically smallest word. The word itself is never returned.
    pub fn best_candidate(&self, word: &str, max_distance: usize) -> Option<&str> {
        let lower = word.to_lowercase();
        let target: Vec<char> = lower.chars().collect();
        let lo = target.len().saturating_sub(max_distance);
        let hi = target.len() + max_distance;
        let mut best: Option<(&str, u64)> = None;
        for len in lo..=hi {
            let Some(bucket) = self.by_len.get(&len) else { continue };
            for (chars, w, f) in bucket {
                if *w == lower || edit_distance_within(&target, chars, max_distance).is_none() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bw, bf)) => *f > bf || (*f == bf && w.as_str() < bw),
                };
                if better {
                    best = Some((w.as_str(), *f));
                }
            }
        }
        best.map(|(w, _)| w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_then_lexicographic() {
        let d = Dictionary::from_entries([("the", 100), ("ten", 10), ("tea", 10)]);
        assert_eq!(d.best_candidate("teh", 1), Some("the"));
        let d = Dictionary::from_entries([("ten", 10), ("tea", 10)]);
        assert_eq!(d.best_candidate("teb", 1), Some("tea"));
        assert_eq!(d.best_candidate("xyzzy", 1), None);
    }

    #[test]
    fn bundled_dictionary_loads() {
        let d = Dictionary::english();
        assert!(d.len() > 1000);
        assert!(d.contains("Guess"));
        assert!(!d.contains("gess"));
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = Dictionary::parse("a 1\nb x\n").unwrap_err();
        assert!(matches!(err, DictionaryError::BadLine { line: 2, .. }));
    }
}
