//! Anonymization placeholders (`@PERSON1`) and encoding damage.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::TokenizedSentence;

/// Entity categories every name pool must cover.
pub const REQUIRED_CATEGORIES: [&str; 5] = ["PERSON", "LOCATION", "ORGANIZATION", "DATE", "other"];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Substrings that mark a token as mis-decoded text.
    pub mojibake_patterns: Vec<String>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            mojibake_patterns: vec!["Â".into(), "â€".into()],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseReport {
    pub entity_placeholders: Vec<(usize, String)>,
    pub encoding_flags: Vec<usize>,
    pub is_noisy: bool,
}

/// Category of an `@` placeholder: `@PERSON1` -> `PERSON`. The pattern is
/// `@`, one or more ASCII uppercase letters, then optional digits.
pub fn placeholder_category(token: &str) -> Option<&str> {
    let rest = token.strip_prefix('@')?;
    let letters = rest.bytes().take_while(u8::is_ascii_uppercase).count();
    if letters == 0 || !rest[letters..].bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(&rest[..letters])
}

pub fn detect_noise(sentence: &TokenizedSentence, config: &NoiseConfig) -> NoiseReport {
    let mut report = NoiseReport::default();
    for (i, tok) in sentence.tokens.iter().enumerate() {
        if placeholder_category(tok).is_some() {
            report.entity_placeholders.push((i, tok.clone()));
        }
        if tok.contains('\u{FFFD}') || config.mojibake_patterns.iter().any(|p| !p.is_empty() && tok.contains(p.as_str())) {
            report.encoding_flags.push(i);
        }
    }
    report.is_noisy = !report.entity_placeholders.is_empty() || !report.encoding_flags.is_empty();
    report
}

#[derive(Debug, Error)]
pub enum PoolError {
    #[error("name pool has no names for category {0}")]
    MissingCategory(String),
    #[error("pool name {0:?} is not a single token")]
    MultiTokenName(String),
}

/// Replacement names per entity category. Names must be single tokens.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamePool {
    categories: BTreeMap<String, Vec<String>>,
}

impl NamePool {
    pub fn new(categories: BTreeMap<String, Vec<String>>) -> Result<Self, PoolError> {
        for req in REQUIRED_CATEGORIES {
            if categories.get(req).is_none_or(Vec::is_empty) {
                return Err(PoolError::MissingCategory(req.to_string()));
            }
        }
        for name in categories.values().flatten() {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(PoolError::MultiTokenName(name.clone()));
            }
        }
        Ok(Self { categories })
    }

    /// Category names resolve to themselves when present, otherwise to `other`.
    pub fn names_for(&self, category: &str) -> (&str, &[String]) {
        match self.categories.get_key_value(category) {
            Some((k, v)) => (k.as_str(), v.as_slice()),
            None => {
                let (k, v) = self.categories.get_key_value("other").expect("validated");
                (k.as_str(), v.as_slice())
            }
        }
    }
}

impl Default for NamePool {
    fn default() -> Self {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: &[&str]| {
            m.insert(k.to_string(), v.iter().map(|s| s.to_string()).collect());
        };
        put("PERSON", &["Alice", "Bruno", "Chen", "Dana", "Emeka", "Farah", "Grace", "Hiro"]);
        put("LOCATION", &["Springfield", "Riverton", "Lakeside", "Oakdale", "Fairview"]);
        put("CITY", &["Boston", "Denver", "Portland", "Austin"]);
        put("STATE", &["Ohio", "Texas", "Oregon", "Vermont"]);
        put("ORGANIZATION", &["Acme", "Globex", "Initech", "Umbrella"]);
        put("DATE", &["Monday", "yesterday", "1999", "today"]);
        put("MONTH", &["January", "April", "July", "October"]);
        put("TIME", &["noon", "midnight", "morning"]);
        put("NUM", &["three", "twelve", "forty"]);
        put("PERCENT", &["half", "most", "few"]);
        put("MONEY", &["$20", "$5", "$100"]);
        put("CAPS", &["Sam", "Lee", "Max"]);
        put("other", &["Thing", "Stuff", "Item"]);
        Self::new(m).expect("default pool is valid")
    }
}

/// Replaces placeholders across the sentences of one essay. The k-th
/// distinct placeholder (first-appearance order, counted per resolved
/// category `c`) receives `pool[c][(seed + k) mod |pool[c]|]`; repeated
/// placeholders reuse their first assignment.
#[derive(Debug)]
pub struct EntitySubstituter<'a> {
    pool: &'a NamePool,
    seed: u64,
    assigned: HashMap<String, String>,
    next_index: HashMap<String, u64>,
}

impl<'a> EntitySubstituter<'a> {
    pub fn new(pool: &'a NamePool, seed: u64) -> Self {
        Self {
            pool,
            seed,
            assigned: HashMap::new(),
            next_index: HashMap::new(),
        }
    }

    fn name_for(&mut self, placeholder: &str, category: &str) -> String {
        if let Some(n) = self.assigned.get(placeholder) {
            return n.clone();
        }
        let (resolved, names) = self.pool.names_for(category);
        let k = self.next_index.entry(resolved.to_string()).or_insert(0);
        let idx = (self.seed.wrapping_add(*k) % names.len() as u64) as usize;
        *k += 1;
        let name = names[idx].clone();
        self.assigned.insert(placeholder.to_string(), name.clone());
        name
    }

    /// Returns a sentence with placeholders replaced; text is rebuilt so
    /// offsets stay faithful. Non-placeholder tokens are untouched.
    pub fn substitute(&mut self, sentence: &TokenizedSentence) -> TokenizedSentence {
        let mut out = TokenizedSentence::default();
        let mut cursor = 0;
        for (tok, &(s, e)) in sentence.tokens.iter().zip(&sentence.offsets) {
            out.text.push_str(&sentence.text[cursor..s]);
            let replacement = match placeholder_category(tok) {
                Some(cat) => self.name_for(tok, cat),
                None => tok.clone(),
            };
            let start = out.text.len();
            out.text.push_str(&replacement);
            out.offsets.push((start, out.text.len()));
            out.tokens.push(replacement);
            cursor = e;
        }
        out.text.push_str(&sentence.text[cursor..]);
        out
    }

    pub fn assignments(&self) -> &HashMap<String, String> {
        &self.assigned
    }
}

/// Single-sentence convenience wrapper around [`EntitySubstituter`].
pub fn substitute_entities(sentence: &TokenizedSentence, pool: &NamePool, seed: u64) -> TokenizedSentence {
    EntitySubstituter::new(pool, seed).substitute(sentence)
}
