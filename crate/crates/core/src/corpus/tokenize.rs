use serde::{Deserialize, Serialize};

use crate::text::is_punct_char;

/// Contraction suffixes split off a word core, tried in this order.
pub const CONTRACTIONS: [&str; 7] = ["n't", "'s", "'re", "'ve", "'ll", "'d", "'m"];

/// A sentence split into tokens. `offsets[i]` is the byte range of
/// `tokens[i]` inside `text`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedSentence {
    pub text: String,
    pub tokens: Vec<String>,
    pub offsets: Vec<(usize, usize)>,
}

impl TokenizedSentence {
    /// Builds a sentence whose text is the tokens joined by single spaces.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut text = String::new();
        let mut toks = Vec::new();
        let mut offsets = Vec::new();
        for t in tokens {
            let t: String = t.into();
            if !text.is_empty() {
                text.push(' ');
            }
            let start = text.len();
            text.push_str(&t);
            offsets.push((start, text.len()));
            toks.push(t);
        }
        Self {
            text,
            tokens: toks,
            offsets,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens joined with single spaces (the M2 `S` line payload).
    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Whitespace split, then peel leading/trailing punctuation, then split one
/// contraction suffix from [`CONTRACTIONS`]. Runs of the same punctuation
/// character ("...", "!!") stay one token. `@NAME` placeholders keep their `@`.
pub fn tokenize(text: &str) -> TokenizedSentence {
    let mut out = TokenizedSentence {
        text: text.to_string(),
        ..Default::default()
    };
    let mut chunk_start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = chunk_start.take() {
                split_chunk(&text[s..i], s, &mut out);
            }
        } else if chunk_start.is_none() {
            chunk_start = Some(i);
        }
    }
    if let Some(s) = chunk_start {
        split_chunk(&text[s..], s, &mut out);
    }
    out
}

fn push(out: &mut TokenizedSentence, s: &str, start: usize) {
    out.tokens.push(s.to_string());
    out.offsets.push((start, start + s.len()));
}

fn peels_as_punct(chunk: &str, at: usize) -> bool {
    let mut it = chunk[at..].chars();
    let Some(c) = it.next() else { return false };
    if c == '@' {
        // placeholder such as @PERSON1
        return !it.next().is_some_and(char::is_alphanumeric);
    }
    is_punct_char(c)
}

fn split_chunk(chunk: &str, base: usize, out: &mut TokenizedSentence) {
    if is_contraction(chunk) {
        push(out, chunk, base);
        return;
    }
    // leading punctuation
    let mut lo = 0;
    let mut leading = Vec::new();
    while lo < chunk.len() && peels_as_punct(chunk, lo) {
        let c = chunk[lo..].chars().next().unwrap();
        let run_end = chunk[lo..]
            .char_indices()
            .find(|&(_, d)| d != c)
            .map_or(chunk.len(), |(k, _)| lo + k);
        leading.push((lo, run_end));
        lo = run_end;
    }
    // trailing punctuation, never crossing `lo`
    let mut hi = chunk.len();
    let mut trailing = Vec::new();
    while hi > lo {
        let (k, c) = chunk[lo..hi].char_indices().next_back().unwrap();
        let k = lo + k;
        if !peels_as_punct(chunk, k) {
            break;
        }
        if is_contraction(&chunk[lo..hi]) {
            break;
        }
        let mut run_start = k;
        while let Some((j, d)) = chunk[lo..run_start].char_indices().next_back() {
            if d != c {
                break;
            }
            run_start = lo + j;
        }
        trailing.push((run_start, hi));
        hi = run_start;
    }
    for (s, e) in leading {
        push(out, &chunk[s..e], base + s);
    }
    if lo < hi {
        let core = &chunk[lo..hi];
        match contraction_split(core) {
            Some(cut) => {
                push(out, &core[..cut], base + lo);
                push(out, &core[cut..], base + lo + cut);
            }
            None => push(out, core, base + lo),
        }
    }
    for (s, e) in trailing.into_iter().rev() {
        push(out, &chunk[s..e], base + s);
    }
}

fn normalize_apostrophe(s: &str) -> String {
    s.to_lowercase().replace('’', "'")
}

fn is_contraction(s: &str) -> bool {
    let n = normalize_apostrophe(s);
    CONTRACTIONS.contains(&n.as_str())
}

/// Byte index where a contraction suffix starts, if the core has one and a
/// non-empty stem precedes it.
fn contraction_split(core: &str) -> Option<usize> {
    let norm = normalize_apostrophe(core);
    for suffix in CONTRACTIONS {
        if norm.len() > suffix.len() && norm.ends_with(suffix) {
            // walk back the same number of chars in the original string
            let n_chars = suffix.chars().count();
            let (cut, _) = core.char_indices().rev().nth(n_chars - 1)?;
            if cut == 0 {
                return None;
            }
            return Some(cut);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).tokens
    }

    #[test]
    fn splits_punctuation() {
        assert_eq!(toks("cannot speaking English."), ["cannot", "speaking", "English", "."]);
        assert!(toks("").is_empty());
        assert!(toks("   ").is_empty());
    }

    #[test]
    fn contraction_table() {
        assert_eq!(toks("don't stop"), ["do", "n't", "stop"]);
        assert_eq!(toks("She's here, they're there."), ["She", "'s", "here", ",", "they", "'re", "there", "."]);
        assert_eq!(toks("I'm"), ["I", "'m"]);
        assert_eq!(toks("we'll we'd we've"), ["we", "'ll", "we", "'d", "we", "'ve"]);
        assert_eq!(toks("can't"), ["ca", "n't"]);
        assert_eq!(toks("don’t"), ["do", "n’t"]);
        assert_eq!(toks("'s"), ["'s"]);
    }

    #[test]
    fn placeholders_and_runs() {
        assert_eq!(toks("@PERSON1 went home..."), ["@PERSON1", "went", "home", "..."]);
        assert_eq!(toks("(\"Hi!\")"), ["(", "\"", "Hi", "!", "\"", ")"]);
        assert_eq!(toks("3.5 cups"), ["3.5", "cups"]);
        assert_eq!(toks("caf\u{FFFD}"), ["caf\u{FFFD}"]);
    }

    #[test]
    fn offsets_cover_tokens() {
        let t = tokenize("  Hello, wörld! Don't.");
        for (tok, (s, e)) in t.tokens.iter().zip(&t.offsets) {
            assert_eq!(&t.text[*s..*e], tok);
        }
    }

    proptest! {
        #[test]
        fn offsets_are_faithful(s in "[a-zA-Z'’.,!?@ \\t\"()0-9é]{0,40}") {
            let t = tokenize(&s);
            prop_assert_eq!(&t, &tokenize(&s));
            let mut last_end = 0;
            for (tok, &(a, b)) in t.tokens.iter().zip(&t.offsets) {
                prop_assert!(!tok.is_empty());
                prop_assert!(a >= last_end && a < b);
                prop_assert_eq!(&s[a..b], tok.as_str());
                last_end = b;
            }
        }
    }
}
