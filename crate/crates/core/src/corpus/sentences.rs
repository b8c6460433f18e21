use std::collections::HashSet;
use std::ops::Range;

const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "Dr.", "Mr.", "Mrs.", "Ms.", "Prof.", "Sr.", "Jr.", "St.", "Mt.", "vs.", "etc.", "e.g.",
    "i.e.", "No.", "Inc.", "Ltd.", "Co.", "U.S.", "U.K.", "a.m.", "p.m.", "Jan.", "Feb.",
    "Aug.", "Sept.", "Oct.", "Nov.", "Dec.",
];

/// Rule-based splitter: a sentence ends at `.`, `!` or `?` (plus any closing
/// quotes/brackets) when whitespace and an uppercase letter follow, unless the
/// word carrying the period is a listed abbreviation or a single-letter initial.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: HashSet<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        Self::with_abbreviations(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '”' | '’' | '»')
}

fn is_opener(c: char) -> bool {
    matches!(c, '"' | '\'' | '(' | '[' | '“' | '‘' | '«' | '@')
}

impl SentenceSplitter {
    pub fn with_abbreviations<I, S>(abbrevs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            abbreviations: abbrevs.into_iter().map(|a| a.as_ref().to_lowercase()).collect(),
        }
    }

    /// Byte ranges of the sentences. Text between consecutive ranges (and
    /// before the first / after the last) is whitespace only.
    pub fn split_spans(&self, text: &str) -> Vec<Range<usize>> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut spans = Vec::new();
        let mut start: Option<usize> = None;
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            if start.is_none() && !c.is_whitespace() {
                start = Some(pos);
            }
            if matches!(c, '.' | '!' | '?') {
                let mut j = i + 1;
                while j < chars.len() && (matches!(chars[j].1, '.' | '!' | '?') || is_closer(chars[j].1)) {
                    j += 1;
                }
                let end = chars.get(j).map_or(text.len(), |&(p, _)| p);
                let mut k = j;
                while k < chars.len() && chars[k].1.is_whitespace() {
                    k += 1;
                }
                let mut first = k;
                while first < chars.len() && is_opener(chars[first].1) {
                    first += 1;
                }
                let boundary = k > j
                    && first < chars.len()
                    && chars[first].1.is_uppercase()
                    && !(c == '.' && self.is_abbreviation(text, start.unwrap_or(0), chars[i].0 + 1));
                if boundary {
                    spans.push(start.unwrap_or(pos)..end);
                    start = None;
                    i = k;
                    continue;
                }
                i = j;
                continue;
            }
            i += 1;
        }
        if let Some(s) = start {
            let trimmed = text[s..].trim_end();
            if !trimmed.is_empty() {
                spans.push(s..s + trimmed.len());
            }
        }
        spans
    }

    pub fn split(&self, text: &str) -> Vec<String> {
        self.split_spans(text).into_iter().map(|r| text[r].to_string()).collect()
    }

    fn is_abbreviation(&self, text: &str, sentence_start: usize, period_end: usize) -> bool {
        let before = &text[sentence_start..period_end];
        let word = before
            .rsplit(char::is_whitespace)
            .next()
            .unwrap_or(before)
            .trim_start_matches(is_opener);
        if self.abbreviations.contains(&word.to_lowercase()) {
            return true;
        }
        // single-letter initial such as "J."
        let mut it = word.chars();
        matches!((it.next(), it.next(), it.next()), (Some(a), Some('.'), None) if a.is_uppercase())
    }
}

/// Splits with the default abbreviation list.
pub fn split_sentences(text: &str) -> Vec<String> {
    SentenceSplitter::default().split(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_cases() {
        assert_eq!(split_sentences("I ran. He sat."), ["I ran.", "He sat."]);
        assert_eq!(split_sentences("Dr. Lee ran."), ["Dr. Lee ran."]);
        assert_eq!(split_sentences("One sentence"), ["One sentence"]);
        assert!(split_sentences("   ").is_empty());
    }

    #[test]
    fn terminators_quotes_and_case() {
        assert_eq!(
            split_sentences("Really?! \"Yes.\" Then we left. and more"),
            ["Really?!", "\"Yes.\"", "Then we left. and more"]
        );
        assert_eq!(split_sentences("I met J. K. Rowling. It was fun."), ["I met J. K. Rowling.", "It was fun."]);
        assert_eq!(split_sentences("Hi. @PERSON1 came."), ["Hi.", "@PERSON1 came."]);
    }

    proptest! {
        #[test]
        fn gaps_are_whitespace(s in "[a-zA-Z .!?\"\\n]{0,60}") {
            let spans = SentenceSplitter::default().split_spans(&s);
            let mut cursor = 0;
            for r in &spans {
                prop_assert!(r.start >= cursor && r.start < r.end);
                prop_assert!(s[cursor..r.start].chars().all(char::is_whitespace));
                cursor = r.end;
            }
            prop_assert!(s[cursor..].chars().all(char::is_whitespace));
        }
    }
}
