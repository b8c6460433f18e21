//! The M2 annotation format.
//!
//! ```text
//! S I gess almost people cannot speaking English .
//! A 1 2|||R:SPELL|||guess|||REQUIRED|||-NONE-|||0
//! A 2 3|||R:OTHER|||most|||REQUIRED|||-NONE-|||0
//! A 5 6|||R:OTHER|||speak|||REQUIRED|||-NONE-|||0
//!
//! ```
//!
//! A sentence an annotator left unchanged carries a noop line
//! `A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||<annotator>`. Deletions are
//! written with an empty correction field; `-NONE-` is also accepted on read.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::TokenizedSentence;
use crate::align::{Edit, ErrorType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum M2Error {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: overlapping edits for annotator {annotator}")]
    OverlappingEdits { annotator: u32, line: usize },
}

impl M2Error {
    pub fn line(&self) -> usize {
        match self {
            M2Error::MalformedLine { line, .. } | M2Error::OverlappingEdits { line, .. } => *line,
        }
    }
}

/// One M2 entry: the tokenized source plus each annotator's edit set.
/// An annotator mapped to an empty list declared the sentence correct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedSentence {
    pub source: TokenizedSentence,
    pub annotations: BTreeMap<u32, Vec<Edit>>,
}

impl AnnotatedSentence {
    pub fn new(source: TokenizedSentence) -> Self {
        Self {
            source,
            annotations: BTreeMap::new(),
        }
    }

    pub fn with_annotator(mut self, annotator: u32, edits: Vec<Edit>) -> Self {
        self.annotations.insert(annotator, edits);
        self
    }
}

fn malformed(line: usize, reason: impl Into<String>) -> M2Error {
    M2Error::MalformedLine {
        line,
        reason: reason.into(),
    }
}

pub fn read_m2(contents: &str) -> Result<Vec<AnnotatedSentence>, M2Error> {
    let mut out = Vec::new();
    let mut current: Option<AnnotatedSentence> = None;
    for (idx, raw) in contents.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            out.extend(current.take());
        } else if let Some(rest) = line.strip_prefix("S ").or_else(|| (line == "S").then_some("")) {
            out.extend(current.take());
            let tokens: Vec<&str> = rest.split(' ').filter(|t| !t.is_empty()).collect();
            current = Some(AnnotatedSentence::new(TokenizedSentence::from_tokens(tokens)));
        } else if let Some(rest) = line.strip_prefix("A ") {
            let entry = current
                .as_mut()
                .ok_or_else(|| malformed(line_no, "annotation line without a preceding S line"))?;
            parse_annotation(rest, line_no, entry)?;
        } else {
            return Err(malformed(line_no, "expected an S line, an A line or a blank line"));
        }
    }
    out.extend(current);
    Ok(out)
}

fn parse_annotation(rest: &str, line: usize, entry: &mut AnnotatedSentence) -> Result<(), M2Error> {
    let fields: Vec<&str> = rest.split("|||").collect();
    if fields.len() != 6 {
        return Err(malformed(line, format!("expected 6 |||-separated fields, found {}", fields.len())));
    }
    let annotator: u32 = fields[5]
        .trim()
        .parse()
        .map_err(|_| malformed(line, format!("bad annotator id {:?}", fields[5])))?;
    let mut span = fields[0].split(' ');
    let (Some(s), Some(e), None) = (span.next(), span.next(), span.next()) else {
        return Err(malformed(line, "span must be `<start> <end>`"));
    };
    if s == "-1" && e == "-1" {
        entry.annotations.entry(annotator).or_default();
        return Ok(());
    }
    let start: usize = s.parse().map_err(|_| malformed(line, format!("bad span start {s:?}")))?;
    let end: usize = e.parse().map_err(|_| malformed(line, format!("bad span end {e:?}")))?;
    if start > end || end > entry.source.len() {
        return Err(malformed(line, format!("span {start} {end} outside sentence of {} tokens", entry.source.len())));
    }
    let replacement: Vec<String> = match fields[2] {
        "-NONE-" => Vec::new(),
        c => c.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect(),
    };
    let edits = entry.annotations.entry(annotator).or_default();
    if let Some(prev) = edits.last() {
        if start < prev.end || start < prev.start {
            return Err(M2Error::OverlappingEdits { annotator, line });
        }
    }
    edits.push(Edit {
        start,
        end,
        replacement,
        etype: ErrorType::new(fields[1]),
    });
    Ok(())
}

/// Serializes entries: annotators ascending, one blank line after each block.
pub fn write_m2(entries: &[AnnotatedSentence]) -> String {
    let mut out = String::new();
    for entry in entries {
        out.push_str("S ");
        out.push_str(&entry.source.joined());
        out.push('\n');
        for (annotator, edits) in &entry.annotations {
            if edits.is_empty() {
                let _ = writeln!(out, "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||{annotator}");
            }
            for e in edits {
                let _ = writeln!(
                    out,
                    "A {} {}|||{}|||{}|||REQUIRED|||-NONE-|||{}",
                    e.start,
                    e.end,
                    e.etype,
                    e.replacement.join(" "),
                    annotator
                );
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_single_edit() {
        let got = read_m2("S I go\nA 1 2|||R:OTHER|||went|||REQUIRED|||-NONE-|||0\n\n").unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].source.tokens, ["I", "go"]);
        let edits = &got[0].annotations[&0];
        assert_eq!(edits.len(), 1);
        assert_eq!((edits[0].start, edits[0].end), (1, 2));
        assert_eq!(edits[0].replacement, ["went"]);
        assert_eq!(edits[0].etype.as_str(), "R:OTHER");
    }

    #[test]
    fn no_annotators_and_noop() {
        let got = read_m2("S I go\n\n").unwrap();
        assert!(got[0].annotations.is_empty());
        assert_eq!(write_m2(&got), "S I go\n\n");

        let noop = "S I go .\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n\n";
        let got = read_m2(noop).unwrap();
        assert_eq!(got[0].annotations[&0], vec![]);
        assert_eq!(write_m2(&got), noop);
    }

    #[test]
    fn errors() {
        let err = read_m2("A 1 2|||R:OTHER|||x|||REQUIRED|||-NONE-|||0\n").unwrap_err();
        assert_eq!(err, malformed(1, "annotation line without a preceding S line"));
        let err = read_m2("S a b c\nA 0 2|||R:OTHER|||x|||REQUIRED|||-NONE-|||0\nA 1 3|||R:OTHER|||y|||REQUIRED|||-NONE-|||0\n").unwrap_err();
        assert_eq!(err, M2Error::OverlappingEdits { annotator: 0, line: 3 });
        let err = read_m2("S a\nA 0 5|||R:OTHER|||x|||REQUIRED|||-NONE-|||0\n").unwrap_err();
        assert_eq!(err.line(), 2);
        let err = read_m2("S a\nA 0 1|||R:OTHER|||x\n").unwrap_err();
        assert_eq!(err.line(), 2);
        let err = read_m2("S a\nhello\n").unwrap_err();
        assert_eq!(err.line(), 2);
    }

    #[test]
    fn deletion_forms() {
        let canonical = "S a b\nA 1 2|||U:OTHER||||||REQUIRED|||-NONE-|||0\n\n";
        let got = read_m2(canonical).unwrap();
        assert!(got[0].annotations[&0][0].replacement.is_empty());
        assert_eq!(write_m2(&got), canonical);
        let alt = read_m2("S a b\nA 1 2|||U:OTHER|||-NONE-|||REQUIRED|||-NONE-|||0\n\n").unwrap();
        assert_eq!(alt, got);
    }

    #[test]
    fn multiple_annotators_and_missing_final_blank() {
        let text = "S a b\nA 0 1|||R:ORTH|||A|||REQUIRED|||-NONE-|||0\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||1\n\nS c\n";
        let got = read_m2(text).unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].annotations.len(), 2);
        assert_eq!(write_m2(&got), format!("{text}\n"));
    }
}
