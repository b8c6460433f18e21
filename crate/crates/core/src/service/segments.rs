use serde::{Deserialize, Serialize};

use crate::align::Edit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Plain,
    Deleted,
    Inserted,
}

/// A run of tokens in one sentence, space-joined in `text`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub sentence: usize,
    pub kind: SegmentKind,
    pub text: String,
}

/// Diff segments for one sentence. Unedited tokens are merged into plain
/// runs; each edit contributes its deleted source tokens, then its
/// inserted replacement tokens. Edits must be valid and non-overlapping.
pub fn sentence_segments(sentence: usize, source: &[String], edits: &[Edit]) -> Vec<Segment> {
    let mut sorted: Vec<&Edit> = edits.iter().collect();
    sorted.sort_by_key(|e| (e.start, e.end));
    let mut out = Vec::new();
    let mut push = |kind, toks: &[String]| {
        if !toks.is_empty() {
            out.push(Segment {
                sentence,
                kind,
                text: toks.join(" "),
            });
        }
    };
    let mut pos = 0;
    for e in sorted {
        push(SegmentKind::Plain, &source[pos..e.start]);
        push(SegmentKind::Deleted, &source[e.start..e.end]);
        push(SegmentKind::Inserted, &e.replacement);
        pos = e.end;
    }
    push(SegmentKind::Plain, &source[pos..]);
    out
}

/// Tokens of the segments whose kind is in `kinds`, in order.
pub fn reconstruct(segments: &[Segment], kinds: &[SegmentKind]) -> Vec<String> {
    segments
        .iter()
        .filter(|s| kinds.contains(&s.kind))
        .flat_map(|s| s.text.split(' ').map(str::to_string))
        .collect()
}

pub fn source_side(segments: &[Segment]) -> Vec<String> {
    reconstruct(segments, &[SegmentKind::Plain, SegmentKind::Deleted])
}

pub fn corrected_side(segments: &[Segment]) -> Vec<String> {
    reconstruct(segments, &[SegmentKind::Plain, SegmentKind::Inserted])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::{apply_to_tokens, extract_edits};
    use crate::corpus::TokenizedSentence;
    use crate::align::align;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn example_sentence() {
        let src = toks("I gess almost people cannot speaking English .");
        let edits = vec![Edit::new(1, 2, ["guess"]), Edit::new(2, 3, ["most"]), Edit::new(5, 6, ["speak"])];
        let segs = sentence_segments(0, &src, &edits);
        let view: Vec<(SegmentKind, &str)> = segs.iter().map(|s| (s.kind, s.text.as_str())).collect();
        use SegmentKind::*;
        assert_eq!(
            view,
            [
                (Plain, "I"),
                (Deleted, "gess"),
                (Inserted, "guess"),
                (Deleted, "almost"),
                (Inserted, "most"),
                (Plain, "people cannot"),
                (Deleted, "speaking"),
                (Inserted, "speak"),
                (Plain, "English ."),
            ]
        );
        assert_eq!(source_side(&segs), src);
        assert_eq!(corrected_side(&segs), toks("I guess most people cannot speak English ."));
    }

    proptest! {
        #[test]
        fn reconstruction_laws(
            a in prop::collection::vec("[a-d]", 0..8),
            b in prop::collection::vec("[a-d]", 0..8),
        ) {
            let (s, t) = (TokenizedSentence::from_tokens(a), TokenizedSentence::from_tokens(b));
            let edits = extract_edits(&align(&s, &t), &s, &t);
            let segs = sentence_segments(0, &s.tokens, &edits);
            prop_assert_eq!(source_side(&segs), s.tokens.clone());
            prop_assert_eq!(corrected_side(&segs), apply_to_tokens(&s.tokens, &edits).unwrap());
        }
    }
}
