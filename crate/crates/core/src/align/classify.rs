use super::{Edit, ErrorType};
use crate::lexicon::Dictionary;
use crate::text::{edit_distance, is_punct_token};

/// Maximum character edit distance for a replacement to count as a spelling fix.
pub const SPELL_MAX_DISTANCE: usize = 2;

/// Resources for error typing. Without a dictionary the SPELL rule never fires.
#[derive(Debug, Clone, Copy, Default)]
pub struct Classifier<'a> {
    pub dictionary: Option<&'a Dictionary>,
}

impl<'a> Classifier<'a> {
    pub fn new(dictionary: &'a Dictionary) -> Self {
        Self {
            dictionary: Some(dictionary),
        }
    }
}

/// Tier from the span shape (M insertion, U deletion, R replacement), then
/// the first matching subtype: PUNCT, ORTH, SPELL, otherwise OTHER.
pub fn classify_edit(edit: &Edit, src: &[String], classifier: &Classifier<'_>) -> ErrorType {
    let tier = edit.tier();
    let source = &src[edit.start.min(src.len())..edit.end.min(src.len())];
    let target = &edit.replacement;

    let sub = if source.iter().chain(target).all(|t| is_punct_token(t)) {
        "PUNCT"
    } else if !source.is_empty()
        && !target.is_empty()
        && source.concat().to_lowercase() == target.concat().to_lowercase()
    {
        "ORTH"
    } else if is_spelling(source, target, classifier.dictionary) {
        "SPELL"
    } else {
        "OTHER"
    };
    ErrorType::new(format!("{}:{sub}", tier.code()))
}

fn is_spelling(source: &[String], target: &[String], dict: Option<&Dictionary>) -> bool {
    let (Some(dict), [s], [t]) = (dict, source, target) else {
        return false;
    };
    !dict.contains(s)
        && dict.contains(t)
        && edit_distance(&s.to_lowercase(), &t.to_lowercase()) <= SPELL_MAX_DISTANCE
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &[&str]) -> Vec<String> {
        s.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn rule_chain() {
        let dict = Dictionary::from_entries([("guess", 50), ("almost", 40), ("most", 60)]);
        let c = Classifier::new(&dict);
        let src = toks(&["I", "gess", "almost", "people", "The"]);
        assert_eq!(classify_edit(&Edit::new(1, 2, ["guess"]), &src, &c).as_str(), "R:SPELL");
        assert_eq!(classify_edit(&Edit::new(2, 3, ["most"]), &src, &c).as_str(), "R:OTHER");
        assert_eq!(classify_edit(&Edit::new(1, 1, [","]), &src, &c).as_str(), "M:PUNCT");
        assert_eq!(classify_edit(&Edit::new(4, 5, ["the"]), &src, &c).as_str(), "R:ORTH");
        assert_eq!(classify_edit(&Edit::new(3, 4, Vec::<String>::new()), &src, &c).as_str(), "U:OTHER");
        // without a dictionary the speller rule is off
        assert_eq!(classify_edit(&Edit::new(1, 2, ["guess"]), &src, &Classifier::default()).as_str(), "R:OTHER");
    }

    #[test]
    fn orth_covers_whitespace_joins() {
        let src = toks(&["every", "one", "came"]);
        let c = Classifier::default();
        assert_eq!(classify_edit(&Edit::new(0, 2, ["Everyone"]), &src, &c).as_str(), "R:ORTH");
    }

    #[test]
    fn spelling_distance_bound() {
        let dict = Dictionary::from_entries([("receive", 5)]);
        let c = Classifier::new(&dict);
        let src = toks(&["recieve", "rcvxx"]);
        assert_eq!(classify_edit(&Edit::new(0, 1, ["receive"]), &src, &c).as_str(), "R:SPELL");
        assert_eq!(classify_edit(&Edit::new(1, 2, ["receive"]), &src, &c).as_str(), "R:OTHER");
    }
}
