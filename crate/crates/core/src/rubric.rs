//! The rubric schema: one overall score plus eight analytic traits.

pub const OVERALL: &str = "overall";

/// Analytic rubrics in display order.
pub const RUBRICS: [&str; 8] = [
    "content",
    "organization",
    "word_choice",
    "sentence_fluency",
    "conventions",
    "prompt_adherence",
    "language",
    "narrativity",
];

/// Overall followed by the eight rubrics.
pub fn all_score_names() -> impl Iterator<Item = &'static str> {
    std::iter::once(OVERALL).chain(RUBRICS)
}

pub fn is_score_name(name: &str) -> bool {
    all_score_names().any(|n| n == name)
}

/// Accepts spaced or hyphenated spellings ("word choice") and returns the
/// canonical name.
pub fn canonical(name: &str) -> Option<&'static str> {
    let norm = name.trim().to_lowercase().replace([' ', '-'], "_");
    all_score_names().find(|n| *n == norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_names() {
        assert_eq!(all_score_names().count(), 9);
        assert_eq!(canonical("Word Choice"), Some("word_choice"));
        assert_eq!(canonical("prompt-adherence"), Some("prompt_adherence"));
        assert_eq!(canonical("style"), None);
    }
}
