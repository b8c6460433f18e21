//! Small character-level helpers shared by the tokenizer, the error
//! classifier and the speller.

/// Punctuation as the tokenizer understands it: ASCII punctuation plus the
/// common typographic quotes, dashes and ellipsis.
pub fn is_punct_char(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '“' | '”' | '‘' | '’' | '…' | '–' | '—' | '«' | '»' | '¿' | '¡' | '·'
        )
}

/// True when every character of a non-empty token is punctuation.
pub fn is_punct_token(token: &str) -> bool {
    !token.is_empty() && token.chars().all(is_punct_char)
}

/// Tokens the speller must never touch: anything that is not purely alphabetic
/// (punctuation, numbers, `@` placeholders, contraction pieces, hyphenations).
pub fn is_spellable(token: &str) -> bool {
    !token.is_empty() && token.chars().all(char::is_alphabetic)
}

/// Optimal string alignment distance over Unicode scalar values: insertions,
/// deletions, substitutions and swaps of adjacent characters all cost 1.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    edit_distance_within(&a, &b, usize::MAX).unwrap_or(usize::MAX)
}

/// [`edit_distance`] if it is at most `bound`, `None` otherwise.
/// Stops as soon as every cell of a row exceeds the bound.
pub fn edit_distance_within(a: &[char], b: &[char], bound: usize) -> Option<usize> {
    if a.len().abs_diff(b.len()) > bound {
        return None;
    }
    let mut prev2 = vec![0; b.len() + 1];
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for i in 0..a.len() {
        cur[0] = i + 1;
        let mut row_min = cur[0];
        for j in 0..b.len() {
            let mut d = (prev[j] + usize::from(a[i] != b[j]))
                .min(prev[j + 1] + 1)
                .min(cur[j] + 1);
            if i > 0 && j > 0 && a[i] == b[j - 1] && a[i - 1] == b[j] {
                d = d.min(prev2[j - 1] + 1);
            }
            cur[j + 1] = d;
            row_min = row_min.min(d);
        }
        if row_min > bound {
            return None;
        }
        std::mem::swap(&mut prev2, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
    }
    let d = prev[b.len()];
    (d <= bound).then_some(d)
}

/// Re-applies the capitalisation pattern of `model` to a lowercase `word`.
pub fn match_case(model: &str, word: &str) -> String {
    let mut chars = model.chars();
    let first_upper = chars.next().is_some_and(char::is_uppercase);
    let all_upper = model.chars().count() > 1 && model.chars().all(char::is_uppercase);
    if all_upper {
        word.to_uppercase()
    } else if first_upper {
        let mut it = word.chars();
        match it.next() {
            Some(f) => f.to_uppercase().chain(it).collect(),
            None => String::new(),
        }
    } else {
        word.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        assert_eq!(edit_distance("gess", "guess"), 1);
        assert_eq!(edit_distance("speaking", "speak"), 3);
        assert_eq!(edit_distance("", "abc"), 3);
        assert_eq!(edit_distance("kitten", "sitting"), 3);
        assert_eq!(edit_distance("teh", "the"), 1);
        assert_eq!(edit_distance("recieve", "receive"), 1);
        assert_eq!(edit_distance("ca", "abc"), 3);
        let a: Vec<char> = "kitten".chars().collect();
        let b: Vec<char> = "sitting".chars().collect();
        assert_eq!(edit_distance_within(&a, &b, 2), None);
        assert_eq!(edit_distance_within(&a, &b, 3), Some(3));
    }

    #[test]
    fn case_restoration() {
        assert_eq!(match_case("Teh", "the"), "The");
        assert_eq!(match_case("TEH", "the"), "THE");
        assert_eq!(match_case("teh", "the"), "the");
    }

    #[test]
    fn spellable_tokens() {
        assert!(is_spellable("gess"));
        assert!(!is_spellable("@PERSON1"));
        assert!(!is_spellable("n't"));
        assert!(!is_spellable("1990"));
        assert!(!is_spellable(","));
        assert!(is_punct_token("..."));
    }
}
