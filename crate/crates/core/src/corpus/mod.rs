//! Text ingestion and format parsing.

pub mod essays;
pub mod m2;
pub mod noise;
pub mod sentences;
pub mod tokenize;
pub mod tree;

pub use essays::{read_essays, EssayError, EssayRecord, IngestConfig};
pub use m2::{read_m2, write_m2, AnnotatedSentence, M2Error};
pub use noise::{detect_noise, substitute_entities, EntitySubstituter, NamePool, NoiseConfig, NoiseReport};
pub use sentences::{split_sentences, SentenceSplitter};
pub use tokenize::{tokenize, TokenizedSentence};
pub use tree::{normalize_bracketed, parse_tree, ParseTree, TreeError};

/// Reads a tree file: one bracketed tree per non-empty line. Errors carry
/// the 1-based line number.
pub fn read_tree_file(contents: &str) -> Result<Vec<ParseTree>, (usize, TreeError)> {
    contents
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_tree(l).map_err(|e| (i + 1, e)))
        .collect()
}
