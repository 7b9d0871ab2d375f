//! Tweet tokenization and the packaged stop-word list.

use std::collections::HashSet;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};
use unicode_segmentation::UnicodeSegmentation;

const STOPWORDS_EN: &str = include_str!("../data/stopwords-en.txt");

/// Lowercases a token and strips punctuation from both edges.
///
/// Returns `None` when nothing alphanumeric is left.
pub fn normalize_token(raw: &str) -> Option<String> {
    let trimmed = raw.trim_matches(|c: char| !c.is_alphanumeric());
    if trimmed.is_empty() {
        None
    } else {
        Some(trimmed.to_lowercase())
    }
}

/// Lookup key for lexicon and WordNet matching: case-folded, trimmed,
/// internal whitespace collapsed to underscores.
pub fn lookup_key(word: &str) -> String {
    word.split_whitespace()
        .collect::<Vec<_>>()
        .join("_")
        .to_lowercase()
}

/// True when every character is alphabetic (underscores and inner hyphens
/// of multi-word lemmas are allowed).
pub fn is_alphabetic_term(term: &str) -> bool {
    !term.is_empty()
        && term.chars().any(char::is_alphabetic)
        && term
            .chars()
            .all(|c| c.is_alphabetic() || c == '_' || c == '-' || c == '\'')
}

fn is_noise_chunk(chunk: &str) -> bool {
    let lower = chunk.to_ascii_lowercase();
    lower.starts_with("http://")
        || lower.starts_with("https://")
        || lower.starts_with("www.")
        || chunk.starts_with('@')
}

fn strip_noise(text: &str) -> String {
    text.split_whitespace()
        .filter(|chunk| !is_noise_chunk(chunk))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, PartialEq)]
enum Piece<'a> {
    Word(&'a str),
    Joiner,
    SentenceEnd,
    Gap,
}

fn pieces(text: &str) -> Vec<Piece<'_>> {
    text.split_word_bounds()
        .map(|seg| {
            if seg.chars().any(char::is_alphanumeric) {
                Piece::Word(seg)
            } else if seg == "-" {
                Piece::Joiner
            } else if seg.chars().any(|c| matches!(c, '.' | '!' | '?' | '\n')) {
                Piece::SentenceEnd
            } else {
                Piece::Gap
            }
        })
        .collect()
}

/// Splits a tweet into sentences of normalized tokens.
///
/// URLs and @mentions are removed, the `#` of a hashtag is dropped while its
/// body is kept, and hyphen-joined words such as `jean-luc` stay one token.
pub fn sentences(text: &str) -> Vec<Vec<String>> {
    let cleaned = strip_noise(text);
    let pieces = pieces(&cleaned);
    let mut out = Vec::new();
    let mut current: Vec<String> = Vec::new();
    let mut i = 0;
    while i < pieces.len() {
        match pieces[i] {
            Piece::Word(w) => {
                let mut word = w.to_string();
                while i + 2 < pieces.len()
                    && pieces[i + 1] == Piece::Joiner
                    && matches!(pieces[i + 2], Piece::Word(_))
                {
                    if let Piece::Word(next) = pieces[i + 2] {
                        word.push('-');
                        word.push_str(next);
                    }
                    i += 2;
                }
                if let Some(tok) = normalize_token(&word) {
                    current.push(tok);
                }
            }
            Piece::SentenceEnd => {
                if !current.is_empty() {
                    out.push(std::mem::take(&mut current));
                }
            }
            Piece::Joiner | Piece::Gap => {}
        }
        i += 1;
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// All normalized tokens of a tweet in order.
pub fn tokenize(text: &str) -> Vec<String> {
    sentences(text).into_iter().flatten().collect()
}

/// Every contiguous run of up to `max_len` tokens as a lookup key
/// (`a_b_c`), with its start position and length.
pub fn phrases(tokens: &[String], max_len: usize) -> Vec<(usize, usize, String)> {
    let mut out = Vec::new();
    for start in 0..tokens.len() {
        let mut key = String::new();
        for len in 1..=max_len.min(tokens.len() - start) {
            if len > 1 {
                key.push('_');
            }
            key.push_str(&tokens[start + len - 1]);
            out.push((start, len, key.clone()));
        }
    }
    out
}

/// True if `key` (a lookup key, possibly multi-word) occurs in `tokens`.
pub fn contains_phrase(tokens: &[String], key: &str) -> bool {
    let parts: Vec<&str> = key.split('_').collect();
    tokens
        .windows(parts.len())
        .any(|w| w.iter().zip(&parts).all(|(t, p)| t == p))
}

/// A versioned stop-word list, identified in outputs by its checksum.
#[derive(Debug, Clone)]
pub struct StopWords {
    words: HashSet<String>,
    checksum: String,
}

impl StopWords {
    pub fn parse(source: &str) -> Self {
        let words = source
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        let checksum = hex(&Sha256::digest(source.as_bytes()));
        StopWords { words, checksum }
    }

    /// The packaged English list.
    pub fn english() -> &'static StopWords {
        static LIST: OnceLock<StopWords> = OnceLock::new();
        LIST.get_or_init(|| StopWords::parse(STOPWORDS_EN))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    /// Hex SHA-256 of the list file.
    pub fn checksum(&self) -> &str {
        &self.checksum
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
