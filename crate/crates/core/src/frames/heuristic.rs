//! Rule-based frame extraction used when no SRL output is supplied.
//!
//! Per sentence, the first finite-verb candidate becomes V, everything
//! before it ARG0 and everything after it ARG1.

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use super::{FrameSource, PropositionFrame, Role};
use crate::text;

const COMMON_VERBS: &str = include_str!("../../data/common-verbs-en.txt");

const AUXILIARIES: &[&str] = &[
    "am", "is", "are", "was", "were", "be", "been", "being", "have", "has", "had", "do", "does",
    "did", "will", "would", "shall", "should", "can", "could", "may", "might", "must", "isn't",
    "aren't", "wasn't", "weren't", "haven't", "hasn't", "hadn't", "don't", "doesn't", "didn't",
    "won't", "wouldn't", "shouldn't", "can't", "cannot", "couldn't", "mustn't", "i'm", "it's",
    "that's", "what's", "there's", "he's", "she's", "we're", "they're", "you're", "i've",
    "we've", "they've", "i'll", "we'll", "they'll", "you'll",
];

const NEGATIONS: &[&str] = &["not", "never", "n't", "just", "really", "also", "still", "even"];

const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "my", "your", "his", "her", "its", "our",
    "their", "every", "each", "some", "any", "no", "to",
];

/// Holds the verb list; cheap to share across threads.
#[derive(Debug, Clone)]
pub struct HeuristicExtractor {
    verbs: HashSet<String>,
}

impl Default for HeuristicExtractor {
    fn default() -> Self {
        let verbs = COMMON_VERBS
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .flat_map(str::split_whitespace)
            .map(str::to_string)
            .collect();
        HeuristicExtractor { verbs }
    }
}

impl HeuristicExtractor {
    pub fn shared() -> &'static HeuristicExtractor {
        static SHARED: OnceLock<HeuristicExtractor> = OnceLock::new();
        SHARED.get_or_init(HeuristicExtractor::default)
    }

    fn is_auxiliary(token: &str) -> bool {
        AUXILIARIES.contains(&token)
    }

    fn is_known_base(&self, stem: &str) -> bool {
        stem.len() > 1 && self.verbs.contains(stem)
    }

    /// Lexical verb test: known base form after inflection stripping, or a
    /// verbal suffix.
    fn is_lexical_verb(&self, token: &str) -> bool {
        if !token.chars().all(|c| c.is_alphabetic()) {
            return false;
        }
        if self.is_known_base(token) {
            return true;
        }
        let mut stems: Vec<String> = Vec::new();
        for (suffix, repl) in [
            ("ies", "y"),
            ("ied", "y"),
            ("es", ""),
            ("s", ""),
            ("ed", ""),
            ("ed", "e"),
            ("d", ""),
            ("ing", ""),
            ("ing", "e"),
        ] {
            if let Some(stem) = token.strip_suffix(suffix) {
                stems.push(format!("{stem}{repl}"));
                // stopped -> stop, planning -> plan
                let b = stem.as_bytes();
                if (suffix == "ed" || suffix == "ing") && b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] {
                    stems.push(stem[..stem.len() - 1].to_string());
                }
            }
        }
        if stems.iter().any(|s| self.is_known_base(s)) {
            return true;
        }
        let n = token.chars().count();
        (n > 4 && (token.ends_with("ed") || token.ends_with("ing")))
            || (n > 5 && ["ize", "ise", "ify", "izes", "ises", "ifies", "ized", "ised", "ified"]
                .iter()
                .any(|s| token.ends_with(s)))
    }

    fn after_determiner(tokens: &[String], i: usize) -> bool {
        i > 0 && DETERMINERS.contains(&tokens[i - 1].as_str())
    }

    /// Index of the verb chosen for a sentence, if any.
    fn find_verb(&self, tokens: &[String]) -> Option<usize> {
        for (i, tok) in tokens.iter().enumerate() {
            if Self::after_determiner(tokens, i) {
                continue;
            }
            if Self::is_auxiliary(tok) {
                // Prefer the lexical verb an auxiliary governs.
                let mut j = i + 1;
                while j < tokens.len() && NEGATIONS.contains(&tokens[j].as_str()) {
                    j += 1;
                }
                if j < tokens.len() && !Self::is_auxiliary(&tokens[j]) && self.is_lexical_verb(&tokens[j]) {
                    return Some(j);
                }
                return Some(i);
            }
            // Sentence-initial: only a bare known verb with something after
            // it (imperative) counts.
            let initial_ok = i > 0 || (tokens.len() > 1 && self.is_known_base(tok));
            if initial_ok && self.is_lexical_verb(tok) {
                return Some(i);
            }
        }
        None
    }

    pub fn extract(&self, tweet_id: &str, tweet: &str) -> Vec<PropositionFrame> {
        let mut frames = Vec::new();
        for (sentence_index, tokens) in text::sentences(tweet).into_iter().enumerate() {
            let Some(v) = self.find_verb(&tokens) else {
                continue;
            };
            let verb = tokens[v].clone();
            // Auxiliaries and negations between ARG0 and the verb are not arguments.
            let mut arg0_end = v;
            while arg0_end > 0
                && (Self::is_auxiliary(&tokens[arg0_end - 1])
                    || NEGATIONS.contains(&tokens[arg0_end - 1].as_str()))
                && arg0_end - 1 != 0
            {
                arg0_end -= 1;
            }
            let mut spans = BTreeMap::new();
            spans.insert(Role::Verb, vec![verb.clone()]);
            if arg0_end > 0 {
                spans.insert(Role::Arg0, tokens[..arg0_end].to_vec());
            }
            if v + 1 < tokens.len() {
                spans.insert(Role::Arg1, tokens[v + 1..].to_vec());
            }
            frames.push(PropositionFrame {
                tweet_id: tweet_id.to_string(),
                sentence_index: sentence_index as u32,
                verb,
                spans,
                source: FrameSource::Heuristic,
            });
        }
        frames
    }
}

/// Extracts frames with the packaged verb list.
pub fn heuristic_extract(tweet_id: &str, tweet: &str) -> Vec<PropositionFrame> {
    HeuristicExtractor::shared().extract(tweet_id, tweet)
}
