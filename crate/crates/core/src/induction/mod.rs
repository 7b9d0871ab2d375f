//! Concern-type induction: corpus filtering, frequency ranking and
//! candidate propositions for expert curation.

mod curation;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{PropositionFrame, Role};
use crate::io::Tweet;
use crate::text::{self, is_alphabetic_term, lookup_key, StopWords};

pub use curation::{
    import_curation, read_assignments, read_labels, Assignment, ConcernTypeLexicon, CurationProvenance, CurationReport, DROP,
};

/// How frequencies are counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountUnit {
    /// Every frame occurrence counts.
    #[default]
    Frame,
    /// Each tweet counts at most once.
    Tweet,
}

/// Where the top content terms are counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermSource {
    /// All tokens of the training tweets.
    #[default]
    Tweets,
    /// ARG0/ARG1 span tokens of the training frames.
    Spans,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InductionConfig {
    pub key_terms: Vec<String>,
    pub top_terms: usize,
    pub top_verbs: usize,
    pub top_args: usize,
    pub train_size: usize,
    pub seed: u64,
    pub count_unit: CountUnit,
    pub term_source: TermSource,
}

impl Default for InductionConfig {
    fn default() -> Self {
        InductionConfig {
            key_terms: Vec::new(),
            top_terms: 25,
            top_verbs: 40,
            top_args: 10,
            train_size: 2500,
            seed: 0,
            count_unit: CountUnit::Frame,
            term_source: TermSource::Tweets,
        }
    }
}

impl InductionConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("top_terms", self.top_terms),
            ("top_verbs", self.top_verbs),
            ("top_args", self.top_args),
            ("train_size", self.train_size),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if self.key_terms.iter().all(|t| lookup_key(t).is_empty()) {
            return Err(Error::Config("at least one key term is required".into()));
        }
        Ok(())
    }
}

/// A term or verb with its count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranked {
    pub term: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateProposition {
    /// `verb(argument)`.
    pub id: String,
    pub verb: String,
    pub argument: String,
    pub frequency: usize,
    /// Up to three tweets the proposition occurs in, in corpus order.
    pub examples: Vec<String>,
}

/// Everything the curator needs, plus how it was counted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateFile {
    pub count_unit: CountUnit,
    pub stopwords_sha256: String,
    pub key_terms: Vec<String>,
    #[serde(default)]
    pub top_terms: Vec<Ranked>,
    #[serde(default)]
    pub verbs: Vec<Ranked>,
    pub candidates: Vec<CandidateProposition>,
}

impl CandidateFile {
    /// Curation items: every candidate id followed by every key term.
    pub fn items(&self) -> Vec<&str> {
        self.candidates
            .iter()
            .map(|c| c.id.as_str())
            .chain(self.key_terms.iter().map(String::as_str))
            .collect()
    }

    /// The trigger term an item contributes, if it is an item of this file.
    pub fn trigger_of(&self, item: &str) -> Option<&str> {
        if let Some(c) = self.candidates.iter().find(|c| c.id == item) {
            return Some(&c.argument);
        }
        self.key_terms.iter().find(|k| *k == item).map(String::as_str)
    }

    /// Reads a candidate file, or a bare JSON array of candidates.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&bytes, path)
    }

    pub fn parse(bytes: &[u8], origin: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Shape {
            File(CandidateFile),
            Bare(Vec<CandidateProposition>),
        }
        let shape: Shape =
            serde_json::from_slice(bytes).map_err(|e| Error::parse(origin, e.line(), e.to_string()))?;
        Ok(match shape {
            Shape::File(f) => f,
            Shape::Bare(candidates) => CandidateFile {
                count_unit: CountUnit::default(),
                stopwords_sha256: String::new(),
                key_terms: Vec::new(),
                top_terms: Vec::new(),
                verbs: Vec::new(),
                candidates,
            },
        })
    }
}

pub const MAX_EXAMPLES: usize = 3;

/// Tweets mentioning at least one key term (token or multi-word match).
pub fn filter_corpus(tweets: &[Tweet], key_terms: &[String]) -> Vec<Tweet> {
    let keys: Vec<String> = key_terms
        .iter()
        .map(|k| lookup_key(k))
        .filter(|k| !k.is_empty())
        .collect();
    tweets
        .iter()
        .filter(|t| {
            let toks = text::tokenize(&t.text);
            keys.iter().any(|k| text::contains_phrase(&toks, k))
        })
        .cloned()
        .collect()
}

/// Seeded uniform sample of `train_size` tweets without replacement; the
/// rest form the dev split. Both keep corpus order.
pub fn split_corpus(subset: &[Tweet], train_size: usize, seed: u64) -> Result<(Vec<Tweet>, Vec<Tweet>)> {
    if train_size > subset.len() {
        return Err(Error::CorpusTooSmall {
            available: subset.len(),
            requested: train_size,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen: HashSet<usize> = rand::seq::index::sample(&mut rng, subset.len(), train_size)
        .into_iter()
        .collect();
    let (mut train, mut dev) = (Vec::new(), Vec::new());
    for (i, t) in subset.iter().enumerate() {
        if chosen.contains(&i) {
            train.push(t.clone());
        } else {
            dev.push(t.clone());
        }
    }
    Ok((train, dev))
}

fn is_content(tok: &str, stop: &StopWords) -> bool {
    !stop.contains(tok) && is_alphabetic_term(tok)
}

/// Highest counts first, ties in lexicographic order.
fn rank(counts: HashMap<String, usize>, k: usize) -> Vec<Ranked> {
    let mut v: Vec<Ranked> = counts
        .into_iter()
        .map(|(term, count)| Ranked { term, count })
        .collect();
    v.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.term.cmp(&b.term)));
    v.truncate(k);
    v
}

/// Most frequent non-stop-word tokens over token lists (one list per tweet
/// or span).
pub fn top_content_terms(token_lists: &[Vec<String>], k: usize) -> Vec<Ranked> {
    let stop = StopWords::english();
    let mut counts: HashMap<String, usize> = HashMap::new();
    for tok in token_lists.iter().flatten() {
        if is_content(tok, stop) {
            *counts.entry(tok.clone()).or_default() += 1;
        }
    }
    rank(counts, k)
}

fn concern_tokens(frame: &PropositionFrame) -> impl Iterator<Item = &String> {
    frame
        .span(Role::Arg0)
        .iter()
        .chain(frame.span(Role::Arg1))
}

/// Verbs whose ARG0/ARG1 spans contain any of `terms`, most frequent first.
pub fn top_verbs(frames: &[PropositionFrame], terms: &[String], k: usize, unit: CountUnit) -> Vec<Ranked> {
    let terms: HashSet<&str> = terms.iter().map(String::as_str).collect();
    let mut counts: HashMap<String, usize> = HashMap::new();
    let mut seen: HashSet<(&str, &str)> = HashSet::new();
    for f in frames {
        if !concern_tokens(f).any(|t| terms.contains(t.as_str())) {
            continue;
        }
        if unit == CountUnit::Tweet && !seen.insert((f.verb.as_str(), f.tweet_id.as_str())) {
            continue;
        }
        *counts.entry(f.verb.clone()).or_default() += 1;
    }
    rank(counts, k)
}

/// Top `k_args` ARG0/ARG1 content terms for each verb, in verb order.
pub fn build_candidates(
    frames: &[PropositionFrame],
    verbs: &[String],
    k_args: usize,
    unit: CountUnit,
) -> Vec<CandidateProposition> {
    let stop = StopWords::english();
    let wanted: HashSet<&str> = verbs.iter().map(String::as_str).collect();
    let mut counts: HashMap<&str, HashMap<String, usize>> = HashMap::new();
    let mut examples: HashMap<(&str, &str), Vec<&str>> = HashMap::new();
    let mut seen_tweet: HashSet<(&str, &str, &str)> = HashSet::new();
    for f in frames {
        let verb = f.verb.as_str();
        if !wanted.contains(verb) {
            continue;
        }
        let args: BTreeSet<&str> = concern_tokens(f)
            .map(String::as_str)
            .filter(|t| is_content(t, stop))
            .collect();
        for arg in args {
            let ex = examples.entry((verb, arg)).or_default();
            if ex.len() < MAX_EXAMPLES && !ex.contains(&f.tweet_id.as_str()) {
                ex.push(&f.tweet_id);
            }
            if unit == CountUnit::Tweet && !seen_tweet.insert((verb, arg, &f.tweet_id)) {
                continue;
            }
            *counts.entry(verb).or_default().entry(arg.to_string()).or_default() += 1;
        }
    }
    let mut out = Vec::new();
    let mut emitted: HashSet<&str> = HashSet::new();
    for verb in verbs {
        if !emitted.insert(verb) {
            continue;
        }
        let Some(per_arg) = counts.remove(verb.as_str()) else {
            continue;
        };
        for Ranked { term, count } in rank(per_arg, k_args) {
            let ex = examples
                .get(&(verb.as_str(), term.as_str()))
                .map(|v| v.iter().map(|s| s.to_string()).collect())
                .unwrap_or_default();
            out.push(CandidateProposition {
                id: format!("{verb}({term})"),
                verb: verb.clone(),
                argument: term,
                frequency: count,
                examples: ex,
            });
        }
    }
    out
}

/// The full pipeline: filter, split, rank terms and verbs, build candidates.
///
/// Frames are restricted to the training tweets.
pub fn induce(tweets: &[Tweet], frames: &[PropositionFrame], cfg: &InductionConfig) -> Result<CandidateFile> {
    cfg.validate()?;
    let subset = filter_corpus(tweets, &cfg.key_terms);
    let (train, _dev) = split_corpus(&subset, cfg.train_size, cfg.seed)?;
    let train_ids: HashSet<&str> = train.iter().map(|t| t.id.as_str()).collect();
    let train_frames: Vec<PropositionFrame> = frames
        .iter()
        .filter(|f| train_ids.contains(f.tweet_id.as_str()))
        .cloned()
        .collect();

    let token_lists: Vec<Vec<String>> = match cfg.term_source {
        TermSource::Tweets => train.iter().map(|t| text::tokenize(&t.text)).collect(),
        TermSource::Spans => train_frames
            .iter()
            .map(|f| concern_tokens(f).cloned().collect())
            .collect(),
    };
    let top_terms = top_content_terms(&token_lists, cfg.top_terms);
    let term_list: Vec<String> = top_terms.iter().map(|r| r.term.clone()).collect();
    let verbs = top_verbs(&train_frames, &term_list, cfg.top_verbs, cfg.count_unit);
    let verb_list: Vec<String> = verbs.iter().map(|r| r.term.clone()).collect();
    let candidates = build_candidates(&train_frames, &verb_list, cfg.top_args, cfg.count_unit);

    let mut key_terms: Vec<String> = Vec::new();
    for k in &cfg.key_terms {
        let k = lookup_key(k);
        if !k.is_empty() && !key_terms.contains(&k) {
            key_terms.push(k);
        }
    }
    Ok(CandidateFile {
        count_unit: cfg.count_unit,
        stopwords_sha256: StopWords::english().checksum().to_string(),
        key_terms,
        top_terms,
        verbs,
        candidates,
    })
}

/// Frequency of each candidate id, recounted from scratch; used to audit a
/// candidate file against its frames.
pub fn recount(frames: &[PropositionFrame], candidates: &[CandidateProposition]) -> BTreeMap<String, usize> {
    candidates
        .iter()
        .map(|c| {
            let n = frames
                .iter()
                .filter(|f| f.verb == c.verb && concern_tokens(f).any(|t| *t == c.argument))
                .count();
            (c.id.clone(), n)
        })
        .collect()
}
