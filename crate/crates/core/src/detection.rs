//! Explainable concern and moral-value detection per tweet.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::frames::{heuristic_extract, scope_runs, PropositionFrame, RoleScope};
use crate::induction::ConcernTypeLexicon;
use crate::io::Tweet;
use crate::lexicon::{Foundation, MoralLexicon, Polarity, Variant};
use crate::text::{phrases, StopWords};

/// Which part of a tweet detection looks at.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionScope {
    /// Only the frames' role spans.
    #[default]
    Proposition,
    /// Every token of the tweet.
    FullText,
}

impl std::str::FromStr for DetectionScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().replace('_', "-").as_str() {
            "proposition" => Ok(DetectionScope::Proposition),
            "full-text" => Ok(DetectionScope::FullText),
            other => Err(format!("unknown scope {other:?} (expected proposition or full-text)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionConfig {
    pub scope: DetectionScope,
    /// Roles scanned for moral terms in proposition scope.
    pub moral_roles: RoleScope,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            scope: DetectionScope::Proposition,
            moral_roles: RoleScope::all_roles(),
        }
    }
}

impl DetectionConfig {
    fn concern_scope(&self) -> RoleScope {
        match self.scope {
            DetectionScope::Proposition => RoleScope::concern_types(),
            DetectionScope::FullText => RoleScope::full_text(),
        }
    }

    fn moral_scope(&self) -> RoleScope {
        match self.scope {
            DetectionScope::Proposition => self.moral_roles.clone(),
            DetectionScope::FullText => RoleScope::full_text(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcernHit {
    pub label: String,
    /// Matched trigger terms, in first-occurrence order.
    pub triggers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoralTrigger {
    /// The text as it appeared, tokens joined by spaces.
    pub token: String,
    /// The lexicon term it matched.
    pub term: String,
    pub endorsement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoralHit {
    pub foundation: Foundation,
    pub endorsement: f64,
    pub polarity: Polarity,
    pub display_name: String,
    pub triggers: Vec<MoralTrigger>,
}

impl MoralHit {
    /// Builds a hit from its triggers; `None` when there are none.
    pub fn from_triggers(foundation: Foundation, triggers: Vec<MoralTrigger>) -> Option<Self> {
        let endorsement = mean_endorsement(&triggers)?;
        let polarity = Polarity::of(endorsement);
        Some(MoralHit {
            foundation,
            endorsement,
            polarity,
            display_name: foundation.display_name(polarity).to_string(),
            triggers,
        })
    }

    /// `Harm: 3.46`, or with `legacy` the virtue-side name in lower case
    /// whatever the polarity (`care: 1.4`).
    pub fn label(&self, legacy: bool) -> String {
        let name = if legacy {
            self.foundation.virtue_name().to_lowercase()
        } else {
            self.display_name.clone()
        };
        format!("{name}: {}", format_endorsement(self.endorsement))
    }
}

/// Arithmetic mean of the trigger endorsements.
pub fn mean_endorsement(triggers: &[MoralTrigger]) -> Option<f64> {
    if triggers.is_empty() {
        return None;
    }
    Some(triggers.iter().map(|t| t.endorsement).sum::<f64>() / triggers.len() as f64)
}

fn format_endorsement(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub tweet_id: String,
    pub propositions: Vec<String>,
    pub concern_types: Vec<ConcernHit>,
    pub moral_hits: Vec<MoralHit>,
    pub scope: DetectionScope,
    pub lexicon_variant: Variant,
}

impl DetectionRecord {
    pub fn concern_labels(&self) -> BTreeSet<&str> {
        self.concern_types.iter().map(|c| c.label.as_str()).collect()
    }

    /// (foundation, polarity) pairs reported.
    pub fn moral_labels(&self) -> BTreeSet<(Foundation, Polarity)> {
        self.moral_hits.iter().map(|h| (h.foundation, h.polarity)).collect()
    }

    /// Human-readable summary in the style of the sample outputs.
    pub fn render(&self, text: &str, legacy: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Tweet: {text}");
        let concerns: Vec<String> = self.concern_types.iter().map(|c| c.label.to_uppercase()).collect();
        let _ = writeln!(out, "Concern type: {}", or_none(&concerns.join(", ")));
        let _ = writeln!(out, "Proposition: {}", or_none(&self.propositions.join("; ")));
        let dims: Vec<String> = self.moral_hits.iter().map(|h| h.label(legacy)).collect();
        let _ = writeln!(out, "Dimensions & Endorsements: {}", or_none(&dims.join(", ")));
        out
    }
}

fn or_none(s: &str) -> &str {
    if s.is_empty() {
        "none"
    } else {
        s
    }
}

/// (surface text, lexicon key) of every phrase in scope, up to `max_len`
/// tokens, skipping single stop words; first occurrence of each key only.
fn scoped_phrases(
    frames: &[PropositionFrame],
    tweet: &str,
    scope: &RoleScope,
    max_len: usize,
) -> Vec<(String, String)> {
    let stop = StopWords::english();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for run in scope_runs(frames, tweet, scope) {
        for (start, len, key) in phrases(&run, max_len.max(1)) {
            if len == 1 && stop.contains(&key) {
                continue;
            }
            if seen.insert(key.clone()) {
                out.push((run[start..start + len].join(" "), key));
            }
        }
    }
    out
}

/// Concern labels whose triggers occur in scope, in label order.
pub fn detect_concern_types(
    frames: &[PropositionFrame],
    tweet: &str,
    lexicon: &ConcernTypeLexicon,
    scope: &RoleScope,
) -> Vec<ConcernHit> {
    let mut hits: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for (_, key) in scoped_phrases(frames, tweet, scope, lexicon.max_term_tokens()) {
        for label in lexicon.labels_for(&key) {
            hits.entry(label).or_default().push(key.clone());
        }
    }
    hits.into_iter()
        .map(|(label, triggers)| ConcernHit {
            label: label.to_string(),
            triggers,
        })
        .collect()
}

/// One hit per foundation with at least one matching term, in foundation
/// order.
pub fn detect_moral_values(
    frames: &[PropositionFrame],
    tweet: &str,
    lexicon: &MoralLexicon,
    scope: &RoleScope,
) -> Vec<MoralHit> {
    let mut per: BTreeMap<Foundation, Vec<MoralTrigger>> = BTreeMap::new();
    for (token, key) in scoped_phrases(frames, tweet, scope, lexicon.max_term_tokens()) {
        for entry in lexicon.lookup(&key) {
            per.entry(entry.foundation).or_default().push(MoralTrigger {
                token: token.clone(),
                term: key.clone(),
                endorsement: entry.endorsement,
            });
        }
    }
    per.into_iter()
        .filter_map(|(f, triggers)| MoralHit::from_triggers(f, triggers))
        .collect()
}

/// Concern and moral lexicons plus settings; shareable across threads.
#[derive(Debug, Clone)]
pub struct Detector {
    pub concerns: ConcernTypeLexicon,
    pub morals: MoralLexicon,
    pub config: DetectionConfig,
}

impl Detector {
    pub fn new(concerns: ConcernTypeLexicon, morals: MoralLexicon, config: DetectionConfig) -> Self {
        Detector {
            concerns,
            morals,
            config,
        }
    }

    pub fn detect(&self, tweet: &Tweet, frames: &[PropositionFrame]) -> DetectionRecord {
        let concern_scope = self.config.concern_scope();
        let moral_scope = self.config.moral_scope();
        DetectionRecord {
            tweet_id: tweet.id.clone(),
            propositions: frames.iter().map(PropositionFrame::rendering).collect(),
            concern_types: detect_concern_types(frames, &tweet.text, &self.concerns, &concern_scope),
            moral_hits: detect_moral_values(frames, &tweet.text, &self.morals, &moral_scope),
            scope: self.config.scope,
            lexicon_variant: self.morals.variant,
        }
    }

    /// Detects every tweet, in input order. Tweets without frames in
    /// `frames` use the heuristic extractor when `frames` is `None`.
    pub fn detect_all(
        &self,
        tweets: &[Tweet],
        frames: Option<&BTreeMap<String, Vec<PropositionFrame>>>,
        parallel: bool,
    ) -> Vec<DetectionRecord> {
        let one = |t: &Tweet| -> DetectionRecord {
            match frames {
                Some(map) => self.detect(t, map.get(&t.id).map(Vec::as_slice).unwrap_or(&[])),
                None => self.detect(t, &heuristic_extract(&t.id, &t.text)),
            }
        };
        if parallel {
            tweets.par_iter().map(one).collect()
        } else {
            tweets.iter().map(one).collect()
        }
    }
}
