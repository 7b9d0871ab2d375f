//! Proposition frames: one verb with role-labelled argument spans.

mod heuristic;
mod srl;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::text::{self, StopWords};

pub use heuristic::{heuristic_extract, HeuristicExtractor};
pub use srl::{ingest_srl, parse_srl, write_frames, IngestReport};

/// Semantic roles retained from SRL output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "V")]
    Verb,
    #[serde(rename = "ARG0")]
    Arg0,
    #[serde(rename = "ARG1")]
    Arg1,
    #[serde(rename = "ARG2")]
    Arg2,
    #[serde(rename = "ARGM-ADV")]
    ArgmAdv,
    #[serde(rename = "ARGM-MNR")]
    ArgmMnr,
    #[serde(rename = "ARGM-PRD")]
    ArgmPrd,
}

impl Role {
    pub const ALL: [Role; 7] = [
        Role::Verb,
        Role::Arg0,
        Role::Arg1,
        Role::Arg2,
        Role::ArgmAdv,
        Role::ArgmMnr,
        Role::ArgmPrd,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Role::Verb => "V",
            Role::Arg0 => "ARG0",
            Role::Arg1 => "ARG1",
            Role::Arg2 => "ARG2",
            Role::ArgmAdv => "ARGM-ADV",
            Role::ArgmMnr => "ARGM-MNR",
            Role::ArgmPrd => "ARGM-PRD",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown role {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameSource {
    #[default]
    Srl,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropositionFrame {
    pub tweet_id: String,
    pub sentence_index: u32,
    pub verb: String,
    pub spans: BTreeMap<Role, Vec<String>>,
    #[serde(default)]
    pub source: FrameSource,
}

impl PropositionFrame {
    pub fn span(&self, role: Role) -> &[String] {
        self.spans.get(&role).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `verb(arg0, arg1, ...)` over the non-verb roles present.
    pub fn rendering(&self) -> String {
        let args: Vec<String> = self
            .spans
            .iter()
            .filter(|(role, toks)| **role != Role::Verb && !toks.is_empty())
            .map(|(_, toks)| toks.join(" "))
            .collect();
        format!("{}({})", self.verb, args.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScopeName {
    ConcernTypes,
    MoralValues,
    AllRoles,
    FullText,
}

/// Which tokens of a tweet an operation looks at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleScope {
    pub name: ScopeName,
    pub roles: BTreeSet<Role>,
}

impl RoleScope {
    /// ARG0 and ARG1, where domain concern terms concentrate.
    pub fn concern_types() -> Self {
        RoleScope {
            name: ScopeName::ConcernTypes,
            roles: [Role::Arg0, Role::Arg1].into(),
        }
    }

    /// Positions associated with moral vocabulary.
    pub fn moral_values() -> Self {
        RoleScope {
            name: ScopeName::MoralValues,
            roles: [
                Role::Verb,
                Role::Arg2,
                Role::ArgmAdv,
                Role::ArgmMnr,
                Role::ArgmPrd,
            ]
            .into(),
        }
    }

    pub fn all_roles() -> Self {
        RoleScope {
            name: ScopeName::AllRoles,
            roles: Role::ALL.into(),
        }
    }

    /// Every token of the tweet, whatever the frames say.
    pub fn full_text() -> Self {
        RoleScope {
            name: ScopeName::FullText,
            roles: Role::ALL.into(),
        }
    }

    pub fn is_full_text(&self) -> bool {
        self.name == ScopeName::FullText
    }
}

/// Contiguous token runs visible in a scope: one per in-scope span, and for
/// full text the tweet's sentences followed by every frame span.
pub fn scope_runs(frames: &[PropositionFrame], tweet: &str, scope: &RoleScope) -> Vec<Vec<String>> {
    let mut runs = Vec::new();
    if scope.is_full_text() {
        runs.extend(text::sentences(tweet));
    }
    for frame in frames {
        for (role, toks) in &frame.spans {
            if scope.roles.contains(role) && !toks.is_empty() {
                runs.push(toks.clone());
            }
        }
    }
    runs
}

/// De-duplicated, stop-word-free tokens of a tweet within a scope, in first
/// occurrence order.
pub fn tokens_in_scope(frames: &[PropositionFrame], tweet: &str, scope: &RoleScope) -> Vec<String> {
    let stop = StopWords::english();
    let mut seen = BTreeSet::new();
    scope_runs(frames, tweet, scope)
        .into_iter()
        .flatten()
        .filter(|t| !stop.contains(t))
        .filter(|t| seen.insert(t.clone()))
        .collect()
}

/// Groups frames by tweet id, keeping their order within a tweet.
pub fn group_by_tweet(frames: Vec<PropositionFrame>) -> BTreeMap<String, Vec<PropositionFrame>> {
    let mut out: BTreeMap<String, Vec<PropositionFrame>> = BTreeMap::new();
    for f in frames {
        out.entry(f.tweet_id.clone()).or_default().push(f);
    }
    out
}

#[cfg(test)]
pub(crate) fn frame(tweet_id: &str, verb: &str, spans: &[(Role, &str)]) -> PropositionFrame {
    let mut map: BTreeMap<Role, Vec<String>> = spans
        .iter()
        .map(|(r, s)| (*r, s.split_whitespace().map(String::from).collect()))
        .collect();
    map.entry(Role::Verb).or_insert_with(|| vec![verb.to_string()]);
    PropositionFrame {
        tweet_id: tweet_id.into(),
        sentence_index: 0,
        verb: verb.into(),
        spans: map,
        source: FrameSource::Srl,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TABLE1: &str = "Jean-Luc Melenchon will ruin the economy";

    fn table1() -> Vec<PropositionFrame> {
        vec![frame(
            "t1",
            "ruin",
            &[(Role::Arg0, "jean-luc melenchon"), (Role::Arg1, "economy")],
        )]
    }

    #[test]
    fn rendering_matches_proposition_notation() {
        assert_eq!(table1()[0].rendering(), "ruin(jean-luc melenchon, economy)");
    }

    #[test]
    fn concern_scope_uses_arg0_arg1() {
        let toks = tokens_in_scope(&table1(), TABLE1, &RoleScope::concern_types());
        assert!(toks.contains(&"economy".to_string()));
        assert!(!toks.contains(&"ruin".to_string()));
    }

    #[test]
    fn moral_scope_includes_verb() {
        let toks = tokens_in_scope(&table1(), TABLE1, &RoleScope::moral_values());
        assert_eq!(toks, vec!["ruin"]);
    }

    #[test]
    fn full_text_contains_everything() {
        let full = tokens_in_scope(&table1(), TABLE1, &RoleScope::full_text());
        for t in ["jean-luc", "melenchon", "ruin", "economy"] {
            assert!(full.contains(&t.to_string()), "{t}");
        }
        assert!(!full.contains(&"the".to_string()));
    }

    #[test]
    fn role_parsing() {
        assert_eq!("argm-adv".parse::<Role>(), Ok(Role::ArgmAdv));
        assert!("ARGM-TMP".parse::<Role>().is_err());
    }

    proptest! {
        #[test]
        fn full_text_is_superset_of_role_scopes(text in "[a-zA-Z ,.!?#@-]{0,60}") {
            let frames = heuristic_extract("p", &text);
            let full: BTreeSet<_> = tokens_in_scope(&frames, &text, &RoleScope::full_text()).into_iter().collect();
            for scope in [RoleScope::concern_types(), RoleScope::moral_values(), RoleScope::all_roles()] {
                for t in tokens_in_scope(&frames, &text, &scope) {
                    prop_assert!(full.contains(&t));
                }
            }
        }
    }
}
