//! Compiling curated assignments into a concern-type lexicon.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CandidateFile;
use crate::error::{Error, Result};
use crate::io::{parse_jsonl, read_json, write_json};
use crate::text::{lookup_key, phrases};

/// Label value that removes an item from the lexicon.
pub const DROP: &str = "DROP";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    /// A candidate id or a key term.
    pub item: String,
    /// A concern label, or [`DROP`].
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl Assignment {
    pub fn new(item: impl Into<String>, label: impl Into<String>) -> Self {
        Assignment {
            item: item.into(),
            label: label.into(),
            timestamp: None,
        }
    }

    pub fn is_drop(&self) -> bool {
        self.label == DROP
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurationProvenance {
    pub session_id: String,
    pub timestamp: String,
    pub candidates_sha256: String,
    pub assignments: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CurationReport {
    /// (position in the assignment list, item, reason).
    pub rejected: Vec<(usize, String, String)>,
    /// Labels left without any trigger.
    pub empty_labels: Vec<String>,
}

/// Concern label → trigger terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConcernTypeLexicon {
    pub triggers: BTreeMap<String, BTreeSet<String>>,
    pub provenance: Option<CurationProvenance>,
}

impl ConcernTypeLexicon {
    pub fn from_triggers<I, L, T>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (L, T)>,
        L: Into<String>,
        T: AsRef<str>,
    {
        let mut lex = ConcernTypeLexicon::default();
        for (label, term) in pairs {
            lex.triggers
                .entry(label.into())
                .or_default()
                .insert(lookup_key(term.as_ref()));
        }
        lex
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.triggers.keys().map(String::as_str)
    }

    pub fn trigger_count(&self) -> usize {
        self.triggers.values().map(BTreeSet::len).sum()
    }

    /// Labels a term triggers, in label order.
    pub fn labels_for(&self, term: &str) -> Vec<&str> {
        let key = lookup_key(term);
        self.triggers
            .iter()
            .filter(|(_, ts)| ts.contains(&key))
            .map(|(l, _)| l.as_str())
            .collect()
    }

    pub fn max_term_tokens(&self) -> usize {
        self.triggers
            .values()
            .flatten()
            .map(|t| t.split('_').count())
            .max()
            .unwrap_or(0)
    }

    /// (label, trigger, token position) for every trigger occurrence.
    pub fn matches<'a>(&'a self, tokens: &[String]) -> Vec<(&'a str, String, usize)> {
        let mut out = Vec::new();
        for (start, _, key) in phrases(tokens, self.max_term_tokens()) {
            for label in self.labels_for(&key) {
                out.push((label, key.clone(), start));
            }
        }
        out
    }

    /// Sidecar path holding the provenance next to a lexicon file.
    pub fn provenance_path(path: &Path) -> PathBuf {
        let mut name = path.file_name().unwrap_or_default().to_os_string();
        name.push(".provenance.json");
        path.with_file_name(name)
    }

    /// Writes `{label: [terms]}` and, when present, the provenance sidecar.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        write_json(path, &self.triggers)?;
        if let Some(p) = &self.provenance {
            write_json(Self::provenance_path(path), p)?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw: BTreeMap<String, Vec<String>> = read_json(path)?;
        let triggers = raw
            .into_iter()
            .map(|(l, ts)| (l, ts.iter().map(|t| lookup_key(t)).collect()))
            .collect();
        let sidecar = Self::provenance_path(path);
        let provenance = if sidecar.is_file() {
            Some(read_json(&sidecar)?)
        } else {
            None
        };
        Ok(ConcernTypeLexicon {
            triggers,
            provenance,
        })
    }
}

/// Reads concern labels from a JSON array or a file with one label per line.
pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let labels: Vec<String> = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?
    } else {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect()
    };
    let mut seen = BTreeSet::new();
    for l in &labels {
        if l == DROP {
            return Err(Error::Config(format!("{DROP} is reserved and cannot be a label")));
        }
        if !seen.insert(l) {
            return Err(Error::Config(format!("label {l:?} is listed twice")));
        }
    }
    Ok(labels)
}

/// Reads assignments from a JSON array or JSON lines.
pub fn read_assignments(path: impl AsRef<Path>) -> Result<Vec<Assignment>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
    } else {
        parse_jsonl(text.as_bytes(), path)
    }
}

/// Applies assignments in order (the latest per item wins) and collects the
/// trigger terms of every item assigned to a label.
///
/// With `labels` given, assignments to other labels are rejected and every
/// listed label appears in the lexicon, possibly with no triggers.
pub fn import_curation(
    candidates: &CandidateFile,
    labels: Option<&[String]>,
    assignments: &[Assignment],
    provenance: Option<CurationProvenance>,
) -> (ConcernTypeLexicon, CurationReport) {
    let mut report = CurationReport::default();
    let mut latest: BTreeMap<&str, &str> = BTreeMap::new();
    for (i, a) in assignments.iter().enumerate() {
        if candidates.trigger_of(&a.item).is_none() {
            report
                .rejected
                .push((i, a.item.clone(), "unknown item".into()));
            continue;
        }
        if !a.is_drop() {
            if let Some(allowed) = labels {
                if !allowed.contains(&a.label) {
                    report
                        .rejected
                        .push((i, a.item.clone(), format!("unknown label {:?}", a.label)));
                    continue;
                }
            }
        }
        latest.insert(&a.item, &a.label);
    }
    for (i, item, reason) in &report.rejected {
        log::warn!("assignment {i} ({item}) rejected: {reason}");
    }

    let mut lex = ConcernTypeLexicon {
        provenance,
        ..Default::default()
    };
    for l in labels.unwrap_or_default() {
        lex.triggers.entry(l.clone()).or_default();
    }
    for (item, label) in latest {
        if label == DROP {
            continue;
        }
        let term = candidates.trigger_of(item).expect("checked above");
        lex.triggers
            .entry(label.to_string())
            .or_default()
            .insert(lookup_key(term));
    }
    report.empty_labels = lex
        .triggers
        .iter()
        .filter(|(_, t)| t.is_empty())
        .map(|(l, _)| l.clone())
        .collect();
    if lex.trigger_count() == 0 {
        log::warn!("curation produced no triggers");
    }
    (lex, report)
}
