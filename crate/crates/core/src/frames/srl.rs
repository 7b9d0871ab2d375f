//! Canonical SRL JSON-lines format.
//!
//! One object per frame:
//! `{"tweet_id": ..., "sentence_index": 0, "verb": "ruin", "spans": {"ARG0": [...], ...}}`.
//! Roles outside the retained set are dropped and counted; malformed lines
//! are skipped and reported by line number.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::Deserialize;

use super::{FrameSource, PropositionFrame, Role};
use crate::error::{Error, Result};
use crate::text::normalize_token;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct IngestReport {
    pub frames: Vec<PropositionFrame>,
    /// Dropped role label → number of occurrences.
    pub dropped_roles: BTreeMap<String, usize>,
    /// (line number, reason) for every skipped line.
    pub skipped: Vec<(usize, String)>,
}

#[derive(Deserialize)]
struct RawFrame {
    tweet_id: serde_json::Value,
    #[serde(default)]
    sentence_index: u32,
    verb: String,
    #[serde(default)]
    spans: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    source: FrameSource,
}

fn id_string(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn normalize_span(tokens: &[String]) -> Vec<String> {
    tokens.iter().filter_map(|t| normalize_token(t)).collect()
}

fn convert(raw: RawFrame, dropped: &mut BTreeMap<String, usize>) -> Result<PropositionFrame, String> {
    let tweet_id = id_string(&raw.tweet_id).ok_or("tweet_id must be a string or number")?;
    let verb = normalize_token(&raw.verb).ok_or("empty verb")?;
    let mut spans = BTreeMap::new();
    for (label, tokens) in raw.spans {
        match label.parse::<Role>() {
            Ok(role) => {
                let toks = normalize_span(&tokens);
                if !toks.is_empty() {
                    spans.insert(role, toks);
                }
            }
            Err(_) => *dropped.entry(label).or_default() += 1,
        }
    }
    match spans.get(&Role::Verb) {
        None => {
            spans.insert(Role::Verb, vec![verb.clone()]);
        }
        Some(v) if v.last() != Some(&verb) => {
            return Err(format!("V span {v:?} does not end with verb {verb:?}"));
        }
        Some(_) => {}
    }
    Ok(PropositionFrame {
        tweet_id,
        sentence_index: raw.sentence_index,
        verb,
        spans,
        source: raw.source,
    })
}

/// Parses SRL JSONL from any reader.
pub fn parse_srl(reader: impl BufRead) -> std::io::Result<IngestReport> {
    let mut report = IngestReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<RawFrame>(&line)
            .map_err(|e| e.to_string())
            .and_then(|raw| convert(raw, &mut report.dropped_roles));
        match parsed {
            Ok(frame) => report.frames.push(frame),
            Err(reason) => {
                log::warn!("SRL line {line_no} skipped: {reason}");
                report.skipped.push((line_no, reason));
            }
        }
    }
    Ok(report)
}

pub fn ingest_srl(path: impl AsRef<Path>) -> Result<IngestReport> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_srl(BufReader::new(file)).map_err(|e| Error::io(path, e))
}

/// Writes frames in the same JSONL format `parse_srl` reads.
pub fn write_frames(mut out: impl Write, frames: &[PropositionFrame]) -> std::io::Result<()> {
    for f in frames {
        serde_json::to_writer(&mut out, f)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
