//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes and returns JSON strings. The plain `*_json`
//! functions hold the logic and are usable from Rust.

use std::collections::BTreeMap;
use std::path::Path;

use concern_core::detection::{DetectionConfig, DetectionScope, Detector};
use concern_core::evaluation::{averages, mcnemar_counts, LabelCounts};
use concern_core::frames::heuristic_extract;
use concern_core::induction::ConcernTypeLexicon;
use concern_core::io::Tweet;
use concern_core::lexicon::read_lexicon;
use serde::{Deserialize, Serialize};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Detects concern types and moral values in `text`.
///
/// `concerns` is `{label: [terms]}` JSON, `morals` a lexicon CSV with a
/// `term,foundation,endorsement` header, `scope` "proposition" or
/// "full-text".
pub fn detect_json(text: &str, concerns: &str, morals: &str, scope: &str) -> Result<String, String> {
    let triggers: BTreeMap<String, Vec<String>> = serde_json::from_str(concerns).map_err(err)?;
    let concerns = ConcernTypeLexicon::from_triggers(
        triggers.iter().flat_map(|(l, ts)| ts.iter().map(move |t| (l.clone(), t.as_str()))),
    );
    let morals = read_lexicon(morals.as_bytes(), Path::new("moral lexicon")).map_err(err)?;
    let scope: DetectionScope = scope.parse()?;
    let detector = Detector::new(concerns, morals, DetectionConfig { scope, ..Default::default() });
    let tweet = Tweet::new("demo", text);
    let frames = heuristic_extract(&tweet.id, &tweet.text);
    let record = detector.detect(&tweet, &frames);
    let value = json!({
        "propositions": record.propositions,
        "concern_types": record.concern_types,
        "moral_hits": record.moral_hits.iter().map(|h| json!({
            "label": h.label(false),
            "foundation": h.foundation,
            "polarity": h.polarity,
            "endorsement": h.endorsement,
            "triggers": h.triggers,
        })).collect::<Vec<_>>(),
        "rendering": record.render(&tweet.text, false),
    });
    Ok(value.to_string())
}

#[derive(Deserialize)]
struct CountRow {
    label: String,
    tp: usize,
    fp: usize,
    #[serde(rename = "fn")]
    fn_: usize,
}

#[derive(Serialize)]
struct LabelRow {
    label: String,
    support: usize,
    precision: f64,
    recall: f64,
    f1: f64,
}

/// Per-label and averaged P/R/F1 from `[{label, tp, fp, fn}]`.
pub fn prf_json(rows: &str) -> Result<String, String> {
    let rows: Vec<CountRow> = serde_json::from_str(rows).map_err(err)?;
    let mut counts = LabelCounts::new();
    for r in rows {
        let c = counts.entry(r.label).or_default();
        c.tp += r.tp;
        c.fp += r.fp;
        c.fn_ += r.fn_;
    }
    let labels: Vec<LabelRow> = counts
        .iter()
        .map(|(label, c)| LabelRow {
            label: label.clone(),
            support: c.support(),
            precision: c.precision(),
            recall: c.recall(),
            f1: c.f1(),
        })
        .collect();
    Ok(json!({ "labels": labels, "averages": averages(&counts) }).to_string())
}

/// McNemar's test from discordant counts.
pub fn mcnemar_json(b: u32, c: u32) -> String {
    serde_json::to_string(&mcnemar_counts(b as usize, c as usize)).expect("serializable")
}

#[wasm_bindgen]
pub fn detect(text: &str, concerns: &str, morals: &str, scope: &str) -> Result<String, JsError> {
    detect_json(text, concerns, morals, scope).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn prf(rows: &str) -> Result<String, JsError> {
    prf_json(rows).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn mcnemar(b: u32, c: u32) -> String {
    mcnemar_json(b, c)
}
