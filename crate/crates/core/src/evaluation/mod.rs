//! Scoring detection output against ground truth.

mod gt;
mod metrics;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use gt::{
    load_annotation_sheet, merge_sheets, parse_ground_truth, read_annotation_sheet, read_ground_truth,
    GroundTruthRecord, GtPolarity, SheetRow,
};
pub use metrics::{
    averages, cohen_kappa_macro, mcnemar, mcnemar_counts, totals, Averages, Counts, KappaReport, LabelCounts,
    McNemar, Prf, EXACT_BELOW,
};

use crate::detection::DetectionRecord;
use crate::error::{Error, Result};
use crate::io::string_or_number;
use crate::lexicon::{Foundation, Polarity};

/// What a system predicted for one tweet.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    #[serde(deserialize_with = "string_or_number")]
    pub tweet_id: String,
    #[serde(default)]
    pub concern_types: BTreeSet<String>,
    #[serde(default)]
    pub moral: BTreeMap<Foundation, Polarity>,
}

impl From<&DetectionRecord> for Prediction {
    fn from(r: &DetectionRecord) -> Self {
        Prediction {
            tweet_id: r.tweet_id.clone(),
            concern_types: r.concern_types.iter().map(|c| c.label.clone()).collect(),
            moral: r.moral_hits.iter().map(|h| (h.foundation, h.polarity)).collect(),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PredictionLine {
    Record(Box<DetectionRecord>),
    Simple(Prediction),
}

/// Reads predictions, one per line, as detection records or in the simple
/// `{tweet_id, concern_types, moral}` form.
pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<Prediction>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_predictions(&text, path)
}

pub fn parse_predictions(text: &str, origin: &Path) -> Result<Vec<Prediction>> {
    let lines: Vec<PredictionLine> = crate::io::parse_jsonl(text.as_bytes(), origin)?;
    Ok(lines
        .into_iter()
        .map(|l| match l {
            PredictionLine::Record(r) => Prediction::from(r.as_ref()),
            PredictionLine::Simple(p) => p,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Concern,
    Moral,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "concern" => Ok(Mode::Concern),
            "moral" => Ok(Mode::Moral),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

/// Which annotation the predictions are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Against {
    Union,
    A1,
    A2,
    Expert,
}

impl Against {
    pub fn default_for(mode: Mode) -> Self {
        match mode {
            Mode::Concern => Against::Union,
            Mode::Moral => Against::Expert,
        }
    }

    fn check(self, mode: Mode) -> Result<()> {
        match (mode, self) {
            (Mode::Concern, Against::Expert) | (Mode::Moral, Against::Union | Against::A1 | Against::A2) => Err(
                Error::Config(format!("{mode:?} predictions cannot be scored against {self:?}").to_lowercase()),
            ),
            _ => Ok(()),
        }
    }
}

impl FromStr for Against {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "union" => Ok(Against::Union),
            "a1" => Ok(Against::A1),
            "a2" => Ok(Against::A2),
            "expert" => Ok(Against::Expert),
            other => Err(Error::Config(format!("unknown reference {other:?}"))),
        }
    }
}

/// Outcome of one (tweet, label) decision cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    Tp,
    Fp,
    Fn,
    Tn,
    /// Right dimension, wrong side: counts as both FP and FN.
    WrongPolarity,
}

impl Cell {
    /// Correct responses are TP and TN.
    pub fn correct(self) -> bool {
        matches!(self, Cell::Tp | Cell::Tn)
    }

    fn tally(self, c: &mut Counts) {
        match self {
            Cell::Tp => c.tp += 1,
            Cell::Fp => c.fp += 1,
            Cell::Fn => c.fn_ += 1,
            Cell::Tn => c.tn += 1,
            Cell::WrongPolarity => {
                c.fp += 1;
                c.fn_ += 1;
            }
        }
    }
}

/// Decision cells keyed by (tweet id, label).
pub type Cells = BTreeMap<(String, String), Cell>;

fn index<'a>(preds: &'a [Prediction], gt: &'a [GroundTruthRecord]) -> Result<BTreeMap<&'a str, (&'a Prediction, &'a GroundTruthRecord)>> {
    let p: BTreeMap<&str, &Prediction> = preds.iter().map(|p| (p.tweet_id.as_str(), p)).collect();
    let g: BTreeMap<&str, &GroundTruthRecord> = gt.iter().map(|g| (g.tweet_id.as_str(), g)).collect();
    let pk: BTreeSet<&str> = p.keys().copied().collect();
    let gk: BTreeSet<&str> = g.keys().copied().collect();
    if pk != gk || p.len() != preds.len() {
        let mut extra: Vec<String> = pk.difference(&gk).map(|s| s.to_string()).collect();
        if p.len() != preds.len() {
            let mut seen = BTreeSet::new();
            extra.extend(preds.iter().filter(|x| !seen.insert(x.tweet_id.as_str())).map(|x| format!("{} (repeated)", x.tweet_id)));
        }
        return Err(Error::TweetMismatch {
            missing: gk.difference(&pk).map(|s| s.to_string()).collect(),
            extra,
        });
    }
    Ok(g.into_iter().map(|(id, g)| (id, (p[id], g))).collect())
}

fn gold_concerns(g: &GroundTruthRecord, against: Against) -> BTreeSet<String> {
    match against {
        Against::A1 => g.concern_a1.clone(),
        Against::A2 => g.concern_a2.clone(),
        _ => g.concern_union(),
    }
}

/// Concern-type cells over `labels` plus every label that is gold or
/// predicted somewhere.
pub fn concern_cells(preds: &[Prediction], gt: &[GroundTruthRecord], against: Against, labels: &[String]) -> Result<Cells> {
    against.check(Mode::Concern)?;
    let joined = index(preds, gt)?;
    let mut universe: BTreeSet<String> = labels.iter().cloned().collect();
    for (p, g) in joined.values() {
        universe.extend(p.concern_types.iter().cloned());
        universe.extend(gold_concerns(g, against));
    }
    let mut cells = Cells::new();
    for (id, (p, g)) in joined {
        let gold = gold_concerns(g, against);
        for label in &universe {
            let cell = match (p.concern_types.contains(label), gold.contains(label)) {
                (true, true) => Cell::Tp,
                (true, false) => Cell::Fp,
                (false, true) => Cell::Fn,
                (false, false) => Cell::Tn,
            };
            cells.insert((id.to_string(), label.clone()), cell);
        }
    }
    Ok(cells)
}

/// Moral cells, one per (tweet, foundation). A "DK" gold cell matches either
/// predicted side.
pub fn moral_cells(preds: &[Prediction], gt: &[GroundTruthRecord]) -> Result<Cells> {
    let joined = index(preds, gt)?;
    let mut cells = Cells::new();
    for (id, (p, g)) in joined {
        for f in Foundation::ALL {
            let cell = match (p.moral.get(&f), g.moral_expert.get(&f)) {
                (Some(&pp), Some(&gp)) if gp.matches(pp) => Cell::Tp,
                (Some(_), Some(_)) => Cell::WrongPolarity,
                (Some(_), None) => Cell::Fp,
                (None, Some(_)) => Cell::Fn,
                (None, None) => Cell::Tn,
            };
            cells.insert((id.to_string(), f.id().to_string()), cell);
        }
    }
    Ok(cells)
}

pub fn count_cells(cells: &Cells) -> LabelCounts {
    let mut counts = LabelCounts::new();
    for ((_, label), cell) in cells {
        cell.tally(counts.entry(label.clone()).or_default());
    }
    counts
}

pub fn score_concern_types(preds: &[Prediction], gt: &[GroundTruthRecord], against: Against) -> Result<LabelCounts> {
    Ok(count_cells(&concern_cells(preds, gt, against, &[])?))
}

pub fn score_moral_values(preds: &[Prediction], gt: &[GroundTruthRecord]) -> Result<LabelCounts> {
    Ok(count_cells(&moral_cells(preds, gt)?))
}

/// Support-weighted macro precision, recall and F1 in percent.
pub fn weighted_macro_prf(counts: &LabelCounts) -> Prf {
    averages(counts).weighted
}

/// Cells for a mode, so two systems can be paired cell by cell.
pub fn cells_for(mode: Mode, preds: &[Prediction], gt: &[GroundTruthRecord], against: Against, labels: &[String]) -> Result<Cells> {
    match mode {
        Mode::Concern => concern_cells(preds, gt, against, labels),
        Mode::Moral => {
            against.check(Mode::Moral)?;
            moral_cells(preds, gt)
        }
    }
}

/// McNemar's test between two systems over the same decision cells.
pub fn significance(
    mode: Mode,
    a: &[Prediction],
    b: &[Prediction],
    gt: &[GroundTruthRecord],
    against: Against,
) -> Result<McNemar> {
    // Both systems are scored on the same label universe.
    let mut labels: BTreeSet<String> = BTreeSet::new();
    for p in a.iter().chain(b) {
        labels.extend(p.concern_types.iter().cloned());
    }
    let labels: Vec<String> = labels.into_iter().collect();
    let ca = cells_for(mode, a, gt, against, &labels)?;
    let cb = cells_for(mode, b, gt, against, &labels)?;
    let x: Vec<bool> = ca.values().map(|c| c.correct()).collect();
    let y: Vec<bool> = cb.values().map(|c| c.correct()).collect();
    mcnemar(&x, &y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelScore {
    pub label: String,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub support: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub mode: Mode,
    pub against: Against,
    pub system: String,
    pub tweets: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: EvalConfig,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub weighted: Prf,
    pub unweighted: Prf,
    pub micro: Prf,
    pub per_label: Vec<LabelScore>,
}

impl EvalReport {
    pub fn from_counts(config: EvalConfig, counts: &LabelCounts) -> Self {
        let t = totals(counts);
        let avg = averages(counts);
        EvalReport {
            config,
            tp: t.tp,
            fp: t.fp,
            fn_: t.fn_,
            weighted: avg.weighted,
            unweighted: avg.unweighted,
            micro: avg.micro,
            per_label: counts
                .iter()
                .map(|(label, c)| LabelScore {
                    label: label.clone(),
                    tp: c.tp,
                    fp: c.fp,
                    fn_: c.fn_,
                    support: c.support(),
                    precision: c.precision(),
                    recall: c.recall(),
                    f1: c.f1(),
                })
                .collect(),
        }
    }

    /// Table with one summary row and one row per label.
    pub fn render_table(&self, weighted: bool) -> String {
        let avg = if weighted { &self.weighted } else { &self.unweighted };
        let mut out = String::new();
        let _ = writeln!(out, "{:<24} {:>5} {:>5} {:>5} {:>7} {:>7} {:>7}", "System", "TP", "FP", "FN", "P", "R", "F1");
        let _ = writeln!(
            out,
            "{:<24} {:>5} {:>5} {:>5} {:>7.2} {:>7.2} {:>7.2}",
            self.config.system, self.tp, self.fp, self.fn_, avg.precision, avg.recall, avg.f1
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<24} {:>5} {:>5} {:>5} {:>7} {:>7} {:>7}", "Label", "TP", "FP", "FN", "P", "R", "F1");
        for l in &self.per_label {
            let _ = writeln!(
                out,
                "{:<24} {:>5} {:>5} {:>5} {:>7.2} {:>7.2} {:>7.2}",
                l.label, l.tp, l.fp, l.fn_, l.precision, l.recall, l.f1
            );
        }
        out
    }
}

/// Scores predictions and builds a report.
pub fn evaluate(
    mode: Mode,
    preds: &[Prediction],
    gt: &[GroundTruthRecord],
    against: Against,
    system: &str,
) -> Result<EvalReport> {
    let counts = match mode {
        Mode::Concern => score_concern_types(preds, gt, against)?,
        Mode::Moral => {
            against.check(Mode::Moral)?;
            score_moral_values(preds, gt)?
        }
    };
    let config = EvalConfig {
        mode,
        against,
        system: system.to_string(),
        tweets: gt.len(),
    };
    Ok(EvalReport::from_counts(config, &counts))
}

/// Concern-type agreement between the two annotators.
pub fn concern_agreement(gt: &[GroundTruthRecord], labels: &[String]) -> Result<KappaReport> {
    let a1 = gt.iter().map(|g| (g.tweet_id.clone(), g.concern_a1.clone())).collect();
    let a2 = gt.iter().map(|g| (g.tweet_id.clone(), g.concern_a2.clone())).collect();
    let mut universe: BTreeSet<String> = labels.iter().cloned().collect();
    for g in gt {
        universe.extend(g.concern_union());
    }
    cohen_kappa_macro(&a1, &a2, &universe.into_iter().collect::<Vec<_>>())
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Config(format!("selection probability {p} is outside [0, 1]")))
    }
}

/// Selects each (tweet, label) independently with probability `p`.
pub fn random_concern_chooser(tweet_ids: &[String], labels: &[String], p: f64, seed: u64) -> Result<Vec<Prediction>> {
    check_probability(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(tweet_ids
        .iter()
        .map(|id| Prediction {
            tweet_id: id.clone(),
            concern_types: labels.iter().filter(|_| rng.gen_bool(p)).cloned().collect(),
            moral: BTreeMap::new(),
        })
        .collect())
}

/// Selects each (tweet, foundation) with probability `p` and a side
/// uniformly at random.
pub fn random_moral_chooser(tweet_ids: &[String], p: f64, seed: u64) -> Result<Vec<Prediction>> {
    check_probability(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(tweet_ids
        .iter()
        .map(|id| {
            let mut moral = BTreeMap::new();
            for f in Foundation::ALL {
                if rng.gen_bool(p) {
                    let side = if rng.gen_bool(0.5) { Polarity::Vice } else { Polarity::Virtue };
                    moral.insert(f, side);
                }
            }
            Prediction {
                tweet_id: id.clone(),
                concern_types: BTreeSet::new(),
                moral,
            }
        })
        .collect())
}
