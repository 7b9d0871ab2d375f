//! Ground-truth records: canonical JSON / JSON lines and annotation-sheet CSV.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::string_or_number;
use crate::lexicon::{Foundation, Polarity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GtPolarity {
    #[serde(rename = "vice")]
    Vice,
    #[serde(rename = "virtue")]
    Virtue,
    /// The annotator saw the dimension but not its side.
    #[serde(rename = "DK")]
    DontKnow,
}

impl GtPolarity {
    pub fn matches(self, p: Polarity) -> bool {
        match self {
            GtPolarity::DontKnow => true,
            GtPolarity::Vice => p == Polarity::Vice,
            GtPolarity::Virtue => p == Polarity::Virtue,
        }
    }
}

impl From<Polarity> for GtPolarity {
    fn from(p: Polarity) -> Self {
        match p {
            Polarity::Vice => GtPolarity::Vice,
            Polarity::Virtue => GtPolarity::Virtue,
        }
    }
}

impl FromStr for GtPolarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "vice" => Ok(GtPolarity::Vice),
            "virtue" => Ok(GtPolarity::Virtue),
            "dk" => Ok(GtPolarity::DontKnow),
            other => Err(Error::Config(format!("unknown polarity {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRecord")]
pub struct GroundTruthRecord {
    pub tweet_id: String,
    #[serde(default)]
    pub text: String,
    pub concern_a1: BTreeSet<String>,
    pub concern_a2: BTreeSet<String>,
    pub moral_expert: BTreeMap<Foundation, GtPolarity>,
}

#[derive(Deserialize)]
struct RawRecord {
    #[serde(deserialize_with = "string_or_number")]
    tweet_id: String,
    #[serde(default)]
    text: String,
    #[serde(default)]
    concern_a1: BTreeSet<String>,
    #[serde(default)]
    concern_a2: BTreeSet<String>,
    #[serde(default)]
    moral_expert: BTreeMap<String, String>,
}

impl TryFrom<RawRecord> for GroundTruthRecord {
    type Error = Error;

    fn try_from(raw: RawRecord) -> Result<Self> {
        let mut moral_expert = BTreeMap::new();
        for (f, p) in raw.moral_expert {
            moral_expert.insert(f.parse()?, p.parse()?);
        }
        Ok(GroundTruthRecord {
            tweet_id: raw.tweet_id,
            text: raw.text,
            concern_a1: raw.concern_a1,
            concern_a2: raw.concern_a2,
            moral_expert,
        })
    }
}

impl GroundTruthRecord {
    pub fn concern_union(&self) -> BTreeSet<String> {
        self.concern_a1.union(&self.concern_a2).cloned().collect()
    }
}

/// Reads a JSON array of records or one record per line.
pub fn read_ground_truth(path: impl AsRef<Path>) -> Result<Vec<GroundTruthRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ground_truth(&text, path)
}

pub fn parse_ground_truth(text: &str, origin: &Path) -> Result<Vec<GroundTruthRecord>> {
    let records: Vec<GroundTruthRecord> = if text.trim_start().starts_with('[') {
        serde_json::from_str(text).map_err(|e| Error::parse(origin, e.line(), e.to_string()))?
    } else {
        crate::io::parse_jsonl(text.as_bytes(), origin)?
    };
    let mut seen = BTreeSet::new();
    for r in &records {
        if !seen.insert(r.tweet_id.as_str()) {
            return Err(Error::Config(format!(
                "{}: tweet {} appears more than once",
                origin.display(),
                r.tweet_id
            )));
        }
    }
    Ok(records)
}

/// One annotator's row from an annotation sheet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheetRow {
    pub tweet_id: String,
    pub text: String,
    pub concerns: BTreeSet<String>,
    pub morals: BTreeMap<Foundation, GtPolarity>,
}

enum Column {
    Id,
    Text,
    Concern(String),
    Moral(Foundation, Polarity),
    Ignored,
}

fn classify(header: &str) -> Column {
    let h = header.trim();
    let lower = h.to_lowercase();
    match lower.as_str() {
        "tweet_id" | "id" | "tweet id" => return Column::Id,
        "text" | "tweet" => return Column::Text,
        "" | "notes" | "comments" => return Column::Ignored,
        _ => {}
    }
    // "care_harm vice", "care_harm:virtue", or a side name such as "Harm".
    let parts: Vec<&str> = lower.split([' ', ':', '.', '/']).filter(|p| !p.is_empty()).collect();
    if let [f, side] = parts.as_slice() {
        if let (Ok(f), Ok(side)) = (f.parse::<Foundation>(), side.parse::<GtPolarity>()) {
            match side {
                GtPolarity::Vice => return Column::Moral(f, Polarity::Vice),
                GtPolarity::Virtue => return Column::Moral(f, Polarity::Virtue),
                GtPolarity::DontKnow => {}
            }
        }
    }
    for f in Foundation::ALL {
        if lower == f.vice_name().to_lowercase() {
            return Column::Moral(f, Polarity::Vice);
        }
        if lower == f.virtue_name().to_lowercase() {
            return Column::Moral(f, Polarity::Virtue);
        }
    }
    if matches!(lower.as_str(), "liberty" | "oppression") || lower.starts_with("liberty") {
        return Column::Ignored;
    }
    Column::Concern(h.to_string())
}

/// Reads an annotation sheet: a text column, one column per concern type
/// (marked "1"), and vice/virtue columns per foundation (marked "1" or
/// "DK"). Rows without an id column are numbered from 1.
pub fn read_annotation_sheet(input: impl Read, origin: &Path) -> Result<Vec<SheetRow>> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let columns: Vec<Column> = reader.headers()?.iter().map(classify).collect();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let mut row = SheetRow {
            tweet_id: (i + 1).to_string(),
            text: String::new(),
            concerns: BTreeSet::new(),
            morals: BTreeMap::new(),
        };
        for (col, cell) in columns.iter().zip(record.iter()) {
            let cell = cell.trim();
            match col {
                Column::Id if !cell.is_empty() => row.tweet_id = cell.to_string(),
                Column::Text => row.text = cell.to_string(),
                Column::Concern(label) if cell == "1" => {
                    row.concerns.insert(label.clone());
                }
                Column::Moral(f, side) if !cell.is_empty() && cell != "0" => {
                    let value = if cell.eq_ignore_ascii_case("dk") {
                        GtPolarity::DontKnow
                    } else if cell == "1" {
                        (*side).into()
                    } else {
                        return Err(Error::parse(origin, line, format!("unexpected moral cell {cell:?}")));
                    };
                    if let Some(prev) = row.morals.insert(*f, value) {
                        if prev != value {
                            return Err(Error::parse(
                                origin,
                                line,
                                format!("both sides of {f} are marked"),
                            ));
                        }
                    }
                }
                _ => {}
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn load_annotation_sheet(path: impl AsRef<Path>) -> Result<Vec<SheetRow>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_annotation_sheet(file, path)
}

/// Joins two annotators' sheets. Moral labels come from the sheet named by
/// `moral_from` (1 or 2).
pub fn merge_sheets(a1: &[SheetRow], a2: &[SheetRow], moral_from: u8) -> Result<Vec<GroundTruthRecord>> {
    let by_id: BTreeMap<&str, &SheetRow> = a2.iter().map(|r| (r.tweet_id.as_str(), r)).collect();
    let ids1: BTreeSet<&str> = a1.iter().map(|r| r.tweet_id.as_str()).collect();
    let ids2: BTreeSet<&str> = by_id.keys().copied().collect();
    if ids1 != ids2 {
        return Err(Error::TweetMismatch {
            missing: ids1.difference(&ids2).map(|s| s.to_string()).collect(),
            extra: ids2.difference(&ids1).map(|s| s.to_string()).collect(),
        });
    }
    Ok(a1
        .iter()
        .map(|r1| {
            let r2 = by_id[r1.tweet_id.as_str()];
            GroundTruthRecord {
                tweet_id: r1.tweet_id.clone(),
                text: if r1.text.is_empty() { r2.text.clone() } else { r1.text.clone() },
                concern_a1: r1.concerns.clone(),
                concern_a2: r2.concerns.clone(),
                moral_expert: if moral_from == 1 { r1.morals.clone() } else { r2.morals.clone() },
            }
        })
        .collect())
}
