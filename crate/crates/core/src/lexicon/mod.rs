//! Moral-foundation lexicons: the baseline and its WordNet expansions.

mod expand;
mod moralstrength;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::lookup_key;

pub use expand::{
    expand, expand_moral2, expand_moral3, expand_moral4, expansion_candidates, seed_synsets,
    ExpansionConfig,
};
pub use moralstrength::{import_moralstrength, write_baseline, MORALSTRENGTH_FILES};

pub const MIN_ENDORSEMENT: f64 = 1.0;
pub const MAX_ENDORSEMENT: f64 = 9.0;
/// Endorsements at or below this value are vice-side.
pub const VICE_CEILING: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Foundation {
    CareHarm,
    FairnessCheating,
    LoyaltyBetrayal,
    AuthoritySubversion,
    PurityDegradation,
}

impl Foundation {
    pub const ALL: [Foundation; 5] = [
        Foundation::CareHarm,
        Foundation::FairnessCheating,
        Foundation::LoyaltyBetrayal,
        Foundation::AuthoritySubversion,
        Foundation::PurityDegradation,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Foundation::CareHarm => "care_harm",
            Foundation::FairnessCheating => "fairness_cheating",
            Foundation::LoyaltyBetrayal => "loyalty_betrayal",
            Foundation::AuthoritySubversion => "authority_subversion",
            Foundation::PurityDegradation => "purity_degradation",
        }
    }

    pub fn virtue_name(self) -> &'static str {
        match self {
            Foundation::CareHarm => "Care",
            Foundation::FairnessCheating => "Fairness",
            Foundation::LoyaltyBetrayal => "Loyalty",
            Foundation::AuthoritySubversion => "Authority",
            Foundation::PurityDegradation => "Purity",
        }
    }

    pub fn vice_name(self) -> &'static str {
        match self {
            Foundation::CareHarm => "Harm",
            Foundation::FairnessCheating => "Cheating",
            Foundation::LoyaltyBetrayal => "Betrayal",
            Foundation::AuthoritySubversion => "Subversion",
            Foundation::PurityDegradation => "Degradation",
        }
    }

    /// Side-specific display name, e.g. "Harm" for a vice-side care value.
    pub fn display_name(self, polarity: Polarity) -> &'static str {
        match polarity {
            Polarity::Vice => self.vice_name(),
            Polarity::Virtue => self.virtue_name(),
        }
    }
}

impl fmt::Display for Foundation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Foundation {
    type Err = Error;

    /// Accepts the canonical pair id or either side's name, any case.
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_lowercase().replace(['-', '/', ' '], "_");
        Foundation::ALL
            .into_iter()
            .find(|f| {
                key == f.id()
                    || key == f.virtue_name().to_lowercase()
                    || key == f.vice_name().to_lowercase()
            })
            .ok_or_else(|| Error::UnknownFoundation(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Vice,
    Virtue,
}

impl Polarity {
    pub fn of(endorsement: f64) -> Self {
        if endorsement <= VICE_CEILING {
            Polarity::Vice
        } else {
            Polarity::Virtue
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Vice => "vice",
            Polarity::Virtue => "virtue",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Baseline,
    Moral2,
    Moral3,
    Moral4,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Baseline => "baseline",
            Provenance::Moral2 => "moral2",
            Provenance::Moral3 => "moral3",
            Provenance::Moral4 => "moral4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Moral1,
    Moral2,
    Moral3,
    Moral4,
}

impl Variant {
    pub fn number(self) -> u8 {
        match self {
            Variant::Moral1 => 1,
            Variant::Moral2 => 2,
            Variant::Moral3 => 3,
            Variant::Moral4 => 4,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Variant::Moral1),
            2 => Some(Variant::Moral2),
            3 => Some(Variant::Moral3),
            4 => Some(Variant::Moral4),
            _ => None,
        }
    }

    pub fn provenance(self) -> Provenance {
        match self {
            Variant::Moral1 => Provenance::Baseline,
            Variant::Moral2 => Provenance::Moral2,
            Variant::Moral3 => Provenance::Moral3,
            Variant::Moral4 => Provenance::Moral4,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "moral{}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoralEntry {
    pub term: String,
    pub foundation: Foundation,
    pub endorsement: f64,
    pub provenance: Provenance,
    pub source_term: Option<String>,
    pub similarity: Option<f64>,
}

impl MoralEntry {
    pub fn baseline(term: &str, foundation: Foundation, endorsement: f64) -> Self {
        MoralEntry {
            term: lookup_key(term),
            foundation,
            endorsement,
            provenance: Provenance::Baseline,
            source_term: None,
            similarity: None,
        }
    }

    pub fn polarity(&self) -> Polarity {
        Polarity::of(self.endorsement)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoralLexicon {
    pub variant: Variant,
    entries: BTreeMap<(String, Foundation), MoralEntry>,
}

impl MoralLexicon {
    pub fn new(variant: Variant) -> Self {
        MoralLexicon {
            variant,
            entries: BTreeMap::new(),
        }
    }

    /// Inserts an entry, returning the one it replaced.
    pub fn insert(&mut self, entry: MoralEntry) -> Option<MoralEntry> {
        self.entries
            .insert((entry.term.clone(), entry.foundation), entry)
    }

    pub fn get(&self, term: &str, foundation: Foundation) -> Option<&MoralEntry> {
        self.entries.get(&(lookup_key(term), foundation))
    }

    /// Entries for a term across foundations, in foundation order.
    pub fn lookup(&self, term: &str) -> Vec<&MoralEntry> {
        let key = lookup_key(term);
        Foundation::ALL
            .into_iter()
            .filter_map(|f| self.entries.get(&(key.clone(), f)))
            .collect()
    }

    pub fn contains_term(&self, term: &str) -> bool {
        !self.lookup(term).is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &MoralEntry> {
        self.entries.values()
    }

    pub fn terms(&self) -> BTreeSet<&str> {
        self.entries.keys().map(|(t, _)| t.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Longest entry in tokens, for n-gram matching.
    pub fn max_term_tokens(&self) -> usize {
        self.entries
            .keys()
            .map(|(t, _)| t.split('_').count())
            .max()
            .unwrap_or(0)
    }

    /// Writes the lexicon CSV:
    /// `term,foundation,endorsement,provenance,source_term,similarity`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(LEXICON_HEADER)?;
        for e in self.entries() {
            w.write_record([
                e.term.as_str(),
                e.foundation.id(),
                &e.endorsement.to_string(),
                e.provenance.label(),
                e.source_term.as_deref().unwrap_or(""),
                &e.similarity.map(|s| s.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<lexicon output>", e))?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

pub const BASELINE_HEADER: [&str; 3] = ["term", "foundation", "endorsement"];
pub const LEXICON_HEADER: [&str; 6] = [
    "term",
    "foundation",
    "endorsement",
    "provenance",
    "source_term",
    "similarity",
];

/// Rows that were not loaded, with the reason.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadReport {
    /// (line, reason) for rows rejected because of their endorsement.
    pub rejected: Vec<(usize, String)>,
    /// (line, term, foundation) of rows that replaced an earlier row.
    pub duplicates: Vec<(usize, String, Foundation)>,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

/// Loads a `term,foundation,endorsement` CSV as the Moral 1 lexicon.
pub fn load_baseline(path: impl AsRef<Path>) -> Result<(MoralLexicon, LoadReport)> {
    let path = path.as_ref();
    read_baseline(open(path)?, path)
}

pub fn read_baseline(input: impl Read, origin: &Path) -> Result<(MoralLexicon, LoadReport)> {
    let mut lex = MoralLexicon::new(Variant::Moral1);
    let mut report = LoadReport::default();
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    check_header(reader.headers()?, &BASELINE_HEADER, origin)?;
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let term = lookup_key(row.get(0).unwrap_or(""));
        let foundation: Foundation = row.get(1).unwrap_or("").parse()?;
        let raw = row.get(2).unwrap_or("");
        let endorsement = match parse_endorsement(raw) {
            Ok(v) => v,
            Err(reason) => {
                log::warn!("{}:{line}: row rejected: {reason}", origin.display());
                report.rejected.push((line, reason));
                continue;
            }
        };
        if term.is_empty() {
            report.rejected.push((line, "empty term".into()));
            continue;
        }
        if lex
            .insert(MoralEntry::baseline(&term, foundation, endorsement))
            .is_some()
        {
            log::warn!(
                "{}:{line}: duplicate ({term}, {foundation}); keeping the later row",
                origin.display()
            );
            report.duplicates.push((line, term, foundation));
        }
    }
    Ok((lex, report))
}

fn parse_endorsement(raw: &str) -> std::result::Result<f64, String> {
    let v: f64 = raw
        .parse()
        .map_err(|_| format!("endorsement {raw:?} is not a number"))?;
    if (MIN_ENDORSEMENT..=MAX_ENDORSEMENT).contains(&v) {
        Ok(v)
    } else {
        Err(format!("endorsement {v} outside [1, 9]"))
    }
}

fn check_header(found: &csv::StringRecord, expected: &[&str], origin: &Path) -> Result<()> {
    let got: Vec<String> = found.iter().map(|h| h.trim().to_lowercase()).collect();
    if got.len() < expected.len() || got[..expected.len()] != *expected {
        return Err(Error::parse(
            origin,
            1,
            format!("expected header {}, found {}", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

/// Reads a lexicon CSV written by [`MoralLexicon::write_csv`]. A plain
/// baseline CSV is accepted too.
pub fn load_lexicon(path: impl AsRef<Path>) -> Result<MoralLexicon> {
    let path = path.as_ref();
    read_lexicon(open(path)?, path)
}

pub fn read_lexicon(input: impl Read, origin: &Path) -> Result<MoralLexicon> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    check_header(&headers, &BASELINE_HEADER, origin)?;
    let full = headers.len() >= LEXICON_HEADER.len();
    if full {
        check_header(&headers, &LEXICON_HEADER, origin)?;
    }
    let mut lex = MoralLexicon::new(Variant::Moral1);
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let bad = |msg: String| Error::parse(origin, line, msg);
        let term = lookup_key(&row[0]);
        let foundation: Foundation = row[1].parse()?;
        let endorsement = parse_endorsement(&row[2]).map_err(bad)?;
        let mut entry = MoralEntry::baseline(&term, foundation, endorsement);
        if full {
            entry.provenance = match &row[3] {
                "baseline" => Provenance::Baseline,
                "moral2" => Provenance::Moral2,
                "moral3" => Provenance::Moral3,
                "moral4" => Provenance::Moral4,
                other => return Err(bad(format!("unknown provenance {other:?}"))),
            };
            entry.source_term = Some(row[4].to_string()).filter(|s| !s.is_empty());
            entry.similarity = match &row[5] {
                "" => None,
                s => Some(s.parse().map_err(|_| bad(format!("bad similarity {s:?}")))?),
            };
        }
        let variant = match entry.provenance {
            Provenance::Baseline => Variant::Moral1,
            Provenance::Moral2 => Variant::Moral2,
            Provenance::Moral3 => Variant::Moral3,
            Provenance::Moral4 => Variant::Moral4,
        };
        lex.variant = lex.variant.max(variant);
        lex.insert(entry);
    }
    Ok(lex)
}
