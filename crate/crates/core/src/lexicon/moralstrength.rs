//! Adapter for the upstream per-foundation lexicon layout.
//!
//! The upstream release ships one tab-separated file per foundation
//! (`care.tsv`, `fairness.tsv`, ...) with a header row. The term column is
//! the one named `LEMMA`, `WORD` or `TERM` (else the first column) and the
//! value column the one named `EXPRESSED_MORAL`, `EXPRESSED_MORALITY`,
//! `MORALITY`, `VALUE` or `SCORE` (else the second column).

use std::fs::File;
use std::path::Path;

use super::{parse_endorsement, Foundation, LoadReport, MoralEntry, MoralLexicon, Variant};
use crate::error::{Error, Result};
use crate::text::lookup_key;

pub const MORALSTRENGTH_FILES: [(&str, Foundation); 5] = [
    ("care", Foundation::CareHarm),
    ("fairness", Foundation::FairnessCheating),
    ("loyalty", Foundation::LoyaltyBetrayal),
    ("authority", Foundation::AuthoritySubversion),
    ("purity", Foundation::PurityDegradation),
];

const TERM_COLUMNS: [&str; 3] = ["lemma", "word", "term"];
const VALUE_COLUMNS: [&str; 5] = ["expressed_moral", "expressed_morality", "morality", "value", "score"];

fn column(headers: &csv::StringRecord, names: &[&str], fallback: usize) -> usize {
    headers
        .iter()
        .position(|h| names.contains(&h.trim().to_lowercase().as_str()))
        .unwrap_or(fallback)
}

/// Reads every per-foundation file present in `dir` (`.tsv`, `.txt` or
/// `.csv` with tab separators). Files for all five foundations are required.
pub fn import_moralstrength(dir: impl AsRef<Path>) -> Result<(MoralLexicon, LoadReport)> {
    let dir = dir.as_ref();
    let mut lex = MoralLexicon::new(Variant::Moral1);
    let mut report = LoadReport::default();
    for (stem, foundation) in MORALSTRENGTH_FILES {
        let path = ["tsv", "txt", "csv"]
            .iter()
            .map(|ext| dir.join(format!("{stem}.{ext}")))
            .find(|p| p.is_file())
            .ok_or_else(|| {
                Error::Config(format!("no {stem}.tsv in {}", dir.display()))
            })?;
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(file);
        let headers = reader.headers()?.clone();
        let term_col = column(&headers, &TERM_COLUMNS, 0);
        let value_col = column(&headers, &VALUE_COLUMNS, 1);
        for (i, row) in reader.records().enumerate() {
            let row = row?;
            let line = i + 2;
            let term = lookup_key(row.get(term_col).unwrap_or(""));
            if term.is_empty() {
                continue;
            }
            match parse_endorsement(row.get(value_col).unwrap_or("")) {
                Ok(v) => {
                    if lex.insert(MoralEntry::baseline(&term, foundation, v)).is_some() {
                        report.duplicates.push((line, term, foundation));
                    }
                }
                Err(reason) => report
                    .rejected
                    .push((line, format!("{}: {reason}", path.display()))),
            }
        }
    }
    Ok((lex, report))
}

/// Writes the canonical three-column baseline CSV.
pub fn write_baseline(lex: &MoralLexicon, out: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(super::BASELINE_HEADER)?;
    for e in lex.entries() {
        w.write_record([e.term.as_str(), e.foundation.id(), &e.endorsement.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<baseline output>", e))?;
    Ok(())
}
