//! Readers for the WordNet `index.*` and `data.*` database files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{Pos, Synset, SynsetId, TaxonomyIndex};
use crate::error::{Error, Result};
use crate::text::{hex, lookup_key};

pub(crate) const SECTIONS: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adjective, Pos::Adverb];

pub(crate) fn source_files(dir: &Path) -> Vec<PathBuf> {
    SECTIONS
        .iter()
        .flat_map(|pos| {
            let suffix = pos.file_suffix();
            [
                dir.join(format!("index.{suffix}")),
                dir.join(format!("data.{suffix}")),
            ]
        })
        .collect()
}

fn read(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    String::from_utf8(bytes).map_err(|e| Error::parse(path, 0, format!("not UTF-8: {e}")))
}

/// Checksum over all database files in a fixed order.
pub(crate) fn checksum_dir(dir: &Path) -> Result<String> {
    let mut hasher = Sha256::new();
    for path in source_files(dir) {
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    Ok(hex(&hasher.finalize()))
}

pub(crate) fn load_dir(dir: &Path) -> Result<TaxonomyIndex> {
    let mut lemma_offsets: BTreeMap<String, BTreeMap<Pos, Vec<SynsetId>>> = BTreeMap::new();
    let mut synsets = Vec::new();
    let mut hasher = Sha256::new();

    for section in SECTIONS {
        let suffix = section.file_suffix();
        let index_path = dir.join(format!("index.{suffix}"));
        let data_path = dir.join(format!("data.{suffix}"));
        let index_text = read(&index_path)?;
        let data_text = read(&data_path)?;
        for text in [&index_text, &data_text] {
            hasher.update((text.len() as u64).to_le_bytes());
            hasher.update(text.as_bytes());
        }
        parse_index(&index_path, &index_text, section, &mut lemma_offsets)?;
        parse_data(&data_path, &data_text, section, &mut synsets)?;
    }

    TaxonomyIndex::assemble(synsets, lemma_offsets, hex(&hasher.finalize()), dir)
}

fn is_header(line: &str) -> bool {
    line.starts_with(' ') || line.trim().is_empty()
}

fn parse_num<T>(
    path: &Path,
    line_no: usize,
    field: &str,
    tok: Option<&str>,
    radix16: bool,
) -> Result<T>
where
    T: TryFrom<u64>,
{
    let tok = tok.ok_or_else(|| Error::parse(path, line_no, format!("missing {field}")))?;
    let value = if radix16 {
        u64::from_str_radix(tok, 16)
    } else {
        tok.parse::<u64>()
    }
    .map_err(|_| Error::parse(path, line_no, format!("bad {field} {tok:?}")))?;
    T::try_from(value).map_err(|_| Error::parse(path, line_no, format!("{field} out of range")))
}

/// `lemma pos synset_cnt p_cnt [ptr_symbol...] sense_cnt tagsense_cnt offset...`
fn parse_index(
    path: &Path,
    text: &str,
    section: Pos,
    out: &mut BTreeMap<String, BTreeMap<Pos, Vec<SynsetId>>>,
) -> Result<()> {
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if is_header(line) {
            continue;
        }
        let mut toks = line.split_whitespace();
        let lemma = toks.next().unwrap_or_default();
        let pos_tok = toks.next();
        if pos_tok.and_then(|p| p.chars().next()).and_then(Pos::from_tag).map(Pos::section)
            != Some(section)
        {
            return Err(Error::parse(path, line_no, "part of speech does not match file"));
        }
        let synset_cnt: usize = parse_num(path, line_no, "synset_cnt", toks.next(), false)?;
        let p_cnt: usize = parse_num(path, line_no, "p_cnt", toks.next(), false)?;
        for _ in 0..p_cnt {
            toks.next();
        }
        let _sense_cnt: usize = parse_num(path, line_no, "sense_cnt", toks.next(), false)?;
        let _tagged: usize = parse_num(path, line_no, "tagsense_cnt", toks.next(), false)?;
        let mut ids = Vec::with_capacity(synset_cnt);
        for _ in 0..synset_cnt {
            let offset: u32 = parse_num(path, line_no, "synset_offset", toks.next(), false)?;
            ids.push(SynsetId::new(section, offset));
        }
        out.entry(lookup_key(lemma))
            .or_default()
            .entry(section)
            .or_default()
            .extend(ids);
    }
    Ok(())
}

/// Drops the `(a)`, `(p)`, `(ip)` syntactic markers of adjective lemmas.
fn strip_marker(word: &str) -> &str {
    match word.find('(') {
        Some(i) if word.ends_with(')') => &word[..i],
        _ => word,
    }
}

/// `offset lex_filenum ss_type w_cnt word lex_id ... p_cnt ptr... | gloss`
fn parse_data(path: &Path, text: &str, section: Pos, out: &mut Vec<Synset>) -> Result<()> {
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if is_header(line) {
            continue;
        }
        let body = line.split(" | ").next().unwrap_or(line);
        let mut toks = body.split_whitespace();
        let offset: u32 = parse_num(path, line_no, "synset_offset", toks.next(), false)?;
        toks.next(); // lex_filenum
        let pos = toks
            .next()
            .and_then(|t| t.chars().next())
            .and_then(Pos::from_tag)
            .filter(|p| p.section() == section)
            .ok_or_else(|| Error::parse(path, line_no, "ss_type does not match file"))?;
        let w_cnt: usize = parse_num(path, line_no, "w_cnt", toks.next(), true)?;
        let mut lemmas = Vec::with_capacity(w_cnt);
        for _ in 0..w_cnt {
            let word = toks
                .next()
                .ok_or_else(|| Error::parse(path, line_no, "truncated word list"))?;
            toks.next(); // lex_id
            lemmas.push(strip_marker(word).to_string());
        }
        if lemmas.is_empty() {
            return Err(Error::parse(path, line_no, "synset without lemmas"));
        }
        let p_cnt: usize = parse_num(path, line_no, "p_cnt", toks.next(), false)?;
        let mut hypernyms = Vec::new();
        let mut instance_hypernyms = Vec::new();
        for _ in 0..p_cnt {
            let symbol = toks.next();
            let target: u32 = parse_num(path, line_no, "pointer offset", toks.next(), false)?;
            let target_pos = toks
                .next()
                .and_then(|t| t.chars().next())
                .and_then(Pos::from_tag)
                .ok_or_else(|| Error::parse(path, line_no, "bad pointer pos"))?;
            toks.next(); // source/target
            let target = SynsetId::new(target_pos, target);
            match symbol {
                Some("@") => hypernyms.push(target),
                Some("@i") => instance_hypernyms.push(target),
                Some(_) => {}
                None => return Err(Error::parse(path, line_no, "truncated pointer list")),
            }
        }
        out.push(Synset {
            id: SynsetId::new(pos, offset),
            name: String::new(),
            lemmas,
            hypernyms,
            instance_hypernyms,
        });
    }
    Ok(())
}
