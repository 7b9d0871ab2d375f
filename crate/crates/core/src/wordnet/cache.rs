//! Versioned binary cache of a parsed index, keyed by the checksum of the
//! database files it came from.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{parse, LemmaSenses, Pos, Synset, SynsetId, TaxonomyIndex};
use crate::error::{Error, Result};

pub const CACHE_FORMAT_VERSION: u32 = 1;
const MAGIC: [u8; 8] = *b"CNCRNWN\0";

#[derive(Serialize, Deserialize)]
struct Image {
    magic: [u8; 8],
    version: u32,
    source_checksum: String,
    synsets: Vec<Synset>,
    lemmas: Vec<(String, LemmaSenses)>,
}

pub(crate) fn encode(index: &TaxonomyIndex) -> Vec<u8> {
    let image = Image {
        magic: MAGIC,
        version: CACHE_FORMAT_VERSION,
        source_checksum: index.source_checksum.clone(),
        synsets: index.synsets.clone(),
        lemmas: index
            .lemmas
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect(),
    };
    bincode::serialize(&image).expect("in-memory serialization cannot fail")
}

fn decode_image(bytes: &[u8]) -> Option<Image> {
    let image: Image = bincode::deserialize(bytes).ok()?;
    (image.magic == MAGIC && image.version == CACHE_FORMAT_VERSION).then_some(image)
}

pub(crate) fn decode(bytes: &[u8]) -> Result<TaxonomyIndex> {
    let image = decode_image(bytes).ok_or_else(|| Error::StaleCache {
        path: "<bytes>".into(),
    })?;
    rebuild(image)
}

fn rebuild(image: Image) -> Result<TaxonomyIndex> {
    let ids: Vec<SynsetId> = image.synsets.iter().map(|s| s.id).collect();
    let mut lemma_offsets: BTreeMap<String, BTreeMap<Pos, Vec<SynsetId>>> = BTreeMap::new();
    for (lemma, senses) in image.lemmas {
        let per_pos = lemma_offsets.entry(lemma).or_default();
        for section in parse::SECTIONS {
            let list = senses.get(section);
            if !list.is_empty() {
                per_pos.insert(section, list.iter().map(|&i| ids[i as usize]).collect());
            }
        }
    }
    TaxonomyIndex::assemble(
        image.synsets,
        lemma_offsets,
        image.source_checksum,
        Path::new("<cache>"),
    )
}

pub(crate) fn load_cached(dir: &Path, cache: &Path) -> Result<TaxonomyIndex> {
    let checksum = parse::checksum_dir(dir)?;
    if let Ok(bytes) = fs::read(cache) {
        if let Some(image) = decode_image(&bytes) {
            if image.source_checksum == checksum {
                return rebuild(image);
            }
        }
        log::info!("rebuilding stale WordNet cache {}", cache.display());
    }
    let index = parse::load_dir(dir)?;
    fs::write(cache, encode(&index)).map_err(|e| Error::io(cache, e))?;
    Ok(index)
}
