//! WordNet taxonomy index.
//!
//! The index is built once from the `index.*` and `data.*` database files
//! (or from an in-memory [`TaxonomyBuilder`] for fixtures) and never mutated
//! afterwards.

mod cache;
mod morph;
mod parse;
mod similarity;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::lookup_key;

pub use cache::CACHE_FORMAT_VERSION;
pub(crate) use similarity::{subsumer_keys, wup, Ancestry, SubsumerKey};

/// WordNet version recorded in lexicon provenance.
pub const WORDNET_VERSION: &str = "3.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pos {
    Noun,
    Verb,
    Adjective,
    AdjectiveSatellite,
    Adverb,
}

impl Pos {
    /// Sections in which lookups run, in lookup order.
    pub const LOOKUP_ORDER: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adjective, Pos::Adverb];

    pub fn tag(self) -> char {
        match self {
            Pos::Noun => 'n',
            Pos::Verb => 'v',
            Pos::Adjective => 'a',
            Pos::AdjectiveSatellite => 's',
            Pos::Adverb => 'r',
        }
    }

    pub fn from_tag(tag: char) -> Option<Pos> {
        Some(match tag {
            'n' => Pos::Noun,
            'v' => Pos::Verb,
            'a' => Pos::Adjective,
            's' => Pos::AdjectiveSatellite,
            'r' => Pos::Adverb,
            _ => return None,
        })
    }

    /// Database section the synset lives in; satellites share the adjective files.
    pub fn section(self) -> Pos {
        match self {
            Pos::AdjectiveSatellite => Pos::Adjective,
            other => other,
        }
    }

    pub(crate) fn file_suffix(self) -> &'static str {
        match self.section() {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adverb => "adv",
            _ => "adj",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

/// Database identity of a synset: section tag plus byte offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SynsetId {
    pub offset: u32,
    pub pos: Pos,
}

impl SynsetId {
    pub fn new(pos: Pos, offset: u32) -> Self {
        SynsetId { offset, pos }
    }
}

impl Ord for SynsetId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.offset, self.pos.tag()).cmp(&(other.offset, other.pos.tag()))
    }
}

impl PartialOrd for SynsetId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08}-{}", self.offset, self.pos.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Synset {
    pub id: SynsetId,
    /// Conventional `lemma.pos.NN` name, e.g. `dog.n.01`.
    pub name: String,
    /// Lemma strings in database order; the first one names the synset.
    pub lemmas: Vec<String>,
    pub hypernyms: Vec<SynsetId>,
    pub instance_hypernyms: Vec<SynsetId>,
}

impl Synset {
    pub fn pos(&self) -> Pos {
        self.id.pos
    }

    pub fn first_lemma(&self) -> &str {
        &self.lemmas[0]
    }

    /// First lemma as a lookup key (lowercase, underscores).
    pub fn first_lemma_key(&self) -> String {
        lookup_key(&self.lemmas[0])
    }
}

/// Synset indices per lookup section for one lemma, in sense order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct LemmaSenses {
    pub noun: Vec<u32>,
    pub verb: Vec<u32>,
    pub adj: Vec<u32>,
    pub adv: Vec<u32>,
}

impl LemmaSenses {
    pub fn get(&self, section: Pos) -> &[u32] {
        match section.section() {
            Pos::Noun => &self.noun,
            Pos::Verb => &self.verb,
            Pos::Adverb => &self.adv,
            _ => &self.adj,
        }
    }

    pub fn get_mut(&mut self, section: Pos) -> &mut Vec<u32> {
        match section.section() {
            Pos::Noun => &mut self.noun,
            Pos::Verb => &mut self.verb,
            Pos::Adverb => &mut self.adv,
            _ => &mut self.adj,
        }
    }
}

/// Immutable WordNet graph with lemma lookup and depth tables.
#[derive(Debug, Clone)]
pub struct TaxonomyIndex {
    synsets: Vec<Synset>,
    by_id: HashMap<SynsetId, u32>,
    by_name: HashMap<String, u32>,
    parents: Vec<Vec<u32>>,
    min_depth: Vec<u32>,
    max_depth: Vec<u32>,
    lemmas: BTreeMap<String, LemmaSenses>,
    max_depth_by_pos: BTreeMap<Pos, u32>,
    source_checksum: String,
}

impl TaxonomyIndex {
    /// Parses a WordNet database directory.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        parse::load_dir(dir.as_ref())
    }

    /// Loads through a binary cache file, rebuilding it when the database
    /// files changed or the cache format version differs.
    pub fn load_cached(dir: impl AsRef<Path>, cache: impl AsRef<Path>) -> Result<Self> {
        cache::load_cached(dir.as_ref(), cache.as_ref())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        cache::encode(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        cache::decode(bytes)
    }

    /// Assembles the index and derives depth tables. Synsets are sorted by id.
    pub(crate) fn assemble(
        mut synsets: Vec<Synset>,
        lemma_offsets: BTreeMap<String, BTreeMap<Pos, Vec<SynsetId>>>,
        source_checksum: String,
        origin: &Path,
    ) -> Result<Self> {
        synsets.sort_by_key(|s| s.id);
        let by_id: HashMap<SynsetId, u32> = synsets
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id, i as u32))
            .collect();

        let mut parents = Vec::with_capacity(synsets.len());
        for s in &synsets {
            let mut ps = Vec::new();
            for target in s.hypernyms.iter().chain(&s.instance_hypernyms) {
                let idx = by_id.get(target).ok_or(Error::DanglingPointer {
                    path: origin.to_path_buf(),
                    pos: target.pos.tag(),
                    offset: target.offset,
                })?;
                ps.push(*idx);
            }
            parents.push(ps);
        }

        let mut lemmas: BTreeMap<String, LemmaSenses> = BTreeMap::new();
        for (lemma, per_pos) in lemma_offsets {
            let entry = lemmas.entry(lemma).or_default();
            for (pos, ids) in per_pos {
                for id in ids {
                    // Index files list satellites under the adjective section.
                    let idx = by_id
                        .get(&id)
                        .or_else(|| {
                            (pos == Pos::Adjective)
                                .then(|| by_id.get(&SynsetId::new(Pos::AdjectiveSatellite, id.offset)))
                                .flatten()
                        })
                        .ok_or(Error::DanglingPointer {
                            path: origin.to_path_buf(),
                            pos: pos.tag(),
                            offset: id.offset,
                        })?;
                    entry.get_mut(pos).push(*idx);
                }
            }
        }

        let (min_depth, max_depth) = depths(&synsets, &parents)?;

        let mut max_depth_by_pos = BTreeMap::new();
        for (i, s) in synsets.iter().enumerate() {
            let e = max_depth_by_pos.entry(s.pos().section()).or_insert(0);
            *e = (*e).max(max_depth[i]);
        }

        let mut index = TaxonomyIndex {
            synsets,
            by_id,
            by_name: HashMap::new(),
            parents,
            min_depth,
            max_depth,
            lemmas,
            max_depth_by_pos,
            source_checksum,
        };
        index.assign_names();
        Ok(index)
    }

    /// Names follow the `first_lemma.pos.NN` convention where `NN` is the
    /// synset's position in the first lemma's sense list.
    fn assign_names(&mut self) {
        let mut by_name = HashMap::with_capacity(self.synsets.len());
        for i in 0..self.synsets.len() {
            let s = &self.synsets[i];
            let key = s.first_lemma_key();
            // Satellites are numbered among the lemma's satellite senses only.
            let satellite = s.pos() == Pos::AdjectiveSatellite;
            let sense = self
                .lemmas
                .get(&key)
                .and_then(|senses| {
                    senses
                        .get(s.pos())
                        .iter()
                        .filter(|&&x| {
                            !satellite
                                || self.synsets[x as usize].pos() == Pos::AdjectiveSatellite
                        })
                        .position(|&x| x as usize == i)
                })
                .map_or(1, |p| p + 1);
            let name = format!("{}.{}.{:02}", key, s.pos().tag(), sense);
            by_name.insert(name.clone(), i as u32);
            self.synsets[i].name = name;
        }
        self.by_name = by_name;
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.iter()
    }

    pub fn synset(&self, id: &SynsetId) -> Option<&Synset> {
        self.by_id.get(id).map(|&i| &self.synsets[i as usize])
    }

    /// Looks a synset up by its `lemma.pos.NN` name.
    pub fn synset_by_name(&self, name: &str) -> Option<&Synset> {
        self.by_name.get(name).map(|&i| &self.synsets[i as usize])
    }

    pub fn max_depth_by_pos(&self) -> &BTreeMap<Pos, u32> {
        &self.max_depth_by_pos
    }

    /// Hex SHA-256 over the database files the index was built from.
    pub fn source_checksum(&self) -> &str {
        &self.source_checksum
    }

    /// Number of distinct lemma keys.
    pub fn lemma_count(&self) -> usize {
        self.lemmas.len()
    }

    pub fn contains_lemma(&self, word: &str) -> bool {
        self.lemmas.contains_key(&lookup_key(word))
    }

    /// All synsets for a word across parts of speech.
    ///
    /// Synsets listing the word form itself come first (noun, verb,
    /// adjective, adverb; sense order within each), followed by synsets of
    /// its regular morphological base forms. Unknown words yield an empty
    /// list.
    pub fn synsets_of(&self, word: &str) -> Vec<&Synset> {
        self.synset_indices_of(word)
            .into_iter()
            .map(|i| &self.synsets[i as usize])
            .collect()
    }

    /// Synsets of `word` whose first lemma is the word itself.
    pub fn lemma_matched_synsets(&self, word: &str) -> Vec<&Synset> {
        let key = lookup_key(word);
        self.synsets_of(&key)
            .into_iter()
            .filter(|s| s.first_lemma_key() == key)
            .collect()
    }

    pub(crate) fn synset_indices_of(&self, word: &str) -> Vec<u32> {
        let key = lookup_key(word);
        if key.is_empty() {
            return Vec::new();
        }
        let mut out: Vec<u32> = Vec::new();
        let push = |idx: u32, out: &mut Vec<u32>| {
            if !out.contains(&idx) {
                out.push(idx);
            }
        };
        if let Some(senses) = self.lemmas.get(&key) {
            for pos in Pos::LOOKUP_ORDER {
                for &i in senses.get(pos) {
                    push(i, &mut out);
                }
            }
        }
        for pos in Pos::LOOKUP_ORDER {
            for base in morph::base_forms(&key, pos) {
                if base == key {
                    continue;
                }
                if let Some(senses) = self.lemmas.get(&base) {
                    for &i in senses.get(pos) {
                        push(i, &mut out);
                    }
                }
            }
        }
        out
    }

    pub(crate) fn index_of(&self, id: &SynsetId) -> Option<u32> {
        self.by_id.get(id).copied()
    }

    pub(crate) fn synset_at(&self, idx: u32) -> &Synset {
        &self.synsets[idx as usize]
    }

    pub(crate) fn parents_of(&self, idx: u32) -> &[u32] {
        &self.parents[idx as usize]
    }

    pub(crate) fn min_depth_of(&self, idx: u32) -> u32 {
        self.min_depth[idx as usize]
    }

    pub(crate) fn max_depth_of(&self, idx: u32) -> u32 {
        self.max_depth[idx as usize]
    }

    /// Wu-Palmer similarity of two synsets.
    ///
    /// `Ok(None)` means no score: the synsets sit in different part-of-speech
    /// taxonomies. Adjective and satellite synsets share one taxonomy.
    pub fn wup_similarity(&self, a: &SynsetId, b: &SynsetId) -> Result<Option<f64>> {
        let ia = self
            .index_of(a)
            .ok_or_else(|| Error::UnknownSynset(a.to_string()))?;
        let ib = self
            .index_of(b)
            .ok_or_else(|| Error::UnknownSynset(b.to_string()))?;
        Ok(similarity::wup(self, &Ancestry::of(self, ia), &Ancestry::of(self, ib)))
    }
}

/// Minimum and maximum hypernym depth of every synset; roots are depth 0.
fn depths(synsets: &[Synset], parents: &[Vec<u32>]) -> Result<(Vec<u32>, Vec<u32>)> {
    const UNSEEN: u8 = 0;
    const ACTIVE: u8 = 1;
    const DONE: u8 = 2;
    let n = parents.len();
    let mut state = vec![UNSEEN; n];
    let mut min_d = vec![0u32; n];
    let mut max_d = vec![0u32; n];
    for start in 0..n {
        if state[start] == DONE {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        state[start] = ACTIVE;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if let Some(&p) = parents[node].get(*next) {
                *next += 1;
                let p = p as usize;
                match state[p] {
                    ACTIVE => return Err(Error::Cycle(synsets[p].id.to_string())),
                    UNSEEN => {
                        state[p] = ACTIVE;
                        stack.push((p, 0));
                    }
                    _ => {}
                }
            } else {
                let ps = &parents[node];
                if !ps.is_empty() {
                    min_d[node] = 1 + ps.iter().map(|&p| min_d[p as usize]).min().unwrap_or(0);
                    max_d[node] = 1 + ps.iter().map(|&p| max_d[p as usize]).max().unwrap_or(0);
                }
                state[node] = DONE;
                stack.pop();
            }
        }
    }
    Ok((min_d, max_d))
}

/// Builds small in-memory taxonomies, mainly for fixtures.
///
/// Offsets are assigned sequentially; sense order follows insertion order.
#[derive(Debug, Default)]
pub struct TaxonomyBuilder {
    synsets: Vec<Synset>,
}

impl TaxonomyBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, pos: Pos, lemmas: &[&str], hypernyms: &[SynsetId]) -> SynsetId {
        let id = SynsetId::new(pos, (self.synsets.len() as u32 + 1) * 100);
        self.synsets.push(Synset {
            id,
            name: String::new(),
            lemmas: lemmas.iter().map(|l| l.to_string()).collect(),
            hypernyms: hypernyms.to_vec(),
            instance_hypernyms: Vec::new(),
        });
        id
    }

    pub fn build(self) -> Result<TaxonomyIndex> {
        let mut lemma_offsets: BTreeMap<String, BTreeMap<Pos, Vec<SynsetId>>> = BTreeMap::new();
        for s in &self.synsets {
            if s.lemmas.is_empty() {
                return Err(Error::Config(format!("synset {} has no lemmas", s.id)));
            }
            for lemma in &s.lemmas {
                let ids = lemma_offsets
                    .entry(lookup_key(lemma))
                    .or_default()
                    .entry(s.pos().section())
                    .or_default();
                if !ids.contains(&s.id) {
                    ids.push(s.id);
                }
            }
        }
        TaxonomyIndex::assemble(
            self.synsets,
            lemma_offsets,
            String::from("in-memory"),
            Path::new("<builder>"),
        )
    }
}
