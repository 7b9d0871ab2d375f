//! WordNet-based lexicon expansion (Moral 2, 3 and 4).
//!
//! Every candidate word `w` is compared with every baseline word `m`. The
//! variants differ only in the synset sets compared: lemma-matched synsets
//! (Moral 2), those expanded through their lemmas (Moral 3), or all
//! synsets expanded through their lemmas (Moral 4). The first lemma of each
//! candidate-side synset that reaches the threshold becomes a new term and
//! inherits the endorsement of its best-matching baseline word.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use super::{Foundation, MoralEntry, MoralLexicon, Variant};
use crate::error::{Error, Result};
use crate::frames::{PropositionFrame, Role, RoleScope};
use crate::text::{is_alphabetic_term, lookup_key, normalize_token, StopWords};
use crate::wordnet::{subsumer_keys, wup, Ancestry, SubsumerKey, Synset, SynsetId, TaxonomyIndex};

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionConfig {
    pub similarity_threshold: f64,
    /// Roles whose spans supply expansion candidates.
    pub candidate_positions: BTreeSet<Role>,
    /// Score synset pairs on the rayon pool. Output is identical either way.
    pub parallel: bool,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        ExpansionConfig {
            similarity_threshold: 0.9,
            candidate_positions: RoleScope::moral_values().roles,
            parallel: true,
        }
    }
}

impl ExpansionConfig {
    pub fn validate(&self) -> Result<()> {
        let t = self.similarity_threshold;
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Config(format!(
                "similarity threshold must be in (0, 1], got {t}"
            )));
        }
        Ok(())
    }
}

/// Unique content tokens from the configured role spans, in first
/// occurrence order.
pub fn expansion_candidates(frames: &[PropositionFrame], cfg: &ExpansionConfig) -> Vec<String> {
    let stop = StopWords::english();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for frame in frames {
        for (role, tokens) in &frame.spans {
            if !cfg.candidate_positions.contains(role) {
                continue;
            }
            for tok in tokens.iter().filter_map(|t| normalize_token(t)) {
                if stop.contains(&tok) || !is_alphabetic_term(&tok) {
                    continue;
                }
                if seen.insert(tok.clone()) {
                    out.push(tok);
                }
            }
        }
    }
    out
}

/// Synsets compared for `word` under a variant, in lookup order.
pub fn seed_synsets<'a>(index: &'a TaxonomyIndex, word: &str, variant: Variant) -> Vec<&'a Synset> {
    seed_indices(index, word, variant)
        .into_iter()
        .map(|i| index.synset_at(i))
        .collect()
}

fn seed_indices(index: &TaxonomyIndex, word: &str, variant: Variant) -> Vec<u32> {
    let key = lookup_key(word);
    let all = index.synset_indices_of(&key);
    let matched: Vec<u32> = all
        .iter()
        .copied()
        .filter(|&i| index.synset_at(i).first_lemma_key() == key)
        .collect();
    match variant {
        Variant::Moral1 => Vec::new(),
        Variant::Moral2 => matched,
        Variant::Moral3 => through_lemmas(index, &matched),
        Variant::Moral4 => through_lemmas(index, &all),
    }
}

/// All synsets of all lemmas of `seeds`.
fn through_lemmas(index: &TaxonomyIndex, seeds: &[u32]) -> Vec<u32> {
    let mut lemmas: Vec<String> = Vec::new();
    for &s in seeds {
        for l in &index.synset_at(s).lemmas {
            let l = lookup_key(l);
            if !lemmas.contains(&l) {
                lemmas.push(l);
            }
        }
    }
    let mut out: Vec<u32> = Vec::new();
    for l in &lemmas {
        for i in index.synset_indices_of(l) {
            if !out.contains(&i) {
                out.push(i);
            }
        }
    }
    out
}

/// Best match seen so far for one (new term, foundation).
#[derive(Debug, Clone)]
struct Best<'a> {
    similarity: f64,
    source: &'a str,
    pair: (SynsetId, SynsetId),
    endorsement: f64,
}

impl Best<'_> {
    /// Higher similarity, then smaller baseline term, then smaller synset ids.
    fn beats(&self, other: &Best<'_>) -> bool {
        self.similarity
            .total_cmp(&other.similarity)
            .reverse()
            .then_with(|| self.source.cmp(other.source))
            .then_with(|| self.pair.cmp(&other.pair))
            .is_lt()
    }
}

/// Expands `baseline` with the candidates' matching terms.
pub fn expand(
    variant: Variant,
    candidates: &[String],
    baseline: &MoralLexicon,
    index: &TaxonomyIndex,
    cfg: &ExpansionConfig,
) -> Result<MoralLexicon> {
    cfg.validate()?;
    if variant == Variant::Moral1 {
        return Err(Error::Config("Moral 1 is the baseline, not an expansion".into()));
    }
    if baseline.variant != Variant::Moral1 {
        return Err(Error::Config(format!(
            "expansion needs a baseline lexicon, got {}",
            baseline.variant
        )));
    }
    let threshold = cfg.similarity_threshold;

    // Candidate side: candidates already in the baseline are skipped.
    let mut xs: BTreeSet<u32> = BTreeSet::new();
    for w in candidates {
        let w = lookup_key(w);
        if w.is_empty() || baseline.contains_term(&w) {
            continue;
        }
        xs.extend(seed_indices(index, &w, variant));
    }

    // Baseline side: synset -> baseline words whose set contains it.
    let mut owners: BTreeMap<u32, Vec<&str>> = BTreeMap::new();
    for m in baseline.terms() {
        for y in seed_indices(index, m, variant) {
            owners.entry(y).or_default().push(m);
        }
    }
    if xs.is_empty() || owners.is_empty() {
        let mut out = baseline.clone();
        out.variant = variant;
        return Ok(out);
    }

    let universe: Vec<u32> = xs.iter().chain(owners.keys()).copied().collect::<BTreeSet<_>>().into_iter().collect();
    let ancestries: HashMap<u32, Ancestry> = if cfg.parallel {
        universe.par_iter().map(|&i| (i, Ancestry::of(index, i))).collect()
    } else {
        universe.iter().map(|&i| (i, Ancestry::of(index, i))).collect()
    };

    let mut blocks: HashMap<SubsumerKey, Vec<u32>> = HashMap::new();
    for &y in owners.keys() {
        for key in subsumer_keys(index, &ancestries[&y], threshold) {
            blocks.entry(key).or_default().push(y);
        }
    }

    let score = |x: u32| -> (u32, Vec<(u32, f64)>) {
        let ax = &ancestries[&x];
        let mut ys: Vec<u32> = subsumer_keys(index, ax, threshold)
            .iter()
            .filter_map(|k| blocks.get(k))
            .flatten()
            .copied()
            .collect();
        ys.sort_unstable();
        ys.dedup();
        let hits = ys
            .into_iter()
            .filter_map(|y| {
                let sim = wup(index, ax, &ancestries[&y])?;
                (sim >= threshold).then_some((y, sim))
            })
            .collect();
        (x, hits)
    };
    let xs: Vec<u32> = xs.into_iter().collect();
    let scored: Vec<(u32, Vec<(u32, f64)>)> = if cfg.parallel {
        xs.par_iter().map(|&x| score(x)).collect()
    } else {
        xs.iter().map(|&x| score(x)).collect()
    };

    let mut best: BTreeMap<(String, Foundation), Best<'_>> = BTreeMap::new();
    for (x, hits) in &scored {
        let sx = index.synset_at(*x);
        let term = sx.first_lemma_key();
        if baseline.contains_term(&term) {
            continue;
        }
        for &(y, similarity) in hits {
            let sy = index.synset_at(y);
            for &m in &owners[&y] {
                for entry in baseline.lookup(m) {
                    let cand = Best {
                        similarity,
                        source: m,
                        pair: (sx.id, sy.id),
                        endorsement: entry.endorsement,
                    };
                    let slot = best.entry((term.clone(), entry.foundation));
                    match slot {
                        std::collections::btree_map::Entry::Vacant(v) => {
                            v.insert(cand);
                        }
                        std::collections::btree_map::Entry::Occupied(mut o) => {
                            if cand.beats(o.get()) {
                                o.insert(cand);
                            }
                        }
                    }
                }
            }
        }
    }

    let mut out = baseline.clone();
    out.variant = variant;
    for ((term, foundation), b) in best {
        out.insert(MoralEntry {
            term,
            foundation,
            endorsement: b.endorsement,
            provenance: variant.provenance(),
            source_term: Some(b.source.to_string()),
            similarity: Some(b.similarity),
        });
    }
    Ok(out)
}

pub fn expand_moral2(
    candidates: &[String],
    baseline: &MoralLexicon,
    index: &TaxonomyIndex,
    cfg: &ExpansionConfig,
) -> Result<MoralLexicon> {
    expand(Variant::Moral2, candidates, baseline, index, cfg)
}

pub fn expand_moral3(
    candidates: &[String],
    baseline: &MoralLexicon,
    index: &TaxonomyIndex,
    cfg: &ExpansionConfig,
) -> Result<MoralLexicon> {
    expand(Variant::Moral3, candidates, baseline, index, cfg)
}

pub fn expand_moral4(
    candidates: &[String],
    baseline: &MoralLexicon,
    index: &TaxonomyIndex,
    cfg: &ExpansionConfig,
) -> Result<MoralLexicon> {
    expand(Variant::Moral4, candidates, baseline, index, cfg)
}
