//! Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

pub mod planted;

use concern_core::lexicon::{Foundation, MoralEntry, MoralLexicon, Variant};
use concern_core::text::lookup_key;
use concern_core::wordnet::{Pos, Synset, SynsetId, TaxonomyBuilder, TaxonomyIndex};

/// A 27-synset taxonomy with multiple inheritance, root-less verbs and
/// adjective satellites.
pub fn fixture() -> TaxonomyIndex {
    let mut b = TaxonomyBuilder::new();
    let n = Pos::Noun;
    let entity = b.add(n, &["entity"], &[]);
    let abstraction = b.add(n, &["abstraction"], &[entity]);
    let act = b.add(n, &["act", "deed"], &[entity]);
    let quality = b.add(n, &["quality"], &[abstraction]);
    let virtue = b.add(n, &["virtue", "good"], &[quality]);
    b.add(n, &["justice", "fairness"], &[virtue]);
    b.add(n, &["equity"], &[virtue]);
    b.add(n, &["kindness", "care"], &[virtue]);
    b.add(n, &["harm", "hurt"], &[act]);
    b.add(n, &["injury", "harm"], &[act, quality]);
    let crime = b.add(n, &["crime", "offense"], &[act]);
    b.add(n, &["fraud", "cheat"], &[crime]);
    b.add(n, &["theft", "larceny"], &[crime]);
    let concern = b.add(n, &["concern", "care"], &[quality]);
    b.add(n, &["worry", "concern"], &[concern]);
    b.add(n, &["care", "charge"], &[act]);

    let v = Pos::Verb;
    let vact = b.add(v, &["act", "move"], &[]);
    let vharm = b.add(v, &["harm", "hurt", "injure"], &[vact]);
    b.add(v, &["damage"], &[vharm]);
    b.add(v, &["cheat", "defraud"], &[vact]);
    b.add(v, &["concern", "refer", "pertain"], &[]);
    b.add(v, &["pertain", "relate"], &[]);
    b.add(v, &["care", "worry"], &[]);

    b.add(Pos::Adjective, &["concerned"], &[]);
    b.add(Pos::AdjectiveSatellite, &["implicated", "concerned"], &[]);
    b.add(Pos::Adjective, &["fair", "just"], &[]);
    b.add(Pos::AdjectiveSatellite, &["equitable", "fair"], &[]);
    b.build().unwrap()
}

/// Every root-to-synset hypernym path, each ending with the synset.
pub fn hypernym_paths(index: &TaxonomyIndex, s: &Synset) -> Vec<Vec<SynsetId>> {
    let parents: Vec<SynsetId> = s.hypernyms.iter().chain(&s.instance_hypernyms).copied().collect();
    if parents.is_empty() {
        return vec![vec![s.id]];
    }
    let mut out = Vec::new();
    for p in parents {
        for mut path in hypernym_paths(index, index.synset(&p).unwrap()) {
            path.push(s.id);
            out.push(path);
        }
    }
    out
}

fn taxonomy(pos: Pos) -> Pos {
    if pos == Pos::AdjectiveSatellite {
        Pos::Adjective
    } else {
        pos
    }
}

/// Node of a taxonomy as seen by the oracle; `None` is the simulated root.
type Node = Option<SynsetId>;

/// Wu-Palmer by enumerating every hypernym path of both synsets.
pub fn wup_oracle(index: &TaxonomyIndex, a: &Synset, b: &Synset) -> Option<f64> {
    if taxonomy(a.pos()) != taxonomy(b.pos()) {
        return None;
    }
    if a.id == b.id {
        return Some(1.0);
    }
    let paths_a = hypernym_paths(index, a);
    let paths_b = hypernym_paths(index, b);
    let ancestors = |paths: &[Vec<SynsetId>]| -> BTreeSet<SynsetId> {
        paths.iter().flatten().copied().collect()
    };
    let common: BTreeSet<SynsetId> = ancestors(&paths_a)
        .intersection(&ancestors(&paths_b))
        .copied()
        .collect();
    let simulate_root = a.pos() != Pos::Noun || common.is_empty();

    let depth_range = |id: &SynsetId| -> (usize, usize) {
        let lens: Vec<usize> = hypernym_paths(index, index.synset(id).unwrap())
            .iter()
            .map(|p| p.len() - 1)
            .collect();
        (*lens.iter().min().unwrap(), *lens.iter().max().unwrap())
    };
    let min_depth = |n: &Node| n.map_or(0, |id| depth_range(&id).0);
    let max_depth = |n: &Node| n.map_or(0, |id| depth_range(&id).1);

    let mut cands: Vec<Node> = common.iter().map(|&c| Some(c)).collect();
    if simulate_root {
        cands.push(None);
    }
    let deepest = cands.iter().map(min_depth).max()?;
    let cands: Vec<Node> = cands.into_iter().filter(|c| min_depth(c) == deepest).collect();
    let name = |n: &Node| n.map_or("*ROOT*".to_string(), |id| index.synset(&id).unwrap().name.clone());
    let lcs = if cands.contains(&Some(a.id)) {
        Some(a.id)
    } else if cands.contains(&Some(b.id)) {
        Some(b.id)
    } else {
        cands.into_iter().min_by_key(name)?
    };

    // Distance from a synset to every ancestor along its paths; the
    // simulated root sits one above the longest path.
    let distances = |paths: &[Vec<SynsetId>]| -> BTreeMap<Node, usize> {
        let mut d: BTreeMap<Node, usize> = BTreeMap::new();
        let mut longest = 0;
        for p in paths {
            longest = longest.max(p.len() - 1);
            for (i, id) in p.iter().enumerate() {
                let dist = p.len() - 1 - i;
                let e = d.entry(Some(*id)).or_insert(dist);
                *e = (*e).min(dist);
            }
        }
        if simulate_root {
            d.insert(None, longest + 1);
        }
        d
    };
    let path_len = |from: &Synset, to: Node| -> usize {
        if to == Some(from.id) {
            return 0;
        }
        let df = distances(&hypernym_paths(index, from));
        let dt = match to {
            Some(id) => distances(&hypernym_paths(index, index.synset(&id).unwrap())),
            None => BTreeMap::from([(None, 0)]),
        };
        df.iter()
            .filter_map(|(n, x)| dt.get(n).map(|y| x + y))
            .min()
            .unwrap()
    };
    let depth = (max_depth(&lcs) + 1) as f64;
    let (la, lb) = (path_len(a, lcs), path_len(b, lcs));
    Some(2.0 * depth / ((la + lb) as f64 + 2.0 * depth))
}

fn lemma_matched<'a>(index: &'a TaxonomyIndex, word: &str) -> Vec<&'a Synset> {
    index
        .synsets_of(word)
        .into_iter()
        .filter(|s| lookup_key(&s.lemmas[0]) == word)
        .collect()
}

fn via_lemmas<'a>(index: &'a TaxonomyIndex, seeds: Vec<&'a Synset>) -> Vec<&'a Synset> {
    let mut out: Vec<&Synset> = Vec::new();
    for s in seeds {
        for l in &s.lemmas {
            for t in index.synsets_of(l) {
                if !out.iter().any(|o| o.id == t.id) {
                    out.push(t);
                }
            }
        }
    }
    out
}

pub fn oracle_seeds<'a>(index: &'a TaxonomyIndex, word: &str, variant: Variant) -> Vec<&'a Synset> {
    let word = lookup_key(word);
    match variant {
        Variant::Moral1 => Vec::new(),
        Variant::Moral2 => lemma_matched(index, &word),
        Variant::Moral3 => via_lemmas(index, lemma_matched(index, &word)),
        Variant::Moral4 => via_lemmas(index, index.synsets_of(&word)),
    }
}

/// Every lemma of the fixture, plus one unknown word.
pub fn fixture_words() -> Vec<&'static str> {
    vec![
        "entity", "abstraction", "act", "quality", "virtue", "good", "justice", "fairness",
        "equity", "kindness", "care", "harm", "hurt", "injury", "crime", "offense", "fraud",
        "cheat", "theft", "larceny", "concern", "worry", "charge", "move", "injure", "damage",
        "defraud", "refer", "pertain", "relate", "concerned", "implicated", "fair", "just",
        "equitable", "deed", "unknownword",
    ]
}

/// (endorsement, source term, similarity) per (term, foundation), by
/// enumerating every (w, m, x, y) combination.
pub type OracleLexicon = BTreeMap<(String, Foundation), (f64, String, f64)>;

/// (similarity, baseline term, x, y, endorsement) of the best match.
type Match = (f64, String, SynsetId, SynsetId, f64);

pub fn oracle_expand(
    variant: Variant,
    candidates: &[String],
    baseline: &MoralLexicon,
    index: &TaxonomyIndex,
    threshold: f64,
) -> OracleLexicon {
    let mut out: OracleLexicon = baseline
        .entries()
        .map(|e| ((e.term.clone(), e.foundation), (e.endorsement, String::new(), 1.0)))
        .collect();
    let mut best: BTreeMap<(String, Foundation), Match> = BTreeMap::new();
    for w in candidates {
        let w = lookup_key(w);
        if baseline.contains_term(&w) {
            continue;
        }
        for m in baseline.terms() {
            for x in oracle_seeds(index, &w, variant) {
                for y in oracle_seeds(index, m, variant) {
                    let Some(sim) = wup_oracle(index, x, y) else { continue };
                    if sim < threshold {
                        continue;
                    }
                    let t = lookup_key(&x.lemmas[0]);
                    if baseline.contains_term(&t) {
                        continue;
                    }
                    for e in baseline.lookup(m) {
                        let cand = (sim, m.to_string(), x.id, y.id, e.endorsement);
                        let slot = best.entry((t.clone(), e.foundation)).or_insert(cand.clone());
                        let better = cand.0 > slot.0
                            || (cand.0 == slot.0 && (&cand.1, cand.2, cand.3) < (&slot.1, slot.2, slot.3));
                        if better {
                            *slot = cand;
                        }
                    }
                }
            }
        }
    }
    for (k, (sim, m, _, _, endorsement)) in best {
        out.insert(k, (endorsement, m, sim));
    }
    out
}

/// The expansion output in the oracle's shape.
pub fn as_oracle(lex: &MoralLexicon) -> OracleLexicon {
    lex.entries()
        .map(|e| {
            (
                (e.term.clone(), e.foundation),
                (
                    e.endorsement,
                    e.source_term.clone().unwrap_or_default(),
                    e.similarity.unwrap_or(1.0),
                ),
            )
        })
        .collect()
}

pub fn baseline_of(rows: &[(&str, Foundation, f64)]) -> MoralLexicon {
    let mut lex = MoralLexicon::new(Variant::Moral1);
    for &(t, f, e) in rows {
        lex.insert(MoralEntry::baseline(t, f, e));
    }
    lex
}

/// WordNet 3.0 directory: `$WORDNET_DIR`, else `<workspace>/data/wordnet-3.0`.
pub fn wordnet_dir() -> Option<PathBuf> {
    let dir = std::env::var_os("WORDNET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/wordnet-3.0"));
    dir.join("data.noun").is_file().then_some(dir)
}

/// The full WordNet index, loaded once per test binary.
pub fn wordnet() -> &'static TaxonomyIndex {
    static INDEX: std::sync::OnceLock<TaxonomyIndex> = std::sync::OnceLock::new();
    INDEX.get_or_init(|| {
        let dir = wordnet_dir().expect(
            "WordNet 3.0 not found: run scripts/fetch-wordnet.sh or set WORDNET_DIR",
        );
        let cache = std::env::temp_dir().join(format!("concern-wordnet-{}.bin", std::process::id()));
        let idx = TaxonomyIndex::load_cached(&dir, &cache).unwrap();
        let _ = std::fs::remove_file(cache);
        idx
    })
}
