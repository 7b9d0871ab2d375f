//! Wu-Palmer similarity.
//!
//! Mirrors the reference WordNet toolkit: the subsumer is the common
//! hypernym with the greatest minimum depth, its depth is its maximum depth
//! plus one, and each synset contributes its shortest hypernym distance to
//! the subsumer. Taxonomies other than nouns get a simulated root above all
//! of their roots; nouns get one only when two synsets share no ancestor.

use std::collections::VecDeque;

use super::{Pos, TaxonomyIndex};

const ROOT_NAME: &str = "*ROOT*";

/// Shortest hypernym distances from one synset to each of its ancestors
/// (itself included at distance 0), sorted by synset index.
#[derive(Debug, Clone)]
pub(crate) struct Ancestry {
    pub idx: u32,
    pub taxonomy: Pos,
    dist: Vec<(u32, u32)>,
    max_dist: u32,
}

impl Ancestry {
    pub fn of(index: &TaxonomyIndex, idx: u32) -> Self {
        let mut dist: Vec<(u32, u32)> = Vec::new();
        let mut queue = VecDeque::from([(idx, 0u32)]);
        while let Some((node, d)) = queue.pop_front() {
            if dist.iter().any(|&(n, _)| n == node) {
                continue;
            }
            dist.push((node, d));
            for &p in index.parents_of(node) {
                queue.push_back((p, d + 1));
            }
        }
        let max_dist = dist.iter().map(|&(_, d)| d).max().unwrap_or(0);
        dist.sort_unstable();
        Ancestry {
            idx,
            taxonomy: index.synset_at(idx).pos().section(),
            dist,
            max_dist,
        }
    }

    fn get(&self, node: u32) -> Option<u32> {
        self.dist
            .binary_search_by_key(&node, |&(n, _)| n)
            .ok()
            .map(|i| self.dist[i].1)
    }

    fn common(&self, other: &Ancestry) -> Vec<u32> {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.dist.len() && j < other.dist.len() {
            let (a, b) = (self.dist[i].0, other.dist[j].0);
            match a.cmp(&b) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Subsumer {
    Root,
    Synset(u32),
}

pub(crate) fn wup(index: &TaxonomyIndex, a: &Ancestry, b: &Ancestry) -> Option<f64> {
    if a.taxonomy != b.taxonomy {
        return None;
    }
    if a.idx == b.idx {
        return Some(1.0);
    }
    let common = a.common(b);
    let simulate_root = a.taxonomy != Pos::Noun || common.is_empty();

    let best = common
        .iter()
        .map(|&c| index.min_depth_of(c))
        .max()
        .unwrap_or(0);
    let mut candidates: Vec<Subsumer> = common
        .iter()
        .filter(|&&c| index.min_depth_of(c) == best)
        .map(|&c| Subsumer::Synset(c))
        .collect();
    if simulate_root && best == 0 {
        candidates.push(Subsumer::Root);
    }

    let subsumer = if candidates.contains(&Subsumer::Synset(a.idx)) {
        Subsumer::Synset(a.idx)
    } else if candidates.contains(&Subsumer::Synset(b.idx)) {
        Subsumer::Synset(b.idx)
    } else {
        *candidates.iter().min_by(|x, y| name(index, **x).cmp(name(index, **y)))?
    };

    let depth = match subsumer {
        Subsumer::Root => 1,
        Subsumer::Synset(s) => index.max_depth_of(s) + 1,
    };
    let len_a = distance_to(index, a, subsumer, simulate_root);
    let len_b = distance_to(index, b, subsumer, simulate_root);
    let depth = f64::from(depth);
    Some(2.0 * depth / (f64::from(len_a + len_b) + 2.0 * depth))
}

fn name(index: &TaxonomyIndex, node: Subsumer) -> &str {
    match node {
        Subsumer::Root => ROOT_NAME,
        Subsumer::Synset(i) => &index.synset_at(i).name,
    }
}

/// Shortest path from `from` to the subsumer through any shared ancestor.
fn distance_to(index: &TaxonomyIndex, from: &Ancestry, to: Subsumer, simulate_root: bool) -> u32 {
    match to {
        Subsumer::Root => from.max_dist + 1,
        Subsumer::Synset(s) if s == from.idx => 0,
        Subsumer::Synset(s) => {
            let target = Ancestry::of(index, s);
            let mut best = from
                .dist
                .iter()
                .filter_map(|&(n, d)| target.get(n).map(|t| d + t))
                .min()
                .unwrap_or(u32::MAX);
            if simulate_root {
                best = best.min(from.max_dist + 1 + target.max_dist + 1);
            }
            best
        }
    }
}

/// Possible subsumer of a pair: a synset, or the simulated root of a
/// taxonomy.
pub(crate) type SubsumerKey = (Pos, Option<u32>);

/// Every subsumer through which a pair containing `a` could score at least
/// `threshold`. Two synsets can only reach the threshold if they share a key.
///
/// With subsumer depth `d`, a score of at least `t` needs
/// `len_a + len_b <= 2d(1 - t)/t`, so `a` is keyed under each ancestor whose
/// path length alone fits that budget.
pub(crate) fn subsumer_keys(index: &TaxonomyIndex, a: &Ancestry, threshold: f64) -> Vec<SubsumerKey> {
    let budget = |depth: u32| 2.0 * f64::from(depth) * (1.0 - threshold) / threshold + 1e-9;
    let mut keys = Vec::new();
    for &(node, _) in &a.dist {
        let len = distance_to(index, a, Subsumer::Synset(node), true);
        if f64::from(len) <= budget(index.max_depth_of(node) + 1) {
            keys.push((a.taxonomy, Some(node)));
        }
    }
    if f64::from(a.max_dist + 1) <= budget(1) {
        keys.push((a.taxonomy, None));
    }
    keys
}
