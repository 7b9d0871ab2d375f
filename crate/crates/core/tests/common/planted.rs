//! The planted 100-tweet induction corpus and brute-force recounts.

use std::collections::{BTreeMap, BTreeSet};

use concern_core::frames::{PropositionFrame, Role};
use concern_core::induction::Ranked;
use concern_core::io::Tweet;
use concern_core::text::{is_alphabetic_term, StopWords};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const VERBS: [(&str, u32); 8] = [
    ("ruin", 9),
    ("restrict", 7),
    ("protect", 6),
    ("support", 5),
    ("see", 8),
    ("raise", 4),
    ("block", 3),
    ("promise", 2),
];
pub const TOPICAL: [&str; 10] = [
    "economy", "business", "taxes", "migrants", "borders", "jobs", "pensions", "wages", "schools", "hospitals",
];
pub const OTHER: [&str; 8] = ["sky", "weather", "music", "film", "coffee", "garden", "holiday", "sunset"];
pub const NAMES: [&str; 4] = ["macron", "melenchon", "voters", "government"];

pub fn weighted<'a>(rng: &mut ChaCha8Rng, items: &[(&'a str, u32)]) -> &'a str {
    let total: u32 = items.iter().map(|(_, w)| w).sum();
    let mut x = rng.gen_range(0..total);
    for (item, w) in items {
        if x < *w {
            return item;
        }
        x -= w;
    }
    unreachable!()
}

/// 100 tweets; "see" only ever takes non-topical objects.
pub fn corpus() -> (Vec<Tweet>, Vec<PropositionFrame>) {
    let mut rng = ChaCha8Rng::seed_from_u64(2017);
    let topical: Vec<(&str, u32)> = TOPICAL.iter().enumerate().map(|(i, t)| (*t, 12 - i as u32)).collect();
    let mut tweets = Vec::new();
    let mut frames = Vec::new();
    for i in 0..100 {
        let id = format!("t{i:03}");
        let mut sentences = Vec::new();
        for s in 0..rng.gen_range(1..=3u32) {
            let verb = weighted(&mut rng, &VERBS);
            let subj = NAMES[rng.gen_range(0..NAMES.len())];
            let obj = if verb == "see" {
                OTHER[rng.gen_range(0..OTHER.len())]
            } else {
                weighted(&mut rng, &topical)
            };
            let obj2 = if verb != "see" && rng.gen_bool(0.3) { Some(weighted(&mut rng, &topical)) } else { None };
            let mut arg1 = vec!["the".to_string(), obj.to_string()];
            if let Some(o) = obj2 {
                arg1.extend(["and".to_string(), o.to_string()]);
            }
            sentences.push(format!("{subj} will {verb} {}.", arg1.join(" ")));
            frames.push(PropositionFrame {
                tweet_id: id.clone(),
                sentence_index: s,
                verb: verb.to_string(),
                spans: [
                    (Role::Arg0, vec![subj.to_string()]),
                    (Role::Verb, vec![verb.to_string()]),
                    (Role::Arg1, arg1),
                ]
                .into(),
                source: Default::default(),
            });
        }
        tweets.push(Tweet::new(id, sentences.join(" ")));
    }
    (tweets, frames)
}

pub fn content(tok: &str) -> bool {
    !StopWords::english().contains(tok) && is_alphabetic_term(tok)
}

pub fn sorted(counts: BTreeMap<String, usize>, k: usize) -> Vec<(String, usize)> {
    let mut v: Vec<(String, usize)> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v.truncate(k);
    v
}

pub fn args_of(f: &PropositionFrame) -> Vec<&String> {
    f.span(Role::Arg0).iter().chain(f.span(Role::Arg1)).collect()
}

pub fn oracle_terms(lists: &[Vec<String>], k: usize) -> Vec<(String, usize)> {
    let vocab: BTreeSet<&String> = lists.iter().flatten().collect();
    let counts = vocab
        .into_iter()
        .filter(|t| content(t))
        .map(|t| (t.clone(), lists.iter().flatten().filter(|x| *x == t).count()))
        .collect();
    sorted(counts, k)
}

pub fn oracle_verbs(frames: &[PropositionFrame], terms: &[String], k: usize, per_tweet: bool) -> Vec<(String, usize)> {
    let verbs: BTreeSet<&String> = frames.iter().map(|f| &f.verb).collect();
    let counts = verbs
        .into_iter()
        .map(|v| {
            let hits: Vec<&PropositionFrame> = frames
                .iter()
                .filter(|f| &f.verb == v && args_of(f).iter().any(|a| terms.contains(a)))
                .collect();
            let n = if per_tweet {
                hits.iter().map(|f| &f.tweet_id).collect::<BTreeSet<_>>().len()
            } else {
                hits.len()
            };
            (v.clone(), n)
        })
        .collect();
    sorted(counts, k)
}

pub fn oracle_candidates(frames: &[PropositionFrame], verbs: &[String], k: usize, per_tweet: bool) -> Vec<(String, usize, Vec<String>)> {
    let mut out = Vec::new();
    for v in verbs {
        let vf: Vec<&PropositionFrame> = frames.iter().filter(|f| &f.verb == v).collect();
        let argset: BTreeSet<&String> = vf.iter().flat_map(|f| args_of(f)).filter(|a| content(a)).collect();
        let counts = argset
            .iter()
            .map(|a| {
                let hits: Vec<&&PropositionFrame> = vf.iter().filter(|f| args_of(f).contains(a)).collect();
                let n = if per_tweet {
                    hits.iter().map(|f| &f.tweet_id).collect::<BTreeSet<_>>().len()
                } else {
                    hits.len()
                };
                ((*a).clone(), n)
            })
            .collect();
        for (a, n) in sorted(counts, k) {
            let mut ex: Vec<String> = Vec::new();
            for f in vf.iter().filter(|f| args_of(f).contains(&&a)) {
                if ex.len() < 3 && !ex.contains(&f.tweet_id) {
                    ex.push(f.tweet_id.clone());
                }
            }
            out.push((format!("{v}({a})"), n, ex));
        }
    }
    out
}

pub fn ranked(r: &[Ranked]) -> Vec<(String, usize)> {
    r.iter().map(|r| (r.term.clone(), r.count)).collect()
}
