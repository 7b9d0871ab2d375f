mod common;

use std::collections::BTreeSet;

use common::planted::*;
use concern_core::frames::PropositionFrame;
use concern_core::induction::*;
use concern_core::text::tokenize;

#[test]
fn planted_corpus_matches_brute_force() {
    let (tweets, frames) = corpus();
    let lists: Vec<Vec<String>> = tweets.iter().map(|t| tokenize(&t.text)).collect();
    let terms = top_content_terms(&lists, 12);
    assert_eq!(ranked(&terms), oracle_terms(&lists, 12));
    // Names rank high too; keep the topical terms so "see" is never reached.
    let term_list: Vec<String> = terms
        .iter()
        .map(|r| r.term.clone())
        .filter(|t| TOPICAL.contains(&t.as_str()))
        .collect();
    assert!(!term_list.is_empty());

    for unit in [CountUnit::Frame, CountUnit::Tweet] {
        let per_tweet = unit == CountUnit::Tweet;
        let verbs = top_verbs(&frames, &term_list, 40, unit);
        assert_eq!(ranked(&verbs), oracle_verbs(&frames, &term_list, 40, per_tweet));
        let verb_list: Vec<String> = verbs.iter().map(|r| r.term.clone()).collect();
        assert!(!verb_list.contains(&"see".to_string()));

        let cands = build_candidates(&frames, &verb_list, 3, unit);
        let got: Vec<(String, usize, Vec<String>)> =
            cands.iter().map(|c| (c.id.clone(), c.frequency, c.examples.clone())).collect();
        assert_eq!(got, oracle_candidates(&frames, &verb_list, 3, per_tweet));
        assert!(cands.len() <= verb_list.len() * 3);
        assert!(cands.iter().all(|c| c.frequency >= 1));
    }
}

#[test]
fn full_pipeline_bounds_and_determinism() {
    let (tweets, frames) = corpus();
    let cfg = InductionConfig {
        key_terms: TOPICAL.iter().map(|s| s.to_string()).collect(),
        train_size: 60,
        seed: 11,
        ..Default::default()
    };
    let a = induce(&tweets, &frames, &cfg).unwrap();
    let b = induce(&tweets, &frames, &cfg).unwrap();
    assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
    assert!(a.candidates.len() <= cfg.top_verbs * cfg.top_args);
    assert!(a.verbs.len() <= 40 && a.top_terms.len() <= 25);

    // Frequencies agree with a recount restricted to the training split.
    let subset = filter_corpus(&tweets, &cfg.key_terms);
    let (train, dev) = split_corpus(&subset, cfg.train_size, cfg.seed).unwrap();
    assert_eq!(train.len() + dev.len(), subset.len());
    let train_ids: BTreeSet<&str> = train.iter().map(|t| t.id.as_str()).collect();
    let train_frames: Vec<PropositionFrame> =
        frames.iter().filter(|f| train_ids.contains(f.tweet_id.as_str())).cloned().collect();
    let lists: Vec<Vec<String>> = train.iter().map(|t| tokenize(&t.text)).collect();
    assert_eq!(ranked(&a.top_terms), oracle_terms(&lists, 25));
    let term_list: Vec<String> = a.top_terms.iter().map(|r| r.term.clone()).collect();
    assert_eq!(ranked(&a.verbs), oracle_verbs(&train_frames, &term_list, 40, false));
    let recounted = recount(&train_frames, &a.candidates);
    for c in &a.candidates {
        assert_eq!(recounted[&c.id], c.frequency, "{}", c.id);
    }
}

#[test]
fn split_is_too_small() {
    let (tweets, _) = corpus();
    assert!(matches!(
        split_corpus(&tweets, 101, 1),
        Err(concern_core::Error::CorpusTooSmall { available: 100, requested: 101 })
    ));
}
