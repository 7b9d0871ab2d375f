use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::net::SocketAddr;
use std::path::Path;

use anyhow::{bail, Context, Result};
use concern_core::detection::{DetectionConfig, DetectionScope, Detector};
use concern_core::evaluation::{self, Against, GroundTruthRecord, Mode};
use concern_core::frames::{group_by_tweet, heuristic_extract, ingest_srl, write_frames, PropositionFrame};
use concern_core::induction::{
    import_curation, induce, read_assignments, read_labels, CandidateFile, ConcernTypeLexicon, InductionConfig,
};
use concern_core::io::{read_json, read_tweets, write_json, write_jsonl, Tweet};
use concern_core::lexicon::{
    expand, expansion_candidates, import_moralstrength, load_baseline, load_lexicon, write_baseline,
    ExpansionConfig, Variant,
};
use concern_core::wordnet::TaxonomyIndex;
use concern_curation::ServeConfig;

use crate::{AgainstArg, Command, GtArgs, ModeArg, ScopeArg};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Extract { tweets, srl, out } => extract(&tweets, srl.as_deref(), &out),
        Command::Expand {
            variant,
            threshold,
            baseline,
            frames,
            wordnet,
            cache,
            serial,
            out,
        } => {
            let cfg = ExpansionConfig {
                similarity_threshold: threshold,
                parallel: !serial,
                ..Default::default()
            };
            let variant = Variant::from_number(variant).context("variant must be 2, 3 or 4")?;
            run_expand(variant, &cfg, &baseline, &frames, &wordnet, cache.as_deref(), &out)
        }
        Command::Induce {
            tweets,
            srl,
            config,
            out_candidates,
        } => run_induce(&tweets, &srl, &config, &out_candidates),
        Command::CompileLexicon {
            candidates,
            assignments,
            labels,
            out,
        } => compile_lexicon(&candidates, &assignments, labels.as_deref(), &out),
        Command::Detect {
            tweets,
            srl,
            concern_lexicon,
            moral_lexicon,
            scope,
            legacy_labels,
            show,
            serial,
            out,
        } => {
            let scope = match scope {
                ScopeArg::Proposition => DetectionScope::Proposition,
                ScopeArg::FullText => DetectionScope::FullText,
            };
            let tweets = read_tweets(&tweets)?;
            let frames = srl.as_deref().map(load_frames).transpose()?;
            let detector = Detector::new(
                ConcernTypeLexicon::load(&concern_lexicon)?,
                load_lexicon(&moral_lexicon)?,
                DetectionConfig {
                    scope,
                    ..Default::default()
                },
            );
            let grouped = frames.map(group_by_tweet);
            let records = detector.detect_all(&tweets, grouped.as_ref(), !serial);
            write_jsonl(&out, &records)?;
            if show {
                let stdout = std::io::stdout();
                let mut w = stdout.lock();
                for (t, r) in tweets.iter().zip(&records) {
                    writeln!(w, "{}\n", r.render(&t.text, legacy_labels))?;
                }
            }
            let with_concern = records.iter().filter(|r| !r.concern_types.is_empty()).count();
            let with_moral = records.iter().filter(|r| !r.moral_hits.is_empty()).count();
            eprintln!(
                "{} tweets: {with_concern} with a concern type, {with_moral} with a moral value",
                records.len()
            );
            Ok(())
        }
        Command::Evaluate {
            preds,
            gt,
            mode,
            against,
            system,
            unweighted,
            out,
        } => {
            let mode = mode_of(mode);
            let against = against_of(against, mode);
            let gt = load_gt(&gt)?;
            let preds = evaluation::read_predictions(&preds)?;
            let name = system.unwrap_or_else(|| match mode {
                Mode::Concern => "concern".into(),
                Mode::Moral => "moral".into(),
            });
            let report = evaluation::evaluate(mode, &preds, &gt, against, &name)?;
            print!("{}", report.render_table(!unweighted));
            if let Some(out) = out {
                write_json(&out, &report)?;
            }
            Ok(())
        }
        Command::Significance {
            preds_a,
            preds_b,
            gt,
            mode,
            against,
            out,
        } => {
            let mode = mode_of(mode);
            let against = against_of(against, mode);
            let gt = load_gt(&gt)?;
            let a = evaluation::read_predictions(&preds_a)?;
            let b = evaluation::read_predictions(&preds_b)?;
            let m = evaluation::significance(mode, &a, &b, &gt, against)?;
            println!(
                "b = {} (A right, B wrong), c = {} (A wrong, B right)\nchi-square = {:.4}\np = {:.5} ({})",
                m.b,
                m.c,
                m.statistic,
                m.p_value,
                if m.exact { "exact binomial" } else { "chi-square, continuity-corrected" }
            );
            if let Some(out) = out {
                write_json(&out, &m)?;
            }
            Ok(())
        }
        Command::Serve {
            candidates,
            labels,
            state,
            port,
            host,
            token,
            ui,
        } => {
            let config = ServeConfig {
                candidates,
                labels,
                state_dir: state,
                token,
                ui_dir: ui,
            };
            let addr = SocketAddr::new(host, port);
            eprintln!("serving curation on http://{addr}");
            tokio::runtime::Runtime::new()?.block_on(concern_curation::serve(&config, addr))?;
            Ok(())
        }
        Command::ImportMoralstrength { dir, out } => {
            let (lex, report) = import_moralstrength(&dir)?;
            if lex.is_empty() {
                bail!("no MoralStrength entries found in {}", dir.display());
            }
            let mut w = BufWriter::new(File::create(&out).with_context(|| format!("creating {}", out.display()))?);
            write_baseline(&lex, &mut w)?;
            w.flush()?;
            eprintln!(
                "{} entries written, {} rows rejected, {} duplicates replaced",
                lex.len(),
                report.rejected.len(),
                report.duplicates.len()
            );
            Ok(())
        }
        Command::RandomChooser {
            gt,
            mode,
            p,
            seed,
            labels,
            out,
        } => {
            let gt = load_gt(&gt)?;
            let ids: Vec<String> = gt.iter().map(|g| g.tweet_id.clone()).collect();
            let preds = match mode_of(mode) {
                Mode::Concern => {
                    let labels = match labels {
                        Some(path) => read_labels(path)?,
                        None => gt_labels(&gt),
                    };
                    evaluation::random_concern_chooser(&ids, &labels, p, seed)?
                }
                Mode::Moral => evaluation::random_moral_chooser(&ids, p, seed)?,
            };
            write_jsonl(&out, &preds)?;
            Ok(())
        }
        Command::Agreement { gt, labels, out } => {
            let gt = load_gt(&gt)?;
            let labels = labels.map(read_labels).transpose()?.unwrap_or_default();
            let k = evaluation::concern_agreement(&gt, &labels)?;
            for (label, v) in &k.per_label {
                println!("{label:<28} {v:>7.4}");
            }
            println!("{:<28} {:>7.4}", "macro", k.macro_kappa);
            if let Some(out) = out {
                write_json(&out, &k)?;
            }
            Ok(())
        }
    }
}

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Concern => Mode::Concern,
        ModeArg::Moral => Mode::Moral,
    }
}

fn against_of(a: Option<AgainstArg>, mode: Mode) -> Against {
    match a {
        None => Against::default_for(mode),
        Some(AgainstArg::Union) => Against::Union,
        Some(AgainstArg::A1) => Against::A1,
        Some(AgainstArg::A2) => Against::A2,
        Some(AgainstArg::Expert) => Against::Expert,
    }
}

fn gt_labels(gt: &[GroundTruthRecord]) -> Vec<String> {
    let set: BTreeSet<String> = gt.iter().flat_map(|g| g.concern_union()).collect();
    set.into_iter().collect()
}

fn load_gt(args: &GtArgs) -> Result<Vec<GroundTruthRecord>> {
    if let Some(path) = &args.gt {
        return Ok(evaluation::read_ground_truth(path)?);
    }
    match (&args.sheet_a1, &args.sheet_a2) {
        (Some(a1), Some(a2)) => {
            let a1 = evaluation::load_annotation_sheet(a1)?;
            let a2 = evaluation::load_annotation_sheet(a2)?;
            Ok(evaluation::merge_sheets(&a1, &a2, args.moral_from)?)
        }
        _ => bail!("give --gt or both --sheet-a1 and --sheet-a2"),
    }
}

fn load_frames(path: &Path) -> Result<Vec<PropositionFrame>> {
    let report = ingest_srl(path)?;
    for (line, reason) in &report.skipped {
        log::warn!("{}:{line}: skipped: {reason}", path.display());
    }
    for (role, n) in &report.dropped_roles {
        log::info!("dropped {n} {role} spans");
    }
    if !report.skipped.is_empty() {
        eprintln!("{}: {} malformed lines skipped", path.display(), report.skipped.len());
    }
    Ok(report.frames)
}

fn write_frames_file(path: &Path, frames: &[PropositionFrame]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    write_frames(&mut w, frames)?;
    w.flush()?;
    Ok(())
}

fn extract(tweets: &Path, srl: Option<&Path>, out: &Path) -> Result<()> {
    let tweets: Vec<Tweet> = read_tweets(tweets)?;
    let frames = match srl {
        Some(srl) => {
            let ids: BTreeSet<&str> = tweets.iter().map(|t| t.id.as_str()).collect();
            let (kept, unknown): (Vec<_>, Vec<_>) =
                load_frames(srl)?.into_iter().partition(|f| ids.contains(f.tweet_id.as_str()));
            if !unknown.is_empty() {
                log::warn!("{} frames refer to tweets not in the corpus and were left out", unknown.len());
            }
            kept
        }
        None => tweets.iter().flat_map(|t| heuristic_extract(&t.id, &t.text)).collect(),
    };
    write_frames_file(out, &frames)?;
    eprintln!("{} frames for {} tweets", frames.len(), tweets.len());
    Ok(())
}

fn run_expand(
    variant: Variant,
    cfg: &ExpansionConfig,
    baseline: &Path,
    frames: &Path,
    wordnet: &Path,
    cache: Option<&Path>,
    out: &Path,
) -> Result<()> {
    let (base, report) = load_baseline(baseline)?;
    if !report.rejected.is_empty() {
        eprintln!("{}: {} rows rejected", baseline.display(), report.rejected.len());
    }
    let frames = load_frames(frames)?;
    let candidates = expansion_candidates(&frames, cfg);
    let index = match cache {
        Some(cache) => TaxonomyIndex::load_cached(wordnet, cache)?,
        None => TaxonomyIndex::load(wordnet)?,
    };
    let lex = expand(variant, &candidates, &base, &index, cfg)?;
    lex.save(out)?;
    eprintln!(
        "{variant}: {} candidates, {} baseline entries, {} entries written",
        candidates.len(),
        base.len(),
        lex.len()
    );
    Ok(())
}

fn run_induce(tweets: &Path, srl: &Path, config: &Path, out: &Path) -> Result<()> {
    let cfg: InductionConfig = read_json(config)?;
    let tweets = read_tweets(tweets)?;
    let frames = load_frames(srl)?;
    let file = induce(&tweets, &frames, &cfg)?;
    write_json(out, &file)?;
    eprintln!(
        "{} candidates from {} verbs; {} key terms",
        file.candidates.len(),
        file.verbs.len(),
        file.key_terms.len()
    );
    Ok(())
}

fn compile_lexicon(candidates: &Path, assignments: &Path, labels: Option<&Path>, out: &Path) -> Result<()> {
    let cands = CandidateFile::load(candidates)?;
    let assignments = read_assignments(assignments)?;
    let labels = labels.map(read_labels).transpose()?;
    let (lex, report) = import_curation(&cands, labels.as_deref(), &assignments, None);
    lex.save(out)?;
    for (i, item, reason) in &report.rejected {
        eprintln!("assignment {i} ({item}) rejected: {reason}");
    }
    if !report.empty_labels.is_empty() {
        eprintln!("labels without triggers: {}", report.empty_labels.join(", "));
    }
    eprintln!("{} triggers across {} labels", lex.trigger_count(), lex.triggers.len());
    Ok(())
}
