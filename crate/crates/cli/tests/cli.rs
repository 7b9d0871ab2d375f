use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use concern_curation::{Store, LOG_FILE};
use serde_json::Value;
use tempfile::TempDir;

fn concern(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_concern"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = concern(args);
    assert!(
        out.status.success(),
        "concern {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn jsonl(path: &Path) -> Vec<Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Work { dir: TempDir::new().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, content: &str) -> String {
        fs::write(self.path(name), content).unwrap();
        self.s(name)
    }
}

const TWEETS: &str = r#"{"id": "1", "text": "Where is the justice?"}
{"id": "2", "text": "Melenchon will ruin the economy and cheat voters."}
{"id": "3", "text": "Macron protects business and jobs."}
{"id": "4", "text": "The weather is lovely today."}
"#;

#[test]
fn heuristic_extraction() {
    let w = Work::new();
    let tweets = w.write("tweets.jsonl", TWEETS);
    ok(&["extract", "--tweets", &tweets, "--out", &w.s("frames.jsonl")]);
    let frames = jsonl(&w.path("frames.jsonl"));
    let first = &frames[0];
    assert_eq!(first["tweet_id"], "1");
    assert_eq!(first["verb"], "is");
    assert_eq!(first["spans"]["ARG1"], serde_json::json!(["the", "justice"]));
    assert!(frames.iter().all(|f| f["source"] == "heuristic"));
}

#[test]
fn srl_extraction_filters_to_corpus() {
    let w = Work::new();
    let tweets = w.write("tweets.jsonl", TWEETS);
    let srl = w.write(
        "srl.jsonl",
        concat!(
            r#"{"tweet_id": "2", "sentence_index": 0, "verb": "ruin", "spans": {"ARG0": ["Jean-Luc", "Melenchon"], "V": ["ruin"], "ARG1": ["the", "economy"], "ARGM-TMP": ["soon"]}}"#,
            "\n",
            r#"{"tweet_id": "99", "sentence_index": 0, "verb": "see", "spans": {"V": ["see"]}}"#,
            "\nnot json\n"
        ),
    );
    let out = concern(&["extract", "--tweets", &tweets, "--srl", &srl, "--out", &w.s("frames.jsonl")]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("1 malformed lines skipped"));
    let frames = jsonl(&w.path("frames.jsonl"));
    assert_eq!(frames.len(), 1);
    assert_eq!(frames[0]["spans"]["ARG0"], serde_json::json!(["jean-luc", "melenchon"]));
    assert!(frames[0]["spans"].get("ARGM-TMP").is_none());
}

#[test]
fn pipeline_from_candidates_to_evaluation() {
    let w = Work::new();
    let tweets = w.write("tweets.jsonl", TWEETS);
    ok(&["extract", "--tweets", &tweets, "--out", &w.s("frames.jsonl")]);
    let config = w.write(
        "induce.json",
        r#"{"key_terms": ["economy", "justice", "business"], "train_size": 3, "seed": 1, "top_terms": 10, "top_verbs": 5, "top_args": 5}"#,
    );
    ok(&[
        "induce",
        "--tweets",
        &tweets,
        "--srl",
        &w.s("frames.jsonl"),
        "--config",
        &config,
        "--out-candidates",
        &w.s("candidates.json"),
    ]);
    let cands: Value = serde_json::from_str(&fs::read_to_string(w.path("candidates.json")).unwrap()).unwrap();
    assert_eq!(cands["key_terms"], serde_json::json!(["economy", "justice", "business"]));

    let labels = w.write("labels.txt", "economic\ncriminal_justice\n");
    let assignments = w.write(
        "assignments.json",
        r#"[{"item": "economy", "label": "economic"}, {"item": "business", "label": "economic"}, {"item": "justice", "label": "criminal_justice"}, {"item": "nonsense", "label": "economic"}]"#,
    );
    let out = concern(&[
        "compile-lexicon",
        "--candidates",
        &w.s("candidates.json"),
        "--assignments",
        &assignments,
        "--labels",
        &labels,
        "--out",
        &w.s("concerns.json"),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("(nonsense) rejected"));
    let lex: Value = serde_json::from_str(&fs::read_to_string(w.path("concerns.json")).unwrap()).unwrap();
    assert_eq!(lex["economic"], serde_json::json!(["business", "economy"]));

    let morals = w.write(
        "moral.csv",
        "term,foundation,endorsement\njustice,fairness_cheating,7.6\ncheat,fairness_cheating,1.4\nprotect,care_harm,8.2\n",
    );
    let shown = ok(&[
        "detect",
        "--tweets",
        &tweets,
        "--srl",
        &w.s("frames.jsonl"),
        "--concern-lexicon",
        &w.s("concerns.json"),
        "--moral-lexicon",
        &morals,
        "--out",
        &w.s("preds.jsonl"),
        "--show",
    ]);
    assert!(shown.contains("Fairness: 7.6"), "{shown}");
    let preds = jsonl(&w.path("preds.jsonl"));
    assert_eq!(preds.len(), 4);
    assert_eq!(preds[0]["concern_types"][0]["label"], "criminal_justice");

    let gt = w.write(
        "gt.jsonl",
        concat!(
            r#"{"tweet_id": "1", "text": "", "concern_a1": ["criminal_justice"], "concern_a2": [], "moral_expert": {"fairness_cheating": "virtue"}}"#,
            "\n",
            r#"{"tweet_id": "2", "text": "", "concern_a1": ["economic"], "concern_a2": ["economic"], "moral_expert": {"fairness_cheating": "DK"}}"#,
            "\n",
            r#"{"tweet_id": "3", "text": "", "concern_a1": ["economic"], "concern_a2": [], "moral_expert": {"care_harm": "virtue"}}"#,
            "\n",
            r#"{"tweet_id": "4", "text": "", "concern_a1": [], "concern_a2": []}"#,
            "\n"
        ),
    );
    let table = ok(&[
        "evaluate",
        "--preds",
        &w.s("preds.jsonl"),
        "--gt",
        &gt,
        "--mode",
        "concern",
        "--system",
        "Concern 1",
        "--out",
        &w.s("report.json"),
    ]);
    assert!(table.contains("Concern 1"));
    let report: Value = serde_json::from_str(&fs::read_to_string(w.path("report.json")).unwrap()).unwrap();
    let (tp, fp, fn_) = (report["tp"].as_u64().unwrap(), report["fp"].as_u64().unwrap(), report["fn"].as_u64().unwrap());
    assert_eq!(tp + fn_, 3, "support is the union gold count");
    assert!(fp <= 4);

    ok(&["evaluate", "--preds", &w.s("preds.jsonl"), "--gt", &gt, "--mode", "moral"]);
    ok(&[
        "random-chooser",
        "--gt",
        &gt,
        "--mode",
        "concern",
        "--seed",
        "3",
        "--out",
        &w.s("random.jsonl"),
    ]);
    let sig = ok(&[
        "significance",
        "--preds-a",
        &w.s("preds.jsonl"),
        "--preds-b",
        &w.s("random.jsonl"),
        "--gt",
        &gt,
    ]);
    assert!(sig.contains("exact binomial"), "{sig}");
    let kappa = ok(&["agreement", "--gt", &gt]);
    assert!(kappa.contains("macro"));

    // Ids that do not line up are fatal.
    let short = w.write("short.jsonl", r#"{"tweet_id": "1", "concern_types": []}"#);
    let out = concern(&["evaluate", "--preds", &short, "--gt", &gt, "--mode", "concern"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing from predictions"));
}

#[test]
fn compile_lexicon_matches_service_finalize() {
    let w = Work::new();
    let cands = w.write(
        "candidates.json",
        r#"[{"id": "ruin(economy)", "verb": "ruin", "argument": "economy", "frequency": 3, "examples": ["1"]},
            {"id": "restrict(business)", "verb": "restrict", "argument": "business", "frequency": 2, "examples": []},
            {"id": "see(sky)", "verb": "see", "argument": "sky", "frequency": 9, "examples": []}]"#,
    );
    let labels = w.write("labels.json", r#"["economic", "weather"]"#);
    let state = w.path("state");
    let mut store = Store::open(&w.path("candidates.json"), &w.path("labels.json"), &state).unwrap();
    store.assign("ruin(economy)", "economic").unwrap();
    store.assign("see(sky)", "weather").unwrap();
    store.assign("restrict(business)", "economic").unwrap();
    store.assign("see(sky)", "DROP").unwrap();
    let served = store.finalize().unwrap().lexicon;

    let log = state.join(LOG_FILE);
    ok(&[
        "compile-lexicon",
        "--candidates",
        &cands,
        "--assignments",
        &log.to_string_lossy(),
        "--labels",
        &labels,
        "--out",
        &w.s("batch.json"),
    ]);
    assert_eq!(fs::read(w.path("batch.json")).unwrap(), served);
}

#[test]
fn moralstrength_import() {
    let w = Work::new();
    let dir = w.path("ms");
    fs::create_dir(&dir).unwrap();
    fs::write(dir.join("fairness.tsv"), "LEMMA\tEXPRESSED_MORAL\njustice\t7.6\nfraud\t1.2\n").unwrap();
    fs::write(dir.join("care.tsv"), "LEMMA\tEXPRESSED_MORAL\nprotect\t8.2\n").unwrap();
    for f in ["loyalty", "authority", "purity"] {
        fs::write(dir.join(format!("{f}.tsv")), "LEMMA\tEXPRESSED_MORAL\n").unwrap();
    }
    ok(&["import-moralstrength", "--dir", &dir.to_string_lossy(), "--out", &w.s("baseline.csv")]);
    let csv = fs::read_to_string(w.path("baseline.csv")).unwrap();
    assert!(csv.starts_with("term,foundation,endorsement"));
    assert!(csv.contains("justice,fairness_cheating,7.6"));
    assert!(csv.contains("protect,care_harm,8.2"));
}

#[test]
fn expand_with_wordnet_when_available() {
    let wordnet = std::env::var_os("WORDNET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/wordnet-3.0"));
    if !wordnet.join("data.noun").is_file() {
        eprintln!("skipped: no WordNet at {}", wordnet.display());
        return;
    }
    let w = Work::new();
    let baseline = w.write("baseline.csv", "term,foundation,endorsement\nconcern,care_harm,6.5\n");
    let frames = w.write(
        "frames.jsonl",
        r#"{"tweet_id": "1", "sentence_index": 0, "verb": "concerned", "spans": {"V": ["concerned"], "ARG1": ["us"]}}"#,
    );
    let mut outputs = Vec::new();
    for serial in [false, true] {
        let out = w.s(&format!("moral4-{serial}.csv"));
        let mut args = vec![
            "expand", "--variant", "4", "--baseline", &baseline, "--frames", &frames, "--wordnet",
        ];
        let wn = wordnet.to_string_lossy().into_owned();
        args.push(&wn);
        args.extend(["--out", &out]);
        if serial {
            args.push("--serial");
        }
        ok(&args);
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let csv = String::from_utf8(outputs.remove(0)).unwrap();
    assert!(csv.starts_with("term,foundation,endorsement,provenance,source_term,similarity"));
    assert!(csv.lines().any(|l| l.starts_with("pertain,care_harm,6.5,moral4,concern,")), "{csv}");
}

#[test]
fn serve_refuses_missing_inputs() {
    let w = Work::new();
    let out = concern(&[
        "serve",
        "--candidates",
        &w.s("nope.json"),
        "--labels",
        &w.s("nope.txt"),
        "--state",
        &w.s("state"),
        "--port",
        "0",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.json"));
}
