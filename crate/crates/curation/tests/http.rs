use std::fs;
use std::path::{Path, PathBuf};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use concern_core::induction::{
    import_curation, read_assignments, CandidateFile, CandidateProposition, ConcernTypeLexicon, CountUnit,
};
use concern_curation::{app, router, ServeConfig, Store, StoreError, LEXICON_FILE, LOG_FILE};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tempfile::TempDir;
use tower::ServiceExt;

const LABELS: [&str; 3] = ["economic", "immigration_refugee", "criminal_justice"];

fn candidate_file() -> CandidateFile {
    let verbs = ["ruin", "restrict", "protect", "raise"];
    let args = ["economy", "business", "taxes", "jobs", "migrants", "borders", "crime", "police", "schools", "wages"];
    let candidates = verbs
        .iter()
        .flat_map(|v| {
            args.iter().enumerate().map(move |(i, a)| CandidateProposition {
                id: format!("{v}({a})"),
                verb: v.to_string(),
                argument: a.to_string(),
                frequency: 10 - i,
                examples: vec![format!("t{i}")],
            })
        })
        .collect();
    CandidateFile {
        count_unit: CountUnit::Frame,
        stopwords_sha256: String::new(),
        key_terms: vec!["immigration".into(), "election".into()],
        top_terms: vec![],
        verbs: vec![],
        candidates,
    }
}

struct Fixture {
    _dir: TempDir,
    config: ServeConfig,
}

impl Fixture {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        let candidates = dir.path().join("candidates.json");
        fs::write(&candidates, serde_json::to_vec_pretty(&candidate_file()).unwrap()).unwrap();
        let labels = dir.path().join("labels.txt");
        fs::write(&labels, LABELS.join("\n")).unwrap();
        let config = ServeConfig {
            candidates,
            labels,
            state_dir: dir.path().join("state"),
            token: None,
            ui_dir: None,
        };
        Fixture { _dir: dir, config }
    }

    fn app(&self) -> Router {
        app(&self.config).unwrap()
    }

    fn state(&self, name: &str) -> PathBuf {
        self.config.state_dir.join(name)
    }
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, axum::http::HeaderMap, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(serde_json::to_vec(&b).unwrap())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, headers, bytes)
}

async fn assign(app: &Router, item: &str, label: &str) -> StatusCode {
    call(app, "POST", "/api/assignments", Some(json!({"item": item, "label": label}))).await.0
}

fn json_of(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

fn batch_lexicon(candidates: &Path, labels: &[String], log: &Path) -> Vec<u8> {
    let cands = CandidateFile::load(candidates).unwrap();
    let (lex, _) = import_curation(&cands, Some(labels), &read_assignments(log).unwrap(), None);
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("lexicon.json");
    lex.save(&out).unwrap();
    fs::read(out).unwrap()
}

#[tokio::test]
async fn candidates_merge_assignments() {
    let fx = Fixture::new();
    let app = fx.app();
    let (status, _, body) = call(&app, "GET", "/api/labels", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(json_of(&body), json!(LABELS));

    assert_eq!(assign(&app, "ruin(economy)", "economic").await, StatusCode::CREATED);
    assert_eq!(assign(&app, "ruin(economy)", "criminal_justice").await, StatusCode::CREATED);
    let (_, _, body) = call(&app, "GET", "/api/candidates", None).await;
    let view = json_of(&body);
    let items = view["items"].as_array().unwrap();
    assert_eq!(items.len(), 42);
    let ruin = items.iter().find(|i| i["id"] == "ruin(economy)").unwrap();
    assert_eq!(ruin["label"], "criminal_justice");
    assert_eq!(view["assigned"], 1);
    assert!(items.iter().filter(|i| i["id"] != "ruin(economy)").all(|i| i["label"].is_null()));

    let (status, _, page) = call(&app, "GET", "/", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(String::from_utf8(page).unwrap().contains("/api/candidates"));
}

#[tokio::test]
async fn rejects_unknown_items_and_labels() {
    let fx = Fixture::new();
    let app = fx.app();
    assert_eq!(assign(&app, "see(sky)", "economic").await, StatusCode::NOT_FOUND);
    assert_eq!(assign(&app, "ruin(economy)", "weather").await, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(assign(&app, "immigration", "immigration_refugee").await, StatusCode::CREATED);
    assert_eq!(fs::read_to_string(fx.state(LOG_FILE)).unwrap().lines().count(), 1);
}

#[tokio::test]
async fn assignments_survive_restart() {
    let fx = Fixture::new();
    {
        let app = fx.app();
        assert_eq!(assign(&app, "restrict(business)", "economic").await, StatusCode::CREATED);
    }
    let app = fx.app();
    let (_, _, body) = call(&app, "GET", "/api/candidates", None).await;
    let view = json_of(&body);
    let item = view["items"].as_array().unwrap().iter().find(|i| i["id"] == "restrict(business)").unwrap().clone();
    assert_eq!(item["label"], "economic");
}

#[tokio::test]
async fn finalize_uses_only_assigned_items_and_is_idempotent() {
    let fx = Fixture::new();
    let app = fx.app();
    assign(&app, "ruin(economy)", "economic").await;
    assign(&app, "restrict(business)", "economic").await;
    assign(&app, "protect(borders)", "immigration_refugee").await;
    assign(&app, "raise(taxes)", "DROP").await;

    let (status, headers, first) = call(&app, "POST", "/api/finalize", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(headers["x-already-finalized"], "false");
    let lex = json_of(&first);
    assert_eq!(lex["economic"], json!(["business", "economy"]));
    assert_eq!(lex["immigration_refugee"], json!(["borders"]));
    assert_eq!(lex["criminal_justice"], json!([]));
    assert!(headers.contains_key("x-curation-warning"));

    assert_eq!(assign(&app, "raise(jobs)", "economic").await, StatusCode::CONFLICT);
    let (status, headers, second) = call(&app, "POST", "/api/finalize", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(headers["x-already-finalized"], "true");
    assert_eq!(first, second);
    let (_, headers, stored) = call(&app, "GET", "/api/lexicon", None).await;
    assert_eq!(headers["x-session-status"], "finalized");
    assert_eq!(stored, first);
    assert_eq!(fs::read(fx.state(LEXICON_FILE)).unwrap(), first);

    // The sidecar records the session and the log length.
    let saved = ConcernTypeLexicon::load(fx.state(LEXICON_FILE)).unwrap();
    assert_eq!(saved.provenance.unwrap().assignments, 4);

    // Still finalized, and still immutable, after a restart.
    let app = fx.app();
    assert_eq!(assign(&app, "raise(jobs)", "economic").await, StatusCode::CONFLICT);
    let (_, _, third) = call(&app, "POST", "/api/finalize", None).await;
    assert_eq!(third, first);
}

#[tokio::test]
async fn finalize_without_assignments_warns() {
    let fx = Fixture::new();
    let app = fx.app();
    let (status, headers, body) = call(&app, "POST", "/api/finalize", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(headers["x-curation-warning"].to_str().unwrap().contains("no assignments"));
    let lex = json_of(&body);
    assert!(LABELS.iter().all(|l| lex[l] == json!([])));
}

#[tokio::test]
async fn lexicon_preview_while_open() {
    let fx = Fixture::new();
    let app = fx.app();
    assign(&app, "ruin(crime)", "criminal_justice").await;
    let (_, headers, body) = call(&app, "GET", "/api/lexicon", None).await;
    assert_eq!(headers["x-session-status"], "open");
    assert_eq!(json_of(&body)["criminal_justice"], json!(["crime"]));
    assert!(!fx.state(LEXICON_FILE).exists());
}

#[test]
fn corrupt_log_halts_with_line_number() {
    let fx = Fixture::new();
    drop(Store::open(&fx.config.candidates, &fx.config.labels, &fx.config.state_dir).unwrap());
    fs::write(
        fx.state(LOG_FILE),
        "{\"item\":\"ruin(economy)\",\"label\":\"economic\"}\n{\"item\":\"ruin(\n",
    )
    .unwrap();
    match Store::open(&fx.config.candidates, &fx.config.labels, &fx.config.state_dir) {
        Err(StoreError::CorruptLog { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn changed_candidates_are_refused() {
    let fx = Fixture::new();
    drop(Store::open(&fx.config.candidates, &fx.config.labels, &fx.config.state_dir).unwrap());
    let mut file = candidate_file();
    file.candidates.pop();
    fs::write(&fx.config.candidates, serde_json::to_vec(&file).unwrap()).unwrap();
    assert!(matches!(
        Store::open(&fx.config.candidates, &fx.config.labels, &fx.config.state_dir),
        Err(StoreError::CandidatesChanged { .. })
    ));
}

#[tokio::test]
async fn token_is_enforced() {
    let fx = Fixture::new();
    let store = Store::open(&fx.config.candidates, &fx.config.labels, &fx.config.state_dir).unwrap();
    let app = router(store, Some("s3cret".into()), None);
    assert_eq!(call(&app, "GET", "/api/labels", None).await.0, StatusCode::UNAUTHORIZED);
    let req = Request::get("/api/labels").header("authorization", "Bearer s3cret").body(Body::empty()).unwrap();
    assert_eq!(app.clone().oneshot(req).await.unwrap().status(), StatusCode::OK);
    let req = Request::get("/api/labels").header("x-session-token", "wrong").body(Body::empty()).unwrap();
    assert_eq!(app.clone().oneshot(req).await.unwrap().status(), StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn served_ui_directory() {
    let fx = Fixture::new();
    let ui = fx.config.state_dir.with_file_name("ui");
    fs::create_dir_all(&ui).unwrap();
    fs::write(ui.join("index.html"), "<p>curate</p>").unwrap();
    let store = Store::open(&fx.config.candidates, &fx.config.labels, &fx.config.state_dir).unwrap();
    let app = router(store, None, Some(ui));
    let (status, _, body) = call(&app, "GET", "/", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, b"<p>curate</p>");
}

/// Over a real socket: concurrent posts, then finalize, then compare with
/// compiling the exported log in batch.
#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn service_matches_batch_compilation() {
    let fx = Fixture::new();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = fx.app();
    let server = tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    let client = reqwest::Client::new();
    let base = format!("http://{addr}/api");

    let view: Value = client.get(format!("{base}/candidates")).send().await.unwrap().json().await.unwrap();
    let ids: Vec<String> = view["items"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|i| i["kind"] == "candidate")
        .map(|i| i["id"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(ids.len(), 40);

    let mut tasks = Vec::new();
    for (n, id) in ids.iter().enumerate() {
        let label = if n < 20 { LABELS[n % 3] } else { "DROP" };
        let (client, url, id) = (client.clone(), format!("{base}/assignments"), id.clone());
        tasks.push(tokio::spawn(async move {
            client.post(url).json(&json!({"item": id, "label": label})).send().await.unwrap().status()
        }));
    }
    for t in tasks {
        assert_eq!(t.await.unwrap(), reqwest::StatusCode::CREATED);
    }
    let log = fx.state(LOG_FILE);
    assert_eq!(fs::read_to_string(&log).unwrap().lines().count(), 40);

    let resp = client.post(format!("{base}/finalize")).send().await.unwrap();
    assert_eq!(resp.status(), reqwest::StatusCode::OK);
    let served = resp.bytes().await.unwrap().to_vec();
    server.abort();

    let labels: Vec<String> = LABELS.iter().map(|s| s.to_string()).collect();
    assert_eq!(served, batch_lexicon(&fx.config.candidates, &labels, &log));
    let lex = json_of(&served);
    let total: usize = LABELS.iter().map(|l| lex[l].as_array().unwrap().len()).sum();
    assert!(total > 0 && total <= 20);
}
