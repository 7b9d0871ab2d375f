//! HTTP service for curating induced candidates into a concern-type lexicon.
//!
//! All state lives in a directory: `session.json`, the append-only
//! `assignments.jsonl` log, and `lexicon.json` once finalized.

mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::{Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use tower_http::services::ServeDir;

pub use store::{
    CandidatesView, Finalized, Item, SessionMeta, Status, Store, StoreError, LEXICON_FILE, LOG_FILE, SESSION_FILE,
};

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub candidates: PathBuf,
    pub labels: PathBuf,
    pub state_dir: PathBuf,
    /// Required on every API request when set.
    pub token: Option<String>,
    /// Static files served at `/`; a placeholder page otherwise.
    pub ui_dir: Option<PathBuf>,
}

#[derive(Clone)]
struct AppState {
    store: Arc<Mutex<Store>>,
    token: Option<Arc<str>>,
}

struct ApiError(StoreError);

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            StoreError::Finalized => StatusCode::CONFLICT,
            StoreError::UnknownItem(_) => StatusCode::NOT_FOUND,
            StoreError::UnknownLabel(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status.is_server_error() {
            log::error!("{}", self.0);
        }
        (status, Json(serde_json::json!({ "error": self.0.to_string() }))).into_response()
    }
}

/// Runs a store operation off the async workers; writes block on fsync.
async fn with_store<T, F>(state: &AppState, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&mut Store) -> Result<T, StoreError> + Send + 'static,
{
    let store = state.store.clone();
    tokio::task::spawn_blocking(move || {
        let mut guard = store.lock().unwrap_or_else(|p| p.into_inner());
        f(&mut guard)
    })
    .await
    .expect("store task panicked")
    .map_err(ApiError)
}

fn json_bytes(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))], bytes).into_response()
}

async fn labels(State(state): State<AppState>) -> Result<Json<Vec<String>>, ApiError> {
    with_store(&state, |s| Ok(s.labels().to_vec())).await.map(Json)
}

async fn candidates(State(state): State<AppState>) -> Result<Json<CandidatesView>, ApiError> {
    with_store(&state, |s| Ok(s.candidates_view())).await.map(Json)
}

async fn session(State(state): State<AppState>) -> Result<Json<serde_json::Value>, ApiError> {
    with_store(&state, |s| {
        let mut v = serde_json::to_value(s.meta()).expect("serializable");
        v["assignments"] = s.assignments().len().into();
        Ok(v)
    })
    .await
    .map(Json)
}

#[derive(Deserialize)]
struct AssignBody {
    item: String,
    label: String,
}

async fn assign(State(state): State<AppState>, Json(body): Json<AssignBody>) -> Result<Response, ApiError> {
    let a = with_store(&state, move |s| s.assign(&body.item, &body.label)).await?;
    Ok((StatusCode::CREATED, Json(a)).into_response())
}

async fn finalize(State(state): State<AppState>) -> Result<Response, ApiError> {
    let done = with_store(&state, |s| s.finalize()).await?;
    let mut resp = json_bytes(done.lexicon);
    let headers = resp.headers_mut();
    headers.insert("x-already-finalized", HeaderValue::from_static(if done.already { "true" } else { "false" }));
    if !done.warnings.is_empty() {
        if let Ok(v) = HeaderValue::from_str(&done.warnings.join("; ")) {
            headers.insert("x-curation-warning", v);
        }
    }
    Ok(resp)
}

async fn lexicon(State(state): State<AppState>) -> Result<Response, ApiError> {
    let (bytes, status) = with_store(&state, |s| Ok((s.lexicon()?, s.meta().status))).await?;
    let mut resp = json_bytes(bytes);
    resp.headers_mut().insert(
        "x-session-status",
        HeaderValue::from_static(if status == Status::Finalized { "finalized" } else { "open" }),
    );
    Ok(resp)
}

fn presented_token(headers: &HeaderMap) -> Option<&str> {
    if let Some(v) = headers.get("x-session-token").and_then(|v| v.to_str().ok()) {
        return Some(v);
    }
    headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
}

async fn require_token(State(state): State<AppState>, req: Request, next: Next) -> Response {
    if let Some(expected) = &state.token {
        if presented_token(req.headers()) != Some(expected.as_ref()) {
            return (StatusCode::UNAUTHORIZED, Json(serde_json::json!({ "error": "missing or wrong session token" })))
                .into_response();
        }
    }
    next.run(req).await
}

const PLACEHOLDER: &str = r#"<!doctype html>
<html><head><meta charset="utf-8"><title>Concern curation</title></head>
<body>
<h1>Concern curation</h1>
<p>No UI directory configured. The JSON API is available:</p>
<ul>
<li>GET /api/labels</li>
<li>GET /api/candidates</li>
<li>POST /api/assignments <code>{"item": ..., "label": ... | "DROP"}</code></li>
<li>POST /api/finalize</li>
<li>GET /api/lexicon</li>
</ul>
</body></html>
"#;

/// Builds the application around an opened store.
pub fn router(store: Store, token: Option<String>, ui_dir: Option<PathBuf>) -> Router {
    let state = AppState {
        store: Arc::new(Mutex::new(store)),
        token: token.map(Arc::from),
    };
    let api = Router::new()
        .route("/labels", get(labels))
        .route("/candidates", get(candidates))
        .route("/session", get(session))
        .route("/assignments", post(assign))
        .route("/finalize", post(finalize))
        .route("/lexicon", get(lexicon))
        .route_layer(middleware::from_fn_with_state(state.clone(), require_token))
        .with_state(state);
    let app = Router::new().nest("/api", api);
    match ui_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.route("/", get(|| async { Html(PLACEHOLDER) })),
    }
}

/// Opens the session described by `config` and builds the application.
pub fn app(config: &ServeConfig) -> Result<Router, StoreError> {
    let store = Store::open(&config.candidates, &config.labels, &config.state_dir)?;
    Ok(router(store, config.token.clone(), config.ui_dir.clone()))
}

/// Serves until interrupted.
pub async fn serve(config: &ServeConfig, addr: SocketAddr) -> std::io::Result<()> {
    let app = app(config).map_err(std::io::Error::other)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
