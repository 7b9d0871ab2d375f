//! Session state persisted as an append-only assignment log.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use concern_core::induction::{
    import_curation, read_labels, Assignment, CandidateFile, ConcernTypeLexicon, CurationProvenance, DROP,
};
use concern_core::io::{parse_jsonl, sha256_hex};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SESSION_FILE: &str = "session.json";
pub const LOG_FILE: &str = "assignments.jsonl";
pub const LEXICON_FILE: &str = "lexicon.json";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error(transparent)]
    Core(#[from] concern_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("assignment log {path} is corrupt at line {line}: {message}")]
    CorruptLog { path: PathBuf, line: usize, message: String },

    #[error("candidate file changed since the session started (session {expected}, now {found})")]
    CandidatesChanged { expected: String, found: String },

    #[error("session is finalized")]
    Finalized,

    #[error("unknown item {0:?}")]
    UnknownItem(String),

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("{0}")]
    Inconsistent(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Open,
    Finalized,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionMeta {
    pub session_id: String,
    pub candidates_sha256: String,
    pub created: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finalized_at: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Item {
    pub id: String,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verb: Option<String>,
    pub term: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequency: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub examples: Vec<String>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidatesView {
    pub session_id: String,
    pub status: Status,
    pub assigned: usize,
    pub items: Vec<Item>,
}

#[derive(Debug, Clone)]
pub struct Finalized {
    /// The lexicon file exactly as written.
    pub lexicon: Vec<u8>,
    /// True when an earlier call already finalized the session.
    pub already: bool,
    pub warnings: Vec<String>,
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Writes via a temporary file and rename so readers never see a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    let mut f = File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(bytes).map_err(io_err(&tmp))?;
    f.sync_all().map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn to_json(value: &impl Serialize) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    bytes
}

/// One curation session: candidates, labels and the assignment log.
#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    candidates: CandidateFile,
    labels: Vec<String>,
    meta: SessionMeta,
    assignments: Vec<Assignment>,
    latest: BTreeMap<String, String>,
    log: File,
}

impl Store {
    /// Opens the session in `state_dir`, creating it on first use and
    /// replaying the log otherwise.
    pub fn open(candidates_path: &Path, labels_path: &Path, state_dir: &Path) -> Result<Self, StoreError> {
        let bytes = fs::read(candidates_path).map_err(io_err(candidates_path))?;
        let candidates = CandidateFile::parse(&bytes, candidates_path)?;
        let sha = sha256_hex(&bytes);
        let labels = read_labels(labels_path)?;
        fs::create_dir_all(state_dir).map_err(io_err(state_dir))?;

        let session_path = state_dir.join(SESSION_FILE);
        let meta = if session_path.is_file() {
            let text = fs::read(&session_path).map_err(io_err(&session_path))?;
            let meta: SessionMeta = serde_json::from_slice(&text).map_err(concern_core::Error::from)?;
            if meta.candidates_sha256 != sha {
                return Err(StoreError::CandidatesChanged {
                    expected: meta.candidates_sha256,
                    found: sha,
                });
            }
            meta
        } else {
            let meta = SessionMeta {
                session_id: uuid::Uuid::new_v4().to_string(),
                candidates_sha256: sha,
                created: now(),
                status: Status::Open,
                finalized_at: None,
            };
            write_atomic(&session_path, &to_json(&meta))?;
            meta
        };

        let log_path = state_dir.join(LOG_FILE);
        let assignments: Vec<Assignment> = if log_path.is_file() {
            let text = fs::read(&log_path).map_err(io_err(&log_path))?;
            parse_jsonl(text.as_slice(), &log_path).map_err(|e| match e {
                concern_core::Error::Parse { path, line, message } => StoreError::CorruptLog { path, line, message },
                other => other.into(),
            })?
        } else {
            Vec::new()
        };
        if meta.status == Status::Finalized && !state_dir.join(LEXICON_FILE).is_file() {
            return Err(StoreError::Inconsistent(format!(
                "session {} is finalized but {} is missing",
                meta.session_id, LEXICON_FILE
            )));
        }
        let log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log_path)
            .map_err(io_err(&log_path))?;
        let latest = assignments.iter().map(|a| (a.item.clone(), a.label.clone())).collect();
        log::info!(
            "session {} ({:?}): {} logged assignments",
            meta.session_id,
            meta.status,
            assignments.len()
        );
        Ok(Store {
            dir: state_dir.to_path_buf(),
            candidates,
            labels,
            meta,
            assignments,
            latest,
            log,
        })
    }

    pub fn meta(&self) -> &SessionMeta {
        &self.meta
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn log_path(&self) -> PathBuf {
        self.dir.join(LOG_FILE)
    }

    pub fn lexicon_path(&self) -> PathBuf {
        self.dir.join(LEXICON_FILE)
    }

    pub fn candidates_view(&self) -> CandidatesView {
        let label = |id: &str| self.latest.get(id).cloned();
        let mut items: Vec<Item> = self
            .candidates
            .candidates
            .iter()
            .map(|c| Item {
                id: c.id.clone(),
                kind: "candidate",
                verb: Some(c.verb.clone()),
                term: c.argument.clone(),
                frequency: Some(c.frequency),
                examples: c.examples.clone(),
                label: label(&c.id),
            })
            .collect();
        items.extend(self.candidates.key_terms.iter().map(|k| Item {
            id: k.clone(),
            kind: "key_term",
            verb: None,
            term: k.clone(),
            frequency: None,
            examples: Vec::new(),
            label: label(k),
        }));
        CandidatesView {
            session_id: self.meta.session_id.clone(),
            status: self.meta.status,
            assigned: self.latest.len(),
            items,
        }
    }

    /// Validates, appends and syncs one assignment; returns it once durable.
    pub fn assign(&mut self, item: &str, label: &str) -> Result<Assignment, StoreError> {
        if self.meta.status == Status::Finalized {
            return Err(StoreError::Finalized);
        }
        if self.candidates.trigger_of(item).is_none() {
            return Err(StoreError::UnknownItem(item.to_string()));
        }
        if label != DROP && !self.labels.iter().any(|l| l == label) {
            return Err(StoreError::UnknownLabel(label.to_string()));
        }
        let a = Assignment {
            item: item.to_string(),
            label: label.to_string(),
            timestamp: Some(now()),
        };
        let mut line = serde_json::to_vec(&a).expect("serializable");
        line.push(b'\n');
        let path = self.log_path();
        self.log.write_all(&line).map_err(io_err(&path))?;
        self.log.sync_data().map_err(io_err(&path))?;
        self.latest.insert(a.item.clone(), a.label.clone());
        self.assignments.push(a.clone());
        Ok(a)
    }

    /// The lexicon the current log compiles to.
    pub fn compile(&self, timestamp: String) -> ConcernTypeLexicon {
        let provenance = CurationProvenance {
            session_id: self.meta.session_id.clone(),
            timestamp,
            candidates_sha256: self.meta.candidates_sha256.clone(),
            assignments: self.assignments.len(),
        };
        let (lex, report) = import_curation(&self.candidates, Some(&self.labels), &self.assignments, Some(provenance));
        for (i, item, reason) in &report.rejected {
            log::warn!("logged assignment {i} ({item}) ignored: {reason}");
        }
        lex
    }

    /// Compiles and stores the lexicon, then closes the session. Calling it
    /// again returns the stored file unchanged.
    pub fn finalize(&mut self) -> Result<Finalized, StoreError> {
        let path = self.lexicon_path();
        if self.meta.status == Status::Finalized {
            let lexicon = fs::read(&path).map_err(io_err(&path))?;
            return Ok(Finalized {
                lexicon,
                already: true,
                warnings: Vec::new(),
            });
        }
        let at = now();
        let lex = self.compile(at.clone());
        let mut warnings = Vec::new();
        if self.assignments.is_empty() {
            warnings.push("no assignments were made; every label is empty".to_string());
        }
        let empty: Vec<&str> = lex.triggers.iter().filter(|(_, t)| t.is_empty()).map(|(l, _)| l.as_str()).collect();
        if !empty.is_empty() {
            warnings.push(format!("labels without triggers: {}", empty.join(", ")));
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        let lexicon = to_json(&lex.triggers);
        write_atomic(&path, &lexicon)?;
        if let Some(p) = &lex.provenance {
            write_atomic(&ConcernTypeLexicon::provenance_path(&path), &to_json(p))?;
        }
        let mut meta = self.meta.clone();
        meta.status = Status::Finalized;
        meta.finalized_at = Some(at);
        write_atomic(&self.dir.join(SESSION_FILE), &to_json(&meta))?;
        self.meta = meta;
        Ok(Finalized {
            lexicon,
            already: false,
            warnings,
        })
    }

    /// The stored lexicon once finalized, otherwise a preview.
    pub fn lexicon(&self) -> Result<Vec<u8>, StoreError> {
        if self.meta.status == Status::Finalized {
            let path = self.lexicon_path();
            return fs::read(&path).map_err(io_err(&path));
        }
        Ok(to_json(&self.compile(now()).triggers))
    }
}
