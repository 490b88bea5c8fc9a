//! Append-only JSONL event logs, one file per session.
//!
//! A session is never snapshotted. Loading replays its log: the engine is
//! deterministic given the creation event, and issued queries are installed
//! from the log rather than recomputed.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use disambig_core::learner::{PendingQuery, Session, SessionConfig, Status};
use disambig_core::render::{LlmConfig, RenderedQuery};
use disambig_core::rulelang::wire::{program_from_value, program_to_value, schema_from_value, schema_to_value};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("unknown session {0:?}")]
    NotFound(String),
    #[error("session {0:?} already exists")]
    Exists(String),
    #[error("corrupt event log for {id:?} at line {line}: {msg}")]
    Corrupt { id: String, line: usize, msg: String },
    #[error(transparent)]
    Engine(#[from] disambig_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = StoreError> = std::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum Event {
    Created {
        session_id: String,
        #[serde(default)]
        task_id: Option<String>,
        schema: Value,
        hypothesis: Vec<Value>,
        config: SessionConfig,
    },
    QueryIssued {
        query: PendingQuery,
    },
    Answer {
        round: usize,
        letter: String,
    },
    Converged {
        rounds: usize,
    },
    Failed {
        reason: String,
    },
}

/// One log line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    /// Milliseconds since the epoch, non-decreasing within a log.
    pub ts: u64,
    #[serde(flatten)]
    pub event: Event,
}

/// Parse a log. A final line without its newline is a torn write and is
/// dropped; any other unparsable line is an error. Returns the records and
/// the byte length of the intact prefix.
pub fn parse_log(id: &str, text: &str) -> Result<(Vec<Record>, usize)> {
    let intact = text.rfind('\n').map_or(0, |i| i + 1);
    let mut out = Vec::new();
    for (n, line) in text[..intact].lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(line).map_err(|e| StoreError::Corrupt {
            id: id.into(),
            line: n + 1,
            msg: e.to_string(),
        })?;
        out.push(r);
    }
    Ok((out, intact))
}

/// A session together with what the log knows about it.
#[derive(Clone, Debug)]
pub struct StoredSession {
    pub session: Session,
    pub task_id: Option<String>,
}

/// Rebuild a session from its records.
pub fn replay(id: &str, records: &[Record]) -> Result<StoredSession> {
    let corrupt = |line: usize, msg: &str| StoreError::Corrupt { id: id.into(), line, msg: msg.into() };
    let Some(Record { event: Event::Created { session_id, task_id, schema, hypothesis, config }, .. }) = records.first()
    else {
        return Err(corrupt(1, "log does not start with a created event"));
    };
    if session_id != id {
        return Err(corrupt(1, "session id does not match the file"));
    }
    let schema = schema_from_value(schema)?;
    let hypothesis = hypothesis.iter().map(|v| program_from_value(v, &schema)).collect::<Result<Vec<_>, _>>()?;
    let mut s = Session::new(id, schema, hypothesis, config.clone())?;
    for (n, r) in records.iter().enumerate().skip(1) {
        let line = n + 1;
        match &r.event {
            Event::Created { .. } => return Err(corrupt(line, "duplicate created event")),
            Event::QueryIssued { query } => s.install_query(query.clone()).map_err(|e| corrupt(line, &e.to_string()))?,
            Event::Answer { round, letter } => {
                if *round != s.round() {
                    return Err(corrupt(line, "answer for the wrong round"));
                }
                if let Err(e) = s.submit_answer(letter) {
                    // Engine failures fail the session the same way live.
                    if !matches!(s.status(), Status::Failed { .. }) {
                        return Err(corrupt(line, &e.to_string()));
                    }
                }
            }
            Event::Converged { .. } => {
                if *s.status() != Status::Converged {
                    return Err(corrupt(line, "log says converged but replay did not converge"));
                }
            }
            Event::Failed { reason } => s.mark_failed(reason.clone()),
        }
    }
    Ok(StoredSession { session: s, task_id: task_id.clone() })
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

pub fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

/// The data directory. Callers serialize operations per session; the store
/// itself only guarantees that each event is one `write` of one full line.
#[derive(Debug)]
pub struct SessionStore {
    dir: PathBuf,
    last_ts: Mutex<HashMap<String, u64>>,
}

impl SessionStore {
    pub fn open(data_dir: impl AsRef<Path>) -> Result<Self> {
        let dir = data_dir.as_ref().join("sessions");
        fs::create_dir_all(&dir)?;
        Ok(SessionStore { dir, last_ts: Mutex::new(HashMap::new()) })
    }

    fn path(&self, id: &str) -> Result<PathBuf> {
        if !valid_id(id) {
            return Err(StoreError::NotFound(id.into()));
        }
        Ok(self.dir.join(format!("{id}.jsonl")))
    }

    pub fn exists(&self, id: &str) -> bool {
        self.path(id).is_ok_and(|p| p.is_file())
    }

    /// Session ids with a log, sorted.
    pub fn list(&self) -> Result<Vec<String>> {
        let mut v = Vec::new();
        for e in fs::read_dir(&self.dir)? {
            let name = e?.file_name().to_string_lossy().into_owned();
            if let Some(id) = name.strip_suffix(".jsonl") {
                v.push(id.to_string());
            }
        }
        v.sort();
        Ok(v)
    }

    /// Start a log for a fresh session.
    pub fn create(&self, session: &Session, task_id: Option<&str>) -> Result<()> {
        let id = session.id();
        let path = self.path(id)?;
        let schema = session.schema();
        let ev = Event::Created {
            session_id: id.into(),
            task_id: task_id.map(Into::into),
            schema: schema_to_value(schema),
            hypothesis: session.hypothesis().iter().map(|p| program_to_value(p, schema)).collect(),
            config: session.config().clone(),
        };
        let f = OpenOptions::new().write(true).create_new(true).open(&path).map_err(|e| match e.kind() {
            std::io::ErrorKind::AlreadyExists => StoreError::Exists(id.into()),
            _ => e.into(),
        })?;
        self.write_line(id, f, ev)?;
        if let Status::Converged = session.status() {
            self.append(id, Event::Converged { rounds: 0 })?;
        }
        Ok(())
    }

    pub fn append(&self, id: &str, event: Event) -> Result<()> {
        let path = self.path(id)?;
        if !path.is_file() {
            return Err(StoreError::NotFound(id.into()));
        }
        let f = OpenOptions::new().append(true).open(path)?;
        self.write_line(id, f, event)
    }

    fn write_line(&self, id: &str, mut f: File, event: Event) -> Result<()> {
        let ts = {
            let mut m = self.last_ts.lock().expect("lock poisoned");
            let t = now_ms().max(m.get(id).copied().unwrap_or(0));
            m.insert(id.into(), t);
            t
        };
        let mut line = serde_json::to_string(&Record { ts, event }).expect("serializable");
        line.push('\n');
        f.write_all(line.as_bytes())?;
        f.sync_data()?;
        Ok(())
    }

    /// Raw records of a log, cutting off a torn trailing line on disk so
    /// later appends start on a fresh line.
    pub fn records(&self, id: &str) -> Result<Vec<Record>> {
        let path = self.path(id)?;
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(StoreError::NotFound(id.into())),
            Err(e) => return Err(e.into()),
        };
        let (records, intact) = parse_log(id, &text)?;
        if intact < text.len() {
            log::warn!("session {id}: dropping torn trailing event ({} bytes)", text.len() - intact);
            OpenOptions::new().write(true).open(&path)?.set_len(intact as u64)?;
        }
        if let Some(last) = records.last() {
            let mut m = self.last_ts.lock().expect("lock poisoned");
            let e = m.entry(id.into()).or_insert(0);
            *e = (*e).max(last.ts);
        }
        Ok(records)
    }

    pub fn load(&self, id: &str) -> Result<StoredSession> {
        replay(id, &self.records(id)?)
    }
}

impl StoredSession {
    /// The pending query, issuing and logging a new one if needed.
    pub fn query(&mut self, store: &SessionStore, llm: Option<&LlmConfig>) -> Result<RenderedQuery> {
        if let Some(p) = self.session.pending() {
            return Ok(p.query.clone());
        }
        match self.session.next_query(llm) {
            Ok(q) => {
                let pending = self.session.pending().expect("query just issued").clone();
                store.append(self.session.id(), Event::QueryIssued { query: pending })?;
                Ok(q)
            }
            Err(e) => {
                if let Status::Failed { reason } = self.session.status() {
                    store.append(self.session.id(), Event::Failed { reason: reason.clone() })?;
                }
                Err(e.into())
            }
        }
    }

    /// Answer the pending query. The answer is logged before it is applied;
    /// application is deterministic, so replay reaches the same state.
    pub fn answer(&mut self, store: &SessionStore, letter: &str) -> Result<Status> {
        let Some(p) = self.session.pending() else {
            return Err(disambig_core::Error::State("no query is awaiting an answer".into()).into());
        };
        let Some(i) = p.query.option_index(letter) else {
            let letters: Vec<&str> = p.query.options.iter().map(|o| o.letter.as_str()).collect();
            return Err(disambig_core::Error::InvalidOption(format!(
                "{letter:?} is not one of {}",
                letters.join(", ")
            ))
            .into());
        };
        let letter = p.query.options[i].letter.clone();
        let id = self.session.id().to_string();
        store.append(&id, Event::Answer { round: self.session.round(), letter })?;
        let status = match self.session.submit_option(i) {
            Ok(st) => st.clone(),
            Err(e) => {
                if let Status::Failed { reason } = self.session.status() {
                    store.append(&id, Event::Failed { reason: reason.clone() })?;
                }
                return Err(e.into());
            }
        };
        match &status {
            Status::Converged => store.append(&id, Event::Converged { rounds: self.session.history().len() })?,
            Status::Failed { reason } => store.append(&id, Event::Failed { reason: reason.clone() })?,
            Status::AwaitingAnswer => {}
        }
        Ok(status)
    }
}
