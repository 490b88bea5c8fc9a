//! HTTP+JSON API (`api: "v1"`).

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use disambig_core::learner::{Session, SessionConfig, Status};
use disambig_core::render::LlmConfig;
use disambig_core::rulelang::wire::{parse_task, program_from_value, program_to_value, schema_from_value, task_from_value};
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::store::{valid_id, SessionStore, StoreError, StoredSession};

pub const API_VERSION: &str = "v1";

#[derive(Clone, Debug, Default)]
pub struct ApiConfig {
    /// Config fields a create request does not set.
    pub defaults: SessionConfig,
    pub llm: Option<LlmConfig>,
    /// Where `task_ref` names are resolved (`<dir>/<ref>.json`).
    pub tasks_dir: Option<PathBuf>,
    /// Allowed CORS origin; any origin when unset.
    pub cors_origin: Option<String>,
}

type Entry = Arc<Mutex<StoredSession>>;

pub struct AppState {
    store: SessionStore,
    cfg: ApiConfig,
    sessions: Mutex<HashMap<String, Entry>>,
}

impl AppState {
    pub fn new(store: SessionStore, cfg: ApiConfig) -> Arc<Self> {
        Arc::new(AppState { store, cfg, sessions: Mutex::new(HashMap::new()) })
    }

    /// The live session, replaying its log on first use.
    fn entry(&self, id: &str) -> Result<Entry, ApiError> {
        if let Some(e) = self.sessions.lock().expect("lock poisoned").get(id) {
            return Ok(e.clone());
        }
        let loaded = self.store.load(id)?;
        let mut map = self.sessions.lock().expect("lock poisoned");
        Ok(map.entry(id.into()).or_insert_with(|| Arc::new(Mutex::new(loaded))).clone())
    }

    /// Drop the cached copy so the next request replays the log. Used when
    /// memory and disk may have diverged.
    fn evict(&self, id: &str) {
        self.sessions.lock().expect("lock poisoned").remove(id);
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into() }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        use disambig_core::Error as E;
        let status = match &e {
            StoreError::NotFound(_) => StatusCode::NOT_FOUND,
            StoreError::Exists(_) => StatusCode::CONFLICT,
            StoreError::Engine(E::State(_)) => StatusCode::CONFLICT,
            StoreError::Engine(E::InvalidOption(_) | E::Parse(_) | E::Schema(_) | E::Json(_)) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<disambig_core::Error> for ApiError {
    fn from(e: disambig_core::Error) -> Self {
        StoreError::from(e).into()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            log::error!("{}", self.message);
        }
        (self.status, Json(json!({"api": API_VERSION, "error": self.message}))).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    let origin = match &state.cfg.cors_origin {
        Some(o) => HeaderValue::from_str(o).map(AllowOrigin::exact).unwrap_or_else(|_| AllowOrigin::any()),
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([axum::http::header::CONTENT_TYPE]);
    Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(summary))
        .route("/sessions/{id}/query", get(query))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/result", get(result))
        .layer(cors)
        .with_state(state)
}

/// Run `f` on the session off the async executor, holding its lock.
async fn with_session<T: Send + 'static>(
    state: Arc<AppState>,
    id: String,
    f: impl FnOnce(&AppState, &mut StoredSession) -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(move || {
        let entry = state.entry(&id)?;
        let mut s = entry.lock().expect("lock poisoned");
        f(&state, &mut s)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

fn status_json(s: &StoredSession) -> Value {
    let ss = &s.session;
    json!({
        "api": API_VERSION,
        "session_id": ss.id(),
        "task_id": s.task_id,
        "status": ss.status(),
        "round": ss.round(),
        "remaining": ss.alive().len(),
        "unique": ss.num_unique(),
        "initial": ss.initial_size(),
        "query_pending": ss.pending().is_some(),
        "history": ss.history().iter().map(|r| json!({
            "round": r.query.round,
            "letter": r.letter,
            "before": r.before,
            "after": r.after,
        })).collect::<Vec<_>>(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateRequest {
    task: Option<Value>,
    task_ref: Option<String>,
    schema: Option<Value>,
    hypothesis: Option<Vec<Value>>,
    #[serde(default)]
    config: Option<Value>,
}

/// Request config fields laid over the server defaults.
fn merge_config(defaults: &SessionConfig, overlay: Option<Value>) -> Result<SessionConfig, ApiError> {
    let mut base = serde_json::to_value(defaults).expect("serializable");
    match overlay {
        None | Some(Value::Null) => {}
        Some(Value::Object(o)) => base.as_object_mut().expect("object").extend(o),
        Some(_) => return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "config must be an object")),
    }
    let cfg: SessionConfig = serde_json::from_value(base)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, format!("invalid config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

fn new_session_id() -> String {
    format!("s-{:016x}", rand::random::<u64>())
}

fn build_session(state: &AppState, req: CreateRequest) -> Result<(Session, Option<String>), ApiError> {
    let config = merge_config(&state.cfg.defaults, req.config)?;
    let id = new_session_id();
    let unprocessable = |m: &str| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, m);
    match (req.task, req.task_ref, req.schema, req.hypothesis) {
        (Some(t), None, None, None) => {
            let task = task_from_value(&t)?;
            Ok((Session::from_task(id, &task, config)?, Some(task.id)))
        }
        (None, Some(r), None, None) => {
            let dir = state.cfg.tasks_dir.as_ref().ok_or_else(|| unprocessable("this server has no task directory"))?;
            if !valid_id(&r) {
                return Err(unprocessable("invalid task_ref"));
            }
            let text = std::fs::read_to_string(dir.join(format!("{r}.json")))
                .map_err(|_| ApiError::new(StatusCode::NOT_FOUND, format!("unknown task {r:?}")))?;
            let task = parse_task(&text)?;
            Ok((Session::from_task(id, &task, config)?, Some(task.id)))
        }
        (None, None, Some(schema), Some(hyp)) => {
            let schema = schema_from_value(&schema)?;
            let programs = hyp.iter().map(|v| program_from_value(v, &schema)).collect::<Result<Vec<_>, _>>()?;
            Ok((Session::new(id, schema, programs, config)?, None))
        }
        _ => Err(unprocessable("give exactly one of task, task_ref, or schema with hypothesis")),
    }
}

async fn create(State(state): State<Arc<AppState>>, body: Result<Json<CreateRequest>, JsonRejection>) -> Response {
    let run = move || -> ApiResult {
        let Json(req) = body?;
        let (session, task_id) = build_session(&state, req)?;
        state.store.create(&session, task_id.as_deref())?;
        let stored = StoredSession { session, task_id };
        let body = status_json(&stored);
        let id = stored.session.id().to_string();
        state.sessions.lock().expect("lock poisoned").insert(id, Arc::new(Mutex::new(stored)));
        Ok(Json(body))
    };
    match tokio::task::spawn_blocking(run).await {
        Ok(Ok(j)) => (StatusCode::CREATED, j).into_response(),
        Ok(Err(e)) => e.into_response(),
        Err(e) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

async fn summary(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    with_session(state, id, |_, s| Ok(Json(status_json(s)))).await
}

async fn query(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    with_session(state, id, |st, s| {
        if s.session.pending().is_none() && *s.session.status() != Status::AwaitingAnswer {
            return Err(ApiError::new(StatusCode::CONFLICT, "session is not awaiting an answer"));
        }
        let q = s.query(&st.store, st.cfg.llm.as_ref()).inspect_err(|e| {
            if matches!(e, StoreError::Io(_)) {
                st.evict(s.session.id());
            }
        })?;
        Ok(Json(json!({
            "api": API_VERSION,
            "session_id": s.session.id(),
            "remaining": s.session.alive().len(),
            "query": q,
        })))
    })
    .await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerRequest {
    option: String,
}

async fn answer(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<AnswerRequest>, JsonRejection>,
) -> ApiResult {
    let Json(req) = body?;
    with_session(state, id, move |st, s| {
        if *s.session.status() != Status::AwaitingAnswer || s.session.pending().is_none() {
            return Err(ApiError::new(StatusCode::CONFLICT, "no query is awaiting an answer"));
        }
        s.answer(&st.store, &req.option).inspect_err(|e| {
            if matches!(e, StoreError::Io(_)) {
                st.evict(s.session.id());
            }
        })?;
        Ok(Json(status_json(s)))
    })
    .await
}

async fn result(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    with_session(state, id, |_, s| {
        let ss = &s.session;
        let p = ss.result().map_err(|_| ApiError::new(StatusCode::CONFLICT, "session has not converged"))?;
        Ok(Json(json!({
            "api": API_VERSION,
            "session_id": ss.id(),
            "rounds": ss.history().len(),
            "program": program_to_value(p, ss.schema()),
            "pretty": p.pretty(ss.schema()),
        })))
    })
    .await
}
