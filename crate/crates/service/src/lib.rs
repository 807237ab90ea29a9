//! HTTP/JSON front end: stateless operations under `/ops/{op}` and
//! in-memory mutation sessions under `/sessions`.

pub mod ops;
pub mod session;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State as AxState};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::{Mutex, RwLock};

use qpmut_core::explorer::{self, AcyclicSearch, Limits};
use qpmut_core::{wire, Error, ErrorClass};

pub use ops::{OpRequest, State};
pub use session::{state_hash, Move, Session, Snapshot};

pub const BUDGET_HEADER: &str = "x-qpmut-budget-exhausted";

/// Truncation order from `QPMUT_TRUNCATION`, else the library default.
pub fn truncation_from_env() -> usize {
    std::env::var("QPMUT_TRUNCATION").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(qpmut_core::DEFAULT_TRUNCATION)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: String,
    detail: String,
    budget: bool,
    hash: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, detail: impl Into<String>) -> Self {
        ApiError { status, code: code.into(), detail: detail.into(), budget: false, hash: None }
    }

    fn with_hash(mut self, hash: String) -> Self {
        self.hash = Some(hash);
        self
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, budget) = match e.class() {
            ErrorClass::Input => (StatusCode::BAD_REQUEST, false),
            ErrorClass::Precondition => (StatusCode::CONFLICT, false),
            ErrorClass::Budget => (StatusCode::UNPROCESSABLE_ENTITY, true),
        };
        ApiError { status, code: e.code().to_string(), detail: e.to_string(), budget, hash: None }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({"error": self.code, "detail": self.detail});
        if let Some(h) = self.hash {
            body["hash"] = json!(h);
        }
        let mut resp = (self.status, Json(body)).into_response();
        if self.budget {
            resp.headers_mut().insert(BUDGET_HEADER, HeaderValue::from_static("true"));
        }
        resp
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

#[derive(Debug, Default)]
pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    truncation: usize,
}

impl AppState {
    pub fn new(truncation: usize) -> Self {
        AppState { sessions: RwLock::default(), truncation }
    }

    pub async fn snapshot(&self) -> Vec<Snapshot> {
        let sessions: Vec<_> = self.sessions.read().await.values().cloned().collect();
        let mut out = Vec::new();
        for s in sessions {
            out.push(s.lock().await.snapshot());
        }
        out.sort_by(|a, b| a.id.cmp(&b.id));
        out
    }

    pub async fn restore(&self, snaps: &[Snapshot]) -> qpmut_core::Result<()> {
        let mut map = self.sessions.write().await;
        for s in snaps {
            map.insert(s.id.clone(), Arc::new(Mutex::new(Session::restore(s)?)));
        }
        Ok(())
    }

    async fn session(&self, id: &str) -> ApiResult<Arc<Mutex<Session>>> {
        self.sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "UnknownSession", format!("no session {id}")))
    }
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| Error::Parse(e.to_string()).into())
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))
}

async fn list_ops() -> Json<Value> {
    Json(json!({"ops": ops::OPS}))
}

async fn run_op(AxState(app): AxState<Arc<AppState>>, Path(op): Path<String>, body: Bytes) -> ApiResult<Json<Value>> {
    if !ops::OPS.contains(&op.as_str()) {
        return Err(ApiError::new(StatusCode::NOT_FOUND, "UnknownOperation", format!("no operation {op:?}")));
    }
    let req: OpRequest = parse_body(&body)?;
    let n = app.truncation;
    let out = blocking(move || ops::run(&op, &req, n)).await??;
    Ok(Json(out))
}

async fn create_session(AxState(app): AxState<Arc<AppState>>, body: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let doc: Value = parse_body(&body)?;
    let state = State::from_json(&ops::with_truncation(&doc, app.truncation, false))?;
    let id = uuid::Uuid::new_v4().to_string();
    let session = Session::new(id.clone(), state, app.truncation);
    let view = session.view();
    app.sessions.write().await.insert(id.clone(), Arc::new(Mutex::new(session)));
    tracing::info!(%id, "session created");
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(AxState(app): AxState<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    Ok(Json(app.session(&id).await?.lock().await.view()))
}

async fn mutate_session(AxState(app): AxState<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<Value>> {
    let mv: Move = parse_body(&body)?;
    let session = app.session(&id).await?.lock_owned().await;
    blocking(move || {
        let mut session = session;
        match session.apply(mv) {
            Ok(()) => Ok(Json(session.view())),
            Err(e) => Err(ApiError::from(e).with_hash(session.hash())),
        }
    })
    .await?
}

async fn undo_session(AxState(app): AxState<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = app.session(&id).await?;
    let mut s = s.lock().await;
    if !s.undo() {
        return Err(ApiError::new(StatusCode::CONFLICT, "NothingToUndo", "history is empty").with_hash(s.hash()));
    }
    Ok(Json(s.view()))
}

async fn session_history(AxState(app): AxState<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    Ok(Json(app.session(&id).await?.lock().await.history_json()))
}

#[derive(Debug, Deserialize)]
struct AnalysisQuery {
    bound: Option<usize>,
}

fn or_error(r: qpmut_core::Result<Value>) -> Value {
    r.unwrap_or_else(|e| json!({"error": e.code(), "detail": e.to_string()}))
}

async fn session_analysis(
    AxState(app): AxState<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<AnalysisQuery>,
) -> ApiResult<Json<Value>> {
    let session = app.session(&id).await?.lock_owned().await;
    let bound = q.bound.unwrap_or(8);
    blocking(move || {
        let n = session.truncation();
        let hash = session.hash();
        let qp = session.state().as_qp(n).map_err(|e| ApiError::from(e).with_hash(hash.clone()))?;
        let jacobian = or_error(qp.jacobi_finite(bound).map(|d| wire::dimension_to_json(&d)));
        let rigidity = or_error(qp.is_rigid(bound).map(|r| wire::rigidity_to_json(&r)));
        let acyclicity = or_error(explorer::is_mutation_acyclic(&qp.quiver, Limits::default()).map(|a| match a {
            AcyclicSearch::Found { quiver, path } => json!({"found": true, "quiver": wire::quiver_to_json(&quiver), "path": path}),
            AcyclicSearch::NotFoundWithinBudget { explored } => json!({"found": false, "explored": explored}),
        }));
        Ok(Json(json!({"id": session.id, "hash": hash, "bound": bound, "jacobian": jacobian, "rigidity": rigidity, "acyclicity": acyclicity})))
    })
    .await?
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(|| async { Json(json!({"ok": true})) }))
        .route("/ops", get(list_ops))
        .route("/ops/{op}", post(run_op))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/mutate", post(mutate_session))
        .route("/sessions/{id}/undo", post(undo_session))
        .route("/sessions/{id}/history", get(session_history))
        .route("/sessions/{id}/analysis", get(session_analysis))
        .with_state(app)
}

#[derive(Debug, Clone, Default)]
pub struct ServeConfig {
    pub truncation: usize,
    /// Sessions are loaded from here at start and written back on shutdown.
    pub snapshot: Option<PathBuf>,
}

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, config: ServeConfig) -> std::io::Result<()> {
    let app = Arc::new(AppState::new(config.truncation));
    if let Some(path) = &config.snapshot {
        if path.exists() {
            let snaps: Vec<Snapshot> = serde_json::from_slice(&tokio::fs::read(path).await?)?;
            app.restore(&snaps).await.map_err(std::io::Error::other)?;
            tracing::info!(count = snaps.len(), "sessions restored");
        }
    }
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(app.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    if let Some(path) = &config.snapshot {
        let snaps = app.snapshot().await;
        tokio::fs::write(path, serde_json::to_vec_pretty(&snaps)?).await?;
        tracing::info!(count = snaps.len(), "sessions saved");
    }
    Ok(())
}
