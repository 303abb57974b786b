use std::path::Path;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use wisp_core::bench::VerdictRecord;

use crate::config::ServiceConfig;
use crate::log::VerdictLog;
use crate::manifest::Manifest;
use crate::state::{Pool, SubmitError, TaskFilter};
use crate::ServiceError;

struct Inner {
    pool: RwLock<Pool>,
    /// Sole writer. Held across validate, append and apply so the log order
    /// and the in-memory order never disagree.
    log: Mutex<VerdictLog>,
    images: std::collections::BTreeMap<String, std::path::PathBuf>,
    compact_after: usize,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    /// Loads the manifest, replays the log and compacts it.
    pub fn open(config: &ServiceConfig) -> Result<AppState, ServiceError> {
        let manifest = Manifest::load(&config.manifest)?;
        AppState::from_parts(manifest, &config.log, config)
    }

    pub fn from_parts(manifest: Manifest, log_path: &Path, config: &ServiceConfig) -> Result<AppState, ServiceError> {
        let (mut log, records) = VerdictLog::open(log_path)?;
        let mut pool = Pool::new(manifest.tasks, Duration::from_secs(config.lease_secs), config.policy);
        pool.replay(records);
        log.compact(&pool.records())?;
        log::info!("{} tasks, {} verdicts replayed from {}", pool.tasks().len(), pool.verdict_count(), log_path.display());
        Ok(AppState(Arc::new(Inner {
            pool: RwLock::new(pool),
            log: Mutex::new(log),
            images: manifest.images,
            compact_after: config.compact_after,
        })))
    }

    pub fn progress(&self, method: Option<&str>) -> crate::state::Progress {
        self.0.pool.read().expect("pool lock").progress(method)
    }

    /// fsync is done per append; this just waits out any writer in flight.
    pub fn flush(&self) {
        drop(self.0.log.lock().expect("log lock"));
    }
}

pub fn router(state: AppState, ui_dir: Option<&Path>) -> Router {
    let mut app = Router::new()
        .route("/tasks/next", get(next_task))
        .route("/tasks/:id", get(get_task))
        .route("/poems/:id/image", get(poem_image))
        .route("/verdicts", post(submit))
        .route("/progress", get(progress))
        .route("/export", get(export))
        .with_state(state);
    if let Some(dir) = ui_dir {
        app = app.nest_service("/ui", tower_http::services::ServeDir::new(dir));
    }
    app
}

fn error(status: StatusCode, message: impl std::fmt::Display) -> Response {
    (status, Json(json!({ "error": message.to_string() }))).into_response()
}

#[derive(Deserialize)]
struct NextQuery {
    annotator: Option<String>,
    method: Option<String>,
    poem: Option<String>,
}

async fn next_task(State(s): State<AppState>, Query(q): Query<NextQuery>) -> Response {
    let Some(annotator) = q.annotator.filter(|a| !a.trim().is_empty()) else {
        return error(StatusCode::BAD_REQUEST, "annotator query parameter is required");
    };
    let filter = TaskFilter { method: q.method, poem: q.poem };
    let task = s.0.pool.write().expect("pool lock").next_task(&annotator, &filter, Instant::now());
    match task {
        Some(t) => Json(t).into_response(),
        None => StatusCode::NO_CONTENT.into_response(),
    }
}

#[derive(Deserialize)]
struct TaskQuery {
    annotator: Option<String>,
}

async fn get_task(State(s): State<AppState>, UrlPath(id): UrlPath<String>, Query(q): Query<TaskQuery>) -> Response {
    match s.0.pool.read().expect("pool lock").task(&id, q.annotator.as_deref(), Instant::now()) {
        Some(t) => Json(t).into_response(),
        None => error(StatusCode::NOT_FOUND, format!("unknown task {id}")),
    }
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("png") => "image/png",
        Some("jpg" | "jpeg") => "image/jpeg",
        Some("gif") => "image/gif",
        Some("webp") => "image/webp",
        Some("svg") => "image/svg+xml",
        _ => "application/octet-stream",
    }
}

async fn poem_image(State(s): State<AppState>, UrlPath(id): UrlPath<String>) -> Response {
    let Some(path) = s.0.images.get(&id) else {
        return error(StatusCode::NOT_FOUND, format!("unknown poem {id}"));
    };
    match tokio::fs::read(path).await {
        Ok(bytes) => ([(header::CONTENT_TYPE, content_type(path))], bytes).into_response(),
        Err(e) => {
            log::warn!("image for {id} at {}: {e}", path.display());
            error(StatusCode::NOT_FOUND, format!("image for poem {id} is unavailable"))
        }
    }
}

async fn submit(State(s): State<AppState>, body: Bytes) -> Response {
    let record: VerdictRecord = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, format!("malformed verdict: {e}")),
    };
    let mut log = s.0.log.lock().expect("log lock");
    let stored = match s.0.pool.read().expect("pool lock").validate(&record) {
        Ok(r) => r,
        Err(e @ SubmitError::UnknownTask { .. }) => return error(StatusCode::NOT_FOUND, e),
        Err(SubmitError::Invalid(offending)) => {
            return (
                StatusCode::UNPROCESSABLE_ENTITY,
                Json(json!({ "error": "answers do not match the applicable tests", "offending": offending })),
            )
                .into_response()
        }
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, e),
    };
    if let Err(e) = log.append(&stored) {
        log::error!("{e}");
        return error(StatusCode::INTERNAL_SERVER_ERROR, "verdict could not be stored");
    }
    let mut pool = s.0.pool.write().expect("pool lock");
    let ack = pool.apply(stored);
    if log.lines() >= pool.verdict_count() + s.0.compact_after {
        if let Err(e) = log.compact(&pool.records()) {
            // the uncompacted log is still complete
            log::warn!("compaction failed: {e}");
        }
    }
    Json(ack).into_response()
}

#[derive(Deserialize)]
struct ProgressQuery {
    method: Option<String>,
}

async fn progress(State(s): State<AppState>, Query(q): Query<ProgressQuery>) -> Response {
    Json(s.progress(q.method.as_deref())).into_response()
}

async fn export(State(s): State<AppState>) -> Response {
    let bytes = s.0.log.lock().expect("log lock").read_all();
    match bytes {
        Ok(b) => ([(header::CONTENT_TYPE, "application/x-ndjson")], b).into_response(),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e),
    }
}
