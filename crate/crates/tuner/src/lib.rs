//! HTTP session service behind the interactive tuner.
//!
//! Each session holds a target page, an optional clean line drawing, a hint
//! and user strokes, and keeps the pipeline's stage outputs current as they
//! change. Requests to one session are handled one at a time in arrival
//! order; different sessions proceed independently.
//!
//! | method | path | body |
//! |---|---|---|
//! | `POST` | `/sessions` | none, returns `{"id": ..}` |
//! | `PUT` | `/sessions/{id}/target`, `/hint`, `/lineart` | PNG |
//! | `PATCH` | `/sessions/{id}/params` | partial JSON params |
//! | `POST` | `/sessions/{id}/strokes` | strokes JSON, appended |
//! | `GET` | `/sessions/{id}/stages/{stage}.png` | |
//! | `GET` | `/sessions/{id}/state` | |
//! | `DELETE` | `/sessions/{id}` | |

mod error;
mod session;

use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use lru::LruCache;
use mangahue::pipeline::Stage;
use mangahue::{io, StrokeSet};
use serde_json::{json, Value};

pub use error::ApiError;
pub use session::{Session, SCREENTONES_KEY};

pub const DEFAULT_ADDR: &str = "127.0.0.1:8731";
pub const DEFAULT_MAX_SESSIONS: usize = 16;
const MAX_UPLOAD_BYTES: usize = 64 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub addr: SocketAddr,
    pub max_sessions: NonZeroUsize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            addr: DEFAULT_ADDR.parse().expect("valid default address"),
            max_sessions: NonZeroUsize::new(DEFAULT_MAX_SESSIONS).unwrap(),
        }
    }
}

impl Config {
    /// Reads `MANGAHUE_ADDR` and `MANGAHUE_MAX_SESSIONS`, falling back to
    /// the defaults for unset variables.
    pub fn from_env() -> Result<Self, String> {
        let mut config = Self::default();
        if let Ok(addr) = std::env::var("MANGAHUE_ADDR") {
            config.addr = addr
                .parse()
                .map_err(|e| format!("MANGAHUE_ADDR={addr:?}: {e}"))?;
        }
        if let Ok(cap) = std::env::var("MANGAHUE_MAX_SESSIONS") {
            config.max_sessions = cap
                .parse()
                .map_err(|e| format!("MANGAHUE_MAX_SESSIONS={cap:?}: {e}"))?;
        }
        Ok(config)
    }
}

type SessionHandle = Arc<tokio::sync::Mutex<Session>>;

/// Sessions in memory, least recently used evicted first once the cap is
/// reached.
#[derive(Clone)]
pub struct AppState {
    sessions: Arc<Mutex<LruCache<String, SessionHandle>>>,
}

impl AppState {
    pub fn new(max_sessions: NonZeroUsize) -> Self {
        Self {
            sessions: Arc::new(Mutex::new(LruCache::new(max_sessions))),
        }
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    fn create(&self) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Arc::new(tokio::sync::Mutex::new(Session::new(id.clone())));
        self.sessions.lock().unwrap().put(id.clone(), session);
        id
    }

    fn get(&self, id: &str) -> Result<SessionHandle, ApiError> {
        self.sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no session {id:?}")))
    }

    fn remove(&self, id: &str) -> bool {
        self.sessions.lock().unwrap().pop(id).is_some()
    }

    /// Runs `f` on the session off the async runtime, holding its lock for
    /// the whole update.
    async fn update<F>(&self, id: &str, f: F) -> Result<Value, ApiError>
    where
        F: FnOnce(&mut Session) -> Result<(), ApiError> + Send + 'static,
    {
        let mut guard = self.get(id)?.lock_owned().await;
        tokio::task::spawn_blocking(move || {
            f(&mut guard)?;
            Ok(guard.state())
        })
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", axum::routing::delete(delete_session))
        .route("/sessions/{id}/target", put(put_target))
        .route("/sessions/{id}/hint", put(put_hint))
        .route("/sessions/{id}/lineart", put(put_lineart))
        .route("/sessions/{id}/params", axum::routing::patch(patch_params))
        .route("/sessions/{id}/strokes", post(post_strokes))
        .route("/sessions/{id}/stages/{file}", get(get_stage))
        .route("/sessions/{id}/state", get(get_state))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .with_state(state)
}

/// Binds `config.addr` and serves until the process is interrupted.
pub async fn serve(config: Config) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(config.addr).await?;
    let app = router(AppState::new(config.max_sessions));
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn create_session(State(state): State<AppState>) -> impl IntoResponse {
    (StatusCode::CREATED, Json(json!({ "id": state.create() })))
}

async fn delete_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<StatusCode, ApiError> {
    if state.remove(&id) {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::not_found(format!("no session {id:?}")))
    }
}

async fn put_target(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    state
        .update(&id, move |s| s.set_target(io::decode_grey(&body)?))
        .await
        .map(Json)
}

async fn put_hint(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    state
        .update(&id, move |s| s.set_hint(io::decode_color(&body)?))
        .await
        .map(Json)
}

async fn put_lineart(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    state
        .update(&id, move |s| s.set_lineart(io::decode_grey(&body)?))
        .await
        .map(Json)
}

async fn patch_params(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let patch = match serde_json::from_slice(&body) {
        Ok(Value::Object(map)) => map,
        Ok(_) => return Err(ApiError::bad_request("params patch must be a JSON object")),
        Err(e) => return Err(ApiError::bad_request(format!("malformed JSON: {e}"))),
    };
    state
        .update(&id, move |s| s.patch_params(&patch))
        .await
        .map(Json)
}

async fn post_strokes(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let text = std::str::from_utf8(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let strokes = StrokeSet::from_json(text)?;
    state
        .update(&id, move |s| s.add_strokes(strokes))
        .await
        .map(Json)
}

async fn get_stage(
    State(state): State<AppState>,
    Path((id, file)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let stage: Stage = file
        .strip_suffix(".png")
        .and_then(|name| name.parse().ok())
        .ok_or_else(|| ApiError::not_found(format!("no stage {file:?}")))?;
    let session = state.get(&id)?;
    let session = session.lock().await;
    let png = session
        .stage_png(stage)
        .ok_or_else(|| ApiError::not_found(format!("stage {stage} has not been computed")))?;
    Ok(([(header::CONTENT_TYPE, "image/png")], png).into_response())
}

async fn get_state(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    let session = state.get(&id)?;
    let session = session.lock().await;
    Ok(Json(session.state()))
}
