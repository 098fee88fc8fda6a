//! Collaborative drawing sessions over HTTP and WebSocket.
//!
//! | method | path | |
//! |---|---|---|
//! | `POST` | `/sessions` | create, body [`CreateSession`] |
//! | `GET` | `/sessions` | list in creation order |
//! | `GET` | `/sessions/{id}` | state document |
//! | `POST` | `/sessions/{id}/strokes` | `{"strokes": [[[x, y], ...], ...], "idempotency_key": "..."}` |
//! | `POST` | `/sessions/{id}/message` | `{"text": "...", "attach_image": true}`, runs one agent turn |
//! | `POST` | `/sessions/{id}/signal` | `{"kind": "request_turn" \| "look_at_drawing", "image": "<base64 png>", "corners": [[x, y] x4]}` |
//! | `GET` | `/sessions/{id}/svg?revision=N` | stored snapshot |
//! | `GET` | `/sessions/{id}/pen-program` | plotter program of the current canvas |
//! | `GET` | `/sessions/{id}/events` | WebSocket stream of [`Event`]s |

mod events;
mod hub;
mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::ws::{Message as WsMessage, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine;
use codraw::agent::{BackendSpec, ImageData};
use codraw::canvas::export_pen_program;
use codraw::geometry::{Point, Polyline};
use codraw::perception::{rectify, ClaheParams, GrayImage};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::broadcast::error::RecvError;

pub use events::{Event, EventKind, SignalKind};
pub use hub::{CreateSession, SessionSlot, StrokesAck, TurnState, View, Vocabulary};
pub use store::{snapshot_name, Store};

pub const ENV_BIND: &str = "CODRAW_BIND";
pub const ENV_DATA_DIR: &str = "CODRAW_DATA_DIR";
pub const ENV_BACKEND: &str = "CODRAW_BACKEND";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ServiceError {
    #[error("no session {0:?}")]
    UnknownSession(String),
    #[error("no revision {0}")]
    UnknownRevision(u64),
    #[error("bad session config: {0}")]
    BadConfig(String),
    #[error("no strokes given")]
    EmptyStrokes,
    #[error("a turn is already in progress")]
    TurnInProgress,
    #[error("{0}")]
    Backend(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("storage: {0}")]
    Io(String),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::UnknownRevision(_) => "unknown_revision",
            ServiceError::BadConfig(_) => "bad_config",
            ServiceError::EmptyStrokes => "empty_strokes",
            ServiceError::TurnInProgress => "turn_in_progress",
            ServiceError::Backend(_) => "backend_error",
            ServiceError::BadRequest(_) => "bad_request",
            ServiceError::Io(_) => "storage_error",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::UnknownSession(_) | ServiceError::UnknownRevision(_) => StatusCode::NOT_FOUND,
            ServiceError::BadConfig(_) | ServiceError::EmptyStrokes | ServiceError::BadRequest(_) => {
                StatusCode::BAD_REQUEST
            }
            ServiceError::TurnInProgress => StatusCode::CONFLICT,
            ServiceError::Backend(_) => StatusCode::BAD_GATEWAY,
            ServiceError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        (self.status(), Json(json!({"error": self.code(), "message": self.to_string()}))).into_response()
    }
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    /// Where sessions are persisted; `None` keeps them in memory only.
    pub data_dir: Option<PathBuf>,
    /// Used by sessions created without a `backend` field.
    pub default_backend: BackendSpec,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: SocketAddr::from(([127, 0, 0, 1], 8080)),
            data_dir: None,
            default_backend: BackendSpec::Scripted { steps: vec![], file: None, latency_ms: 0 },
        }
    }
}

impl ServiceConfig {
    /// Reads `CODRAW_BIND`, `CODRAW_DATA_DIR` and `CODRAW_BACKEND`
    /// (`scripted:FILE` or `live`). The live backend's endpoint, model and
    /// key come from the `CODRAW_LLM_*` variables when a session starts.
    pub fn from_env() -> Result<Self, String> {
        let mut config = Self::default();
        if let Ok(bind) = std::env::var(ENV_BIND) {
            config.bind = bind.parse().map_err(|e| format!("{ENV_BIND}={bind}: {e}"))?;
        }
        if let Ok(dir) = std::env::var(ENV_DATA_DIR) {
            config.data_dir = Some(dir.into());
        }
        if let Ok(backend) = std::env::var(ENV_BACKEND) {
            config.default_backend = BackendSpec::parse(&backend).map_err(|e| format!("{ENV_BACKEND}: {e}"))?;
        }
        Ok(config)
    }
}

pub struct AppState {
    config: ServiceConfig,
    store: Store,
    sessions: RwLock<Vec<Arc<SessionSlot>>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Arc<Self> {
        let store = match &config.data_dir {
            Some(dir) => Store::at(dir),
            None => Store::memory(),
        };
        Arc::new(Self { config, store, sessions: RwLock::new(Vec::new()), next_id: AtomicU64::new(1) })
    }

    pub fn session(&self, id: &str) -> Result<Arc<SessionSlot>, ServiceError> {
        self.sessions
            .read()
            .expect("sessions lock")
            .iter()
            .find(|s| s.id() == id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    pub fn sessions(&self) -> Vec<Arc<SessionSlot>> {
        self.sessions.read().expect("sessions lock").clone()
    }

    fn fresh_id(&self) -> String {
        loop {
            let id = format!("s{:04}", self.next_id.fetch_add(1, Ordering::AcqRel));
            // Directories from an earlier run keep their names.
            if !self.store.exists(&id) {
                return id;
            }
        }
    }

    pub fn create_session(&self, request: CreateSession) -> Result<Arc<SessionSlot>, ServiceError> {
        let slot = SessionSlot::create(self.fresh_id(), request, &self.config.default_backend, self.store.clone())?;
        self.sessions.write().expect("sessions lock").push(slot.clone());
        Ok(slot)
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/strokes", post(post_strokes))
        .route("/sessions/{id}/message", post(post_message))
        .route("/sessions/{id}/signal", post(post_signal))
        .route("/sessions/{id}/svg", get(get_svg))
        .route("/sessions/{id}/pen-program", get(get_pen_program))
        .route("/sessions/{id}/events", get(events))
        .layer(tower_http::cors::CorsLayer::permissive())
        .with_state(state)
}

/// Binds `config.bind` and serves until the process stops.
pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(config.bind).await?;
    serve_on(listener, AppState::new(config)).await
}

/// Serves `state` on an already bound listener.
pub async fn serve_on(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

/// JSON body, where an empty body or `null` means the type's default.
fn parse_body<T: for<'de> Deserialize<'de> + Default>(body: &Bytes) -> Result<T, ServiceError> {
    if body.iter().all(u8::is_ascii_whitespace) || body.trim_ascii() == b"null" {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ServiceError::BadRequest(e.to_string()))
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static,
) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ServiceError::Io(format!("worker failed: {e}")))?
}

fn summary(slot: &SessionSlot) -> serde_json::Value {
    let view = slot.view();
    json!({
        "id": slot.id(),
        "created_at": view.transcript.created_at,
        "revision": view.canvas.revision,
        "elements": view.canvas.elements.len(),
        "turn_state": view.turn_state,
    })
}

async fn create_session(State(app): State<Arc<AppState>>, body: Bytes) -> Result<Response, ServiceError> {
    let request: CreateSession = parse_body(&body)?;
    let app2 = app.clone();
    let slot = blocking(move || app2.create_session(request)).await?;
    Ok((StatusCode::CREATED, Json(summary(&slot))).into_response())
}

async fn list_sessions(State(app): State<Arc<AppState>>) -> Json<serde_json::Value> {
    Json(json!({"sessions": app.sessions().iter().map(|s| summary(s)).collect::<Vec<_>>()}))
}

async fn get_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let slot = app.session(&id)?;
    let view = slot.view();
    Ok(Json(json!({
        "id": slot.id(),
        "revision": view.canvas.revision,
        "turn_state": view.turn_state,
        "backend": view.backend,
        "library_mode": view.transcript.library_mode,
        "seed": view.transcript.seed,
        "canvas": view.canvas,
        "transcript": view.transcript,
    }))
    .into_response())
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrokesBody {
    #[serde(default)]
    strokes: Vec<Polyline>,
    idempotency_key: Option<String>,
}

async fn post_strokes(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ServiceError> {
    let slot = app.session(&id)?;
    let body: StrokesBody = parse_body(&body)?;
    if body.strokes.is_empty() {
        return Err(ServiceError::EmptyStrokes);
    }
    let claim = slot.claim()?;
    let ack = blocking(move || SessionSlot::add_strokes(claim, body.strokes, body.idempotency_key)).await?;
    Ok(Json(ack).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MessageBody {
    text: Option<String>,
    #[serde(default = "yes")]
    attach_image: bool,
}

fn yes() -> bool {
    true
}

impl Default for MessageBody {
    fn default() -> Self {
        Self { text: None, attach_image: true }
    }
}

async fn post_message(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ServiceError> {
    let slot = app.session(&id)?;
    let body: MessageBody = parse_body(&body)?;
    let claim = slot.claim()?;
    let record = blocking(move || SessionSlot::run_turn(claim, body.text, body.attach_image)).await?;
    Ok(Json(record).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalBody {
    kind: SignalKind,
    /// Base64 PNG of the page, as photographed or captured by the UI.
    image: Option<String>,
    /// Page corners in the photograph, clockwise from top-left. When given
    /// the image is rectified to the canvas size first.
    corners: Option<[Point; 4]>,
}

fn decode_page(encoded: &str, corners: Option<[Point; 4]>, size: (usize, usize)) -> Result<ImageData, ServiceError> {
    let bytes = base64::engine::general_purpose::STANDARD
        .decode(encoded.trim())
        .map_err(|e| ServiceError::BadRequest(format!("image is not base64: {e}")))?;
    let photo = GrayImage::from_png(&bytes).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
    let page = match corners {
        Some(c) => rectify(&photo, &c, size.0, size.1, ClaheParams::default())
            .map_err(|e| ServiceError::BadRequest(e.to_string()))?,
        None => photo,
    };
    Ok(ImageData::png(page.to_png()))
}

async fn post_signal(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ServiceError> {
    let slot = app.session(&id)?;
    let body: SignalBody = serde_json::from_slice(&body).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
    let claim = slot.claim()?;
    let c = slot.view().canvas.constraints;
    let size = (c.width as usize, c.height as usize);
    blocking(move || {
        let image = body.image.as_deref().map(|i| decode_page(i, body.corners, size)).transpose()?;
        SessionSlot::signal(claim, body.kind, image);
        Ok(())
    })
    .await?;
    Ok(Json(json!({"kind": body.kind, "turn_state": slot.view().turn_state})).into_response())
}

#[derive(Deserialize)]
struct SvgQuery {
    revision: Option<u64>,
}

async fn get_svg(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<SvgQuery>,
) -> Result<Response, ServiceError> {
    let view = app.session(&id)?.view();
    let revision = q.revision.unwrap_or(view.canvas.revision);
    let svg = view.snapshots.get(revision as usize).ok_or(ServiceError::UnknownRevision(revision))?;
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg.to_string()).into_response())
}

async fn get_pen_program(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let view = app.session(&id)?.view();
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], export_pen_program(&view.canvas)).into_response())
}

async fn events(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    ws: WebSocketUpgrade,
) -> Result<Response, ServiceError> {
    let slot = app.session(&id)?;
    let rx = slot.subscribe();
    Ok(ws.on_upgrade(move |socket| forward_events(socket, rx)))
}

async fn forward_events(mut socket: WebSocket, mut rx: tokio::sync::broadcast::Receiver<Event>) {
    loop {
        tokio::select! {
            event = rx.recv() => {
                let text = match event {
                    Ok(event) => serde_json::to_string(&event).expect("event serializes"),
                    Err(RecvError::Lagged(n)) => json!({"type": "lagged", "missed": n}).to_string(),
                    Err(RecvError::Closed) => break,
                };
                if socket.send(WsMessage::Text(text.into())).await.is_err() {
                    break;
                }
            }
            incoming = socket.recv() => match incoming {
                Some(Ok(WsMessage::Close(_))) | None | Some(Err(_)) => break,
                _ => {}
            },
        }
    }
}
