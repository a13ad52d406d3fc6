//! Local play server. Plain request/response JSON over HTTP; the client
//! polls after each move.
//!
//! Routes:
//! - `GET  /api/presets`
//! - `POST /api/games`                 body [`NewGameRequest`]
//! - `GET  /api/games/{id}`
//! - `POST /api/games/{id}/moves`      body [`MoveRequest`]
//! - `POST /api/games/{id}/resign`
//! - `GET  /api/games/{id}/pgn`
//!
//! Sessions live in memory. Each sits behind its own lock, so distinct games
//! proceed concurrently while requests within one game are serialized.

pub mod error;
pub mod protocol;
pub mod session;

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use psychess_core::chain::{builtin, BUILTIN_NAMES};
use serde::de::DeserializeOwned;

pub use error::ServiceError;
pub use protocol::{
    ErrorBody, ErrorCode, MoveRequest, NewGameRequest, PresetInfo, PresetList, Snapshot,
    PROTOCOL_VERSION,
};
pub use session::Session;

#[derive(Clone, Debug, Default)]
pub struct ServiceConfig {
    /// Finished games are appended here as record lines.
    pub records: Option<PathBuf>,
}

#[derive(Default)]
struct Inner {
    config: ServiceConfig,
    next_id: Mutex<u64>,
    sessions: RwLock<HashMap<u64, Arc<Mutex<Session>>>>,
}

#[derive(Clone, Default)]
pub struct AppState {
    inner: Arc<Inner>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> AppState {
        AppState {
            inner: Arc::new(Inner {
                config,
                ..Inner::default()
            }),
        }
    }

    fn session(&self, id: u64) -> Result<Arc<Mutex<Session>>, ServiceError> {
        let map = self.inner.sessions.read().expect("session map lock");
        map.get(&id).cloned().ok_or(ServiceError::NotFound(id))
    }

    fn persist(&self, s: &Session) {
        let Some(path) = &self.inner.config.records else {
            return;
        };
        let line = s.record().to_json_line() + "\n";
        let written = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .and_then(|mut f| f.write_all(line.as_bytes()));
        if let Err(e) = written {
            eprintln!("psychess serve: cannot append to {}: {e}", path.display());
        }
    }
}

/// Parses a JSON body so that malformed input gets the protocol's error shape.
fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ServiceError> {
    serde_json::from_slice(body).map_err(|e| ServiceError::BadRequest(e.to_string()))
}

async fn list_presets() -> Json<PresetList> {
    let presets = BUILTIN_NAMES
        .iter()
        .map(|&name| PresetInfo {
            name: name.to_string(),
            character: builtin(name).map(|p| p.character).unwrap_or_default(),
        })
        .collect();
    Json(PresetList {
        protocol_version: PROTOCOL_VERSION,
        presets,
    })
}

async fn create_game(
    State(st): State<AppState>,
    body: Bytes,
) -> Result<(StatusCode, Json<Snapshot>), ServiceError> {
    let req: NewGameRequest = if body.is_empty() {
        NewGameRequest::default()
    } else {
        parse_body(&body)?
    };
    // Ids are consumed only by games that were actually created.
    let session = {
        let mut next = st.inner.next_id.lock().expect("id lock");
        let session = Session::new(*next + 1, req)?;
        *next += 1;
        session
    };
    let id = session.id();
    let snap = session.snapshot();
    if session.status().is_over() {
        st.persist(&session);
    }
    st.inner
        .sessions
        .write()
        .expect("session map lock")
        .insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(snap)))
}

async fn get_game(State(st): State<AppState>, Path(id): Path<u64>) -> Result<Json<Snapshot>, ServiceError> {
    let s = st.session(id)?;
    let s = s.lock().expect("session lock");
    Ok(Json(s.snapshot()))
}

async fn submit_move(
    State(st): State<AppState>,
    Path(id): Path<u64>,
    body: Bytes,
) -> Result<Json<Snapshot>, ServiceError> {
    let s = st.session(id)?;
    let req: MoveRequest = parse_body(&body)?;
    let mut s = s.lock().expect("session lock");
    s.submit(&req.uci)?;
    if s.status().is_over() {
        st.persist(&s);
    }
    Ok(Json(s.snapshot()))
}

async fn resign(State(st): State<AppState>, Path(id): Path<u64>) -> Result<Json<Snapshot>, ServiceError> {
    let s = st.session(id)?;
    let mut s = s.lock().expect("session lock");
    s.resign()?;
    st.persist(&s);
    Ok(Json(s.snapshot()))
}

async fn export_pgn(State(st): State<AppState>, Path(id): Path<u64>) -> Result<impl IntoResponse, ServiceError> {
    let s = st.session(id)?;
    let s = s.lock().expect("session lock");
    let disposition = format!("attachment; filename=\"psychess-{id}.pgn\"");
    Ok((
        [
            (header::CONTENT_TYPE, "application/x-chess-pgn".to_string()),
            (header::CONTENT_DISPOSITION, disposition),
        ],
        s.pgn(),
    ))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/presets", get(list_presets))
        .route("/api/games", post(create_game))
        .route("/api/games/{id}", get(get_game))
        .route("/api/games/{id}/moves", post(submit_move))
        .route("/api/games/{id}/resign", post(resign))
        .route("/api/games/{id}/pgn", get(export_pgn))
        .with_state(state)
}

pub async fn serve_with(addr: &str, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("psychess serve: listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(config))).await
}

pub async fn serve(addr: &str) -> std::io::Result<()> {
    serve_with(addr, ServiceConfig::default()).await
}
