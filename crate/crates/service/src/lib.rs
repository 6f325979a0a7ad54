//! HTTP JSON API over a loaded [`Collection`]. Read endpoints are thin
//! wrappers over library calls; session endpoints go through a shared
//! [`SessionStore`].

mod error;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use catnav_core::index::search_categories;
use catnav_core::navigator::{
    category_children, category_entities, entity_speech_list, speech_view, ChildSummary, DebateView, EntitySummary,
    EventInput, NavEvent, SessionHeader, SessionLog, SessionStore, SpeechListItem, System, Task,
};
use catnav_core::spn::{EdgeWeightMap, ScoreCache};
use catnav_core::Collection;
use serde::{Deserialize, Serialize};

pub use error::ApiError;

pub const DEFAULT_K: usize = 10;
const CACHE_CAPACITY: usize = 256;

pub type ApiResult<T> = Result<Json<T>, ApiError>;

pub struct AppState {
    pub collection: Arc<Collection>,
    pub sessions: SessionStore,
    pub cache: ScoreCache,
}

impl AppState {
    pub fn new(collection: Arc<Collection>) -> Self {
        AppState {
            collection,
            sessions: SessionStore::new(),
            cache: ScoreCache::new(CACHE_CAPACITY),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub id: String,
    pub label: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewSession {
    #[serde(default)]
    pub session_id: Option<String>,
    pub system: System,
    pub task: Task,
    #[serde(default)]
    pub task_id: String,
    #[serde(default)]
    pub rating: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub query: String,
    #[serde(default)]
    pub frontier: Vec<String>,
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ApiError::bad_request(e.body_text()))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new("bad_request", format!("worker failed: {e}")))?
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/categories/search", get(search))
        .route("/categories/{id}/children", get(children))
        .route("/categories/{id}/entities", get(entities))
        .route("/entities/{id}/speeches", get(speeches))
        .route("/speeches/{id}", get(speech))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/events", post(post_event))
        .route("/sessions/{id}/log", get(session_log))
        .route("/spn/score", post(spn_score))
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .with_state(state)
}

async fn search(State(st): State<Arc<AppState>>, Query(params): Query<HashMap<String, String>>) -> ApiResult<Vec<SearchHit>> {
    let q = params.get("q").cloned().unwrap_or_default();
    let k = match params.get("k") {
        None => DEFAULT_K,
        Some(raw) => raw
            .parse()
            .map_err(|_| ApiError::bad_request(format!("k must be a positive integer, got {raw:?}")))?,
    };
    let hits = blocking(move || {
        let c = &st.collection;
        let hits = search_categories(&c.categories, &q, k)?;
        Ok(hits
            .into_iter()
            .map(|(id, score)| {
                let label = c.graph.category(&id).map(|x| x.label.clone()).unwrap_or_default();
                SearchHit { id, label, score }
            })
            .collect())
    })
    .await?;
    Ok(Json(hits))
}

async fn children(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Vec<ChildSummary>> {
    Ok(Json(category_children(&st.collection, &id)?))
}

async fn entities(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Vec<EntitySummary>> {
    Ok(Json(category_entities(&st.collection, &id)?))
}

async fn speeches(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Vec<SpeechListItem>> {
    let c = &st.collection;
    Ok(Json(entity_speech_list(&c.corpus, &c.graph, &id)?))
}

async fn speech(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<DebateView> {
    Ok(Json(speech_view(&st.collection.corpus, &id)?))
}

async fn create_session(
    State(st): State<Arc<AppState>>,
    payload: Result<Json<NewSession>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionHeader>), ApiError> {
    let req = body(payload)?;
    let id = req.session_id.unwrap_or_else(|| uuid::Uuid::new_v4().to_string());
    if id.trim().is_empty() {
        return Err(ApiError::bad_request("session_id must not be blank"));
    }
    let mut header = SessionHeader::new(id, catnav_core::navigator::Condition::new(req.system, req.task), req.task_id);
    header.rating = req.rating;
    if !st.sessions.create(header.clone()) {
        return Err(ApiError::bad_request(format!("session {} already exists", header.session_id)));
    }
    Ok((StatusCode::CREATED, Json(header)))
}

fn missing_session(id: &str) -> ApiError {
    ApiError::not_found(format!("unknown session {id}"))
}

async fn post_event(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    payload: Result<Json<EventInput>, JsonRejection>,
) -> ApiResult<NavEvent> {
    let input = body(payload)?;
    let session = st.sessions.get(&id).ok_or_else(|| missing_session(&id))?;
    let mut session = session.lock().unwrap_or_else(|e| e.into_inner());
    let c = &st.collection;
    let event = session.apply(&c.graph, &c.corpus, input)?;
    Ok(Json(event.clone()))
}

async fn session_log(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<SessionLog> {
    let session = st.sessions.get(&id).ok_or_else(|| missing_session(&id))?;
    let session = session.lock().unwrap_or_else(|e| e.into_inner());
    Ok(Json(SessionLog::from(&*session)))
}

async fn spn_score(
    State(st): State<Arc<AppState>>,
    payload: Result<Json<ScoreRequest>, JsonRejection>,
) -> ApiResult<EdgeWeightMap> {
    let req = body(payload)?;
    let map = blocking(move || {
        let c = &st.collection;
        let scores = st.cache.get_or_compute(&c.index, &c.corpus, &c.graph, &req.query)?;
        Ok(scores.edge_weights(&c.corpus, &c.graph, &req.frontier)?)
    })
    .await?;
    Ok(Json(map))
}

/// Bind `addr` and serve until the process is stopped.
pub async fn serve(collection: Arc<Collection>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    serve_on(collection, listener).await
}

pub async fn serve_on(collection: Arc<Collection>, listener: tokio::net::TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(Arc::new(AppState::new(collection)))).await
}
