//! HTTP trial sessions.
//!
//! Routes:
//!
//! | method | path                      | body                          |
//! |--------|---------------------------|-------------------------------|
//! | POST   | `/sessions`               | `{design, m?, scenario?, seed?}` |
//! | GET    | `/sessions/{id}`          |                               |
//! | POST   | `/sessions/{id}/outcomes` | `{dose, outcomes: [0/1, ...]}` |
//! | POST   | `/sessions/{id}/simulate` |                               |
//! | POST   | `/sessions/{id}/close`    |                               |
//!
//! Numbers are JSON doubles printed with the shortest round-tripping
//! representation.

mod error;
mod store;

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;

pub use error::{ApiError, ErrorBody};
pub use store::{
    estimates, AuditEntry, CloseResponse, CreateRequest, CreateResponse, Event, LevelEstimate, ModelFit,
    OutcomeRequest, OutcomeResponse, SessionRecord, SessionStore, SimulateResponse, Status,
};

type AppState = Arc<SessionStore>;

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))
}

async fn create(State(store): State<AppState>, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let created = store.create(parse(&body)?)?;
    Ok((StatusCode::CREATED, Json(created)))
}

async fn fetch(State(store): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionRecord>, ApiError> {
    store.get(&id).map(Json)
}

async fn outcomes(
    State(store): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<OutcomeResponse>, ApiError> {
    store.lookup_exists(&id)?;
    store.submit(&id, parse(&body)?).map(Json)
}

async fn simulate(State(store): State<AppState>, Path(id): Path<String>) -> Result<Json<SimulateResponse>, ApiError> {
    store.simulate(&id).map(Json)
}

async fn close(State(store): State<AppState>, Path(id): Path<String>) -> Result<Json<CloseResponse>, ApiError> {
    store.close(&id).map(Json)
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(fetch))
        .route("/sessions/{id}/outcomes", post(outcomes))
        .route("/sessions/{id}/simulate", post(simulate))
        .route("/sessions/{id}/close", post(close))
        .with_state(store)
}

pub async fn serve(listen: SocketAddr, store: Arc<SessionStore>) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(listen).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
