//! JSON API under `/api/v1`.
//!
//! | method | path | |
//! |---|---|---|
//! | GET | `/api/v1/health` | liveness and day count |
//! | GET | `/api/v1/clusters?date&lang&limit` | top clusters of a day, `limit` defaults to 10 |
//! | GET | `/api/v1/clusters/{id}` | one cluster |
//! | POST | `/api/v1/clusters/{id}/votes` | `{voter_id, verdict}`; returns the new tally |
//! | GET | `/api/v1/export?from&to&lang` | line-delimited dataset records |
//!
//! Unknown query parameters and body fields are rejected with 400.

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{NaiveDate, Utc};
use debunk_core::dataset::{derive_label_with, Vote};
use debunk_core::{Label, Lang, Tally, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::store::{to_ndjson, ClusterView, Store, StoreError};

pub const DEFAULT_LIMIT: usize = 10;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError {
            status: r.status(),
            message: r.body_text(),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let status = match e {
            StoreError::UnknownCluster(_) => StatusCode::NOT_FOUND,
            _ => {
                log::error!("{e}");
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        ApiError {
            status,
            message: e.to_string(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClustersQuery {
    date: NaiveDate,
    lang: Lang,
    limit: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VoteBody {
    voter_id: String,
    verdict: Verdict,
}

#[derive(Serialize)]
struct VoteResponse {
    cluster_id: String,
    tally: Tally,
    label: Label,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExportQuery {
    from: NaiveDate,
    to: NaiveDate,
    lang: Option<Lang>,
}

async fn health(State(store): State<Arc<Store>>) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "days": store.day_count() }))
}

async fn clusters(
    State(store): State<Arc<Store>>,
    query: Result<Query<ClustersQuery>, QueryRejection>,
) -> Result<Json<Vec<ClusterView>>, ApiError> {
    let Query(q) = query?;
    let limit = q.limit.unwrap_or(DEFAULT_LIMIT);
    if limit == 0 {
        return Err(ApiError::bad_request("limit must be at least 1"));
    }
    Ok(Json(store.top_clusters(q.date, &q.lang, limit)))
}

async fn cluster(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<Json<ClusterView>, ApiError> {
    store.cluster(&id).map(Json).ok_or_else(|| ApiError {
        status: StatusCode::NOT_FOUND,
        message: format!("unknown cluster {id}"),
    })
}

async fn vote(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    body: Result<Json<VoteBody>, JsonRejection>,
) -> Result<Json<VoteResponse>, ApiError> {
    let Json(body) = body?;
    if body.voter_id.trim().is_empty() {
        return Err(ApiError::bad_request("voter_id must not be empty"));
    }
    let tally = store.record_vote(Vote {
        cluster_id: id.clone(),
        voter_id: body.voter_id,
        verdict: body.verdict,
        cast_at: Utc::now(),
    })?;
    Ok(Json(VoteResponse {
        cluster_id: id,
        tally,
        label: derive_label_with(&tally, store.policy()),
    }))
}

async fn export(
    State(store): State<Arc<Store>>,
    query: Result<Query<ExportQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(q) = query?;
    if q.from > q.to {
        return Err(ApiError::bad_request("from must not be after to"));
    }
    let body = to_ndjson(&store.export(q.from, q.to, q.lang.as_ref()));
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
}

/// The API router; with `ui_dir`, static files are served for every other
/// path.
pub fn router(store: Arc<Store>, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/v1/health", get(health))
        .route("/api/v1/clusters", get(clusters))
        .route("/api/v1/clusters/{id}", get(cluster))
        .route("/api/v1/clusters/{id}/votes", post(vote))
        .route("/api/v1/export", get(export))
        .with_state(store);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}
