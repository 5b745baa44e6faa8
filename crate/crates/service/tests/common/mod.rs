#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use debunk_core::dataset::LabelPolicy;
use debunk_service::{router, Store};
use http_body_util::BodyExt;
use tower::ServiceExt;

pub fn open_store(dir: &std::path::Path) -> Arc<Store> {
    Arc::new(Store::open(dir, LabelPolicy::default()).expect("store opens"))
}

pub fn app(store: &Arc<Store>) -> Router {
    router(Arc::clone(store), None)
}

pub async fn call(app: &Router, method: &str, uri: &str, body: Option<&str>) -> (StatusCode, String) {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.expect("router is infallible");
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

pub async fn get(app: &Router, uri: &str) -> (StatusCode, String) {
    call(app, "GET", uri, None).await
}

pub async fn vote(app: &Router, cluster: &str, voter: &str, verdict: &str) -> (StatusCode, serde_json::Value) {
    let body = format!(r#"{{"voter_id":"{voter}","verdict":"{verdict}"}}"#);
    let (status, text) = call(app, "POST", &format!("/api/v1/clusters/{cluster}/votes"), Some(&body)).await;
    (status, serde_json::from_str(&text).unwrap_or(serde_json::Value::String(text)))
}
