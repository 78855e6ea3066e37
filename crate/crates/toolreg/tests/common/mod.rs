#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{HeaderMap, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use toolreg::engine::{builtin_ontologies, thesaurus_from, Engine, Resources};
use toolreg::events::EventLog;
use toolreg::service::{router, AppState, Shared};
use toolreg::store::RecordStore;
use toolreg_core::ir::{SearchConfig, TermLabels};
use toolreg_core::thesaurus::ThesaurusConfig;
use toolreg_core::ToolRecord;

/// In-memory service over `records`, with `admin@example.org` as admin.
pub fn app_with(records: Vec<ToolRecord>) -> (Router, Shared) {
    let store = RecordStore::in_memory();
    for r in records {
        store
            .create(r, "seed", toolreg_core::registry::Timestamp(1))
            .expect("seed record");
    }
    let ontologies = builtin_ontologies();
    let labels = TermLabels::from_ontologies(&ontologies);
    let existing = store.list();
    let thesaurus = thesaurus_from(&[], &existing, &labels, &ontologies, &ThesaurusConfig::default());
    let engine = Engine::new(
        Resources::new(thesaurus, ontologies),
        &existing,
        SearchConfig::default(),
        "https://example.org/term/{id}",
    )
    .expect("engine");
    let admins = vec!["admin@example.org".to_string()];
    let state = Arc::new(
        AppState::new(store, EventLog::in_memory(), engine)
            .with_roles(&admins, &Vec::new())
            .with_base_url("https://registry.example.org"),
    );
    (router(state.clone(), None), state)
}

pub fn app() -> (Router, Shared) {
    app_with(Vec::new())
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub body: Value,
}

pub async fn call(app: &Router, method: Method, uri: &str, token: Option<&str>, body: Option<Value>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header("authorization", format!("Bearer {t}"));
    }
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.expect("infallible");
    let status = resp.status();
    let headers = resp.headers().clone();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let body = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).expect("json body")
    };
    Reply { status, headers, body }
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    call(app, Method::GET, uri, None, None).await
}

/// Registers `email` and returns its bearer token.
pub async fn register(app: &Router, email: &str) -> String {
    let r = call(
        app,
        Method::POST,
        "/api/v1/auth/register",
        None,
        Some(serde_json::json!({ "email": email, "password": "correct horse" })),
    )
    .await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
    r.body["token"].as_str().unwrap().to_string()
}

/// A complete draft record (no accession) named `name`.
pub fn draft(name: &str, seed: u64) -> ToolRecord {
    let mut r = toolreg::synth::synthetic_records(1, seed).remove(0);
    r.name = name.to_string();
    r
}
