//! Keyless-read REST API under `/api/v1`.
//!
//! Reads need no credentials. Writes take a bearer token from
//! `POST /api/v1/auth/login`. Error bodies are `{"error": …, "details": […]}`.

mod accounts;
mod browse;
mod tools;

use std::collections::BTreeSet;
use std::sync::Arc;

use axum::http::header::{AUTHORIZATION, CONTENT_TYPE};
use axum::http::{HeaderMap, HeaderName, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, CorsLayer};

use toolreg_core::ResourceId;

use crate::auth::{Role, TokenRegistry, UserAccount};
use crate::engine::Engine;
use crate::events::{EventKind, EventLog};
use crate::store::RecordStore;

pub const SESSION_HEADER: &str = "x-session-id";

/// Everything a request handler can reach.
pub struct AppState {
    pub store: RecordStore,
    pub events: EventLog,
    pub engine: Engine,
    pub tokens: TokenRegistry,
    /// Lowercased emails granted the admin role.
    pub admins: BTreeSet<String>,
    /// Lowercased emails granted the curator role.
    pub curators: BTreeSet<String>,
    /// Prefix for resolvable tool URLs, without a trailing slash.
    pub public_base_url: String,
}

impl AppState {
    pub fn new(store: RecordStore, events: EventLog, engine: Engine) -> Self {
        AppState {
            store,
            events,
            engine,
            tokens: TokenRegistry::default(),
            admins: BTreeSet::new(),
            curators: BTreeSet::new(),
            public_base_url: String::new(),
        }
    }

    pub fn with_roles<'a>(
        mut self,
        admins: impl IntoIterator<Item = &'a String>,
        curators: impl IntoIterator<Item = &'a String>,
    ) -> Self {
        self.admins = admins.into_iter().map(|e| e.to_lowercase()).collect();
        self.curators = curators.into_iter().map(|e| e.to_lowercase()).collect();
        self
    }

    pub fn with_base_url(mut self, url: &str) -> Self {
        self.public_base_url = url.trim_end_matches('/').to_string();
        self
    }

    /// Role granted by configuration for `email`.
    pub fn configured_role(&self, email: &str) -> Role {
        let e = email.to_lowercase();
        if self.admins.contains(&e) {
            Role::Admin
        } else if self.curators.contains(&e) {
            Role::Curator
        } else {
            Role::User
        }
    }

    pub fn tool_url(&self, rid: ResourceId) -> String {
        format!("{}/api/v1/tools/{rid}", self.public_base_url)
    }

    fn log_event(&self, headers: &HeaderMap, kind: EventKind, payload: Value) {
        let session = headers
            .get(SESSION_HEADER)
            .and_then(|v| v.to_str().ok())
            .filter(|s| !s.is_empty())
            .unwrap_or("anonymous");
        if let Err(e) = self.events.record(session, kind, crate::now().0, payload) {
            tracing::warn!(error = %e, "usage event not recorded");
        }
    }
}

pub type Shared = Arc<AppState>;

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub error: String,
    pub details: Vec<Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, error: impl Into<String>) -> Self {
        ApiError {
            status,
            error: error.into(),
            details: Vec::new(),
        }
    }

    pub fn with_details<T: Serialize>(mut self, details: impl IntoIterator<Item = T>) -> Self {
        self.details = details
            .into_iter()
            .map(|d| serde_json::to_value(d).unwrap_or(Value::Null))
            .collect();
        self
    }

    fn not_found(what: impl std::fmt::Display) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, format!("{what} not found"))
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        tracing::error!(error = %e, "request failed");
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(json!({ "error": self.error, "details": self.details })),
        )
            .into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// The caller behind the `Authorization: Bearer …` header, if any. A header
/// carrying an unknown token is rejected rather than treated as anonymous.
fn caller(state: &AppState, headers: &HeaderMap) -> ApiResult<Option<UserAccount>> {
    let Some(value) = headers.get(AUTHORIZATION) else {
        return Ok(None);
    };
    let unauthorized = || ApiError::new(StatusCode::UNAUTHORIZED, "invalid bearer token");
    let token = value
        .to_str()
        .ok()
        .and_then(|v| v.strip_prefix("Bearer "))
        .map(str::trim)
        .ok_or_else(unauthorized)?;
    let user_id = state.tokens.resolve(token).ok_or_else(unauthorized)?;
    let mut account = state.store.user(&user_id).ok_or_else(unauthorized)?;
    account.role = account.role.max(state.configured_role(&account.email));
    Ok(Some(account))
}

fn require_user(state: &AppState, headers: &HeaderMap) -> ApiResult<UserAccount> {
    caller(state, headers)?.ok_or_else(|| ApiError::new(StatusCode::UNAUTHORIZED, "authentication required"))
}

fn can_curate(state: &AppState, headers: &HeaderMap) -> ApiResult<bool> {
    Ok(caller(state, headers)?.is_some_and(|u| u.role.can_curate()))
}

fn parse_rid(raw: &str) -> ApiResult<ResourceId> {
    raw.parse().map_err(|_| ApiError::not_found(format!("tool {raw:?}")))
}

fn cors(origin: Option<&str>) -> Option<CorsLayer> {
    let origin = origin?;
    let allow = if origin == "*" {
        AllowOrigin::any()
    } else {
        AllowOrigin::exact(HeaderValue::from_str(origin).ok()?)
    };
    Some(
        CorsLayer::new()
            .allow_origin(allow)
            .allow_methods([Method::GET, Method::POST, Method::PUT])
            .allow_headers([AUTHORIZATION, CONTENT_TYPE, HeaderName::from_static(SESSION_HEADER)]),
    )
}

pub fn router(state: Shared, cors_origin: Option<&str>) -> Router {
    let api = Router::new()
        .route("/tools", get(tools::list).post(tools::create))
        .route("/tools/{rid}", get(tools::fetch).put(tools::update))
        .route("/tools/{rid}/revisions", get(tools::revisions))
        .route("/tools/{rid}/highlights", get(tools::highlights))
        .route("/suggest", get(browse::suggest))
        .route("/facets", get(browse::facets))
        .route("/institutes", get(browse::institutes))
        .route("/institutes/{code}/tools", get(browse::institute_tools))
        .route("/schema", get(browse::schema))
        .route("/validate", post(browse::validate))
        .route("/auth/register", post(accounts::register))
        .route("/auth/login", post(accounts::login))
        .route("/admin/reindex", post(accounts::reindex))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "no such endpoint") });
    let app = Router::new().nest("/api/v1", api).with_state(state);
    match cors(cors_origin) {
        Some(layer) => app.layer(layer),
        None => app,
    }
}

/// Parses a JSON body, reporting failures in the API error format.
fn parse_body<T: serde::de::DeserializeOwned>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "malformed request body").with_details([e.to_string()])
    })
}
