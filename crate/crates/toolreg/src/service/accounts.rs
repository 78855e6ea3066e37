use axum::body::Bytes;
use axum::extract::State;
use axum::http::{HeaderMap, StatusCode};
use axum::Json;
use serde::Deserialize;
use serde_json::{json, Value};

use super::{parse_body, require_user, ApiError, ApiResult, Shared};
use crate::auth::{hash_password, is_plausible_email, new_salt, verify_password, Role, MIN_PASSWORD_LEN};
use crate::store::StoreError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Credentials {
    email: String,
    password: String,
}

pub async fn register(State(state): State<Shared>, body: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let c: Credentials = parse_body(&body)?;
    let email = c.email.trim();
    let mut problems = Vec::new();
    if !is_plausible_email(email) {
        problems.push(json!({ "field": "email", "detail": "not a valid email address" }));
    }
    if c.password.chars().count() < MIN_PASSWORD_LEN {
        problems.push(json!({ "field": "password", "detail": format!("at least {MIN_PASSWORD_LEN} characters") }));
    }
    if !problems.is_empty() {
        return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid registration").with_details(problems));
    }
    let salt = new_salt();
    let hash = hash_password(&salt, &c.password);
    let role = state.configured_role(email);
    let account = state
        .store
        .add_user(email, salt, hash, role, crate::now())
        .map_err(|e| match e {
            StoreError::DuplicateEmail(_) => ApiError::new(StatusCode::CONFLICT, e.to_string()),
            other => ApiError::internal(other),
        })?;
    let token = state.tokens.issue(&account.user_id);
    Ok((
        StatusCode::CREATED,
        Json(json!({ "user_id": account.user_id, "role": account.role, "token": token })),
    ))
}

pub async fn login(State(state): State<Shared>, body: Bytes) -> ApiResult<Json<Value>> {
    let c: Credentials = parse_body(&body)?;
    let account = state
        .store
        .user_by_email(c.email.trim())
        .filter(|a| verify_password(a, &c.password))
        .ok_or_else(|| ApiError::new(StatusCode::UNAUTHORIZED, "bad credentials"))?;
    let role = account.role.max(state.configured_role(&account.email));
    let token = state.tokens.issue(&account.user_id);
    Ok(Json(
        json!({ "user_id": account.user_id, "role": role, "token": token }),
    ))
}

pub async fn reindex(State(state): State<Shared>, headers: HeaderMap) -> ApiResult<Json<Value>> {
    let user = require_user(&state, &headers)?;
    if user.role != Role::Admin {
        return Err(ApiError::new(StatusCode::FORBIDDEN, "admin role required"));
    }
    let records = state.store.list();
    let n = state.engine.reindex(&records).map_err(ApiError::internal)?;
    tracing::info!(records = n, "index rebuilt");
    Ok(Json(
        json!({ "indexed": n, "thesaurus": state.engine.snapshot().index.thesaurus_hash() }),
    ))
}
