use std::collections::BTreeSet;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::header::LOCATION;
use axum::http::{HeaderMap, StatusCode};
use axum::response::IntoResponse;
use axum::Json;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use toolreg_core::ingest::match_duplicates;
use toolreg_core::ir::{QueryPlan, SearchError, SortMode, Stage};
use toolreg_core::registry::{
    validate_record_with, RecordEdit, RecordStatus, Revision, RevisionError, Rule, Source, SourceProvenance,
};
use toolreg_core::{ResourceId, ToolRecord};

use super::{can_curate, parse_body, parse_rid, require_user, ApiError, ApiResult, Shared};
use crate::events::EventKind;
use crate::store::StoreError;

pub const DEFAULT_PER_PAGE: usize = 20;
pub const MAX_PER_PAGE: usize = 500;

/// Turns `q`, `field.<name>`, `sort`, `page` and `per_page` parameters into a
/// plan. Stages keep parameter order.
pub(super) fn parse_search_params(params: &[(String, String)], paging: bool) -> ApiResult<QueryPlan> {
    let bad = |msg: String| ApiError::new(StatusCode::BAD_REQUEST, msg);
    let mut stages = Vec::new();
    let mut plan = QueryPlan::new(Vec::new());
    if paging {
        plan.per_page = DEFAULT_PER_PAGE;
    }
    for (key, value) in params {
        match key.as_str() {
            "q" => {
                if value.trim().is_empty() {
                    return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "empty q parameter")
                        .with_details([json!({"stage": stages.len()})]));
                }
                stages.push(Stage::Query(value.clone()));
            }
            "sort" if paging => {
                let mode: SortMode = value.parse().map_err(|_| bad(format!("unknown sort {value:?}")))?;
                plan.sort = Some(mode);
            }
            "page" if paging => {
                plan.page = value
                    .parse()
                    .ok()
                    .filter(|&p| p >= 1)
                    .ok_or_else(|| bad(format!("bad page {value:?}")))?;
            }
            "per_page" if paging => {
                plan.per_page = value
                    .parse()
                    .ok()
                    .filter(|&p| (1..=MAX_PER_PAGE).contains(&p))
                    .ok_or_else(|| bad(format!("per_page must be between 1 and {MAX_PER_PAGE}")))?;
            }
            other => match other.strip_prefix("field.") {
                Some(field) => stages.push(Stage::Filter {
                    field: field.to_string(),
                    value: value.clone(),
                }),
                None => return Err(bad(format!("unknown parameter {other:?}"))),
            },
        }
    }
    if stages.is_empty() {
        stages.push(Stage::All);
    }
    plan.stages = stages;
    Ok(plan)
}

pub(super) fn search_error(e: SearchError) -> ApiError {
    match e {
        SearchError::UnknownField(_)
        | SearchError::UnknownSort(_)
        | SearchError::RelevanceWithoutQuery
        | SearchError::BadPage => ApiError::new(StatusCode::BAD_REQUEST, e.to_string()),
        SearchError::EmptyQuery(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
        SearchError::NoStages | SearchError::Index(_) => ApiError::internal(e),
    }
}

#[derive(Serialize)]
struct HitView {
    rank: u32,
    accession: ResourceId,
    similarity: f64,
    usage_score: f64,
    tool_url: String,
    record: ToolRecord,
}

#[derive(Serialize)]
struct ListView {
    total: usize,
    page: usize,
    per_page: usize,
    hits: Vec<HitView>,
}

pub async fn list(
    State(state): State<Shared>,
    headers: HeaderMap,
    Query(params): Query<Vec<(String, String)>>,
) -> ApiResult<Json<Value>> {
    let mut plan = parse_search_params(&params, true)?;
    plan.include_parked = can_curate(&state, &headers)?;
    let page = state.engine.search(&plan).map_err(search_error)?;
    let hits = page
        .hits
        .iter()
        .filter_map(|h| {
            state.store.get(h.doc_id).map(|record| HitView {
                rank: h.rank,
                accession: h.doc_id,
                similarity: h.similarity,
                usage_score: h.usage_score,
                tool_url: state.tool_url(h.doc_id),
                record,
            })
        })
        .collect();
    let view = ListView {
        total: page.total,
        page: page.page,
        per_page: page.per_page,
        hits,
    };
    let stages = serde_json::to_value(&plan.stages).unwrap_or(Value::Null);
    state.log_event(
        &headers,
        EventKind::Query,
        json!({ "stages": stages, "total": page.total }),
    );
    Ok(Json(serde_json::to_value(view).map_err(ApiError::internal)?))
}

/// The record if the caller may see it.
fn visible(state: &Shared, headers: &HeaderMap, raw: &str) -> ApiResult<ToolRecord> {
    let rid = parse_rid(raw)?;
    let record = state
        .store
        .get(rid)
        .ok_or_else(|| ApiError::not_found(format!("tool {rid}")))?;
    if record.is_parked() && !can_curate(state, headers)? {
        return Err(ApiError::not_found(format!("tool {rid}")));
    }
    Ok(record)
}

pub async fn fetch(
    State(state): State<Shared>,
    headers: HeaderMap,
    Path(rid): Path<String>,
) -> ApiResult<Json<ToolRecord>> {
    let record = visible(&state, &headers, &rid)?;
    state.log_event(&headers, EventKind::View, json!({ "accession": record.accession }));
    Ok(Json(record))
}

pub async fn revisions(
    State(state): State<Shared>,
    headers: HeaderMap,
    Path(rid): Path<String>,
) -> ApiResult<Json<Vec<Revision>>> {
    let record = visible(&state, &headers, &rid)?;
    let rid = record.accession.expect("stored records carry accessions");
    Ok(Json(state.store.revisions(rid).unwrap_or_default()))
}

pub async fn highlights(
    State(state): State<Shared>,
    headers: HeaderMap,
    Path(rid): Path<String>,
) -> ApiResult<Json<Value>> {
    let record = visible(&state, &headers, &rid)?;
    let spans = state.engine.snapshot().highlighter.highlight(&record.description);
    Ok(Json(json!({ "description": record.description, "spans": spans })))
}

fn store_error(e: StoreError) -> ApiError {
    match e {
        StoreError::Invalid(report) => {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "record failed validation").with_details(report.violations)
        }
        StoreError::AccessionPreset(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
        StoreError::NotFound(rid) => ApiError::not_found(format!("tool {rid}")),
        StoreError::Revision(RevisionError::Conflict { base, current }) => {
            ApiError::new(StatusCode::CONFLICT, "stale base_revision")
                .with_details([json!({ "base_revision": base, "current_revision": current })])
        }
        StoreError::Revision(RevisionError::Invalid(report)) => {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "edit produces an invalid record")
                .with_details(report.violations)
        }
        StoreError::Revision(
            ref
            r @ (RevisionError::UnknownField(_) | RevisionError::ImmutableField(_) | RevisionError::Malformed { .. }),
        ) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, r.to_string()),
        other => ApiError::internal(other),
    }
}

pub async fn create(State(state): State<Shared>, headers: HeaderMap, body: Bytes) -> ApiResult<impl IntoResponse> {
    let user = require_user(&state, &headers)?;
    let mut record: ToolRecord = parse_body(&body)?;
    let at = crate::now();
    record.status = RecordStatus::Active;
    record.revision = 0;
    record.provenance = vec![SourceProvenance {
        source: Source::UserSubmission,
        origin_ref: user.user_id.clone(),
        retrieved_at: at,
    }];
    if record.submitter.as_deref().is_none_or(|s| s.trim().is_empty()) {
        record.submitter = Some(user.email.clone());
    }
    // References to tools not yet registered are kept as pending.
    let known = |id: ResourceId| state.store.contains(id);
    let report = validate_record_with(&record, state.store.vocabularies(), Some(&known));
    let pending: BTreeSet<ResourceId> = report
        .violations
        .iter()
        .filter(|v| v.rule == Rule::DanglingReference)
        .filter_map(|v| v.detail.split_whitespace().next()?.parse().ok())
        .collect();
    record.pending_refs = pending.into_iter().collect();
    state.store.check_submission(&record).map_err(store_error)?;

    let existing = state.store.list();
    let mut candidates = existing.clone();
    candidates.push(record.clone());
    let newcomer = candidates.len() - 1;
    let duplicate_of: Vec<ResourceId> = match_duplicates(&candidates)
        .into_iter()
        .find(|g| g.contains(&newcomer))
        .map(|g| {
            g.into_iter()
                .filter(|&i| i != newcomer)
                .filter_map(|i| existing[i].accession)
                .collect()
        })
        .unwrap_or_default();
    if !duplicate_of.is_empty() {
        record.status = RecordStatus::NeedsCuration;
    }

    let stored = state.store.create(record, &user.user_id, at).map_err(store_error)?;
    let rid = stored.accession.expect("minted");
    state.engine.upsert(&stored).map_err(ApiError::internal)?;
    state.log_event(&headers, EventKind::Submit, json!({ "accession": rid }));
    let url = state.tool_url(rid);
    let body = json!({
        "accession": rid,
        "revision": stored.revision,
        "status": stored.status,
        "duplicate_of": duplicate_of,
        "tool_url": url,
    });
    Ok((StatusCode::CREATED, [(LOCATION, url)], Json(body)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UpdateBody {
    base_revision: u64,
    changes: RecordEdit,
}

pub async fn update(
    State(state): State<Shared>,
    headers: HeaderMap,
    Path(rid): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let user = require_user(&state, &headers)?;
    let current = visible(&state, &headers, &rid)?;
    let rid = current.accession.expect("stored records carry accessions");
    let body: UpdateBody = parse_body(&body)?;
    let record = state
        .store
        .revise(rid, &body.changes, &user.user_id, body.base_revision, crate::now())
        .map_err(store_error)?;
    state.engine.upsert(&record).map_err(ApiError::internal)?;
    state.log_event(
        &headers,
        EventKind::Edit,
        json!({ "accession": rid, "revision": record.revision }),
    );
    Ok(Json(
        json!({ "accession": rid, "revision": record.revision, "record": record }),
    ))
}
