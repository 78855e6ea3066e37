use std::collections::{BTreeMap, BTreeSet};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::Json;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use toolreg_core::ingest::{extract_grants, map_grant_to_ic, IcTable};
use toolreg_core::ir::facet_counts;
use toolreg_core::registry::{validate_record, ValidationReport, FIELDS};
use toolreg_core::{ResourceId, ToolRecord};

use super::tools::{parse_search_params, search_error};
use super::{can_curate, parse_body, ApiError, ApiResult, Shared};

#[derive(Deserialize)]
pub struct SuggestParams {
    #[serde(default)]
    prefix: String,
    limit: Option<usize>,
}

pub async fn suggest(State(state): State<Shared>, Query(p): Query<SuggestParams>) -> Json<Value> {
    let limit = p.limit.unwrap_or(10).min(100);
    let terms = state.engine.snapshot().suggester.suggest(&p.prefix, limit);
    Json(json!({ "prefix": p.prefix, "terms": terms }))
}

pub async fn facets(
    State(state): State<Shared>,
    headers: HeaderMap,
    Query(params): Query<Vec<(String, String)>>,
) -> ApiResult<Json<Value>> {
    let mut plan = parse_search_params(&params, false)?;
    plan.include_parked = can_curate(&state, &headers)?;
    let cat = state.engine.snapshot();
    let hits = toolreg_core::ir::search_all(&cat.index, &cat.resources.thesaurus, &plan, &state.engine.search_config)
        .map_err(search_error)?;
    let ids: Vec<ResourceId> = hits.iter().map(|h| h.doc_id).collect();
    let counts = facet_counts(&cat.index, &ids);
    Ok(Json(json!({ "total": ids.len(), "facets": counts })))
}

/// IC codes funding `record`, from award numbers and institute names listed
/// as funding sources.
pub fn funding_ics(record: &ToolRecord, table: &IcTable) -> BTreeSet<String> {
    let mut codes = BTreeSet::new();
    for award in &record.award_numbers {
        for g in extract_grants(award) {
            if let Ok(inst) = map_grant_to_ic(&g, table) {
                codes.insert(inst.ic_code.clone());
            }
        }
    }
    for source in &record.funding_sources {
        let s = source.trim();
        if let Some(inst) = table
            .institutes()
            .find(|i| i.name.eq_ignore_ascii_case(s) || i.acronym.eq_ignore_ascii_case(s))
        {
            codes.insert(inst.ic_code.clone());
        }
    }
    codes
}

#[derive(Serialize)]
struct InstituteRow<'a> {
    acronym: &'a str,
    name: &'a str,
    ic_code: &'a str,
    tools: usize,
}

fn funded_records(state: &Shared, include_parked: bool) -> Vec<(ToolRecord, BTreeSet<String>)> {
    let cat = state.engine.snapshot();
    state
        .store
        .list()
        .into_iter()
        .filter(|r| include_parked || !r.is_parked())
        .map(|r| {
            let codes = funding_ics(&r, &cat.resources.ic_table);
            (r, codes)
        })
        .collect()
}

pub async fn institutes(State(state): State<Shared>, headers: HeaderMap) -> ApiResult<Json<Value>> {
    let funded = funded_records(&state, can_curate(&state, &headers)?);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for code in funded.iter().flat_map(|(_, c)| c) {
        *counts.entry(code.clone()).or_default() += 1;
    }
    let cat = state.engine.snapshot();
    let rows: Vec<InstituteRow> = cat
        .resources
        .ic_table
        .institutes()
        .map(|i| InstituteRow {
            acronym: &i.acronym,
            name: &i.name,
            ic_code: &i.ic_code,
            tools: counts.get(&i.ic_code).copied().unwrap_or(0),
        })
        .collect();
    Ok(Json(json!({ "institutes": rows })))
}

pub async fn institute_tools(
    State(state): State<Shared>,
    headers: HeaderMap,
    Path(code): Path<String>,
) -> ApiResult<Json<Value>> {
    let cat = state.engine.snapshot();
    let inst = cat
        .resources
        .ic_table
        .get(&code.to_ascii_uppercase())
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown institute code {code:?}")))?
        .clone();
    let tools: Vec<Value> = funded_records(&state, can_curate(&state, &headers)?)
        .into_iter()
        .filter(|(_, codes)| codes.contains(&inst.ic_code))
        .filter_map(|(r, _)| {
            let rid = r.accession?;
            Some(json!({ "accession": rid, "name": r.name, "tool_url": state.tool_url(rid) }))
        })
        .collect();
    Ok(Json(json!({ "institute": inst, "total": tools.len(), "tools": tools })))
}

/// The metadata table: field names, titles, required flags, vocabularies.
pub async fn schema() -> Json<Value> {
    let fields: Vec<Value> = FIELDS
        .iter()
        .map(|f| json!({ "name": f.name, "title": f.title, "required": f.required, "vocabulary": f.vocabulary }))
        .collect();
    Json(json!({ "fields": fields }))
}

/// Validates a draft record as a submission would be, ignoring the
/// accession it has not been assigned yet.
pub async fn validate(State(state): State<Shared>, body: Bytes) -> ApiResult<Json<ValidationReport>> {
    let record: ToolRecord = parse_body(&body)?;
    let mut report = validate_record(&record, state.store.vocabularies());
    if record.accession.is_none() {
        report = report.without_accession();
    }
    Ok(Json(report))
}
