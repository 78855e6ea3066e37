use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::index::{DocFields, IndexError, PhraseIndex};
use super::query::{tokenize_and_expand_query, ExpansionConfig};
use super::rank::{rank_with_usage, DEFAULT_EPSILON};
use super::vector::cosine_with_norms;
use crate::registry::ResourceId;
use crate::thesaurus::Thesaurus;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Query(String),
    Filter {
        field: String,
        value: String,
    },
    /// Every document; lets a plan with no query or filter list the corpus.
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortMode {
    Relevance,
    Name,
    Usage,
}

impl FromStr for SortMode {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, SearchError> {
        match s {
            "relevance" => Ok(SortMode::Relevance),
            "name" => Ok(SortMode::Name),
            "usage" => Ok(SortMode::Usage),
            _ => Err(SearchError::UnknownSort(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryPlan {
    pub stages: Vec<Stage>,
    /// 1-based.
    pub page: usize,
    pub per_page: usize,
    /// `None` picks relevance when the plan has a query, name otherwise.
    pub sort: Option<SortMode>,
    pub include_parked: bool,
}

impl QueryPlan {
    pub fn new(stages: Vec<Stage>) -> Self {
        QueryPlan {
            stages,
            page: 1,
            per_page: usize::MAX,
            sort: None,
            include_parked: false,
        }
    }

    pub fn query(text: &str) -> Self {
        Self::new(alloc::vec![Stage::Query(text.to_string())])
    }

    pub fn then(mut self, stage: Stage) -> Self {
        self.stages.push(stage);
        self
    }

    pub fn has_query(&self) -> bool {
        self.stages.iter().any(|s| matches!(s, Stage::Query(_)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    pub epsilon: f64,
    pub expansion: ExpansionConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            epsilon: DEFAULT_EPSILON,
            expansion: ExpansionConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub doc_id: ResourceId,
    pub similarity: f64,
    pub usage_score: f64,
    pub rank: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchPage {
    pub hits: Vec<SearchHit>,
    pub total: usize,
    pub page: usize,
    pub per_page: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("query plan has no stages")]
    NoStages,
    #[error("stage {0} has an empty query")]
    EmptyQuery(usize),
    #[error("unknown filter field {0:?}")]
    UnknownField(String),
    #[error("unknown sort mode {0:?}")]
    UnknownSort(String),
    #[error("relevance sort requires a query stage")]
    RelevanceWithoutQuery,
    #[error("page and per_page must be at least 1")]
    BadPage,
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// Filterable fields as `(canonical name, accepted aliases)`.
pub const FILTER_FIELDS: &[(&str, &[&str])] = &[
    ("name", &[]),
    ("tool_type", &["type"]),
    ("domains", &["domain"]),
    ("platforms", &["platform"]),
    ("languages", &["language"]),
    ("functions", &["function"]),
    ("funding_sources", &["funding", "funder"]),
    ("award_numbers", &["award", "grant"]),
];

pub fn canonical_filter_field(name: &str) -> Option<&'static str> {
    FILTER_FIELDS
        .iter()
        .find(|(f, aliases)| *f == name || aliases.contains(&name))
        .map(|(f, _)| *f)
}

fn field_values<'a>(fields: &'a DocFields, field: &str) -> Vec<&'a str> {
    let list = |v: &'a [String]| v.iter().map(String::as_str).collect();
    match field {
        "name" => alloc::vec![fields.name.as_str()],
        "tool_type" => fields.tool_type.iter().map(String::as_str).collect(),
        "domains" => list(&fields.domains),
        "platforms" => list(&fields.platforms),
        "languages" => list(&fields.languages),
        "functions" => list(&fields.functions),
        "funding_sources" => list(&fields.funding_sources),
        "award_numbers" => list(&fields.award_numbers),
        _ => Vec::new(),
    }
}

/// Case-insensitive exact match, or prefix match when `pattern` ends in `*`.
fn value_matches(value: &str, pattern: &str) -> bool {
    let value = value.to_lowercase();
    match pattern.strip_suffix('*') {
        Some(prefix) => value.starts_with(&prefix.to_lowercase()),
        None => value == pattern.to_lowercase(),
    }
}

/// Runs every stage and returns all surviving hits, ranked.
pub fn search_all(
    index: &PhraseIndex,
    thesaurus: &Thesaurus,
    plan: &QueryPlan,
    config: &SearchConfig,
) -> Result<Vec<SearchHit>, SearchError> {
    if plan.stages.is_empty() {
        return Err(SearchError::NoStages);
    }
    index.ensure_compatible(thesaurus)?;
    let sort = match plan.sort {
        Some(SortMode::Relevance) if !plan.has_query() => return Err(SearchError::RelevanceWithoutQuery),
        Some(s) => s,
        None if plan.has_query() => SortMode::Relevance,
        None => SortMode::Name,
    };
    // Validate every stage before doing any work.
    let mut filters = Vec::new();
    for (i, stage) in plan.stages.iter().enumerate() {
        match stage {
            Stage::Query(q) if q.trim().is_empty() => return Err(SearchError::EmptyQuery(i + 1)),
            Stage::Filter { field, .. } => {
                filters.push(canonical_filter_field(field).ok_or_else(|| SearchError::UnknownField(field.clone()))?)
            }
            _ => {}
        }
    }

    let mut survivors: Option<BTreeSet<ResourceId>> = None;
    let mut similarity: BTreeMap<ResourceId, f64> = BTreeMap::new();
    let mut filters = filters.into_iter();
    for stage in &plan.stages {
        match stage {
            Stage::All => {}
            Stage::Query(text) => {
                let q = tokenize_and_expand_query(text, thesaurus, &config.expansion).weights;
                let qn = q.norm();
                let candidates: BTreeSet<ResourceId> = match &survivors {
                    Some(s) => s.clone(),
                    None => q
                        .entries()
                        .iter()
                        .flat_map(|&(d, _)| index.postings(d))
                        .copied()
                        .collect(),
                };
                similarity.clear();
                for id in candidates {
                    let Some(doc) = index.get(id) else { continue };
                    let sim = cosine_with_norms(&q, qn, &doc.vector, doc.norm);
                    if sim > 0.0 {
                        similarity.insert(id, sim);
                    }
                }
                survivors = Some(similarity.keys().copied().collect());
            }
            Stage::Filter { value, .. } => {
                let field = filters.next().expect("validated above");
                let keep = |id: &ResourceId| {
                    index
                        .get(*id)
                        .is_some_and(|d| field_values(&d.fields, field).iter().any(|v| value_matches(v, value)))
                };
                survivors = Some(match survivors {
                    Some(s) => s.into_iter().filter(keep).collect(),
                    None => index.docs().map(|(id, _)| id).filter(keep).collect(),
                });
            }
        }
    }
    let survivors: Vec<ResourceId> = match survivors {
        Some(s) => s.into_iter().collect(),
        None => index.docs().map(|(id, _)| id).collect(),
    };

    let mut hits: Vec<SearchHit> = survivors
        .into_iter()
        .filter_map(|id| {
            let doc = index.get(id)?;
            if doc.fields.parked && !plan.include_parked {
                return None;
            }
            Some(SearchHit {
                doc_id: id,
                similarity: similarity.get(&id).copied().unwrap_or(0.0),
                usage_score: doc.fields.usage.score(),
                rank: 0,
            })
        })
        .collect();

    match sort {
        SortMode::Relevance => return Ok(rank_with_usage(hits, config.epsilon)),
        SortMode::Name => {
            let key = |h: &SearchHit| {
                index
                    .get(h.doc_id)
                    .map(|d| d.fields.name.to_lowercase())
                    .unwrap_or_default()
            };
            hits.sort_by_cached_key(|h| (key(h), h.doc_id));
        }
        SortMode::Usage => hits.sort_by(|a, b| {
            b.usage_score
                .partial_cmp(&a.usage_score)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.doc_id.cmp(&b.doc_id))
        }),
    }
    for (i, h) in hits.iter_mut().enumerate() {
        h.rank = i as u32 + 1;
    }
    Ok(hits)
}

/// [`search_all`] followed by pagination.
pub fn search(
    index: &PhraseIndex,
    thesaurus: &Thesaurus,
    plan: &QueryPlan,
    config: &SearchConfig,
) -> Result<SearchPage, SearchError> {
    if plan.page == 0 || plan.per_page == 0 {
        return Err(SearchError::BadPage);
    }
    let all = search_all(index, thesaurus, plan, config)?;
    let total = all.len();
    let start = (plan.page - 1).saturating_mul(plan.per_page).min(total);
    let end = start.saturating_add(plan.per_page).min(total);
    Ok(SearchPage {
        hits: all[start..end].to_vec(),
        total,
        page: plan.page,
        per_page: plan.per_page,
    })
}

/// Value counts for the facet fields over a result set.
pub fn facet_counts<'a>(
    index: &PhraseIndex,
    ids: impl IntoIterator<Item = &'a ResourceId>,
) -> BTreeMap<&'static str, BTreeMap<String, u64>> {
    const FACETS: [&str; 4] = ["domains", "platforms", "tool_type", "languages"];
    let mut out: BTreeMap<&'static str, BTreeMap<String, u64>> = FACETS.iter().map(|f| (*f, BTreeMap::new())).collect();
    for id in ids {
        let Some(doc) = index.get(*id) else { continue };
        for f in FACETS {
            let distinct: BTreeSet<&str> = field_values(&doc.fields, f).into_iter().collect();
            let counts = out.get_mut(f).expect("facet present");
            for v in distinct {
                *counts.entry(v.to_string()).or_insert(0) += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::index::{build_index, TermLabels};
    use crate::registry::{RecordStatus, ToolRecord, UsageMetrics};
    use alloc::vec;

    fn thesaurus() -> Thesaurus {
        Thesaurus::builder()
            .phrase("sequence alignment", 4)
            .synonyms("sequence alignment", "alignment")
            .phrase("genomics", 4)
            .phrase("proteomics", 4)
            .phrase("variant calling", 4)
            .build()
    }

    fn rec(n: u64, name: &str, desc: &str, domains: &[&str], forks: u64) -> ToolRecord {
        ToolRecord {
            name: name.into(),
            accession: ResourceId::new(n),
            description: desc.into(),
            domains: domains.iter().map(|d| d.to_string()).collect(),
            usage: UsageMetrics { forks, commits: 0 },
            ..Default::default()
        }
    }

    fn corpus() -> Vec<ToolRecord> {
        vec![
            rec(1, "beta", "sequence alignment for genomics", &["genomics"], 0),
            rec(2, "Alpha", "alignment of proteins", &["proteomics"], 3),
            rec(3, "gamma", "variant calling", &["genomics"], 0),
            rec(4, "delta", "proteomics pipeline", &["proteomics"], 9),
            rec(5, "epsilon", "nothing relevant", &["imaging"], 1),
        ]
    }

    fn setup() -> (Thesaurus, PhraseIndex) {
        let t = thesaurus();
        let idx = build_index(&corpus(), &t, &TermLabels::default()).unwrap();
        (t, idx)
    }

    fn ids(h: &[SearchHit]) -> Vec<u64> {
        h.iter().map(|h| h.doc_id.number()).collect()
    }

    #[test]
    fn refinement_is_a_subset() {
        let (t, idx) = setup();
        let c = SearchConfig::default();
        let base = search_all(&idx, &t, &QueryPlan::query("alignment"), &c).unwrap();
        let refined = search_all(
            &idx,
            &t,
            &QueryPlan::query("alignment").then(Stage::Filter {
                field: "domain".into(),
                value: "genomics".into(),
            }),
            &c,
        )
        .unwrap();
        assert_eq!(ids(&base).len(), 2);
        assert_eq!(ids(&refined), [1]);
        assert!(ids(&refined).iter().all(|i| ids(&base).contains(i)));
    }

    #[test]
    fn errors() {
        let (t, idx) = setup();
        let c = SearchConfig::default();
        assert_eq!(
            search_all(&idx, &t, &QueryPlan::new(vec![]), &c),
            Err(SearchError::NoStages)
        );
        assert_eq!(
            search_all(&idx, &t, &QueryPlan::query("  "), &c),
            Err(SearchError::EmptyQuery(1))
        );
        let bad = QueryPlan::new(vec![Stage::Filter {
            field: "colour".into(),
            value: "x".into(),
        }]);
        assert_eq!(
            search_all(&idx, &t, &bad, &c),
            Err(SearchError::UnknownField("colour".into()))
        );
        let mut all = QueryPlan::new(vec![Stage::All]);
        all.sort = Some(SortMode::Relevance);
        assert_eq!(search_all(&idx, &t, &all, &c), Err(SearchError::RelevanceWithoutQuery));
    }

    #[test]
    fn default_listing_sorts_by_name_and_paginates() {
        let (t, idx) = setup();
        let mut plan = QueryPlan::new(vec![Stage::All]);
        let all = search_all(&idx, &t, &plan, &SearchConfig::default()).unwrap();
        assert_eq!(ids(&all), [2, 1, 4, 5, 3]);
        plan.page = 2;
        plan.per_page = 2;
        let page = search(&idx, &t, &plan, &SearchConfig::default()).unwrap();
        assert_eq!(page.total, 5);
        assert_eq!(ids(&page.hits), [4, 5]);
        assert_eq!(page.hits.iter().map(|h| h.rank).collect::<Vec<_>>(), [3, 4]);
        plan.page = 9;
        assert!(search(&idx, &t, &plan, &SearchConfig::default())
            .unwrap()
            .hits
            .is_empty());
    }

    #[test]
    fn prefix_filters_and_parked_records() {
        let t = thesaurus();
        let mut recs = corpus();
        recs[2].status = RecordStatus::NeedsCuration;
        let idx = build_index(&recs, &t, &TermLabels::default()).unwrap();
        let mut plan = QueryPlan::new(vec![Stage::Filter {
            field: "domains".into(),
            value: "GEN*".into(),
        }]);
        assert_eq!(
            ids(&search_all(&idx, &t, &plan, &SearchConfig::default()).unwrap()),
            [1]
        );
        plan.include_parked = true;
        assert_eq!(
            ids(&search_all(&idx, &t, &plan, &SearchConfig::default()).unwrap()),
            [1, 3]
        );
    }

    #[test]
    fn empty_index_returns_nothing() {
        let t = thesaurus();
        let idx = build_index(&[], &t, &TermLabels::default()).unwrap();
        assert!(
            search_all(&idx, &t, &QueryPlan::query("genomics"), &SearchConfig::default())
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn facets_count_result_set() {
        let (_, idx) = setup();
        let all: Vec<ResourceId> = idx.docs().map(|(id, _)| id).collect();
        let f = facet_counts(&idx, &all);
        assert_eq!(f["domains"]["genomics"], 2);
        assert_eq!(f["domains"].values().sum::<u64>(), 5);
    }
}
