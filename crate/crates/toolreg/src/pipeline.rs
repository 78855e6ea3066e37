//! Batch ingestion of publications and aggregator dumps into the store.
//!
//! `prepare_publications` is pure: it classifies, extracts and assembles
//! candidate records. `commit` clusters candidates with stored records,
//! merges each cluster and writes the results, or only counts them on a dry
//! run.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use toolreg_core::classify::{predict_topic, TopicModel};
use toolreg_core::ingest::{
    build_record_from_publication, classify_publication, extract_acknowledgements, extract_grants, extract_repo_urls,
    fetch_repo_metadata, match_duplicates, normalize_funder_name, ClassifierError, FunderEntry, FunderRegistry,
    IcTable, PublicationClassifier, PublicationInputs, PublicationRecord, RepoClient, RepoError, DEFAULT_REPO_HOSTS,
};
use toolreg_core::registry::{merge_records, MergePolicy, Timestamp};
use toolreg_core::{ResourceId, ToolRecord};

use crate::store::{RecordStore, StoreError};

/// One labeled publication for training the tool/non-tool gate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainingExample {
    #[serde(flatten)]
    pub publication: PublicationRecord,
    pub is_tool: bool,
}

/// Per-stage counts of an ingestion run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub publications: usize,
    pub classified_tools: usize,
    pub classified_other: usize,
    pub repo_urls: usize,
    pub repos_fetched: usize,
    pub repo_errors: usize,
    pub grants: usize,
    pub funders: usize,
    pub records_built: usize,
    pub needs_curation: usize,
    pub nameless: usize,
    pub clusters: usize,
    pub created: usize,
    pub merged: usize,
    pub unchanged: usize,
    pub dry_run: bool,
}

pub struct PipelineContext<'a> {
    pub classifier: &'a dyn PublicationClassifier,
    pub topic_model: Option<&'a TopicModel>,
    pub repo_client: &'a dyn RepoClient,
    pub ic_table: &'a IcTable,
    pub funders: &'a FunderRegistry,
    pub repo_hosts: &'a [&'a str],
    pub retrieved_at: Timestamp,
}

impl<'a> PipelineContext<'a> {
    pub fn new(
        classifier: &'a dyn PublicationClassifier,
        repo_client: &'a dyn RepoClient,
        ic_table: &'a IcTable,
        funders: &'a FunderRegistry,
    ) -> Self {
        PipelineContext {
            classifier,
            topic_model: None,
            repo_client,
            ic_table,
            funders,
            repo_hosts: &DEFAULT_REPO_HOSTS,
            retrieved_at: Timestamp(0),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("publication {pub_id:?}: {source}")]
    Classifier {
        pub_id: String,
        #[source]
        source: ClassifierError,
    },
    #[error(transparent)]
    Store(#[from] StoreError),
}

fn contains_phrase(haystack: &str, needle: &str) -> bool {
    if needle.is_empty() {
        return false;
    }
    let padded = format!(" {haystack} ");
    padded.contains(&format!(" {needle} "))
}

/// Registry entries whose canonical name or an alias occurs in `text` as a
/// whole-word phrase after normalization.
pub fn detect_funders<'r>(text: &str, registry: &'r FunderRegistry) -> Vec<&'r FunderEntry> {
    let norm = normalize_funder_name(text);
    registry
        .entries()
        .iter()
        .filter(|e| {
            std::iter::once(&e.canonical_name)
                .chain(&e.aliases)
                .any(|n| contains_phrase(&norm, &normalize_funder_name(n)))
        })
        .collect()
}

/// Runs the gate classifier and extractors over a corpus. Publications
/// yielding no tool name are counted and dropped.
pub fn prepare_publications(
    publications: &[PublicationRecord],
    ctx: &PipelineContext<'_>,
    report: &mut IngestReport,
) -> Result<Vec<ToolRecord>, PipelineError> {
    let mut out = Vec::new();
    for p in publications {
        report.publications += 1;
        let label = classify_publication(p, ctx.classifier).map_err(|source| PipelineError::Classifier {
            pub_id: p.pub_id.clone(),
            source,
        })?;
        if !label.is_tool {
            report.classified_other += 1;
            continue;
        }
        report.classified_tools += 1;

        let mut text = p.title.clone();
        text.push('\n');
        text.push_str(&p.abstract_text);
        if let Some(full) = &p.full_text {
            text.push('\n');
            text.push_str(full);
        }
        let urls = extract_repo_urls(&text, ctx.repo_hosts);
        report.repo_urls += urls.len();
        let mut repo = None;
        for u in &urls {
            match fetch_repo_metadata(u, ctx.repo_client) {
                Ok(m) => {
                    report.repos_fetched += 1;
                    repo = Some(m);
                    break;
                }
                Err(e @ (RepoError::NotFound(_) | RepoError::InvalidUrl(_) | RepoError::Retryable(_))) => {
                    tracing::debug!(publication = %p.pub_id, error = %e, "repository metadata unavailable");
                    report.repo_errors += 1;
                }
            }
        }

        let ack = p.full_text.as_deref().and_then(extract_acknowledgements);
        let grants = ack.as_deref().map(extract_grants).unwrap_or_default();
        let funders: Vec<FunderEntry> = ack
            .as_deref()
            .map(|a| detect_funders(a, ctx.funders).into_iter().cloned().collect())
            .unwrap_or_default();
        report.grants += grants.len();
        report.funders += funders.len();

        let domains: Vec<String> = ctx
            .topic_model
            .and_then(|m| predict_topic(&p.c1_text(), m).label().map(String::from))
            .into_iter()
            .collect();
        let inputs = PublicationInputs {
            repo: repo.as_ref(),
            grants: &grants,
            funders: &funders,
            ic_table: Some(ctx.ic_table),
            domains: &domains,
            retrieved_at: ctx.retrieved_at,
        };
        match build_record_from_publication(p, &inputs) {
            Ok(r) => {
                report.records_built += 1;
                if r.is_parked() {
                    report.needs_curation += 1;
                }
                out.push(r);
            }
            Err(e) => {
                tracing::info!(publication = %e.pub_id, "no tool name found; skipped");
                report.nameless += 1;
            }
        }
    }
    Ok(out)
}

/// What `commit` did or, on a dry run, would do with one cluster.
#[derive(Clone, Debug, PartialEq)]
pub enum ClusterOutcome {
    Created(ToolRecord),
    Merged(ResourceId, ToolRecord),
    Unchanged(ResourceId),
}

/// Clusters `incoming` with the stored records, merges every cluster that
/// contains new evidence and writes the outcome. Clusters spanning several
/// stored records merge into the lowest accession; the others are left for
/// curators.
pub fn commit(
    store: &RecordStore,
    incoming: Vec<ToolRecord>,
    editor: &str,
    at: Timestamp,
    dry_run: bool,
    report: &mut IngestReport,
) -> Result<Vec<ClusterOutcome>, PipelineError> {
    report.dry_run = dry_run;
    let existing = store.list();
    let n_existing = existing.len();
    let mut candidates = existing;
    candidates.extend(incoming);
    let policy = MergePolicy::default();
    let mut outcomes = Vec::new();
    let mut to_create = Vec::new();
    for group in match_duplicates(&candidates) {
        let (old, new): (Vec<usize>, Vec<usize>) = group.iter().partition(|&&i| i < n_existing);
        if new.is_empty() {
            continue;
        }
        report.clusters += 1;
        let mut merged = candidates[new[0]].clone();
        for &i in &new[1..] {
            merged = merge_records(&merged, &candidates[i], policy).expect("new records carry no accession");
        }
        match old.iter().min_by_key(|&&i| candidates[i].accession) {
            None => to_create.push(merged),
            Some(&target) => {
                let base = &candidates[target];
                let rid = base.accession.expect("stored records carry accessions");
                let combined = merge_records(base, &merged, policy).expect("one side has no accession");
                let mut probe = combined.clone();
                probe.revision = base.revision;
                if &probe == base {
                    report.unchanged += 1;
                    outcomes.push(ClusterOutcome::Unchanged(rid));
                    continue;
                }
                report.merged += 1;
                if dry_run {
                    outcomes.push(ClusterOutcome::Merged(rid, combined));
                } else if let Some(stored) = store.replace_merged(rid, combined, editor, at)? {
                    outcomes.push(ClusterOutcome::Merged(rid, stored));
                }
            }
        }
    }
    report.created += to_create.len();
    if dry_run {
        outcomes.extend(to_create.into_iter().map(ClusterOutcome::Created));
    } else if !to_create.is_empty() {
        let stored = store.create_many(to_create, editor, at)?;
        outcomes.extend(stored.into_iter().map(ClusterOutcome::Created));
    }
    Ok(outcomes)
}

/// Accessions touched by a commit.
pub fn touched(outcomes: &[ClusterOutcome]) -> BTreeSet<ResourceId> {
    outcomes
        .iter()
        .filter_map(|o| match o {
            ClusterOutcome::Created(r) => r.accession,
            ClusterOutcome::Merged(rid, _) => Some(*rid),
            ClusterOutcome::Unchanged(_) => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use toolreg_core::ingest::{MemoryRepoClient, RepoMetadata};
    use toolreg_core::registry::{Person, RecordStatus, Release};

    /// Scores by a fixed keyword so tests control the gate exactly.
    struct KeywordGate;

    impl PublicationClassifier for KeywordGate {
        fn score(&self, p: &PublicationRecord) -> Result<f64, ClassifierError> {
            Ok(if p.abstract_text.contains("software") { 0.9 } else { 0.1 })
        }
    }

    fn publication(id: &str, title: &str, abstract_text: &str) -> PublicationRecord {
        PublicationRecord {
            pub_id: id.into(),
            title: title.into(),
            abstract_text: abstract_text.into(),
            ..Default::default()
        }
    }

    fn corpus() -> Vec<PublicationRecord> {
        let mut v = vec![
            publication(
                "p1",
                "Alpha: fast read mapping",
                "We present software at https://github.com/lab/alpha.",
            ),
            publication("p2", "Beta: variant calls", "Open software for variant calling."),
            publication("p3", "A cohort study of sleep", "We followed 300 patients."),
            publication("p4", "Patterns in cell biology", "This software helps."),
        ];
        v[1].full_text = Some(
            "Intro.\n\nFunding\n\nSupported by the National Science Foundation and NIH grant R01 HL123456.\n".into(),
        );
        v
    }

    fn repos() -> MemoryRepoClient {
        MemoryRepoClient::new([RepoMetadata {
            url: "https://github.com/lab/alpha".into(),
            name: "alpha".into(),
            language: Some("Rust".into()),
            license: Some("MIT".into()),
            forks: 7,
            commits: 120,
        }])
    }

    #[test]
    fn stage_counts() {
        let (ic, funders, client) = (IcTable::builtin(), FunderRegistry::builtin(), repos());
        let ctx = PipelineContext::new(&KeywordGate, &client, &ic, &funders);
        let mut report = IngestReport::default();
        let records = prepare_publications(&corpus(), &ctx, &mut report).unwrap();
        assert_eq!(report.publications, 4);
        assert_eq!(report.classified_tools, 3);
        assert_eq!(report.classified_other, 1);
        assert_eq!(report.repos_fetched, 1);
        assert_eq!(report.records_built, 2);
        assert_eq!(report.nameless, 1);
        assert_eq!(report.grants, 1);
        let alpha = &records[0];
        assert_eq!(alpha.name, "Alpha");
        assert_eq!((alpha.usage.forks, alpha.usage.commits), (7, 120));
        let beta = &records[1];
        assert_eq!(beta.award_numbers, ["R01HL123456"]);
        assert!(beta.funding_sources.iter().any(|f| f.contains("Heart")));
        assert!(beta.funding_sources.iter().any(|f| f == "National Science Foundation"));
        assert!(records.iter().all(|r| r.status == RecordStatus::NeedsCuration));
    }

    #[test]
    fn funder_detection_uses_word_boundaries() {
        let reg = FunderRegistry::builtin();
        let found: Vec<&str> = detect_funders("Funded by the NIH and the Wellcome Trust.", &reg)
            .iter()
            .map(|e| e.funder_id.as_str())
            .collect();
        assert!(found.contains(&"100000002"));
        assert_eq!(detect_funders("UNIHEALTH foundation", &reg).len(), 0);
    }

    fn active(name: &str) -> ToolRecord {
        ToolRecord {
            name: name.into(),
            description: "Aligner.".into(),
            links: vec![format!("https://example.org/{name}")],
            tool_type: Some("library".into()),
            functions: vec!["operation_3198".into()],
            authors: vec![Person::named("A")],
            domains: vec!["genomics".into()],
            releases: vec![Release {
                version: "1".into(),
                date: None,
            }],
            platforms: vec!["Linux".into()],
            ..Default::default()
        }
    }

    #[test]
    fn commit_merges_into_existing_and_creates_new() {
        let store = RecordStore::in_memory();
        let stored = store.create(active("Alpha"), "seed", Timestamp(1)).unwrap();
        let (ic, funders, client) = (IcTable::builtin(), FunderRegistry::builtin(), repos());
        let ctx = PipelineContext::new(&KeywordGate, &client, &ic, &funders);
        let mut report = IngestReport::default();
        let records = prepare_publications(&corpus(), &ctx, &mut report).unwrap();

        let mut dry = IngestReport::default();
        commit(&store, records.clone(), "ingest", Timestamp(2), true, &mut dry).unwrap();
        assert_eq!((dry.created, dry.merged), (1, 1));
        assert_eq!(store.len(), 1);
        assert_eq!(store.get(stored.accession.unwrap()).unwrap(), stored);

        let out = commit(&store, records.clone(), "ingest", Timestamp(2), false, &mut report).unwrap();
        assert_eq!(touched(&out).len(), 2);
        assert_eq!(store.len(), 2);
        let alpha = store.get(stored.accession.unwrap()).unwrap();
        assert_eq!(alpha.revision, 2);
        assert!(!alpha.is_parked());
        assert_eq!(alpha.languages, ["Rust"]);

        let mut again = IngestReport::default();
        commit(&store, records, "ingest", Timestamp(2), false, &mut again).unwrap();
        assert_eq!(again.unchanged, 2);
        assert_eq!(store.len(), 2);
    }
}
