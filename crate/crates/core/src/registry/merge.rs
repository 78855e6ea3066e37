use alloc::vec::Vec;

use super::record::{RecordStatus, ToolRecord};
use super::ResourceId;

/// Field-wise merge policy. Sources rank funding curation above user
/// submissions above publications above aggregators; within one source the
/// newer retrieval wins, and a full tie keeps the first argument.
#[derive(Clone, Copy, Debug, Default)]
pub struct MergePolicy {
    /// Take the element-wise maximum of usage metrics instead of the
    /// winner's.
    pub max_usage: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MergeError {
    #[error("records carry different accessions {0} and {1}; curator resolution required")]
    AccessionConflict(ResourceId, ResourceId),
}

fn union<T: PartialEq + Clone>(first: &[T], second: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(first.len() + second.len());
    for item in first.iter().chain(second) {
        if !out.contains(item) {
            out.push(item.clone());
        }
    }
    out
}

fn pick_text(winner: &str, loser: &str) -> alloc::string::String {
    if winner.trim().is_empty() { loser } else { winner }.into()
}

fn pick<T: Clone>(winner: &Option<T>, loser: &Option<T>) -> Option<T> {
    winner.clone().or_else(|| loser.clone())
}

pub fn merge_records(a: &ToolRecord, b: &ToolRecord, policy: MergePolicy) -> Result<ToolRecord, MergeError> {
    let accession = match (a.accession, b.accession) {
        (Some(x), Some(y)) if x != y => return Err(MergeError::AccessionConflict(x, y)),
        (x, y) => x.or(y),
    };
    let (w, l) = if b.source_rank() > a.source_rank() {
        (b, a)
    } else {
        (a, b)
    };
    let usage = if policy.max_usage {
        super::UsageMetrics {
            forks: w.usage.forks.max(l.usage.forks),
            commits: w.usage.commits.max(l.usage.commits),
        }
    } else if w.usage.is_zero() {
        l.usage
    } else {
        w.usage
    };
    let status = if w.status == RecordStatus::Active || l.status == RecordStatus::Active {
        RecordStatus::Active
    } else {
        RecordStatus::NeedsCuration
    };
    Ok(ToolRecord {
        name: pick_text(&w.name, &l.name),
        accession,
        doi: pick(&w.doi, &l.doi),
        description: pick_text(&w.description, &l.description),
        logo_url: pick(&w.logo_url, &l.logo_url),
        image_urls: union(&w.image_urls, &l.image_urls),
        links: union(&w.links, &l.links),
        tool_type: pick(&w.tool_type, &l.tool_type),
        functions: union(&w.functions, &l.functions),
        source_repos: union(&w.source_repos, &l.source_repos),
        languages: union(&w.languages, &l.languages),
        authors: union(&w.authors, &l.authors),
        pis: union(&w.pis, &l.pis),
        institutions: union(&w.institutions, &l.institutions),
        primary_publication: pick(&w.primary_publication, &l.primary_publication),
        other_publications: union(&w.other_publications, &l.other_publications),
        funding_sources: union(&w.funding_sources, &l.funding_sources),
        award_numbers: union(&w.award_numbers, &l.award_numbers),
        domains: union(&w.domains, &l.domains),
        releases: union(&w.releases, &l.releases),
        platforms: union(&w.platforms, &l.platforms),
        input_formats: union(&w.input_formats, &l.input_formats),
        output_formats: union(&w.output_formats, &l.output_formats),
        upstream_tools: union(&w.upstream_tools, &l.upstream_tools),
        downstream_tools: union(&w.downstream_tools, &l.downstream_tools),
        reimplementation_of: union(&w.reimplementation_of, &l.reimplementation_of),
        reimplemented_by: union(&w.reimplemented_by, &l.reimplemented_by),
        submitter: pick(&w.submitter, &l.submitter),
        license: pick(&w.license, &l.license),
        usage,
        provenance: union(&w.provenance, &l.provenance),
        pending_refs: union(&w.pending_refs, &l.pending_refs),
        status,
        revision: a.revision.max(b.revision),
    })
}
