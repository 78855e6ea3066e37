use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::funding::{map_grant_to_ic, FunderEntry, GrantRef, IcTable};
use super::names::extract_tool_name;
use super::publication::PublicationRecord;
use super::repos::{extract_urls, is_repo_url, RepoMetadata, DEFAULT_REPO_HOSTS};
use crate::registry::{
    check_required, is_doi, RecordStatus, Source, SourceProvenance, Timestamp, ToolRecord, UsageMetrics,
};

/// Everything gathered about a tool publication besides the article itself.
#[derive(Clone, Copy, Debug)]
pub struct PublicationInputs<'a> {
    pub repo: Option<&'a RepoMetadata>,
    pub grants: &'a [GrantRef],
    pub funders: &'a [FunderEntry],
    pub ic_table: Option<&'a IcTable>,
    pub domains: &'a [String],
    pub retrieved_at: Timestamp,
}

impl Default for PublicationInputs<'_> {
    fn default() -> Self {
        PublicationInputs {
            repo: None,
            grants: &[],
            funders: &[],
            ic_table: None,
            domains: &[],
            retrieved_at: Timestamp(0),
        }
    }
}

/// No tool name could be found; the partial record is returned parked.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("publication {pub_id:?} yields no tool name; needs curation")]
pub struct NeedsCuration {
    pub pub_id: String,
    pub record: alloc::boxed::Box<ToolRecord>,
}

fn push_unique(list: &mut Vec<String>, value: &str) {
    if !value.trim().is_empty() && !list.iter().any(|v| v == value) {
        list.push(value.to_string());
    }
}

/// Assembles a publication-sourced record. Records missing required
/// metadata come back with status `needs_curation`.
pub fn build_record_from_publication(
    publication: &PublicationRecord,
    inputs: &PublicationInputs<'_>,
) -> Result<ToolRecord, NeedsCuration> {
    let mut r = ToolRecord {
        description: publication.abstract_text.trim().to_string(),
        authors: publication.authors.clone(),
        institutions: publication.institutions.clone(),
        domains: inputs.domains.to_vec(),
        ..Default::default()
    };
    if is_doi(&publication.pub_id) {
        r.primary_publication = Some(publication.pub_id.clone());
    }
    let mut text = publication.title.clone();
    text.push('\n');
    text.push_str(&publication.abstract_text);
    for u in extract_urls(&text) {
        if is_repo_url(&u, &DEFAULT_REPO_HOSTS) {
            push_unique(&mut r.source_repos, &u);
        }
        push_unique(&mut r.links, &u);
    }
    if let Some(repo) = inputs.repo {
        push_unique(&mut r.source_repos, &repo.url);
        if r.links.is_empty() {
            push_unique(&mut r.links, &repo.url);
        }
        if let Some(l) = &repo.language {
            push_unique(&mut r.languages, l);
        }
        r.license = repo.license.clone();
        r.usage = UsageMetrics {
            forks: repo.forks,
            commits: repo.commits,
        };
    }
    for g in inputs.grants {
        push_unique(&mut r.award_numbers, &g.compact());
        if let Some(inst) = inputs.ic_table.and_then(|t| map_grant_to_ic(g, t).ok()) {
            push_unique(&mut r.funding_sources, &inst.name);
        }
    }
    for f in inputs.funders {
        push_unique(&mut r.funding_sources, &f.canonical_name);
    }
    r.provenance.push(SourceProvenance {
        source: Source::Publication,
        origin_ref: publication.pub_id.clone(),
        retrieved_at: inputs.retrieved_at,
    });

    let name = extract_tool_name(&publication.title, &publication.abstract_text)
        .or_else(|| inputs.repo.map(|m| m.name.trim().to_string()).filter(|n| !n.is_empty()));
    match name {
        Some(n) => {
            r.name = n;
            if check_required(&r).iter().any(|v| v.field != "accession") {
                r.status = RecordStatus::NeedsCuration;
            }
            Ok(r)
        }
        None => {
            r.status = RecordStatus::NeedsCuration;
            Err(NeedsCuration {
                pub_id: publication.pub_id.clone(),
                record: alloc::boxed::Box::new(r),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{extract_acknowledgements, extract_grants};
    use alloc::vec;

    fn platform_publication() -> PublicationRecord {
        PublicationRecord {
            pub_id: "10.1101/000001".into(),
            title: "Helix: a catalogue of biomedical software with semantic search".into(),
            abstract_text: "Finding the right analysis software is hard. \
                Helix is available at <https://helix.example.org> and its source code is hosted at <https://github.com/helix-lab/helix>."
                .into(),
            full_text: Some(
                "Acknowledgements\n\nThis work was supported in part by NIH Awards U54GM114833 to WW and PP, as well as \
                 R35HL135772 to PP; and the UCLA Laubisch endowment, to PP.\n\nReferences\n\n- x\n"
                    .into(),
            ),
            ..Default::default()
        }
    }

    #[test]
    fn the_platform_itself() {
        let p = platform_publication();
        let ack = extract_acknowledgements(p.full_text.as_deref().unwrap()).unwrap();
        let grants = extract_grants(&ack);
        let table = IcTable::builtin();
        let r = build_record_from_publication(
            &p,
            &PublicationInputs {
                grants: &grants,
                ic_table: Some(&table),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.name, "Helix");
        assert!(r.links.iter().any(|l| l == "https://helix.example.org"));
        assert_eq!(r.source_repos, ["https://github.com/helix-lab/helix"]);
        assert_eq!(r.award_numbers, ["U54GM114833", "R35HL135772"]);
        assert_eq!(
            r.funding_sources,
            [
                "National Institute of General Medical Sciences",
                "National Heart, Lung, and Blood Institute"
            ]
        );
        assert_eq!(r.primary_publication.as_deref(), Some("10.1101/000001"));
        assert_eq!(r.provenance[0].source, Source::Publication);
        assert_eq!(r.status, RecordStatus::NeedsCuration);
    }

    #[test]
    fn repo_metadata_is_copied() {
        let repo = RepoMetadata {
            url: "https://github.com/lab/tool".into(),
            name: "tool".into(),
            language: Some("Python".into()),
            license: Some("MIT".into()),
            forks: 7,
            commits: 120,
        };
        let p = PublicationRecord {
            pub_id: "p1".into(),
            title: "Nothing distinctive".into(),
            ..Default::default()
        };
        let r = build_record_from_publication(
            &p,
            &PublicationInputs {
                repo: Some(&repo),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.name, "tool");
        assert_eq!(r.usage, UsageMetrics { forks: 7, commits: 120 });
        assert_eq!(r.languages, ["Python"]);
        assert_eq!(r.license.as_deref(), Some("MIT"));
        assert_eq!(r.links, vec!["https://github.com/lab/tool"]);
    }

    #[test]
    fn nameless_publication_needs_curation() {
        let p = PublicationRecord {
            pub_id: "p2".into(),
            title: "Latent dirichlet allocation".into(),
            ..Default::default()
        };
        let err = build_record_from_publication(&p, &PublicationInputs::default()).unwrap_err();
        assert_eq!(err.pub_id, "p2");
        assert!(err.record.is_parked());
    }
}
