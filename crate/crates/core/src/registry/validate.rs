use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::record::{Person, ToolRecord, FIELDS};
use super::{orcid, ResourceId};
use crate::{data, url};

/// Controlled vocabularies. A `None` vocabulary is not configured and
/// therefore not enforced.
#[derive(Clone, Debug, Default)]
pub struct Vocabularies {
    pub tool_types: Option<BTreeSet<String>>,
    pub platforms: Option<BTreeSet<String>>,
    pub functions: Option<BTreeSet<String>>,
    pub domains: Option<BTreeSet<String>>,
    pub formats: Option<BTreeSet<String>>,
    pub languages: Option<BTreeSet<String>>,
    pub institutions: Option<BTreeSet<String>>,
    pub funders: Option<BTreeSet<String>>,
}

fn list_set(text: &str) -> BTreeSet<String> {
    data::list_lines(text).map(String::from).collect()
}

fn ontology_ids(text: &str) -> BTreeSet<String> {
    data::list_lines(text)
        .filter_map(|l| l.split('\t').next())
        .map(String::from)
        .collect()
}

impl Vocabularies {
    /// Shipped vocabularies; institutions and funders stay unconstrained.
    pub fn builtin() -> Self {
        Vocabularies {
            tool_types: Some(list_set(data::TOOL_TYPES)),
            platforms: Some(list_set(data::PLATFORMS)),
            functions: Some(ontology_ids(data::FUNCTIONS)),
            domains: Some(ontology_ids(data::DOMAINS)),
            formats: Some(ontology_ids(data::FORMATS)),
            languages: Some(list_set(data::LANGUAGES)),
            institutions: None,
            funders: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Required,
    Format,
    Vocabulary,
    DanglingReference,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub rule: Rule,
    pub detail: String,
}

impl Violation {
    fn new(field: &str, rule: Rule, detail: impl Into<String>) -> Self {
        Violation {
            field: field.to_string(),
            rule,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fields(&self) -> BTreeSet<&str> {
        self.violations.iter().map(|v| v.field.as_str()).collect()
    }

    /// Drops violations of the accession requirement, for submissions that
    /// have not been minted yet.
    pub fn without_accession(mut self) -> Self {
        self.violations
            .retain(|v| !(v.field == "accession" && v.rule == Rule::Required));
        self
    }
}

fn blank(s: &str) -> bool {
    s.trim().is_empty()
}

fn field_is_empty(record: &ToolRecord, name: &str) -> bool {
    match name {
        "name" => blank(&record.name),
        "accession" => record.accession.is_none(),
        "doi" => record.doi.as_deref().is_none_or(blank),
        "description" => blank(&record.description),
        "logo_url" => record.logo_url.as_deref().is_none_or(blank),
        "image_urls" => record.image_urls.is_empty(),
        "links" => record.links.is_empty(),
        "tool_type" => record.tool_type.as_deref().is_none_or(blank),
        "functions" => record.functions.is_empty(),
        "source_repos" => record.source_repos.is_empty(),
        "languages" => record.languages.is_empty(),
        "authors" => record.authors.is_empty(),
        "pis" => record.pis.is_empty(),
        "institutions" => record.institutions.is_empty(),
        "primary_publication" => record.primary_publication.as_deref().is_none_or(blank),
        "other_publications" => record.other_publications.is_empty(),
        "funding_sources" => record.funding_sources.is_empty(),
        "award_numbers" => record.award_numbers.is_empty(),
        "domains" => record.domains.is_empty(),
        "releases" => record.releases.is_empty(),
        "platforms" => record.platforms.is_empty(),
        "input_formats" => record.input_formats.is_empty(),
        "output_formats" => record.output_formats.is_empty(),
        "upstream_tools" => record.upstream_tools.is_empty(),
        "downstream_tools" => record.downstream_tools.is_empty(),
        "reimplementation_of" => record.reimplementation_of.is_empty(),
        "reimplemented_by" => record.reimplemented_by.is_empty(),
        "submitter" => record.submitter.as_deref().is_none_or(blank),
        _ => false,
    }
}

/// One `required` violation per empty required field.
pub fn check_required(record: &ToolRecord) -> Vec<Violation> {
    FIELDS
        .iter()
        .filter(|f| f.required && field_is_empty(record, f.name))
        .map(|f| Violation::new(f.name, Rule::Required, format!("{} is required", f.title)))
        .collect()
}

/// `10.<registrant>/<suffix>` with a 4-9 digit registrant code.
pub fn is_doi(s: &str) -> bool {
    let Some(rest) = s.strip_prefix("10.") else {
        return false;
    };
    let Some((registrant, suffix)) = rest.split_once('/') else {
        return false;
    };
    let reg_head = registrant.split('.').next().unwrap_or("");
    (4..=9).contains(&reg_head.len())
        && registrant.bytes().all(|b| b.is_ascii_digit() || b == b'.')
        && reg_head.bytes().all(|b| b.is_ascii_digit())
        && !suffix.is_empty()
        && !suffix.chars().any(char::is_whitespace)
}

fn is_iso_date(s: &str) -> bool {
    let b = s.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return false;
    }
    let num = |r: core::ops::Range<usize>| -> Option<u32> { s.get(r)?.parse().ok() };
    matches!((num(0..4), num(5..7), num(8..10)), (Some(_), Some(m), Some(d)) if (1..=12).contains(&m) && (1..=31).contains(&d))
}

fn check_urls<'a>(out: &mut Vec<Violation>, field: &str, urls: impl IntoIterator<Item = &'a String>) {
    for u in urls {
        if !url::is_valid(u) {
            out.push(Violation::new(
                field,
                Rule::Format,
                format!("not an absolute URL: {u:?}"),
            ));
        }
    }
}

fn check_dois<'a>(out: &mut Vec<Violation>, field: &str, dois: impl IntoIterator<Item = &'a String>) {
    for d in dois {
        if !is_doi(d) {
            out.push(Violation::new(field, Rule::Format, format!("not a DOI: {d:?}")));
        }
    }
}

fn check_people(out: &mut Vec<Violation>, field: &str, people: &[Person]) {
    for p in people {
        if blank(&p.name) {
            out.push(Violation::new(field, Rule::Format, "person without a name"));
        }
        if let Some(id) = &p.orcid {
            if !orcid::is_valid(id) {
                out.push(Violation::new(field, Rule::Format, format!("invalid ORCID {id:?}")));
            }
        }
    }
}

fn check_nonblank<'a>(out: &mut Vec<Violation>, field: &str, items: impl IntoIterator<Item = &'a String>) {
    if items.into_iter().any(|s| blank(s)) {
        out.push(Violation::new(field, Rule::Format, "blank list entry"));
    }
}

/// Syntax rules for populated fields only: URLs, DOIs, ORCIDs, release
/// dates, blank list entries. Required-field completeness and vocabulary
/// membership are not checked here.
pub fn type_violations(record: &ToolRecord) -> Vec<Violation> {
    let mut out = Vec::new();
    if let Some(d) = &record.doi {
        check_dois(&mut out, "doi", [d]);
    }
    if let Some(u) = &record.logo_url {
        check_urls(&mut out, "logo_url", [u]);
    }
    check_urls(&mut out, "image_urls", &record.image_urls);
    check_urls(&mut out, "links", &record.links);
    check_nonblank(&mut out, "functions", &record.functions);
    check_urls(&mut out, "source_repos", &record.source_repos);
    check_nonblank(&mut out, "languages", &record.languages);
    check_people(&mut out, "authors", &record.authors);
    check_people(&mut out, "pis", &record.pis);
    check_nonblank(&mut out, "institutions", &record.institutions);
    if let Some(d) = &record.primary_publication {
        check_dois(&mut out, "primary_publication", [d]);
    }
    check_dois(&mut out, "other_publications", &record.other_publications);
    check_nonblank(&mut out, "funding_sources", &record.funding_sources);
    check_nonblank(&mut out, "award_numbers", &record.award_numbers);
    check_nonblank(&mut out, "domains", &record.domains);
    for r in &record.releases {
        if blank(&r.version) {
            out.push(Violation::new("releases", Rule::Format, "release without a version"));
        }
        if let Some(d) = &r.date {
            if !is_iso_date(d) {
                out.push(Violation::new(
                    "releases",
                    Rule::Format,
                    format!("release date {d:?} is not YYYY-MM-DD"),
                ));
            }
        }
    }
    check_nonblank(&mut out, "platforms", &record.platforms);
    check_nonblank(&mut out, "input_formats", &record.input_formats);
    check_nonblank(&mut out, "output_formats", &record.output_formats);
    out
}

fn check_vocab<'a>(
    out: &mut Vec<Violation>,
    field: &str,
    vocab: Option<&BTreeSet<String>>,
    ids: impl IntoIterator<Item = &'a String>,
) {
    let Some(vocab) = vocab else { return };
    for id in ids {
        if !blank(id) && !vocab.contains(id) {
            out.push(Violation::new(
                field,
                Rule::Vocabulary,
                format!("{id:?} is not in the vocabulary"),
            ));
        }
    }
}

fn vocabulary_violations(record: &ToolRecord, v: &Vocabularies) -> Vec<Violation> {
    let mut out = Vec::new();
    check_vocab(&mut out, "tool_type", v.tool_types.as_ref(), &record.tool_type);
    check_vocab(&mut out, "functions", v.functions.as_ref(), &record.functions);
    check_vocab(&mut out, "languages", v.languages.as_ref(), &record.languages);
    check_vocab(&mut out, "institutions", v.institutions.as_ref(), &record.institutions);
    check_vocab(&mut out, "funding_sources", v.funders.as_ref(), &record.funding_sources);
    check_vocab(&mut out, "domains", v.domains.as_ref(), &record.domains);
    check_vocab(&mut out, "platforms", v.platforms.as_ref(), &record.platforms);
    check_vocab(&mut out, "input_formats", v.formats.as_ref(), &record.input_formats);
    check_vocab(&mut out, "output_formats", v.formats.as_ref(), &record.output_formats);
    out
}

fn reference_violations(record: &ToolRecord, known: &dyn Fn(ResourceId) -> bool) -> Vec<Violation> {
    let mut out = Vec::new();
    let lists: [(&str, &[ResourceId]); 4] = [
        ("upstream_tools", &record.upstream_tools),
        ("downstream_tools", &record.downstream_tools),
        ("reimplementation_of", &record.reimplementation_of),
        ("reimplemented_by", &record.reimplemented_by),
    ];
    for (field, ids) in lists {
        for id in ids {
            if !known(*id) && !record.pending_refs.contains(id) {
                out.push(Violation::new(
                    field,
                    Rule::DanglingReference,
                    format!("{id} is not registered"),
                ));
            }
        }
    }
    out
}

/// Full validation: required fields, syntax and vocabulary membership.
pub fn validate_record(record: &ToolRecord, vocab: &Vocabularies) -> ValidationReport {
    validate_record_with(record, vocab, None)
}

/// As [`validate_record`], additionally resolving workflow and
/// reimplementation references when `known` is supplied.
pub fn validate_record_with(
    record: &ToolRecord,
    vocab: &Vocabularies,
    known: Option<&dyn Fn(ResourceId) -> bool>,
) -> ValidationReport {
    let mut violations = check_required(record);
    violations.extend(type_violations(record));
    violations.extend(vocabulary_violations(record, vocab));
    if let Some(known) = known {
        violations.extend(reference_violations(record, known));
    }
    ValidationReport { violations }
}
