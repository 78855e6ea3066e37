use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ResourceId;

/// Seconds since the Unix epoch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timestamp(pub i64);

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Person {
    pub name: String,
    #[serde(default)]
    pub orcid: Option<String>,
}

impl Person {
    pub fn named(name: impl Into<String>) -> Self {
        Person {
            name: name.into(),
            orcid: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Release {
    pub version: String,
    /// `YYYY-MM-DD` when known.
    #[serde(default)]
    pub date: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageMetrics {
    pub forks: u64,
    pub commits: u64,
}

impl UsageMetrics {
    /// `ln(1 + forks) + ln(1 + commits)`.
    pub fn score(&self) -> f64 {
        libm::log1p(self.forks as f64) + libm::log1p(self.commits as f64)
    }

    pub fn is_zero(&self) -> bool {
        self.forks == 0 && self.commits == 0
    }
}

/// Where a record's metadata came from. Declaration order is merge
/// priority, lowest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Aggregator,
    Publication,
    UserSubmission,
    FundingCuration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceProvenance {
    pub source: Source,
    pub origin_ref: String,
    pub retrieved_at: Timestamp,
}

/// Records missing required metadata are parked for curation and hidden from
/// anonymous readers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    #[default]
    Active,
    NeedsCuration,
}

/// One registered tool. The first 28 fields follow the metadata table in
/// order; the trailing fields are registry bookkeeping. Serializing this
/// struct with `serde_json` is the canonical form used for diffs and replay.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToolRecord {
    pub name: String,
    pub accession: Option<ResourceId>,
    pub doi: Option<String>,
    pub description: String,
    pub logo_url: Option<String>,
    pub image_urls: Vec<String>,
    pub links: Vec<String>,
    pub tool_type: Option<String>,
    pub functions: Vec<String>,
    pub source_repos: Vec<String>,
    pub languages: Vec<String>,
    pub authors: Vec<Person>,
    pub pis: Vec<Person>,
    pub institutions: Vec<String>,
    pub primary_publication: Option<String>,
    pub other_publications: Vec<String>,
    pub funding_sources: Vec<String>,
    pub award_numbers: Vec<String>,
    pub domains: Vec<String>,
    pub releases: Vec<Release>,
    pub platforms: Vec<String>,
    pub input_formats: Vec<String>,
    pub output_formats: Vec<String>,
    pub upstream_tools: Vec<ResourceId>,
    pub downstream_tools: Vec<ResourceId>,
    pub reimplementation_of: Vec<ResourceId>,
    pub reimplemented_by: Vec<ResourceId>,
    pub submitter: Option<String>,

    pub license: Option<String>,
    pub usage: UsageMetrics,
    pub provenance: Vec<SourceProvenance>,
    /// Workflow/reimplementation references allowed to dangle until the
    /// referenced tool is registered.
    pub pending_refs: Vec<ResourceId>,
    pub status: RecordStatus,
    pub revision: u64,
}

impl ToolRecord {
    /// Canonical serialization: compact JSON, keys in declaration order.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("tool records always serialize")
    }

    pub fn is_parked(&self) -> bool {
        self.status == RecordStatus::NeedsCuration
    }

    /// Highest-priority source among the provenances and its newest
    /// retrieval time.
    pub fn source_rank(&self) -> Option<(Source, Timestamp)> {
        self.provenance.iter().map(|p| (p.source, p.retrieved_at)).max()
    }
}

/// One row of the metadata table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    /// Serialized field name.
    pub name: &'static str,
    pub title: &'static str,
    pub required: bool,
    /// Controlling ontology or vocabulary, empty when free-form.
    pub vocabulary: &'static str,
}

const fn field(name: &'static str, title: &'static str, required: bool, vocabulary: &'static str) -> FieldSpec {
    FieldSpec {
        name,
        title,
        required,
        vocabulary,
    }
}

pub const FIELDS: [FieldSpec; 28] = [
    field("name", "Name", true, ""),
    field("accession", "Accession number", true, "Local resource identifier"),
    field("doi", "DOI", false, "Digital Object Identifier System"),
    field("description", "Description", true, ""),
    field("logo_url", "Logo", false, ""),
    field("image_urls", "Image(s)", false, ""),
    field("links", "Link(s)", true, "W3 URL Specification"),
    field("tool_type", "Type", true, "Locally defined"),
    field("functions", "Function(s)", true, "EDAM"),
    field("source_repos", "Source repository(s)", false, "W3 URL Specification"),
    field("languages", "Language(s)", false, "GitHub"),
    field("authors", "Author(s)", true, "ORCID"),
    field("pis", "PI(s)", false, "ORCID"),
    field("institutions", "Research Institution(s)", false, "Wikidata"),
    field("primary_publication", "Primary publication", false, "DOI"),
    field("other_publications", "Other publication(s)", false, "DOI"),
    field("funding_sources", "Funding source(s)", false, "CrossRef"),
    field("award_numbers", "Award number(s)", false, ""),
    field("domains", "Biological domain(s)", true, "EDAM"),
    field("releases", "Release(s)", true, ""),
    field("platforms", "Platform(s)", true, "Locally defined"),
    field("input_formats", "Input format(s)", false, "EDAM"),
    field("output_formats", "Output format(s)", false, "EDAM"),
    field(
        "upstream_tools",
        "Upstream workflow tool(s)",
        false,
        "Local resource identifier",
    ),
    field(
        "downstream_tools",
        "Downstream workflow tool(s)",
        false,
        "Local resource identifier",
    ),
    field(
        "reimplementation_of",
        "Reimplementation of",
        false,
        "Local resource identifier",
    ),
    field(
        "reimplemented_by",
        "Reimplemented by",
        false,
        "Local resource identifier",
    ),
    field("submitter", "Submitter", false, ""),
];

impl FieldSpec {
    pub fn lookup(name: &str) -> Option<&'static FieldSpec> {
        FIELDS.iter().find(|f| f.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_keys_follow_table_order() {
        let json = ToolRecord::default().canonical_json();
        let mut last = 0;
        for f in FIELDS.iter() {
            let pos = json.find(&alloc::format!("\"{}\":", f.name)).unwrap();
            assert!(pos >= last, "{} out of order", f.name);
            last = pos;
        }
        assert!(json.ends_with("\"revision\":0}"));
    }

    #[test]
    fn usage_score_is_log_damped() {
        assert_eq!(UsageMetrics::default().score(), 0.0);
        let u = UsageMetrics { forks: 7, commits: 120 };
        assert!((u.score() - (8f64.ln() + 121f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn source_priority_order() {
        assert!(Source::FundingCuration > Source::UserSubmission);
        assert!(Source::UserSubmission > Source::Publication);
        assert!(Source::Publication > Source::Aggregator);
    }
}
