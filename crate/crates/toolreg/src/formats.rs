//! File formats: JSON-lines corpora and records, TSV tables, ontology files,
//! repository fixtures and snapshot files.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use toolreg_core::classify::LabeledCorpus;
use toolreg_core::ingest::{FunderRegistry, IcTable, PublicationRecord, RepoClient, RepoError, RepoMetadata};
use toolreg_core::ir::PhraseIndex;
use toolreg_core::thesaurus::{load_ontology, OntologyGraph};
use toolreg_core::{url, Thesaurus, ToolRecord};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

impl FormatError {
    fn invalid(path: &Path, message: impl Into<String>) -> Self {
        FormatError::Invalid {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes through a temporary sibling and renames, so readers never see a
/// partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    let io = |source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// One JSON value per non-blank line.
pub fn parse_jsonl<T: DeserializeOwned>(text: &str, path: &Path) -> Result<Vec<T>, FormatError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| FormatError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, FormatError> {
    parse_jsonl(&read_text(path)?, path)
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("serializable"));
        out.push('\n');
    }
    out
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), FormatError> {
    atomic_write(path, to_jsonl(items).as_bytes())
}

/// Publication corpus; ids must be present and unique.
pub fn read_publications(path: &Path) -> Result<Vec<PublicationRecord>, FormatError> {
    let pubs: Vec<PublicationRecord> = read_jsonl(path)?;
    let mut seen = BTreeSet::new();
    for p in &pubs {
        if p.pub_id.trim().is_empty() {
            return Err(FormatError::invalid(path, "publication without pub_id"));
        }
        if !seen.insert(p.pub_id.as_str()) {
            return Err(FormatError::invalid(path, format!("duplicate pub_id {:?}", p.pub_id)));
        }
    }
    Ok(pubs)
}

pub fn read_records(path: &Path) -> Result<Vec<ToolRecord>, FormatError> {
    read_jsonl(path)
}

pub fn read_labeled_corpus(path: &Path) -> Result<LabeledCorpus, FormatError> {
    Ok(LabeledCorpus {
        items: read_jsonl(path)?,
    })
}

pub fn read_ontology(path: &Path) -> Result<OntologyGraph, FormatError> {
    load_ontology(&read_text(path)?).map_err(|e| FormatError::invalid(path, e.to_string()))
}

pub fn read_ic_table(path: &Path) -> Result<IcTable, FormatError> {
    IcTable::parse(&read_text(path)?).map_err(|e| FormatError::invalid(path, e.to_string()))
}

pub fn read_funders(path: &Path) -> Result<FunderRegistry, FormatError> {
    FunderRegistry::parse(&read_text(path)?).map_err(|e| FormatError::invalid(path, e.to_string()))
}

pub fn read_thesaurus(path: &Path) -> Result<Thesaurus, FormatError> {
    Thesaurus::from_snapshot(&read_text(path)?).map_err(|e| FormatError::invalid(path, e.to_string()))
}

pub fn read_index(path: &Path) -> Result<PhraseIndex, FormatError> {
    PhraseIndex::from_snapshot(&read_text(path)?).map_err(|e| FormatError::invalid(path, e.to_string()))
}

/// Repository fixture line: metadata plus an optional outage flag.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepoFixture {
    #[serde(flatten)]
    pub meta: RepoMetadata,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unavailable: bool,
}

/// Repository client backed by a JSON-lines fixture keyed by URL.
#[derive(Clone, Debug, Default)]
pub struct FixtureRepoClient {
    repos: BTreeMap<String, RepoFixture>,
}

impl FixtureRepoClient {
    pub fn new(fixtures: impl IntoIterator<Item = RepoFixture>) -> Self {
        FixtureRepoClient {
            repos: fixtures.into_iter().map(|f| (url::normalize(&f.meta.url), f)).collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        Ok(Self::new(read_jsonl::<RepoFixture>(path)?))
    }

    pub fn len(&self) -> usize {
        self.repos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.repos.is_empty()
    }
}

impl RepoClient for FixtureRepoClient {
    fn fetch(&self, url: &str) -> Result<RepoMetadata, RepoError> {
        match self.repos.get(&url::normalize(url)) {
            Some(f) if f.unavailable => Err(RepoError::Retryable(url.to_string())),
            Some(f) => Ok(f.meta.clone()),
            None => Err(RepoError::NotFound(url.to_string())),
        }
    }
}
