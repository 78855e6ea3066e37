use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::url;

/// Repository hosts recognized by default.
pub const DEFAULT_REPO_HOSTS: [&str; 4] = ["github.com", "gitlab.com", "bitbucket.org", "sourceforge.net"];

const SCHEMES: [&str; 2] = ["https://", "http://"];

fn url_end(c: char) -> bool {
    c.is_whitespace() || matches!(c, '<' | '>' | '"' | '\'' | '`' | '|' | '\\' | '{' | '}' | '^')
}

/// Absolute `http`/`https` URLs in `text`, trailing punctuation removed,
/// deduplicated in order of appearance.
pub fn extract_urls(text: &str) -> Vec<String> {
    let lower = text.to_ascii_lowercase();
    let mut starts: Vec<usize> = SCHEMES
        .iter()
        .flat_map(|s| lower.match_indices(s).map(|(i, _)| i))
        .collect();
    starts.sort_unstable();
    let mut out: Vec<String> = Vec::new();
    for start in starts {
        let tail = &text[start..];
        let end = tail.find(url_end).unwrap_or(tail.len());
        let mut candidate = &tail[..end];
        loop {
            let trimmed = candidate.trim_end_matches(['.', ',', ';', ':', '!', '?', '*', ']', '[']);
            // Drop a closing parenthesis only when it is unbalanced.
            let trimmed = match trimmed.strip_suffix(')') {
                Some(t) if trimmed.matches('(').count() < trimmed.matches(')').count() => t,
                _ => trimmed,
            };
            if trimmed.len() == candidate.len() {
                break;
            }
            candidate = trimmed;
        }
        if url::is_valid(candidate) && !out.iter().any(|u| u == candidate) {
            out.push(candidate.to_string());
        }
    }
    out
}

pub fn is_repo_url(candidate: &str, hosts: &[&str]) -> bool {
    url::host(candidate).is_some_and(|host| hosts.iter().any(|h| url::host_matches(&host, h)))
}

/// [`extract_urls`] restricted to `hosts` and their subdomains.
pub fn extract_repo_urls(text: &str, hosts: &[&str]) -> Vec<String> {
    extract_urls(text)
        .into_iter()
        .filter(|u| is_repo_url(u, hosts))
        .collect()
}

/// Repository facts used to enrich a tool record.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RepoMetadata {
    pub url: String,
    pub name: String,
    pub language: Option<String>,
    pub license: Option<String>,
    pub forks: u64,
    pub commits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RepoError {
    #[error("not a repository URL: {0:?}")]
    InvalidUrl(String),
    #[error("repository not found: {0}")]
    NotFound(String),
    #[error("repository service unavailable: {0}")]
    Retryable(String),
}

/// Source of repository metadata, such as a hosting API or a fixture file.
pub trait RepoClient {
    fn fetch(&self, url: &str) -> Result<RepoMetadata, RepoError>;
}

pub fn fetch_repo_metadata(url: &str, client: &dyn RepoClient) -> Result<RepoMetadata, RepoError> {
    if !url::is_valid(url) {
        return Err(RepoError::InvalidUrl(url.to_string()));
    }
    client.fetch(url)
}

/// In-memory client keyed by normalized URL.
#[derive(Clone, Debug, Default)]
pub struct MemoryRepoClient {
    repos: BTreeMap<String, RepoMetadata>,
}

impl MemoryRepoClient {
    pub fn new(repos: impl IntoIterator<Item = RepoMetadata>) -> Self {
        MemoryRepoClient {
            repos: repos.into_iter().map(|r| (url::normalize(&r.url), r)).collect(),
        }
    }

    pub fn insert(&mut self, repo: RepoMetadata) {
        self.repos.insert(url::normalize(&repo.url), repo);
    }

    pub fn len(&self) -> usize {
        self.repos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.repos.is_empty()
    }
}

impl RepoClient for MemoryRepoClient {
    fn fetch(&self, url: &str) -> Result<RepoMetadata, RepoError> {
        self.repos
            .get(&url::normalize(url))
            .cloned()
            .ok_or_else(|| RepoError::NotFound(url.to_string()))
    }
}
