//! Extraction of tool records from publications, repositories, index dumps
//! and funding acknowledgements.

mod assemble;
mod dedup;
mod dump;
mod funding;
mod names;
mod publication;
mod repos;

pub use assemble::{build_record_from_publication, NeedsCuration, PublicationInputs};
pub use dedup::match_duplicates;
pub use dump::{parse_index_dump, DumpError, DumpFormat, DumpKind, DumpReport, RowError};
pub use funding::{
    extract_acknowledgements, extract_grants, map_grant_to_ic, match_funder_name, normalize_funder_name, FunderEntry,
    FunderRegistry, GrantRef, IcTable, Institute, TableError, UnknownIc, FUNDER_JACCARD,
};
pub use names::extract_tool_name;
pub use publication::{
    classify_publication, ClassifierError, LogisticClassifier, LogisticConfig, PublicationClassifier,
    PublicationRecord, ToolLabel, TOOL_THRESHOLD,
};
pub use repos::{
    extract_repo_urls, extract_urls, fetch_repo_metadata, is_repo_url, MemoryRepoClient, RepoClient, RepoError,
    RepoMetadata, DEFAULT_REPO_HOSTS,
};
