//! Default vocabularies and tables compiled into the crate.

pub const STOPWORDS: &str = include_str!("../data/stopwords.txt");
/// `acronym<TAB>name<TAB>ic_code`, one NIH institute or center per line.
pub const IC_TABLE: &str = include_str!("../data/ic_table.tsv");
pub const TOOL_TYPES: &str = include_str!("../data/tool_types.txt");
pub const PLATFORMS: &str = include_str!("../data/platforms.txt");
pub const LANGUAGES: &str = include_str!("../data/languages.txt");
/// `funder_id<TAB>canonical_name<TAB>alias1|alias2…`.
pub const FUNDERS: &str = include_str!("../data/funders.tsv");
/// Ontology TSV of biological domains; the term ids are the topic labels.
pub const DOMAINS: &str = include_str!("../data/domains.tsv");
/// Ontology TSV of tool operations.
pub const FUNCTIONS: &str = include_str!("../data/functions.tsv");
/// Ontology TSV of data formats.
pub const FORMATS: &str = include_str!("../data/formats.tsv");

/// Non-empty, non-comment lines of a one-entry-per-line list.
pub fn list_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}
