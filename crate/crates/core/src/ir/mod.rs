//! Phrase-space retrieval over tool documents.

mod highlight;
mod index;
mod query;
mod rank;
mod search;
mod suggest;
mod vector;
mod vectorize;

pub use highlight::{highlight_terms, Highlighter, Span};
pub use index::{build_index, document_text, DocFields, IndexError, IndexedDoc, PhraseIndex, TermLabels};
pub use query::{query_phrases, tokenize_and_expand_query, ExpansionConfig};
pub use rank::{rank_with_usage, DEFAULT_EPSILON};
pub use search::{
    canonical_filter_field, facet_counts, search, search_all, QueryPlan, SearchConfig, SearchError, SearchHit,
    SearchPage, SortMode, Stage, FILTER_FIELDS,
};
pub use suggest::{suggest_terms, Suggester, Suggestion};
pub use vector::{cosine, PhraseVector, SparseVector};
pub use vectorize::{idf_weight, match_phrases, phrase_counts, vectorize_document, IdfTable, PhraseMatch};
