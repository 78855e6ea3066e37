//! Tool metadata model, identifiers, validation, merging and revisions.

mod merge;
pub mod orcid;
mod record;
mod revision;
mod rid;
mod validate;

pub use merge::{merge_records, MergeError, MergePolicy};
pub use record::{
    FieldSpec, Person, RecordStatus, Release, Source, SourceProvenance, Timestamp, ToolRecord, UsageMetrics, FIELDS,
};
pub use revision::{
    diff_records, initial_revision, record_revision, replay, revise_record, FieldChange, RecordEdit, ReplayError,
    Revision, RevisionError,
};
pub use rid::{mint_rid, ParseRidError, ResourceId, RidCounter, RidError};
pub use validate::{
    check_required, is_doi, type_violations, validate_record, validate_record_with, Rule, ValidationReport, Violation,
    Vocabularies,
};
