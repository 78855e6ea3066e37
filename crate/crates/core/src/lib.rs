//! Allocation-only core of a scientific software registry.
//!
//! The crate holds everything that does not touch the outside world: the
//! tool metadata model and its validation, the ingestion extractors, the
//! corpus-derived thesaurus, phrase-space retrieval and topic
//! classification. File formats, storage, the HTTP service and the CLI live
//! in the `toolreg` companion crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classify;
pub mod data;
mod disjoint;
pub mod ingest;
pub mod ir;
pub mod registry;
pub mod text;
pub mod thesaurus;
pub mod url;

pub use registry::{ResourceId, ToolRecord};
pub use thesaurus::Thesaurus;
