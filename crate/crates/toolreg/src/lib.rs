//! Scientific software registry: file formats, the journaled record store,
//! the usage event log, the ingestion pipeline, the REST service and the
//! command-line front end. Domain logic lives in `toolreg_core`.

pub mod auth;
pub mod cli;
pub mod config;
pub mod engine;
pub mod events;
pub mod formats;
pub mod pipeline;
pub mod service;
pub mod store;
pub mod synth;

use toolreg_core::registry::Timestamp;

/// Current wall-clock time in whole seconds.
pub fn now() -> Timestamp {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs() as i64)
        .unwrap_or(0);
    Timestamp(secs)
}
