//! HTTP facade over the competency tracking core.
//!
//! All routes live under `/api/v1`. Errors are JSON objects with a stable
//! `code`, a `message` and an optional `detail` map.

pub mod api;
pub mod error;
pub mod server;

pub use api::{router, AppState, Health, Settings};
pub use error::ApiError;
pub use server::{prepare, shutdown_signal, Config, Prepared, ServeError};
