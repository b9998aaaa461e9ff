//! Client for the NVD CVE API 2.0.
//!
//! A publication-date window is split into API-sized chunks ([`plan_window`]),
//! and a [`Fetcher`] walks every page of every chunk through a [`Transport`]:
//! live HTTP, a replay directory, or a recording wrapper around either. The
//! fetcher paces requests, backs off on throttling, and exposes a
//! [`FetchProgress`] marker that can be persisted and resumed.

mod fetch;
mod pacing;
mod plan;
mod transport;

use chrono::NaiveDate;
use thiserror::Error;

pub use fetch::{FetchProgress, Fetcher, Page};
pub use pacing::{Clock, RateLimit, RetryPolicy, SystemClock, ANONYMOUS_BUDGET, KEYED_BUDGET, RATE_WINDOW};
pub use plan::{plan_window, Chunk, FetchPlan, MAX_CHUNK_DAYS, MAX_PAGE_SIZE};
pub use transport::{
    HttpTransport, PageRequest, RecordingTransport, ReplayTransport, Response, Transport, TransportError, NVD_ENDPOINT,
};

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("invalid window: {start} is after {end}")]
    InvertedWindow { start: NaiveDate, end: NaiveDate },

    #[error("page size must be in 1..={MAX_PAGE_SIZE}, got {0}")]
    PageSize(u32),

    #[error("chunk {chunk_index} start {start_index}: gave up after {attempts} attempts ({last})")]
    RetriesExhausted { chunk_index: usize, start_index: u64, attempts: u32, last: String },

    #[error("chunk {chunk_index} start {start_index}: HTTP {status}")]
    Http { status: u16, chunk_index: usize, start_index: u64 },

    #[error("chunk {chunk_index} start {start_index}: malformed page: {reason}")]
    Malformed { chunk_index: usize, start_index: u64, reason: String },

    #[error("chunk {chunk_index} start {start_index}: {reason}")]
    Transport { chunk_index: usize, start_index: u64, reason: String },

    #[error("progress file: {0}")]
    Progress(String),
}
