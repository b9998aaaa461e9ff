use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::pacing::{Clock, RateLimit, RetryPolicy};
use crate::plan::FetchPlan;
use crate::transport::{write_atomic, PageRequest, Transport, TransportError};
use crate::FetchError;

/// Position of the next page to fetch. Everything before it has been emitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchProgress {
    /// Plan this marker belongs to, checked on resume.
    pub plan: FetchPlan,
    pub chunk_index: usize,
    pub start_index: u64,
    /// `totalResults` of the current chunk, once its first page is in.
    pub total_results: Option<u64>,
    /// Failed attempts on the current request.
    pub retry_count: u32,
}

impl FetchProgress {
    pub fn start(plan: &FetchPlan) -> Self {
        FetchProgress { plan: plan.clone(), chunk_index: 0, start_index: 0, total_results: None, retry_count: 0 }
    }

    pub fn is_complete(&self) -> bool {
        self.chunk_index >= self.plan.chunks.len()
    }

    pub fn save(&self, path: &Path) -> Result<(), FetchError> {
        let json = serde_json::to_vec_pretty(self).map_err(|e| FetchError::Progress(e.to_string()))?;
        write_atomic(path, &json).map_err(|e| FetchError::Progress(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, FetchError> {
        let bytes = std::fs::read(path).map_err(|e| FetchError::Progress(format!("{}: {e}", path.display())))?;
        serde_json::from_slice(&bytes).map_err(|e| FetchError::Progress(format!("{}: {e}", path.display())))
    }
}

/// One raw response page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    pub chunk_index: usize,
    pub start_index: u64,
    pub total_results: u64,
    pub record_count: u64,
    pub body: Vec<u8>,
}

/// Iterator over every page of every chunk in the plan, in
/// (chunk, start index) order.
///
/// Requests are paced by the [`RateLimit`] and throttling responses (403,
/// 429, 5xx) or transient transport failures are retried per the
/// [`RetryPolicy`]. After an error the iterator is exhausted and
/// [`Fetcher::progress`] points at the page that failed.
pub struct Fetcher<T, C> {
    transport: T,
    clock: C,
    limit: RateLimit,
    retry: RetryPolicy,
    api_key: Option<String>,
    progress: FetchProgress,
    failed: bool,
}

impl<T: Transport, C: Clock> Fetcher<T, C> {
    pub fn new(plan: &FetchPlan, transport: T, clock: C) -> Self {
        Self::resume(FetchProgress::start(plan), transport, clock)
    }

    /// Continues from a saved marker; the retry counter starts over.
    pub fn resume(mut progress: FetchProgress, transport: T, clock: C) -> Self {
        progress.retry_count = 0;
        Fetcher {
            transport,
            clock,
            limit: RateLimit::unlimited(),
            retry: RetryPolicy::default(),
            api_key: None,
            progress,
            failed: false,
        }
    }

    pub fn with_rate_limit(mut self, limit: RateLimit) -> Self {
        self.limit = limit;
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_api_key(mut self, key: Option<String>) -> Self {
        self.api_key = key;
        self
    }

    pub fn progress(&self) -> &FetchProgress {
        &self.progress
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }

    fn fetch_next(&mut self) -> Result<Page, FetchError> {
        let p = &self.progress;
        let request = PageRequest {
            chunk_index: p.chunk_index,
            chunk: p.plan.chunks[p.chunk_index],
            start_index: p.start_index,
            page_size: p.plan.page_size,
        };
        let at = |reason: String| (request.chunk_index, request.start_index, reason);

        let body = loop {
            self.limit.acquire(&self.clock);
            let failure = match self.transport.send(&request, self.api_key.as_deref()) {
                Ok(resp) if resp.status == 200 => break resp.body,
                Ok(resp) if is_retryable(resp.status) => format!("HTTP {}", resp.status),
                Ok(resp) => {
                    return Err(FetchError::Http {
                        status: resp.status,
                        chunk_index: request.chunk_index,
                        start_index: request.start_index,
                    })
                }
                Err(TransportError::Transient(reason)) => reason,
                Err(TransportError::Fatal(reason)) => {
                    let (chunk_index, start_index, reason) = at(reason);
                    return Err(FetchError::Transport { chunk_index, start_index, reason });
                }
            };
            self.progress.retry_count += 1;
            let failures = self.progress.retry_count;
            if failures >= self.retry.max_attempts {
                let (chunk_index, start_index, last) = at(failure);
                return Err(FetchError::RetriesExhausted { chunk_index, start_index, attempts: failures, last });
            }
            let delay = self.retry.delay(failures);
            log::warn!(
                "chunk {} start {}: {failure}; retrying in {}s ({failures}/{})",
                request.chunk_index,
                request.start_index,
                delay.as_secs_f64(),
                self.retry.max_attempts
            );
            self.clock.sleep(delay);
        };

        let malformed = |reason: String| {
            let (chunk_index, start_index, reason) = at(reason);
            FetchError::Malformed { chunk_index, start_index, reason }
        };
        let meta = PageMeta::parse(&body).map_err(malformed)?;
        if let Some(echoed) = meta.start_index {
            if echoed != request.start_index {
                return Err(malformed(format!("response startIndex {echoed}")));
            }
        }
        if let Some(known) = self.progress.total_results {
            if known != meta.total_results {
                return Err(malformed(format!("totalResults changed from {known} to {}", meta.total_results)));
            }
        }
        let expected = meta.total_results.saturating_sub(request.start_index).min(request.page_size as u64);
        if meta.record_count != expected {
            return Err(malformed(format!("{} records on page, expected {expected}", meta.record_count)));
        }

        let page = Page {
            chunk_index: request.chunk_index,
            start_index: request.start_index,
            total_results: meta.total_results,
            record_count: meta.record_count,
            body,
        };

        let next = request.start_index + request.page_size as u64;
        let progress = &mut self.progress;
        progress.retry_count = 0;
        if next >= meta.total_results {
            progress.chunk_index += 1;
            progress.start_index = 0;
            progress.total_results = None;
        } else {
            progress.start_index = next;
            progress.total_results = Some(meta.total_results);
        }
        Ok(page)
    }
}

impl<T: Transport, C: Clock> Iterator for Fetcher<T, C> {
    type Item = Result<Page, FetchError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.progress.is_complete() {
            return None;
        }
        let result = self.fetch_next();
        self.failed = result.is_err();
        Some(result)
    }
}

fn is_retryable(status: u16) -> bool {
    matches!(status, 403 | 429 | 500..=599)
}

struct PageMeta {
    total_results: u64,
    start_index: Option<u64>,
    record_count: u64,
}

impl PageMeta {
    fn parse(body: &[u8]) -> Result<Self, String> {
        let root: Value = serde_json::from_slice(body).map_err(|e| format!("invalid JSON: {e}"))?;
        let total_results = root.get("totalResults").and_then(Value::as_u64).ok_or("missing totalResults")?;
        let record_count =
            root.get("vulnerabilities").and_then(Value::as_array).ok_or("missing vulnerabilities array")?.len() as u64;
        Ok(PageMeta { total_results, start_index: root.get("startIndex").and_then(Value::as_u64), record_count })
    }
}
