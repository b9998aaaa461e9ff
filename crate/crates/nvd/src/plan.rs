use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::FetchError;

/// Longest publication-date range the NVD API accepts in one query.
pub const MAX_CHUNK_DAYS: i64 = 120;
pub const MAX_PAGE_SIZE: u32 = 2000;

/// Inclusive sub-window of at most [`MAX_CHUNK_DAYS`] days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chunk {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Chunk {
    pub fn days(&self) -> i64 {
        (self.end - self.start).num_days() + 1
    }

    /// `pubStartDate` value: start of day, UTC, millisecond precision.
    pub fn pub_start_param(&self) -> String {
        format!("{}T00:00:00.000+00:00", self.start)
    }

    /// `pubEndDate` value: last millisecond of the end day, UTC.
    pub fn pub_end_param(&self) -> String {
        format!("{}T23:59:59.999+00:00", self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchPlan {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub chunks: Vec<Chunk>,
    pub page_size: u32,
}

/// Splits `[start, end]` into consecutive chunks of [`MAX_CHUNK_DAYS`] days,
/// the last one possibly shorter.
pub fn plan_window(start: NaiveDate, end: NaiveDate, page_size: u32) -> Result<FetchPlan, FetchError> {
    if start > end {
        return Err(FetchError::InvertedWindow { start, end });
    }
    if !(1..=MAX_PAGE_SIZE).contains(&page_size) {
        return Err(FetchError::PageSize(page_size));
    }
    let mut chunks = Vec::new();
    let mut chunk_start = start;
    loop {
        let chunk_end = (chunk_start + Duration::days(MAX_CHUNK_DAYS - 1)).min(end);
        chunks.push(Chunk { start: chunk_start, end: chunk_end });
        if chunk_end == end {
            break;
        }
        chunk_start = chunk_end + Duration::days(1);
    }
    Ok(FetchPlan { start, end, chunks, page_size })
}
