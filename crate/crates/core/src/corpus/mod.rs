//! Normalized CVE records and the corpus they form.
//!
//! Records come either from raw NVD 2.0 API pages ([`parse_nvd_page`]) or from
//! the line-record cache file ([`load_corpus`]). A [`Corpus`] keeps records in
//! insertion order and guarantees unique ids and membership in its date
//! window.

mod cache;
mod cwe;
mod nvd;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::PathBuf;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cache::{load_corpus, read_corpus, save_corpus, write_corpus, CACHE_MAGIC, CACHE_VERSION};
pub use cwe::{CweId, NVD_CWE_NOINFO, NVD_CWE_OTHER};
pub use nvd::parse_nvd_page;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("invalid CWE identifier {0:?}")]
    InvalidCwe(String),

    #[error("invalid CVE identifier {0:?}")]
    InvalidCveId(String),

    #[error("{id}: base score {score} outside [0, 10]")]
    ScoreOutOfRange { id: String, score: f64 },

    #[error("invalid date window: {start} is after {end}")]
    InvertedWindow { start: NaiveDate, end: NaiveDate },

    #[error("{id}: published {published} outside window {window}")]
    OutsideWindow { id: String, published: NaiveDate, window: DateWindow },

    #[error("duplicate CVE id {0}")]
    DuplicateId(String),

    #[error("malformed NVD payload: {0}")]
    MalformedPayload(String),

    #[error("malformed NVD payload at vulnerability entry {index}: {reason}")]
    MalformedEntry { index: usize, reason: String },

    #[error("{path}: line {line}: {reason}")]
    CacheLine { path: String, line: usize, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Inclusive range of calendar dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DateWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self, CorpusError> {
        if start > end {
            return Err(CorpusError::InvertedWindow { start, end });
        }
        Ok(DateWindow { start, end })
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

impl fmt::Display for DateWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CveStatus {
    Rejected,
    Other,
}

impl CveStatus {
    /// Maps an NVD `vulnStatus` string. Only the exact string `Rejected` counts.
    pub fn from_vuln_status(status: &str) -> Self {
        if status == "Rejected" {
            CveStatus::Rejected
        } else {
            CveStatus::Other
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CveStatus::Rejected => "Rejected",
            CveStatus::Other => "Other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CveRecord {
    pub id: String,
    pub published: NaiveDate,
    pub status: CveStatus,
    /// All English description entries joined by a single space.
    pub description: String,
    /// CVSS v3.1 base score.
    pub base_score: Option<f64>,
    pub cwes: BTreeSet<CweId>,
}

impl CveRecord {
    pub fn is_rejected(&self) -> bool {
        self.status == CveStatus::Rejected
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if !is_cve_id(&self.id) {
            return Err(CorpusError::InvalidCveId(self.id.clone()));
        }
        if let Some(score) = self.base_score {
            if !(0.0..=10.0).contains(&score) {
                return Err(CorpusError::ScoreOutOfRange { id: self.id.clone(), score });
            }
        }
        Ok(())
    }
}

/// `CVE-<4-digit year>-<4 or more digits>`.
pub fn is_cve_id(id: &str) -> bool {
    let Some(rest) = id.strip_prefix("CVE-") else {
        return false;
    };
    let Some((year, seq)) = rest.split_once('-') else {
        return false;
    };
    year.len() == 4
        && year.bytes().all(|b| b.is_ascii_digit())
        && seq.len() >= 4
        && seq.bytes().all(|b| b.is_ascii_digit())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    window: DateWindow,
    records: Vec<CveRecord>,
}

/// What [`Corpus::assemble`] dropped on the way in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AssembleReport {
    pub duplicates: usize,
    pub outside_window: usize,
}

impl Corpus {
    /// Builds a corpus, failing on the first invalid record, duplicate id, or
    /// record published outside `window`.
    pub fn new(window: DateWindow, records: Vec<CveRecord>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(records.len());
        for record in &records {
            record.validate()?;
            if !seen.insert(record.id.as_str()) {
                return Err(CorpusError::DuplicateId(record.id.clone()));
            }
            if !window.contains(record.published) {
                return Err(CorpusError::OutsideWindow { id: record.id.clone(), published: record.published, window });
            }
        }
        Ok(Corpus { window, records })
    }

    /// Lenient constructor for fetched data: keeps the first occurrence of each
    /// id and drops records published outside the window.
    pub fn assemble<I>(window: DateWindow, records: I) -> Result<(Self, AssembleReport), CorpusError>
    where
        I: IntoIterator<Item = CveRecord>,
    {
        let mut report = AssembleReport::default();
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        for record in records {
            record.validate()?;
            if !window.contains(record.published) {
                report.outside_window += 1;
                continue;
            }
            if !seen.insert(record.id.clone()) {
                report.duplicates += 1;
                continue;
            }
            kept.push(record);
        }
        Ok((Corpus { window, records: kept }, report))
    }

    pub fn empty(window: DateWindow) -> Self {
        Corpus { window, records: Vec::new() }
    }

    pub fn window(&self) -> DateWindow {
        self.window
    }

    pub fn records(&self) -> &[CveRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn rejected_count(&self) -> usize {
        self.records.iter().filter(|r| r.is_rejected()).count()
    }

    /// Drops every rejected record, preserving order.
    pub fn filter_rejected(self) -> Corpus {
        let records = self.records.into_iter().filter(|r| !r.is_rejected()).collect();
        Corpus { window: self.window, records }
    }

    /// Mean base score over the records that have one.
    pub fn dataset_average_score(&self) -> Option<f64> {
        mean(self.records.iter().filter_map(|r| r.base_score))
    }
}

pub(crate) fn mean<I: IntoIterator<Item = f64>>(values: I) -> Option<f64> {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}
