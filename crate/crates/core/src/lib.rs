//! Cryptographic keyword mining over NVD CVE descriptions.
//!
//! The pipeline is: [`corpus`] (records, NVD payload parsing, cache files) →
//! [`keywords`] (normalization and matching) → [`analytics`] (keyword and CWE
//! statistics, heatmap matrices) → [`report`] (CSV, LaTeX fragments, SVG).

pub mod analytics;
pub mod corpus;
pub mod keywords;
pub mod report;

pub use analytics::{Analysis, CweStats, HeatmapKind, HeatmapMatrix, KeywordStats, MatchedSummary};
pub use corpus::{Corpus, CveRecord, CveStatus, CweId, DateWindow};
pub use keywords::{match_corpus, normalize, Keyword, KeywordSet, MatchMode, MatchResult};
