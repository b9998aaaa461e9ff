//! Adapter from the NVD CVE API 2.0 response schema to [`CveRecord`].

use std::collections::BTreeSet;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use serde::Deserialize;
use serde_json::Value;

use super::{CorpusError, CveRecord, CveStatus, CweId};

#[derive(Deserialize)]
struct Entry {
    cve: Cve,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct Cve {
    id: String,
    published: String,
    #[serde(default)]
    vuln_status: String,
    #[serde(default)]
    descriptions: Vec<LangString>,
    #[serde(default)]
    metrics: Metrics,
    #[serde(default)]
    weaknesses: Vec<Weakness>,
}

#[derive(Deserialize)]
struct LangString {
    lang: String,
    value: String,
}

#[derive(Deserialize, Default)]
struct Metrics {
    #[serde(default, rename = "cvssMetricV31")]
    cvss_v31: Vec<CvssMetric>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct CvssMetric {
    #[serde(default, rename = "type")]
    kind: String,
    cvss_data: CvssData,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct CvssData {
    #[serde(default)]
    version: String,
    base_score: f64,
}

#[derive(Deserialize)]
struct Weakness {
    #[serde(default)]
    description: Vec<LangString>,
}

/// Parses one NVD 2.0 `vulnerabilities` response page into records.
///
/// Rejected entries are kept and marked; filtering is the caller's job.
pub fn parse_nvd_page(payload: &[u8]) -> Result<Vec<CveRecord>, CorpusError> {
    let root: Value = serde_json::from_slice(payload).map_err(|e| CorpusError::MalformedPayload(e.to_string()))?;
    let entries = root
        .get("vulnerabilities")
        .and_then(Value::as_array)
        .ok_or_else(|| CorpusError::MalformedPayload("missing \"vulnerabilities\" array".into()))?;

    entries
        .iter()
        .enumerate()
        .map(|(index, raw)| {
            let entry: Entry =
                Entry::deserialize(raw).map_err(|e| CorpusError::MalformedEntry { index, reason: e.to_string() })?;
            convert(entry.cve).map_err(|e| CorpusError::MalformedEntry { index, reason: e.to_string() })
        })
        .collect()
}

fn convert(cve: Cve) -> Result<CveRecord, CorpusError> {
    let published = published_date(&cve.published)
        .ok_or_else(|| CorpusError::MalformedPayload(format!("bad published timestamp {:?}", cve.published)))?;

    let description =
        cve.descriptions.iter().filter(|d| d.lang == "en").map(|d| d.value.as_str()).collect::<Vec<_>>().join(" ");

    let mut cwes = BTreeSet::new();
    for value in cve.weaknesses.iter().flat_map(|w| &w.description).map(|d| d.value.as_str()) {
        match CweId::parse(value) {
            Ok(cwe) => {
                cwes.insert(cwe);
            }
            Err(_) => log::warn!("{}: ignoring unrecognized weakness {value:?}", cve.id),
        }
    }

    let record = CveRecord {
        base_score: select_base_score(&cve.metrics.cvss_v31),
        status: CveStatus::from_vuln_status(&cve.vuln_status),
        id: cve.id,
        published,
        description,
        cwes,
    };
    record.validate()?;
    Ok(record)
}

/// Primary v3.1 metric first, otherwise the first v3.1 metric in payload order.
fn select_base_score(metrics: &[CvssMetric]) -> Option<f64> {
    let v31 = || metrics.iter().filter(|m| m.cvss_data.version == "3.1");
    v31().find(|m| m.kind == "Primary").or_else(|| v31().next()).map(|m| m.cvss_data.base_score)
}

/// Truncates an NVD timestamp to its UTC calendar date. NVD emits offset-less
/// UTC timestamps; explicit offsets are converted.
fn published_date(raw: &str) -> Option<NaiveDate> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(dt.with_timezone(&Utc).date_naive());
    }
    if let Ok(dt) = NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M:%S%.f") {
        return Some(dt.date());
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d").ok()
}
