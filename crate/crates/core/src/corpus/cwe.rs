use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CorpusError;

pub const NVD_CWE_NOINFO: &str = "NVD-CWE-noinfo";
pub const NVD_CWE_OTHER: &str = "NVD-CWE-Other";

/// A weakness identifier as assigned by the NVD: either `CWE-<digits>` or one
/// of the two NVD pseudo-identifiers.
///
/// Ordering is numeric for real CWE ids (`CWE-79` < `CWE-200`), with the
/// pseudo-identifiers sorted after every numbered CWE.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CweId(String);

impl CweId {
    pub fn parse(value: &str) -> Result<Self, CorpusError> {
        if value == NVD_CWE_NOINFO || value == NVD_CWE_OTHER {
            return Ok(CweId(value.to_string()));
        }
        match value.strip_prefix("CWE-") {
            Some(digits) if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) => {
                Ok(CweId(value.to_string()))
            }
            _ => Err(CorpusError::InvalidCwe(value.to_string())),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The numeric part of a `CWE-<digits>` id; `None` for pseudo-identifiers.
    pub fn number(&self) -> Option<u64> {
        self.0.strip_prefix("CWE-").and_then(|d| d.parse().ok())
    }

    pub fn is_pseudo(&self) -> bool {
        !self.0.starts_with("CWE-")
    }
}

impl Ord for CweId {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.number(), other.number()) {
            (Some(a), Some(b)) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for CweId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CweId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for CweId {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CweId::parse(s)
    }
}

impl Serialize for CweId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for CweId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        CweId::parse(&raw).map_err(serde::de::Error::custom)
    }
}
