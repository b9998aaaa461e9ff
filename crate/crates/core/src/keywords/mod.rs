//! Keyword set and description matching.
//!
//! Text and keywords are compared after [`normalize`]: hyphens become spaces,
//! then everything is lowercased. A [`MatchMode::Substring`] keyword matches
//! anywhere, so `encrypt` covers `encryption` and `encrypted`. A
//! [`MatchMode::BoundedToken`] keyword must not touch an ASCII letter or
//! digit on either side, which keeps `rsa` out of `path traversal`.

mod config;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::PathBuf;

use aho_corasick::AhoCorasick;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;

pub use config::{parse_keyword_config, parse_keyword_config_str};

/// The built-in cryptographic keyword list, in column order of the original
/// selection table.
pub const DEFAULT_KEYWORDS: [&str; 31] = [
    "encrypt",
    "decrypt",
    "cipher",
    "hash",
    "symmetric",
    "asymmetric",
    "signing",
    "signature",
    "plaintext",
    "cleartext",
    "public key",
    "private key",
    "certificate",
    "key exchange",
    "Diffie",
    "random",
    "salt",
    "password",
    "TLS",
    "RSA",
    "AES",
    "ECDSA",
    "ECDH",
    "HMAC",
    "elliptic",
    "cryptanalysis",
    "cryptographic",
    "side channel",
    "man in the middle",
    "replay attack",
    "brute force",
];

/// Normalized patterns that default to [`MatchMode::BoundedToken`].
pub const BOUNDED_ACRONYMS: [&str; 6] = ["rsa", "aes", "tls", "hmac", "ecdsa", "ecdh"];

/// Characters treated as hyphens: hyphen-minus, U+2010 hyphen, U+2011
/// non-breaking hyphen. En and em dashes are left alone.
pub const HYPHENS: [char; 3] = ['-', '\u{2010}', '\u{2011}'];

#[derive(Debug, Error)]
pub enum KeywordError {
    #[error("keyword {0:?} is empty after normalization")]
    EmptyPattern(String),

    #[error("line {line}: keyword {keyword:?} duplicates line {first_line}")]
    Duplicate { line: usize, keyword: String, first_line: usize },

    #[error("duplicate keyword {0:?}")]
    DuplicateKeyword(String),

    #[error("line {line}: unknown mode flag {flag:?} (expected @token or @substring)")]
    UnknownFlag { line: usize, flag: String },

    #[error("keyword configuration contains no keywords")]
    EmptyConfig,

    #[error("failed to build matcher: {0}")]
    Automaton(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Replaces every hyphen with a space, then lowercases.
pub fn normalize(text: &str) -> String {
    text.replace(HYPHENS, " ").to_lowercase()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatchMode {
    Substring,
    BoundedToken,
}

impl fmt::Display for MatchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchMode::Substring => "substring",
            MatchMode::BoundedToken => "token",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Keyword {
    canonical: String,
    pattern: String,
    mode: MatchMode,
}

impl Keyword {
    /// Keyword with the default mode: bounded for the acronym list, substring
    /// otherwise.
    pub fn new(canonical: &str) -> Result<Self, KeywordError> {
        let pattern = normalize(canonical);
        let mode =
            if BOUNDED_ACRONYMS.contains(&pattern.as_str()) { MatchMode::BoundedToken } else { MatchMode::Substring };
        Self::build(canonical, pattern, mode)
    }

    pub fn with_mode(canonical: &str, mode: MatchMode) -> Result<Self, KeywordError> {
        Self::build(canonical, normalize(canonical), mode)
    }

    fn build(canonical: &str, pattern: String, mode: MatchMode) -> Result<Self, KeywordError> {
        if pattern.is_empty() {
            return Err(KeywordError::EmptyPattern(canonical.to_string()));
        }
        Ok(Keyword { canonical: canonical.to_string(), pattern, mode })
    }

    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    pub fn mode(&self) -> MatchMode {
        self.mode
    }
}

/// An ordered, duplicate-free keyword list with a compiled multi-pattern
/// automaton.
#[derive(Debug, Clone)]
pub struct KeywordSet {
    keywords: Vec<Keyword>,
    automaton: AhoCorasick,
}

impl PartialEq for KeywordSet {
    fn eq(&self, other: &Self) -> bool {
        self.keywords == other.keywords
    }
}

impl KeywordSet {
    pub fn new(keywords: Vec<Keyword>) -> Result<Self, KeywordError> {
        if keywords.is_empty() {
            return Err(KeywordError::EmptyConfig);
        }
        let mut seen = HashSet::new();
        for kw in &keywords {
            if !seen.insert(kw.pattern.as_str()) {
                return Err(KeywordError::DuplicateKeyword(kw.canonical.clone()));
            }
        }
        let automaton = AhoCorasick::new(keywords.iter().map(|k| k.pattern.as_str()))
            .map_err(|e| KeywordError::Automaton(e.to_string()))?;
        Ok(KeywordSet { keywords, automaton })
    }

    /// The 31 built-in cryptographic keywords.
    pub fn default_crypto() -> Self {
        let keywords =
            DEFAULT_KEYWORDS.iter().map(|k| Keyword::new(k).expect("built-in keyword is non-empty")).collect();
        KeywordSet::new(keywords).expect("built-in keywords are distinct")
    }

    pub fn keywords(&self) -> &[Keyword] {
        &self.keywords
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Keyword> {
        self.keywords.get(index)
    }

    pub fn position(&self, canonical: &str) -> Option<usize> {
        self.keywords.iter().position(|k| k.canonical == canonical)
    }

    /// Indices (ascending) of the keywords present in `text`, each at most once.
    pub fn match_indices(&self, text: &str) -> Vec<usize> {
        let normalized = normalize(text);
        let bytes = normalized.as_bytes();
        let mut hit = vec![false; self.keywords.len()];
        let mut remaining = self.keywords.len();
        for m in self.automaton.find_overlapping_iter(&normalized) {
            let idx = m.pattern().as_usize();
            if hit[idx] {
                continue;
            }
            if self.keywords[idx].mode == MatchMode::BoundedToken && !is_bounded(bytes, m.start(), m.end()) {
                continue;
            }
            hit[idx] = true;
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }
        hit.iter().enumerate().filter_map(|(i, &h)| h.then_some(i)).collect()
    }

    /// Canonical strings of the keywords present in `text`.
    pub fn match_description(&self, text: &str) -> BTreeSet<&str> {
        self.match_indices(text).into_iter().map(|i| self.keywords[i].canonical.as_str()).collect()
    }
}

/// True when neither neighbour of `bytes[start..end]` is an ASCII letter or
/// digit. Non-ASCII neighbours never satisfy `is_ascii_alphanumeric` on any of
/// their UTF-8 bytes, so a byte-level check is exact.
fn is_bounded(bytes: &[u8], start: usize, end: usize) -> bool {
    let before = start.checked_sub(1).map(|i| bytes[i]);
    let after = bytes.get(end).copied();
    !before.is_some_and(|b| b.is_ascii_alphanumeric()) && !after.is_some_and(|b| b.is_ascii_alphanumeric())
}

/// Distinct keywords found in one CVE description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub cve_id: String,
    /// Ascending indices into the [`KeywordSet`] used for matching.
    pub matched: Vec<usize>,
}

impl MatchResult {
    pub fn is_empty(&self) -> bool {
        self.matched.is_empty()
    }

    pub fn canonical<'a>(&self, keywords: &'a KeywordSet) -> BTreeSet<&'a str> {
        self.matched.iter().map(|&i| keywords.keywords[i].canonical.as_str()).collect()
    }
}

/// One [`MatchResult`] per record, in corpus order. Records are matched in
/// parallel; the output is identical to a sequential pass.
pub fn match_corpus(corpus: &Corpus, keywords: &KeywordSet) -> Vec<MatchResult> {
    corpus
        .records()
        .par_iter()
        .map(|r| MatchResult { cve_id: r.id.clone(), matched: keywords.match_indices(&r.description) })
        .collect()
}
