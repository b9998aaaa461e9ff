//! Keyword configuration files.
//!
//! One keyword per line. `#` starts a comment line and blank lines are
//! skipped. A tab followed by `@token` or `@substring` overrides the default
//! matching mode for that keyword.

use std::collections::HashMap;
use std::path::Path;

use super::{Keyword, KeywordError, KeywordSet, MatchMode};

pub fn parse_keyword_config(path: &Path) -> Result<KeywordSet, KeywordError> {
    let text = std::fs::read_to_string(path).map_err(|source| KeywordError::Io { path: path.to_path_buf(), source })?;
    parse_keyword_config_str(&text)
}

pub fn parse_keyword_config_str(text: &str) -> Result<KeywordSet, KeywordError> {
    let mut keywords = Vec::new();
    let mut first_seen: HashMap<String, usize> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (word, flag) = match raw.split_once('\t') {
            Some((word, flag)) => (word.trim(), Some(flag.trim())),
            None => (trimmed, None),
        };
        let keyword = match flag {
            None | Some("") => Keyword::new(word)?,
            Some("@token") => Keyword::with_mode(word, MatchMode::BoundedToken)?,
            Some("@substring") => Keyword::with_mode(word, MatchMode::Substring)?,
            Some(other) => return Err(KeywordError::UnknownFlag { line, flag: other.to_string() }),
        };
        if let Some(&first_line) = first_seen.get(keyword.pattern()) {
            return Err(KeywordError::Duplicate { line, keyword: word.to_string(), first_line });
        }
        first_seen.insert(keyword.pattern().to_string(), line);
        keywords.push(keyword);
    }

    KeywordSet::new(keywords)
}
