//! Line-record cache file.
//!
//! ```text
//! #cvekw-corpus<TAB>v1<TAB><window start><TAB><window end>
//! <id><TAB><published><TAB><status><TAB><score or empty><TAB><cwe;cwe;...><TAB><escaped description>
//! ```
//!
//! Descriptions escape `\`, tab, LF and CR as `\\`, `\t`, `\n`, `\r`. Scores
//! use the shortest representation that parses back to the same `f64`.

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::NaiveDate;

use super::{Corpus, CorpusError, CveRecord, CveStatus, CweId, DateWindow};

pub const CACHE_MAGIC: &str = "#cvekw-corpus";
pub const CACHE_VERSION: &str = "v1";

/// Writes the cache through a sibling temporary file, so an interrupted save
/// never leaves a truncated cache behind.
pub fn save_corpus(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let io_err = |source| CorpusError::Io { path: path.to_path_buf(), source };
    let mut tmp_name = path.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = Path::new(&tmp_name);
    let mut out = BufWriter::new(File::create(tmp).map_err(io_err)?);
    write_corpus(corpus, &mut out).map_err(io_err)?;
    out.flush().map_err(io_err)?;
    drop(out);
    std::fs::rename(tmp, path).map_err(io_err)
}

pub fn write_corpus<W: Write>(corpus: &Corpus, out: &mut W) -> std::io::Result<()> {
    let window = corpus.window();
    writeln!(out, "{CACHE_MAGIC}\t{CACHE_VERSION}\t{}\t{}", window.start, window.end)?;
    for r in corpus.records() {
        let score = r.base_score.map(|s| s.to_string()).unwrap_or_default();
        let cwes: Vec<&str> = r.cwes.iter().map(CweId::as_str).collect();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.id,
            r.published,
            r.status.as_str(),
            score,
            cwes.join(";"),
            escape(&r.description)
        )?;
    }
    Ok(())
}

pub fn load_corpus(path: &Path) -> Result<Corpus, CorpusError> {
    let file = File::open(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })?;
    read_corpus(BufReader::new(file), &path.display().to_string())
}

/// Reads a cache from any buffered reader; `origin` names the source in errors.
pub fn read_corpus<R: BufRead>(reader: R, origin: &str) -> Result<Corpus, CorpusError> {
    let line_err = |line: usize, reason: String| CorpusError::CacheLine { path: origin.to_string(), line, reason };
    let io_err = |source| CorpusError::Io { path: origin.into(), source };

    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line.map_err(io_err)?,
        None => return Err(line_err(1, "missing header line".into())),
    };
    let window = parse_header(&header).map_err(|reason| line_err(1, reason))?;

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line.map_err(io_err)?;
        let record = parse_record(&line).map_err(|reason| line_err(lineno, reason))?;
        if !seen.insert(record.id.clone()) {
            return Err(line_err(lineno, format!("duplicate CVE id {}", record.id)));
        }
        if !window.contains(record.published) {
            return Err(line_err(lineno, format!("published {} outside window {window}", record.published)));
        }
        records.push(record);
    }
    Corpus::new(window, records)
}

fn parse_header(line: &str) -> Result<DateWindow, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    match fields.as_slice() {
        [magic, version, start, end] if *magic == CACHE_MAGIC => {
            if *version != CACHE_VERSION {
                return Err(format!("unsupported cache version {version:?}"));
            }
            let start = parse_date(start)?;
            let end = parse_date(end)?;
            DateWindow::new(start, end).map_err(|e| e.to_string())
        }
        _ => Err("not a cvekw corpus header".into()),
    }
}

fn parse_record(line: &str) -> Result<CveRecord, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    let [id, published, status, score, cwes, description] = fields.as_slice() else {
        return Err(format!("expected 6 tab-separated fields, found {}", fields.len()));
    };
    let status = match *status {
        "Rejected" => CveStatus::Rejected,
        "Other" => CveStatus::Other,
        other => return Err(format!("unknown status {other:?}")),
    };
    let base_score = if score.is_empty() {
        None
    } else {
        Some(score.parse::<f64>().map_err(|_| format!("bad base score {score:?}"))?)
    };
    let cwes = if cwes.is_empty() {
        BTreeSet::new()
    } else {
        let mut set = BTreeSet::new();
        for raw in cwes.split(';') {
            let cwe = CweId::parse(raw).map_err(|e| e.to_string())?;
            if !set.insert(cwe) {
                return Err(format!("duplicate CWE {raw}"));
            }
        }
        set
    };
    let record = CveRecord {
        id: id.to_string(),
        published: parse_date(published)?,
        status,
        description: unescape(description)?,
        base_score,
        cwes,
    };
    record.validate().map_err(|e| e.to_string())?;
    Ok(record)
}

fn parse_date(raw: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(raw, "%Y-%m-%d").map_err(|_| format!("bad date {raw:?}"))
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(ch),
        }
    }
    out
}

fn unescape(text: &str) -> Result<String, String> {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(ch) = chars.next() {
        if ch != '\\' {
            out.push(ch);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => return Err(format!("unknown escape \\{other}")),
            None => return Err("dangling backslash".into()),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window() -> DateWindow {
        DateWindow::new("2023-01-01".parse().unwrap(), "2024-09-30".parse().unwrap()).unwrap()
    }

    fn to_string(corpus: &Corpus) -> String {
        let mut buf = Vec::new();
        write_corpus(corpus, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    fn read(text: &str) -> Result<Corpus, CorpusError> {
        read_corpus(text.as_bytes(), "mem")
    }

    #[test]
    fn empty_corpus_is_header_only() {
        let text = to_string(&Corpus::empty(window()));
        assert_eq!(text, "#cvekw-corpus\tv1\t2023-01-01\t2024-09-30\n");
        assert_eq!(read(&text).unwrap(), Corpus::empty(window()));
    }

    #[test]
    fn two_records_round_trip() {
        let records = vec![
            CveRecord {
                id: "CVE-2023-0001".into(),
                published: "2023-02-03".parse().unwrap(),
                status: CveStatus::Other,
                description: "tab\there, newline\nthere, backslash \\t literal\r".into(),
                base_score: Some(7.5),
                cwes: [CweId::parse("CWE-79").unwrap(), CweId::parse("NVD-CWE-noinfo").unwrap()].into(),
            },
            CveRecord {
                id: "CVE-2024-10001".into(),
                published: "2024-09-30".parse().unwrap(),
                status: CveStatus::Rejected,
                description: String::new(),
                base_score: None,
                cwes: BTreeSet::new(),
            },
        ];
        let corpus = Corpus::new(window(), records).unwrap();
        let text = to_string(&corpus);
        assert_eq!(text.lines().count(), 3);
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "CVE-2023-0001\t2023-02-03\tOther\t7.5\tCWE-79;NVD-CWE-noinfo\ttab\\there, newline\\nthere, backslash \\\\t literal\\r"
        );
        assert_eq!(read(&text).unwrap(), corpus);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let header = "#cvekw-corpus\tv1\t2023-01-01\t2024-09-30\n";
        let good = "CVE-2023-0001\t2023-02-03\tOther\t\t\tok\n";
        let cases = [
            (format!("{header}{good}CVE-2023-0002\t2023-02-03\tOther\n"), 3),
            (format!("{header}{good}CVE-2023-0002\t2023-02-03\tMaybe\t\t\t\n"), 3),
            (format!("{header}CVE-2023-0002\t2023-02-03\tOther\t11\t\t\n"), 2),
            (format!("{header}CVE-2023-0002\t2023-02-03\tOther\t\tCWE-x\t\n"), 2),
            (format!("{header}CVE-2023-0002\t2023-02-03\tOther\t\t\tbad \\q\n"), 2),
            (format!("{header}{good}{good}"), 3),
            (format!("{header}CVE-2022-0002\t2022-02-03\tOther\t\t\t\n"), 2),
            ("CVE-2023-0002\t2023-02-03\tOther\t\t\t\n".to_string(), 1),
            (String::new(), 1),
        ];
        for (text, expected_line) in cases {
            match read(&text) {
                Err(CorpusError::CacheLine { line, .. }) => assert_eq!(line, expected_line, "{text:?}"),
                other => panic!("expected line error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn escape_round_trip() {
        for s in ["", "\\", "\\\\t", "a\tb\nc\rd", "plain"] {
            assert_eq!(unescape(&escape(s)).unwrap(), s);
            assert!(!escape(s).contains(['\t', '\n', '\r']));
        }
    }

    #[test]
    fn save_then_load_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.tsv");
        let corpus = read(&format!("{CACHE_MAGIC}\t{CACHE_VERSION}\t2023-01-01\t2024-09-30\n")).unwrap();
        save_corpus(&corpus, &path).unwrap();
        assert_eq!(load_corpus(&path).unwrap(), corpus);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert!(matches!(load_corpus(&dir.path().join("missing.tsv")), Err(CorpusError::Io { .. })));
    }
}
