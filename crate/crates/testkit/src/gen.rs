use std::collections::BTreeSet;

use chrono::{Duration, NaiveDate};
use cvekw_core::keywords::DEFAULT_KEYWORDS;
use cvekw_core::{Corpus, CveRecord, CveStatus, CweId, DateWindow};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn default_window() -> DateWindow {
    DateWindow::new(date("2023-01-01"), date("2024-09-30")).unwrap()
}

fn date(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

const FILLER: &[&str] = &[
    "the",
    "attacker",
    "allows",
    "remote",
    "via",
    "crafted",
    "request",
    "in",
    "module",
    "leads to",
    "vulnerability",
    "component",
    "user",
    "admin",
    "file",
    "upload",
    "buffer",
    "overflow",
    "injection",
    "SQL",
    "XSS",
    "kernel",
    "driver",
    "firmware",
    "API",
    "token",
    "session",
    "cookie",
    "key",
    "public",
];

/// Near misses for bounded acronyms and other tricky neighbours.
const TRAPS: &[&str] = &[
    "path traversal",
    "traversal",
    "aesthetic",
    "haes",
    "atlas",
    "tlsx",
    "ECDHE",
    "RSA2048",
    "(RSA)",
    "rsa,",
    "hmacs",
    "phmac",
    "ecdsa256",
    "x-tls",
    "AES_256",
    "side\u{2013}channel",
    "man in the\u{2014}middle",
    "caf\u{e9}",
    "\u{fc}ber",
    "pass word",
    "brute\u{2011}force",
    "key\u{2010}exchange",
];

const SUFFIXES: &[&str] = &["", "", "", "ion", "ed", "s", "ing", "ly"];
const SEPARATORS: &[&str] = &[" ", " ", " ", " ", "-", ", ", ". ", "", "\u{2010}", "/", "\t"];

fn random_case<R: Rng>(rng: &mut R, word: &str) -> String {
    match rng.gen_range(0..4) {
        0 => word.to_uppercase(),
        1 => {
            let mut chars = word.chars();
            chars.next().map(|c| c.to_uppercase().chain(chars).collect()).unwrap_or_default()
        }
        2 => word.chars().map(|c| if rng.gen_bool(0.5) { c.to_ascii_uppercase() } else { c }).collect(),
        _ => word.to_lowercase(),
    }
}

fn keyword_form<R: Rng>(rng: &mut R) -> String {
    let kw = DEFAULT_KEYWORDS.choose(rng).unwrap();
    let joined = match rng.gen_range(0..3) {
        0 => kw.replace(' ', "-"),
        1 => kw.replace(' ', "\u{2011}"),
        _ => kw.to_string(),
    };
    let mut word = random_case(rng, &joined);
    word.push_str(SUFFIXES.choose(rng).unwrap());
    word
}

/// A description mixing keyword inflections, near misses, and filler, joined
/// by varied separators (including none, so tokens can touch).
pub fn description<R: Rng>(rng: &mut R) -> String {
    let parts = rng.gen_range(0..9);
    let mut out = String::new();
    for i in 0..parts {
        if i > 0 {
            out.push_str(SEPARATORS.choose(rng).unwrap());
        }
        let piece = match rng.gen_range(0..10) {
            0..=3 => keyword_form(rng),
            4..=5 => {
                let trap = TRAPS.choose(rng).unwrap();
                random_case(rng, trap)
            }
            _ => FILLER.choose(rng).unwrap().to_string(),
        };
        out.push_str(&piece);
    }
    out
}

pub const CWE_POOL: &[&str] = &[
    "CWE-79",
    "CWE-89",
    "CWE-121",
    "CWE-200",
    "CWE-203",
    "CWE-256",
    "CWE-287",
    "CWE-295",
    "CWE-307",
    "CWE-311",
    "CWE-312",
    "CWE-319",
    "CWE-321",
    "CWE-326",
    "CWE-327",
    "CWE-330",
    "CWE-347",
    "CWE-522",
    "CWE-798",
    "CWE-1021",
    "NVD-CWE-noinfo",
    "NVD-CWE-Other",
];

pub struct CorpusShape {
    pub records: usize,
    pub max_cwes: usize,
    pub cwe_pool: usize,
    pub rejected_rate: f64,
    pub unscored_rate: f64,
}

impl Default for CorpusShape {
    fn default() -> Self {
        CorpusShape { records: 200, max_cwes: 3, cwe_pool: CWE_POOL.len(), rejected_rate: 0.0, unscored_rate: 0.15 }
    }
}

pub fn record<R: Rng>(rng: &mut R, serial: usize, shape: &CorpusShape) -> CveRecord {
    let window = default_window();
    let span = (window.end - window.start).num_days();
    let published = window.start + Duration::days(rng.gen_range(0..=span));
    let n_cwes = rng.gen_range(0..=shape.max_cwes);
    let pool = &CWE_POOL[..shape.cwe_pool.min(CWE_POOL.len())];
    let cwes: BTreeSet<CweId> = (0..n_cwes).map(|_| CweId::parse(pool.choose(rng).unwrap()).unwrap()).collect();
    let base_score =
        if rng.gen_bool(shape.unscored_rate) { None } else { Some(f64::from(rng.gen_range(0..=100u32)) / 10.0) };
    let status = if rng.gen_bool(shape.rejected_rate) { CveStatus::Rejected } else { CveStatus::Other };
    CveRecord {
        id: format!("CVE-{}-{:05}", published.format("%Y"), serial),
        published,
        status,
        description: description(rng),
        base_score,
        cwes,
    }
}

pub fn corpus(seed: u64, shape: &CorpusShape) -> Corpus {
    let mut rng = rng(seed);
    let records = (0..shape.records).map(|i| record(&mut rng, i, shape)).collect();
    Corpus::new(default_window(), records).unwrap()
}
