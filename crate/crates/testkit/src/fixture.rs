use std::path::PathBuf;

use cvekw_core::corpus::load_corpus;
use cvekw_core::Corpus;

/// Values printed by `make_fixture.py`, computed from the generator's own
/// record list rather than from the cache file.
pub const RECORDS: usize = 240;
pub const REJECTED: usize = 10;
pub const NON_REJECTED: usize = 230;
pub const SCORED: usize = 197;
pub const DATASET_MEAN: f64 = 6.561928934010153;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

pub fn fixture_path() -> PathBuf {
    fixtures_dir().join("corpus_fixture.tsv")
}

/// The fixture cache as stored, rejected records included.
pub fn load_raw() -> Corpus {
    load_corpus(&fixture_path()).expect("fixture cache loads")
}

/// The fixture as analysis sees it.
pub fn load() -> Corpus {
    load_raw().filter_rejected()
}

/// Three recorded NVD pages for 2023-03-01..2023-03-31 at page size 2.
pub fn replay_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../nvd/tests/fixtures/replay")
}

pub mod replay {
    pub const START: &str = "2023-03-01";
    pub const END: &str = "2023-03-31";
    pub const PAGE_SIZE: u32 = 2;
    pub const RECORDS: usize = 5;
    pub const REJECTED: usize = 1;
    pub const DATASET_MEAN: f64 = 7.533333333333334;
}
