use std::fs;
use std::path::{Path, PathBuf};

use cvekw_nvd::{
    plan_window, FetchError, FetchPlan, FetchProgress, Fetcher, RecordingTransport, ReplayTransport, SystemClock,
};

fn replay_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/replay")
}

fn plan() -> FetchPlan {
    plan_window("2023-03-01".parse().unwrap(), "2023-03-31".parse().unwrap(), 2).unwrap()
}

fn copy_dir(from: &Path, to: &Path, skip: Option<&str>) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        if Some(entry.file_name().to_str().unwrap()) != skip {
            fs::copy(entry.path(), to.join(entry.file_name())).unwrap();
        }
    }
}

const SECOND_PAGE: &str = "cves_2023-03-01_2023-03-31_s0000002_n2.json";

#[test]
fn replays_every_page_in_order() {
    let pages: Vec<_> = Fetcher::new(&plan(), ReplayTransport::new(replay_dir()), SystemClock::new())
        .collect::<Result<_, _>>()
        .unwrap();
    let shape: Vec<(u64, u64, u64)> = pages.iter().map(|p| (p.start_index, p.record_count, p.total_results)).collect();
    assert_eq!(shape, [(0, 2, 5), (2, 2, 5), (4, 1, 5)]);
}

#[test]
fn recording_a_replay_reproduces_the_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let recorded = tmp.path().join("pages");
    let transport = RecordingTransport::new(ReplayTransport::new(replay_dir()), &recorded);
    let mut fetcher = Fetcher::new(&plan(), transport, SystemClock::new());
    assert_eq!(fetcher.by_ref().count(), 3);
    assert!(fetcher.progress().is_complete());
    for entry in fs::read_dir(replay_dir()).unwrap() {
        let entry = entry.unwrap();
        assert_eq!(fs::read(entry.path()).unwrap(), fs::read(recorded.join(entry.file_name())).unwrap());
    }
}

#[test]
fn interrupted_fetch_resumes_from_saved_progress() {
    let tmp = tempfile::tempdir().unwrap();
    let partial = tmp.path().join("partial");
    copy_dir(&replay_dir(), &partial, Some(SECOND_PAGE));

    let mut fetcher = Fetcher::new(&plan(), ReplayTransport::new(&partial), SystemClock::new());
    let first = fetcher.next().unwrap().unwrap();
    assert_eq!(first.start_index, 0);
    assert!(matches!(fetcher.next(), Some(Err(FetchError::Transport { start_index: 2, .. }))));
    assert!(fetcher.next().is_none());

    let marker = tmp.path().join("progress.json");
    fetcher.progress().save(&marker).unwrap();
    let progress = FetchProgress::load(&marker).unwrap();
    assert_eq!((progress.chunk_index, progress.start_index, progress.total_results), (0, 2, Some(5)));

    let rest: Vec<_> = Fetcher::resume(progress, ReplayTransport::new(replay_dir()), SystemClock::new())
        .collect::<Result<_, _>>()
        .unwrap();
    let starts: Vec<u64> = rest.iter().map(|p| p.start_index).collect();
    assert_eq!(starts, [2, 4]);
}
