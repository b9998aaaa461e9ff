use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use cvekw_nvd::{plan_window, FetchError, Fetcher, HttpTransport, RetryPolicy, SystemClock};

type RequestLog = Arc<Mutex<Vec<(String, Option<String>)>>>;

/// Serves the canned responses in order, one connection each, and records
/// every request line with its `apiKey` header.
fn serve(responses: Vec<(u16, String)>) -> (String, RequestLog) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let endpoint = format!("http://{}/rest/json/cves/2.0", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&seen);
    thread::spawn(move || {
        for (status, body) in responses {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            let mut api_key = None;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line.trim().is_empty() {
                    break;
                }
                if let Some((name, value)) = line.split_once(':') {
                    if name.eq_ignore_ascii_case("apikey") {
                        api_key = Some(value.trim().to_string());
                    }
                }
            }
            log.lock().unwrap().push((request_line.trim().to_string(), api_key));
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
    });
    (endpoint, seen)
}

fn page(start: u64, count: usize, total: u64) -> String {
    let vulns = vec!["{}"; count].join(",");
    format!(r#"{{"resultsPerPage":{count},"startIndex":{start},"totalResults":{total},"vulnerabilities":[{vulns}]}}"#)
}

fn fast_retry() -> RetryPolicy {
    RetryPolicy { initial_delay: Duration::from_millis(1), factor: 2, max_attempts: 3 }
}

#[test]
fn sends_window_paging_and_key() {
    let (endpoint, seen) = serve(vec![(200, page(0, 2, 3)), (200, page(2, 1, 3))]);
    let plan = plan_window("2023-01-01".parse().unwrap(), "2023-01-31".parse().unwrap(), 2).unwrap();
    let pages: Vec<_> = Fetcher::new(&plan, HttpTransport::with_endpoint(&endpoint).unwrap(), SystemClock::new())
        .with_api_key(Some("secret".into()))
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(pages.len(), 2);
    let seen = seen.lock().unwrap();
    let (line, key) = &seen[1];
    assert!(line.starts_with("GET /rest/json/cves/2.0?"), "{line}");
    for part in [
        "pubStartDate=2023-01-01T00%3A00%3A00.000%2B00%3A00",
        "pubEndDate=2023-01-31T23%3A59%3A59.999%2B00%3A00",
        "resultsPerPage=2",
        "startIndex=2",
    ] {
        assert!(line.contains(part), "{line} lacks {part}");
    }
    assert_eq!(key.as_deref(), Some("secret"));
}

#[test]
fn throttling_is_retried_then_succeeds() {
    let (endpoint, seen) = serve(vec![(429, String::new()), (503, String::new()), (200, page(0, 1, 1))]);
    let plan = plan_window("2023-01-01".parse().unwrap(), "2023-01-02".parse().unwrap(), 10).unwrap();
    let pages: Vec<_> = Fetcher::new(&plan, HttpTransport::with_endpoint(&endpoint).unwrap(), SystemClock::new())
        .with_retry(fast_retry())
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(pages.len(), 1);
    assert_eq!(seen.lock().unwrap().len(), 3);
    assert!(seen.lock().unwrap().iter().all(|(_, key)| key.is_none()));
}

#[test]
fn client_errors_are_not_retried() {
    let (endpoint, seen) = serve(vec![(404, String::new())]);
    let plan = plan_window("2023-01-01".parse().unwrap(), "2023-01-02".parse().unwrap(), 10).unwrap();
    let mut fetcher = Fetcher::new(&plan, HttpTransport::with_endpoint(&endpoint).unwrap(), SystemClock::new())
        .with_retry(fast_retry());
    assert!(matches!(fetcher.next(), Some(Err(FetchError::Http { status: 404, .. }))));
    assert_eq!(seen.lock().unwrap().len(), 1);
}

#[test]
fn persistent_throttling_exhausts_retries() {
    let (endpoint, _) = serve(vec![(403, String::new()), (403, String::new()), (403, String::new())]);
    let plan = plan_window("2023-01-01".parse().unwrap(), "2023-01-02".parse().unwrap(), 10).unwrap();
    let mut fetcher = Fetcher::new(&plan, HttpTransport::with_endpoint(&endpoint).unwrap(), SystemClock::new())
        .with_retry(fast_retry());
    assert!(matches!(fetcher.next(), Some(Err(FetchError::RetriesExhausted { attempts: 3, .. }))));
    assert_eq!(fetcher.progress().start_index, 0);
}
