//! Request transports: live HTTP, directory replay, and a recording wrapper.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use thiserror::Error;

use crate::plan::Chunk;

pub const NVD_ENDPOINT: &str = "https://services.nvd.nist.gov/rest/json/cves/2.0";

/// One page request against the CVE endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageRequest {
    pub chunk_index: usize,
    pub chunk: Chunk,
    pub start_index: u64,
    pub page_size: u32,
}

impl PageRequest {
    pub fn query(&self) -> [(&'static str, String); 4] {
        [
            ("pubStartDate", self.chunk.pub_start_param()),
            ("pubEndDate", self.chunk.pub_end_param()),
            ("resultsPerPage", self.page_size.to_string()),
            ("startIndex", self.start_index.to_string()),
        ]
    }

    /// Deterministic file name for this request in a replay directory.
    pub fn replay_file_name(&self) -> String {
        format!("cves_{}_{}_s{:07}_n{}.json", self.chunk.start, self.chunk.end, self.start_index, self.page_size)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub body: Vec<u8>,
}

#[derive(Debug, Error)]
pub enum TransportError {
    /// Worth retrying: connection resets, timeouts and the like.
    #[error("transient transport failure: {0}")]
    Transient(String),

    /// Retrying cannot help, e.g. a page missing from a replay directory.
    #[error("{0}")]
    Fatal(String),
}

pub trait Transport {
    fn send(&mut self, request: &PageRequest, api_key: Option<&str>) -> Result<Response, TransportError>;
}

impl<T: Transport + ?Sized> Transport for &mut T {
    fn send(&mut self, request: &PageRequest, api_key: Option<&str>) -> Result<Response, TransportError> {
        (**self).send(request, api_key)
    }
}

impl<T: Transport + ?Sized> Transport for Box<T> {
    fn send(&mut self, request: &PageRequest, api_key: Option<&str>) -> Result<Response, TransportError> {
        (**self).send(request, api_key)
    }
}

pub struct HttpTransport {
    client: reqwest::blocking::Client,
    endpoint: String,
}

impl HttpTransport {
    pub fn new() -> Result<Self, TransportError> {
        Self::with_endpoint(NVD_ENDPOINT)
    }

    pub fn with_endpoint(endpoint: &str) -> Result<Self, TransportError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .user_agent(concat!("cvekw/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| TransportError::Fatal(format!("building HTTP client: {e}")))?;
        Ok(HttpTransport { client, endpoint: endpoint.to_string() })
    }
}

impl Transport for HttpTransport {
    fn send(&mut self, request: &PageRequest, api_key: Option<&str>) -> Result<Response, TransportError> {
        let mut builder = self.client.get(&self.endpoint).query(&request.query());
        if let Some(key) = api_key {
            builder = builder.header("apiKey", key);
        }
        let response = builder.send().map_err(|e| TransportError::Transient(e.to_string()))?;
        let status = response.status().as_u16();
        let body = response.bytes().map_err(|e| TransportError::Transient(e.to_string()))?;
        Ok(Response { status, body: body.to_vec() })
    }
}

/// Serves pages from files named by [`PageRequest::replay_file_name`]. Every
/// stored page answers with status 200; a missing file is fatal.
pub struct ReplayTransport {
    dir: PathBuf,
}

impl ReplayTransport {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ReplayTransport { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

impl Transport for ReplayTransport {
    fn send(&mut self, request: &PageRequest, _api_key: Option<&str>) -> Result<Response, TransportError> {
        let path = self.dir.join(request.replay_file_name());
        let body =
            fs::read(&path).map_err(|e| TransportError::Fatal(format!("replay page {}: {e}", path.display())))?;
        Ok(Response { status: 200, body })
    }
}

/// Passes requests through and stores every 200 response in `dir`, producing
/// a directory [`ReplayTransport`] can serve.
pub struct RecordingTransport<T> {
    inner: T,
    dir: PathBuf,
}

impl<T: Transport> RecordingTransport<T> {
    pub fn new(inner: T, dir: impl Into<PathBuf>) -> Self {
        RecordingTransport { inner, dir: dir.into() }
    }

    pub fn into_inner(self) -> T {
        self.inner
    }
}

impl<T: Transport> Transport for RecordingTransport<T> {
    fn send(&mut self, request: &PageRequest, api_key: Option<&str>) -> Result<Response, TransportError> {
        let response = self.inner.send(request, api_key)?;
        if response.status == 200 {
            fs::create_dir_all(&self.dir)
                .and_then(|_| write_atomic(&self.dir.join(request.replay_file_name()), &response.body))
                .map_err(|e| TransportError::Fatal(format!("recording to {}: {e}", self.dir.display())))?;
        }
        Ok(response)
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(start_index: u64) -> PageRequest {
        PageRequest {
            chunk_index: 0,
            chunk: Chunk { start: "2023-01-01".parse().unwrap(), end: "2023-04-30".parse().unwrap() },
            start_index,
            page_size: 2000,
        }
    }

    #[test]
    fn file_names_are_deterministic() {
        assert_eq!(request(4000).replay_file_name(), "cves_2023-01-01_2023-04-30_s0004000_n2000.json");
        assert_ne!(request(0).replay_file_name(), request(2000).replay_file_name());
    }

    #[test]
    fn query_parameters() {
        let q = request(2000).query();
        assert_eq!(q[0], ("pubStartDate", "2023-01-01T00:00:00.000+00:00".to_string()));
        assert_eq!(q[1], ("pubEndDate", "2023-04-30T23:59:59.999+00:00".to_string()));
        assert_eq!(q[2], ("resultsPerPage", "2000".to_string()));
        assert_eq!(q[3], ("startIndex", "2000".to_string()));
    }

    #[test]
    fn record_then_replay() {
        struct Fixed;
        impl Transport for Fixed {
            fn send(&mut self, r: &PageRequest, _: Option<&str>) -> Result<Response, TransportError> {
                Ok(Response { status: 200, body: format!("page {}", r.start_index).into_bytes() })
            }
        }
        let dir = tempfile::tempdir().unwrap();
        let mut recorder = RecordingTransport::new(Fixed, dir.path().join("rec"));
        recorder.send(&request(0), None).unwrap();
        recorder.send(&request(2000), None).unwrap();

        let mut replay = ReplayTransport::new(dir.path().join("rec"));
        assert_eq!(replay.send(&request(2000), None).unwrap().body, b"page 2000");
        assert!(matches!(replay.send(&request(4000), None), Err(TransportError::Fatal(_))));
    }
}
