use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{ChatBackend, ChatRequest, ChatResponse, GatewayError};

/// One stored exchange; the file is named `<key>.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub key: String,
    pub request: ChatRequest,
    pub response: ChatResponse,
    pub recorded_at: String,
}

fn record_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.json"))
}

/// Answers only from a cassette directory.
#[derive(Debug, Clone)]
pub struct Replay {
    dir: PathBuf,
}

impl Replay {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Replay { dir: dir.into() }
    }
}

impl ChatBackend for Replay {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        let key = request.cassette_key();
        let text = match fs::read_to_string(record_path(&self.dir, &key)) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(GatewayError::CacheMiss(key)),
            Err(e) => return Err(GatewayError::Cassette(e.to_string())),
        };
        let record: TranscriptRecord =
            serde_json::from_str(&text).map_err(|e| GatewayError::Cassette(format!("{key}: {e}")))?;
        Ok(record.response)
    }
}

/// Passes requests to `inner` and stores every successful exchange.
pub struct Recorder<B> {
    inner: B,
    dir: PathBuf,
    write_lock: Mutex<()>,
}

impl<B: ChatBackend> Recorder<B> {
    pub fn new(inner: B, dir: impl Into<PathBuf>) -> Result<Self, GatewayError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| GatewayError::Cassette(e.to_string()))?;
        Ok(Recorder { inner, dir, write_lock: Mutex::new(()) })
    }

    fn store(&self, record: &TranscriptRecord) -> std::io::Result<()> {
        let _guard = self.write_lock.lock().expect("cassette writer poisoned");
        let path = record_path(&self.dir, &record.key);
        let tmp = path.with_extension("json.tmp");
        let mut file = fs::File::create(&tmp)?;
        let mut body = serde_json::to_vec_pretty(record).expect("records serialize");
        body.push(b'\n');
        file.write_all(&body)?;
        file.sync_all()?;
        fs::rename(tmp, path)
    }
}

impl<B: ChatBackend> ChatBackend for Recorder<B> {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        let response = self.inner.complete(request)?;
        let record = TranscriptRecord {
            key: request.cassette_key(),
            request: request.clone(),
            response: response.clone(),
            recorded_at: chrono::Utc::now().to_rfc3339(),
        };
        self.store(&record).map_err(|e| GatewayError::Cassette(e.to_string()))?;
        Ok(response)
    }
}
