//! Offline stand-ins for the web: a JSONL manifest of images with keywords
//! and captions, a token-overlap search backend over it, and caption
//! providers (manifest lookup or an external HTTP service).

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};

use curator_core::lexicon::{tokenize, Caption, CaptionSource};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CuratorError;
use crate::io;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SourceError {
    #[error("backend unreachable: {0}")]
    Unreachable(String),
    #[error("malformed manifest: {0}")]
    Malformed(String),
    #[error("no caption for record `{0}`")]
    MissingCaption(String),
    #[error("captioning `{id}` failed: {message}")]
    Service { id: String, message: String },
    #[error("caption memory is empty")]
    EmptyMemory,
}

impl From<SourceError> for CuratorError {
    fn from(e: SourceError) -> Self {
        CuratorError::Data(e.to_string())
    }
}

/// One manifest line. `classes` is only filled for step-0 dataset images.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRecord {
    pub id: String,
    pub file: String,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caption: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<String>,
}

/// Records plus the directory their `file` fields are relative to.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    root: PathBuf,
    records: Vec<ManifestRecord>,
}

impl Manifest {
    pub fn new(root: impl Into<PathBuf>, records: Vec<ManifestRecord>) -> Result<Self, SourceError> {
        let mut seen = HashSet::new();
        for r in &records {
            if r.id.is_empty() {
                return Err(SourceError::Malformed("record with empty id".into()));
            }
            if !seen.insert(r.id.as_str()) {
                return Err(SourceError::Malformed(format!("duplicate id `{}`", r.id)));
            }
        }
        Ok(Self {
            root: root.into(),
            records,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CuratorError> {
        let records = io::read_jsonl(path)?;
        let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Manifest::new(root, records).map_err(|e| CuratorError::io(path, e))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn records(&self) -> &[ManifestRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ManifestRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn resolve(&self, file: &str) -> PathBuf {
        self.root.join(file)
    }

    fn to_web_record(&self, r: &ManifestRecord, query: &str) -> WebRecord {
        WebRecord {
            source_id: r.id.clone(),
            file: r.file.clone(),
            image_ref: self.resolve(&r.file),
            caption: r.caption.as_ref().map(|c| Caption::new(c.clone(), CaptionSource::Provider)),
            queried_with: query.to_string(),
        }
    }
}

/// A search hit.
#[derive(Debug, Clone, PartialEq)]
pub struct WebRecord {
    pub source_id: String,
    /// Path as written in the manifest.
    pub file: String,
    pub image_ref: PathBuf,
    pub caption: Option<Caption>,
    pub queried_with: String,
}

pub trait Backend: Send + Sync {
    /// Up to `limit` records for the text query `q`, best first.
    fn query(&self, q: &str, limit: usize) -> Result<Vec<WebRecord>, SourceError>;
}

/// Ranks manifest records by how many distinct query tokens appear among
/// their keyword tokens; ties go to the smaller id.
#[derive(Debug, Clone)]
pub struct MockBackend {
    manifest: Manifest,
    tokens: Vec<BTreeSet<String>>,
}

impl MockBackend {
    pub fn new(manifest: Manifest) -> Self {
        let tokens = manifest
            .records
            .iter()
            .map(|r| r.keywords.iter().flat_map(|k| tokenize(k)).collect())
            .collect();
        Self { manifest, tokens }
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }
}

impl Backend for MockBackend {
    fn query(&self, text: &str, limit: usize) -> Result<Vec<WebRecord>, SourceError> {
        let q: BTreeSet<String> = tokenize(text).into_iter().collect();
        let mut hits: Vec<(usize, &ManifestRecord)> = self
            .manifest
            .records
            .iter()
            .zip(&self.tokens)
            .map(|(r, t)| (q.intersection(t).count(), r))
            .filter(|(n, _)| *n > 0)
            .collect();
        hits.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.id.cmp(&b.1.id)));
        Ok(hits
            .into_iter()
            .take(limit)
            .map(|(_, r)| self.manifest.to_web_record(r, text))
            .collect())
    }
}

pub trait CaptionProvider: Send + Sync {
    fn caption_of(&self, rec: &WebRecord) -> Result<Caption, SourceError>;
}

/// Reads the manifest caption column.
#[derive(Debug, Clone, Default)]
pub struct ManifestCaptions {
    captions: HashMap<String, String>,
}

impl ManifestCaptions {
    pub fn from_manifests<'a>(manifests: impl IntoIterator<Item = &'a Manifest>) -> Self {
        let mut captions = HashMap::new();
        for m in manifests {
            for r in &m.records {
                if let Some(c) = &r.caption {
                    captions.entry(r.id.clone()).or_insert_with(|| c.clone());
                }
            }
        }
        Self { captions }
    }
}

impl CaptionProvider for ManifestCaptions {
    fn caption_of(&self, rec: &WebRecord) -> Result<Caption, SourceError> {
        self.captions
            .get(&rec.source_id)
            .map(|c| Caption::new(c.clone(), CaptionSource::Provider))
            .ok_or_else(|| SourceError::MissingCaption(rec.source_id.clone()))
    }
}

#[cfg(feature = "http")]
pub use http::HttpCaptioner;

#[cfg(feature = "http")]
mod http {
    use std::collections::HashMap;
    use std::sync::Mutex;
    use std::time::Duration;

    use curator_core::lexicon::{Caption, CaptionSource};

    use super::{CaptionProvider, SourceError, WebRecord};

    /// POSTs image bytes to a captioning service and reads a plain-text
    /// caption back. Results are cached per record for the life of the
    /// client.
    pub struct HttpCaptioner {
        agent: ureq::Agent,
        url: String,
        auth: Option<String>,
        attempts: u32,
        backoff: Duration,
        cache: Mutex<HashMap<String, String>>,
    }

    impl HttpCaptioner {
        pub const URL_ENV: &'static str = "CURATOR_CAPTION_URL";
        pub const AUTH_ENV: &'static str = "CURATOR_CAPTION_AUTH";

        pub fn new(url: impl Into<String>, auth: Option<String>, timeout: Duration) -> Self {
            let agent = ureq::Agent::config_builder()
                .timeout_global(Some(timeout))
                .http_status_as_error(false)
                .build()
                .into();
            Self {
                agent,
                url: url.into(),
                auth,
                attempts: 3,
                backoff: Duration::from_millis(250),
                cache: Mutex::new(HashMap::new()),
            }
        }

        /// Reads the URL and optional `Authorization` value from the
        /// environment.
        pub fn from_env(timeout: Duration) -> Option<Self> {
            let url = std::env::var(Self::URL_ENV).ok()?;
            Some(Self::new(url, std::env::var(Self::AUTH_ENV).ok(), timeout))
        }

        pub fn with_retry(mut self, attempts: u32, backoff: Duration) -> Self {
            self.attempts = attempts.max(1);
            self.backoff = backoff;
            self
        }

        fn request(&self, body: &[u8]) -> Result<String, String> {
            let mut req = self.agent.post(&self.url).content_type("application/octet-stream");
            if let Some(a) = &self.auth {
                req = req.header("Authorization", a);
            }
            let mut resp = req.send(body).map_err(|e| e.to_string())?;
            let status = resp.status();
            let text = resp.body_mut().read_to_string().map_err(|e| e.to_string())?;
            if !status.is_success() {
                return Err(format!("HTTP {}", status.as_u16()));
            }
            let text = text.trim();
            if text.is_empty() {
                return Err("empty caption".into());
            }
            Ok(text.to_string())
        }
    }

    impl CaptionProvider for HttpCaptioner {
        fn caption_of(&self, rec: &WebRecord) -> Result<Caption, SourceError> {
            if let Some(c) = self.cache.lock().unwrap().get(&rec.source_id) {
                return Ok(Caption::new(c.clone(), CaptionSource::Provider));
            }
            let service = |message: String| SourceError::Service {
                id: rec.source_id.clone(),
                message,
            };
            let body = std::fs::read(&rec.image_ref).map_err(|e| service(e.to_string()))?;
            let mut last = String::new();
            for attempt in 0..self.attempts {
                if attempt > 0 {
                    std::thread::sleep(self.backoff * 2u32.pow(attempt - 1));
                }
                match self.request(&body) {
                    Ok(text) => {
                        log::debug!("captioned {} after {} attempt(s)", rec.source_id, attempt + 1);
                        let mut cache = self.cache.lock().unwrap();
                        let text = cache.entry(rec.source_id.clone()).or_insert(text).clone();
                        return Ok(Caption::new(text, CaptionSource::Provider));
                    }
                    Err(e) => {
                        log::warn!("captioning {} failed (attempt {}): {e}", rec.source_id, attempt + 1);
                        last = e;
                    }
                }
            }
            Err(service(format!("{last} after {} attempts", self.attempts)))
        }
    }
}

/// Crawl and rehearsal sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrawlBudget {
    pub per_class_crawl: usize,
    pub per_class_keep: usize,
    pub per_caption: usize,
    pub rehearsal_per_class: usize,
}

impl Default for CrawlBudget {
    fn default() -> Self {
        Self {
            per_class_crawl: 10_000,
            per_class_keep: 500,
            per_caption: 20,
            rehearsal_per_class: 100,
        }
    }
}

impl CrawlBudget {
    pub fn validate(&self) -> Result<(), CuratorError> {
        if [self.per_class_crawl, self.per_class_keep, self.per_caption, self.rehearsal_per_class].contains(&0) {
            return Err(CuratorError::config("budgets must be positive"));
        }
        if self.per_class_keep > self.per_class_crawl {
            return Err(CuratorError::config("per_class_keep exceeds per_class_crawl"));
        }
        Ok(())
    }
}

/// One remembered step-0 image: its class tags and caption, never pixels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryEntry {
    pub classes: Vec<String>,
    pub caption: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CaptionMemory {
    pub entries: Vec<MemoryEntry>,
}

impl CaptionMemory {
    pub fn load(path: &Path) -> Result<Self, CuratorError> {
        Ok(Self {
            entries: io::read_jsonl(path)?,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), CuratorError> {
        io::write_jsonl(path, &self.entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Captions every step-0 record, keeping its manifest class tags.
pub fn build_caption_memory(step0: &Manifest, provider: &dyn CaptionProvider) -> Result<CaptionMemory, SourceError> {
    let entries = step0
        .records
        .par_iter()
        .map(|r| {
            let caption = provider.caption_of(&step0.to_web_record(r, ""))?;
            Ok(MemoryEntry {
                classes: r.classes.clone(),
                caption: caption.text,
            })
        })
        .collect::<Result<Vec<_>, SourceError>>()?;
    Ok(CaptionMemory { entries })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RehearsalHit {
    pub record: WebRecord,
    /// Memory entry whose caption retrieved the record.
    pub entry: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RehearsalQuery {
    pub hits: Vec<RehearsalHit>,
    /// Hits before de-duplication.
    pub retrieved: usize,
    pub failures: Vec<(usize, String)>,
}

/// Queries the backend with every stored caption, `per_caption` results
/// each, keeping the first hit of every source id.
pub fn rehearsal_query(
    memory: &CaptionMemory,
    backend: &dyn Backend,
    budget: &CrawlBudget,
) -> Result<RehearsalQuery, SourceError> {
    if memory.is_empty() {
        return Err(SourceError::EmptyMemory);
    }
    let results: Vec<_> = memory
        .entries
        .par_iter()
        .map(|e| backend.query(&e.caption, budget.per_caption))
        .collect();
    let mut out = RehearsalQuery::default();
    let mut seen = HashSet::new();
    for (entry, result) in results.into_iter().enumerate() {
        match result {
            Ok(records) => {
                out.retrieved += records.len();
                for mut record in records {
                    if seen.insert(record.source_id.clone()) {
                        record.queried_with = memory.entries[entry].caption.clone();
                        out.hits.push(RehearsalHit { record, entry });
                    }
                }
            }
            Err(e) => {
                log::warn!("rehearsal query for memory entry {entry} failed: {e}");
                out.failures.push((entry, e.to_string()));
            }
        }
    }
    Ok(out)
}
