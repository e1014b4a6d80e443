//! Blocking JSON-over-HTTP client shared by the remote scorer and the
//! remote landmark parser, with retry/backoff and an on-disk response cache.

mod stub;

use std::path::PathBuf;
use std::time::Duration;

use log::{debug, warn};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use stub::{CompletionFixture, ScoreFixture, StubBehavior, StubFixtures, StubServer};

#[derive(Debug, Error)]
pub enum RemoteError {
    #[error("remote returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("could not decode response: {0}")]
    Decode(String),
    #[error("cache: {0}")]
    Cache(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    pub url: String,
    pub timeout_ms: u64,
    /// Attempts after the first one.
    pub retries: u32,
    /// First backoff delay; doubles on each retry.
    pub backoff_ms: u64,
    /// Name of the environment variable holding a bearer token, if any.
    pub auth_token_env: Option<String>,
    pub cache_dir: Option<PathBuf>,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self { url: String::new(), timeout_ms: 30_000, retries: 3, backoff_ms: 500, auth_token_env: None, cache_dir: None }
    }
}

const BODY_EXCERPT: usize = 200;

pub struct JsonClient {
    config: EndpointConfig,
    agent: ureq::Agent,
}

impl JsonClient {
    pub fn new(config: EndpointConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        Self { config, agent }
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    /// Hex digest identifying a request to this endpoint.
    pub fn cache_key<Req: Serialize>(&self, request: &Req) -> String {
        let payload = serde_json::to_vec(request).expect("request serializes");
        let mut h = Sha256::new();
        h.update(self.config.url.as_bytes());
        h.update(b"\n");
        h.update(&payload);
        hex(&h.finalize())
    }

    /// POSTs `request` as JSON, serving from and filling the cache when one
    /// is configured.
    pub fn post<Req: Serialize, Resp: DeserializeOwned>(&self, request: &Req) -> Result<Resp, RemoteError> {
        let cache_path = self.config.cache_dir.as_ref().map(|d| d.join(format!("{}.json", self.cache_key(request))));
        if let Some(path) = &cache_path {
            if path.exists() {
                debug!("cache hit {}", path.display());
                let text = std::fs::read_to_string(path)?;
                return serde_json::from_str(&text).map_err(|e| RemoteError::Decode(e.to_string()));
            }
        }
        let text = self.post_raw(request)?;
        let parsed = serde_json::from_str(&text).map_err(|e| RemoteError::Decode(e.to_string()))?;
        if let Some(path) = &cache_path {
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, &text)?;
        }
        Ok(parsed)
    }

    fn post_raw<Req: Serialize>(&self, request: &Req) -> Result<String, RemoteError> {
        let token = self.config.auth_token_env.as_deref().and_then(|var| std::env::var(var).ok());
        let mut delay = Duration::from_millis(self.config.backoff_ms);
        let mut attempt = 0;
        loop {
            let mut req = self.agent.post(&self.config.url).header("Accept", "application/json");
            if let Some(t) = &token {
                req = req.header("Authorization", format!("Bearer {t}"));
            }
            let result: Result<String, RemoteError> = match req.send_json(request) {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    let body = resp.body_mut().read_to_string().unwrap_or_default();
                    if (200..300).contains(&status) {
                        return Ok(body);
                    }
                    let excerpt: String = body.chars().take(BODY_EXCERPT).collect();
                    let err = RemoteError::Status { status, body: excerpt };
                    if status == 429 || status >= 500 {
                        Err(err)
                    } else {
                        return Err(err);
                    }
                }
                Err(e) => Err(RemoteError::Transport(e.to_string())),
            };
            let err = result.unwrap_err();
            if attempt >= self.config.retries {
                return Err(err);
            }
            attempt += 1;
            warn!("attempt {attempt} failed ({err}); retrying in {delay:?}");
            std::thread::sleep(delay);
            delay *= 2;
        }
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
