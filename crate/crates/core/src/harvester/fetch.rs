use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::clock::Clock;
use super::limiter::HostLimiter;
use crate::canon::CanonicalUrl;

pub const MAX_ATTEMPTS: u32 = 3;

#[derive(Debug, Error, PartialEq)]
pub enum ScopeError {
    #[error("seed path must not be empty")]
    EmptySeed,
    #[error("rate limit must be a non-negative number of seconds, got {0}")]
    BadRateLimit(f64),
    #[error(transparent)]
    Url(#[from] crate::canon::CanonError),
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("{0} is outside the crawl scope")]
    OutOfScope(CanonicalUrl),
    #[error("fetching {url} failed after {attempts} attempts: {last_error}")]
    Retryable {
        url: CanonicalUrl,
        attempts: u32,
        last_error: String,
    },
}

/// Transport-level failure (connection refused, timeout, ...). Non-success
/// HTTP statuses are not transport failures.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct TransportError(pub String);

#[derive(Debug, Clone, PartialEq)]
pub struct CrawlScope {
    seed_path: CanonicalUrl,
    allowed_hosts: BTreeSet<String>,
    rate_limit: f64,
}

impl CrawlScope {
    /// `allowed_hosts` empty means "the seed host and its subdomains".
    pub fn new(
        seed_path: &str,
        allowed_hosts: impl IntoIterator<Item = String>,
        rate_limit: f64,
    ) -> Result<Self, ScopeError> {
        if seed_path.trim().is_empty() {
            return Err(ScopeError::EmptySeed);
        }
        if !(rate_limit >= 0.0 && rate_limit.is_finite()) {
            return Err(ScopeError::BadRateLimit(rate_limit));
        }
        let seed_path = CanonicalUrl::parse(seed_path)?;
        let mut allowed: BTreeSet<String> = allowed_hosts
            .into_iter()
            .map(|h| h.trim().to_ascii_lowercase())
            .filter(|h| !h.is_empty())
            .collect();
        if allowed.is_empty() {
            allowed.insert(seed_path.host().to_string());
        }
        Ok(CrawlScope {
            seed_path,
            allowed_hosts: allowed,
            rate_limit,
        })
    }

    pub fn seed_path(&self) -> &CanonicalUrl {
        &self.seed_path
    }

    pub fn allowed_hosts(&self) -> &BTreeSet<String> {
        &self.allowed_hosts
    }

    pub fn rate_limit(&self) -> Duration {
        Duration::from_secs_f64(self.rate_limit)
    }

    pub fn rate_limit_secs(&self) -> f64 {
        self.rate_limit
    }

    pub fn contains(&self, url: &CanonicalUrl) -> bool {
        let host = url.host();
        let host_allowed = self.allowed_hosts.iter().any(|allowed| {
            host == allowed
                || (host.len() > allowed.len()
                    && host.ends_with(allowed.as_str())
                    && host.as_bytes()[host.len() - allowed.len() - 1] == b'.')
        });
        host_allowed && url.is_under(&self.seed_path)
    }
}

#[derive(Debug, Clone)]
pub struct Response {
    pub status: u16,
    pub body: Vec<u8>,
    /// `Location` target of a redirect response, unresolved.
    pub location: Option<String>,
}

pub trait Fetcher: Send + Sync {
    fn get(&self, url: &CanonicalUrl) -> Result<Response, TransportError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FetchRecord {
    pub url: CanonicalUrl,
    pub status: u16,
    pub body_digest: String,
    pub fetched_at: Option<DateTime<Utc>>,
    #[serde(skip)]
    pub body: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub redirect_to: Option<CanonicalUrl>,
}

impl FetchRecord {
    pub fn completed(
        url: CanonicalUrl,
        status: u16,
        body: Vec<u8>,
        fetched_at: DateTime<Utc>,
        redirect_to: Option<CanonicalUrl>,
    ) -> Self {
        FetchRecord {
            url,
            status,
            body_digest: body_digest(&body),
            fetched_at: Some(fetched_at),
            body,
            redirect_to,
        }
    }

    /// Placeholder for a request that never completed (status 0).
    pub fn failed(url: CanonicalUrl) -> Self {
        FetchRecord {
            url,
            status: 0,
            body_digest: body_digest(&[]),
            fetched_at: None,
            body: Vec::new(),
            redirect_to: None,
        }
    }

    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }
}

/// Lowercase hex SHA-256.
pub fn body_digest(body: &[u8]) -> String {
    hex::encode(Sha256::digest(body))
}

/// Fetches one in-scope URL, honouring the per-host limiter and retrying
/// transport failures with doubling backoff starting at the rate limit.
pub fn fetch_page(
    url: &CanonicalUrl,
    scope: &CrawlScope,
    fetcher: &dyn Fetcher,
    limiter: &HostLimiter,
    clock: &dyn Clock,
) -> Result<FetchRecord, FetchError> {
    if !scope.contains(url) {
        return Err(FetchError::OutOfScope(url.clone()));
    }
    let mut backoff = scope.rate_limit();
    let mut last_error = String::new();
    for attempt in 1..=MAX_ATTEMPTS {
        let outcome = {
            let _permit = limiter.acquire(url.host(), clock);
            fetcher.get(url).map(|resp| (resp, clock.utc()))
        };
        match outcome {
            Ok((resp, at)) => {
                let redirect_to = resp.location.as_deref().and_then(|loc| {
                    let base = url.to_url("http");
                    let target = base.join(loc).ok()?;
                    CanonicalUrl::from_url(&target).ok()
                });
                return Ok(FetchRecord::completed(
                    url.clone(),
                    resp.status,
                    resp.body,
                    at,
                    redirect_to,
                ));
            }
            Err(e) => {
                log::warn!("attempt {attempt} for {url} failed: {e}");
                last_error = e.0;
                if attempt < MAX_ATTEMPTS {
                    clock.sleep(backoff);
                    backoff *= 2;
                }
            }
        }
    }
    Err(FetchError::Retryable {
        url: url.clone(),
        attempts: MAX_ATTEMPTS,
        last_error,
    })
}

/// Live HTTP fetcher. Redirects are not followed; the target is reported
/// through [`Response::location`] so the crawler can schedule it itself.
pub struct HttpFetcher {
    client: reqwest::blocking::Client,
    scheme: String,
}

impl HttpFetcher {
    pub fn new(scheme: &str) -> Result<Self, TransportError> {
        let client = reqwest::blocking::Client::builder()
            .redirect(reqwest::redirect::Policy::none())
            .timeout(Duration::from_secs(30))
            .user_agent(concat!("prmetrics/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| TransportError(e.to_string()))?;
        Ok(HttpFetcher {
            client,
            scheme: scheme.to_string(),
        })
    }
}

impl Fetcher for HttpFetcher {
    fn get(&self, url: &CanonicalUrl) -> Result<Response, TransportError> {
        let resp = self
            .client
            .get(url.to_url(&self.scheme))
            .send()
            .map_err(|e| TransportError(e.to_string()))?;
        let status = resp.status().as_u16();
        let location = resp
            .headers()
            .get(reqwest::header::LOCATION)
            .and_then(|v| v.to_str().ok())
            .map(str::to_string);
        let body = resp.bytes().map_err(|e| TransportError(e.to_string()))?.to_vec();
        Ok(Response {
            status,
            body,
            location,
        })
    }
}

/// Serves a recorded site from disk: `<root>/<host>/<path>`, with `:` in the
/// host replaced by `_` and directory paths mapped to `index.html`. A file
/// named `<name>.redirect` answers 301 with its trimmed content as target.
/// Missing files answer 404 with an empty body.
pub struct FixtureFetcher {
    root: PathBuf,
}

impl FixtureFetcher {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        FixtureFetcher { root: root.into() }
    }

    pub fn path_for(&self, url: &CanonicalUrl) -> PathBuf {
        fixture_path(&self.root, url)
    }
}

pub fn fixture_path(root: &Path, url: &CanonicalUrl) -> PathBuf {
    let mut path = root.join(url.host().replace(':', "_"));
    let rel = url.path().trim_start_matches('/');
    for part in rel.split('/').filter(|p| !p.is_empty()) {
        path.push(part);
    }
    if url.path().ends_with('/') {
        path.push("index.html");
    }
    path
}

impl Fetcher for FixtureFetcher {
    fn get(&self, url: &CanonicalUrl) -> Result<Response, TransportError> {
        let path = self.path_for(url);
        let mut redirect = path.clone().into_os_string();
        redirect.push(".redirect");
        let redirect = PathBuf::from(redirect);
        if redirect.is_file() {
            let target = std::fs::read_to_string(&redirect).map_err(|e| TransportError(e.to_string()))?;
            return Ok(Response {
                status: 301,
                body: Vec::new(),
                location: Some(target.trim().to_string()),
            });
        }
        match std::fs::read(&path) {
            Ok(body) => Ok(Response {
                status: 200,
                body,
                location: None,
            }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Response {
                status: 404,
                body: Vec::new(),
                location: None,
            }),
            Err(e) => Err(TransportError(format!("{}: {e}", path.display()))),
        }
    }
}
