//! URL identity shared by every stage.
//!
//! A [`CanonicalUrl`] is scheme-less (`host[:port]/path`): `http` and `https`
//! variants of one address collapse onto the same identity, as do variants
//! that differ only in host case, fragment, query string or doubled slashes.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CanonError {
    #[error("empty URL")]
    Empty,
    #[error("unparseable URL {0:?}")]
    Unparseable(String),
    #[error("unsupported scheme {scheme:?} in {url:?}")]
    UnsupportedScheme { url: String, scheme: String },
    #[error("URL {0:?} has no host")]
    NoHost(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CanonicalUrl(String);

impl CanonicalUrl {
    pub fn parse(raw: &str) -> Result<Self, CanonError> {
        let raw = raw.trim();
        if raw.is_empty() {
            return Err(CanonError::Empty);
        }
        let with_scheme = if has_scheme(raw) {
            raw.to_string()
        } else {
            format!("http://{}", raw.trim_start_matches('/'))
        };
        let url = Url::parse(&with_scheme).map_err(|_| CanonError::Unparseable(raw.to_string()))?;
        Self::from_url(&url).map_err(|e| match e {
            CanonError::Unparseable(_) => CanonError::Unparseable(raw.to_string()),
            other => other,
        })
    }

    pub fn from_url(url: &Url) -> Result<Self, CanonError> {
        match url.scheme() {
            "http" | "https" => {}
            other => {
                return Err(CanonError::UnsupportedScheme {
                    url: url.to_string(),
                    scheme: other.to_string(),
                })
            }
        }
        let host = url
            .host_str()
            .filter(|h| !h.is_empty())
            .ok_or_else(|| CanonError::NoHost(url.to_string()))?
            .to_ascii_lowercase();
        let mut out = host;
        // `Url::port` is already `None` for the scheme default.
        if let Some(port) = url.port() {
            if !(port == 80 || port == 443) {
                out.push(':');
                out.push_str(&port.to_string());
            }
        }
        out.push_str(&collapse_slashes(url.path()));
        Ok(CanonicalUrl(out))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `host[:port]` part.
    pub fn host(&self) -> &str {
        match self.0.find('/') {
            Some(i) => &self.0[..i],
            None => &self.0,
        }
    }

    /// Path part, always starting with `/`.
    pub fn path(&self) -> &str {
        match self.0.find('/') {
            Some(i) => &self.0[i..],
            None => "/",
        }
    }

    /// Fetchable URL using the given scheme.
    pub fn to_url(&self, scheme: &str) -> Url {
        Url::parse(&format!("{scheme}://{}", self.0)).expect("canonical URLs always re-parse")
    }

    /// True when `self` lies under the `prefix` fold: same host or a
    /// subdomain of it, and the path starts with the prefix path.
    pub fn is_under(&self, prefix: &CanonicalUrl) -> bool {
        let host = self.host();
        let fold_host = prefix.host();
        let host_ok = host == fold_host
            || (host.len() > fold_host.len()
                && host.ends_with(fold_host)
                && host.as_bytes()[host.len() - fold_host.len() - 1] == b'.');
        host_ok && self.path().starts_with(prefix.path())
    }

    /// Ancestor paths of this URL, nearest first, ending at the host root.
    pub fn ancestors(&self) -> impl Iterator<Item = CanonicalUrl> + '_ {
        let mut current = self.0.trim_end_matches('/').to_string();
        std::iter::from_fn(move || {
            let cut = current.rfind('/')?;
            if cut < self.host().len() {
                return None;
            }
            current.truncate(cut);
            if current.len() == self.host().len() {
                let root = CanonicalUrl(format!("{current}/"));
                // stop after yielding the root
                current.clear();
                return Some(root);
            }
            Some(CanonicalUrl(current.clone()))
        })
    }

    /// Join key used across tweets, backlinks and the corpus: the terminal
    /// path segment without its file extension.
    pub fn release_id(&self) -> ReleaseId {
        let segment = self
            .path()
            .trim_end_matches('/')
            .rsplit('/')
            .next()
            .unwrap_or_default();
        let stem = match segment.rfind('.') {
            Some(i) if i > 0 => &segment[..i],
            _ => segment,
        };
        if stem.is_empty() {
            ReleaseId(self.host().to_string())
        } else {
            ReleaseId(stem.to_string())
        }
    }
}

fn has_scheme(raw: &str) -> bool {
    match raw.find("://") {
        Some(i) => raw[..i]
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c)),
        None => raw.starts_with("mailto:") || raw.starts_with("javascript:") || raw.starts_with("tel:"),
    }
}

fn collapse_slashes(path: &str) -> String {
    let mut out = String::with_capacity(path.len().max(1));
    let mut prev_slash = false;
    for c in path.chars() {
        if c == '/' {
            if !prev_slash {
                out.push(c);
            }
            prev_slash = true;
        } else {
            out.push(c);
            prev_slash = false;
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

impl fmt::Display for CanonicalUrl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for CanonicalUrl {
    type Error = CanonError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        CanonicalUrl::parse(&value)
    }
}

impl From<CanonicalUrl> for String {
    fn from(value: CanonicalUrl) -> Self {
        value.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReleaseId(pub String);

impl ReleaseId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ReleaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
