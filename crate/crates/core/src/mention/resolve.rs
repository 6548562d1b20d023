use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::canon::CanonicalUrl;

pub const DEFAULT_MAX_DEPTH: usize = 5;

/// What a redirect oracle says about one URL.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hop {
    Redirect(String),
    Terminal,
    Dead,
}

pub trait RedirectOracle: Send + Sync {
    fn next_hop(&self, url: &CanonicalUrl) -> Hop;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    FinalTarget,
    MaxDepth,
    Cycle,
    Dead,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrlResolution {
    pub chain: Vec<CanonicalUrl>,
    pub final_url: CanonicalUrl,
    pub depth: usize,
    pub terminated_by: Termination,
}

/// Follows redirects from `start` until a terminal URL, a dead link, a
/// revisit, or `max_depth` hops. On a revisit the repeated URL is not
/// appended, so `final_url` is always the last chain element and the chain
/// never repeats.
pub fn resolve_chain(start: &CanonicalUrl, oracle: &dyn RedirectOracle, max_depth: usize) -> UrlResolution {
    let max_depth = max_depth.max(1);
    let mut chain = vec![start.clone()];
    let mut visited: HashSet<CanonicalUrl> = HashSet::from([start.clone()]);
    let terminated_by = loop {
        let current = chain.last().unwrap();
        let hop = oracle.next_hop(current);
        let next = match hop {
            Hop::Terminal => break Termination::FinalTarget,
            Hop::Dead => break Termination::Dead,
            Hop::Redirect(target) => {
                let base = current.to_url("http");
                match base
                    .join(&target)
                    .ok()
                    .and_then(|u| CanonicalUrl::from_url(&u).ok())
                {
                    Some(next) => next,
                    // an unusable Location is as good as no redirect
                    None => break Termination::FinalTarget,
                }
            }
        };
        if &next == current {
            // protocol-only redirect (http -> https): same identity
            break Termination::FinalTarget;
        }
        if !visited.insert(next.clone()) {
            break Termination::Cycle;
        }
        if chain.len() - 1 == max_depth {
            break Termination::MaxDepth;
        }
        chain.push(next);
    };
    UrlResolution {
        final_url: chain.last().unwrap().clone(),
        depth: chain.len() - 1,
        chain,
        terminated_by,
    }
}

/// Redirect table loaded from a `from_url,to_url` CSV. URLs absent from the
/// table are terminal; an empty `to_url` marks a dead link.
#[derive(Debug, Default, Clone)]
pub struct TableOracle {
    hops: HashMap<CanonicalUrl, Option<String>>,
}

#[derive(Debug, Deserialize)]
struct HopRow {
    from_url: String,
    #[serde(default)]
    to_url: String,
}

impl TableOracle {
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self, crate::canon::CanonError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut hops = HashMap::new();
        for (from, to) in pairs {
            let to = to.as_ref().trim();
            // Table targets may omit the scheme; only `/...` is relative.
            let target = if to.is_empty() {
                None
            } else if to.starts_with('/') || to.contains("://") {
                Some(to.to_string())
            } else {
                Some(CanonicalUrl::parse(to)?.to_url("http").to_string())
            };
            hops.insert(CanonicalUrl::parse(from.as_ref())?, target);
        }
        Ok(TableOracle { hops })
    }

    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self, crate::Error> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut pairs = Vec::new();
        for row in rdr.deserialize::<HopRow>() {
            let row = row?;
            pairs.push((row.from_url, row.to_url));
        }
        Ok(TableOracle::from_pairs(pairs)?)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self, crate::Error> {
        let file = std::fs::File::open(path).map_err(|e| crate::Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }
}

impl RedirectOracle for TableOracle {
    fn next_hop(&self, url: &CanonicalUrl) -> Hop {
        match self.hops.get(url) {
            None => Hop::Terminal,
            Some(None) => Hop::Dead,
            Some(Some(to)) => Hop::Redirect(to.clone()),
        }
    }
}

/// Live oracle issuing HEAD requests without following redirects.
pub struct HttpOracle {
    client: reqwest::blocking::Client,
}

impl HttpOracle {
    pub fn new() -> Result<Self, reqwest::Error> {
        let client = reqwest::blocking::Client::builder()
            .redirect(reqwest::redirect::Policy::none())
            .timeout(Duration::from_secs(20))
            .build()?;
        Ok(HttpOracle { client })
    }
}

impl RedirectOracle for HttpOracle {
    fn next_hop(&self, url: &CanonicalUrl) -> Hop {
        let resp = match self.client.head(url.to_url("https")).send() {
            Ok(r) => r,
            Err(_) => return Hop::Dead,
        };
        let status = resp.status();
        if status.is_redirection() {
            if let Some(loc) = resp
                .headers()
                .get(reqwest::header::LOCATION)
                .and_then(|v| v.to_str().ok())
            {
                return Hop::Redirect(loc.to_string());
            }
        }
        if status.as_u16() == 404 || status.as_u16() == 410 || status.is_server_error() {
            return Hop::Dead;
        }
        Hop::Terminal
    }
}

/// Memoizing wrapper, safe to share between resolver threads.
pub struct CachedResolver<'a> {
    oracle: &'a dyn RedirectOracle,
    max_depth: usize,
    cache: Mutex<HashMap<CanonicalUrl, UrlResolution>>,
}

impl<'a> CachedResolver<'a> {
    pub fn new(oracle: &'a dyn RedirectOracle, max_depth: usize) -> Self {
        CachedResolver {
            oracle,
            max_depth,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn resolve(&self, url: &CanonicalUrl) -> UrlResolution {
        if let Some(hit) = self.cache.lock().unwrap().get(url) {
            return hit.clone();
        }
        let res = resolve_chain(url, self.oracle, self.max_depth);
        self.cache.lock().unwrap().insert(url.clone(), res.clone());
        res
    }

    pub fn cached(&self) -> usize {
        self.cache.lock().unwrap().len()
    }
}
