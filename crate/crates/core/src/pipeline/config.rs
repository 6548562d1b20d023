use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::analytics::Granularity;
use crate::canon::CanonicalUrl;
use crate::harvester::CrawlScope;
use crate::mention::DEFAULT_MAX_DEPTH;

use super::PipelineError;

pub const DEFAULT_RATE_LIMIT: f64 = 1.0;
pub const DEFAULT_WORKERS: usize = 4;

const KNOWN_KEYS: &[&str] = &[
    "seed_path",
    "seeds",
    "allowed_hosts",
    "rate_limit",
    "corpus_dir",
    "report_dir",
    "fixtures",
    "max_depth",
    "granularity",
    "workers",
    "scheme",
    "institution_aliases",
    "journal_aliases",
    "doi_rewrites",
    "doi_journals",
    "external_counts",
    "tweets",
    "backlinks",
    "resolver_table",
];

const PATH_KEYS: &[&str] = &[
    "corpus_dir",
    "report_dir",
    "fixtures",
    "institution_aliases",
    "journal_aliases",
    "doi_rewrites",
    "doi_journals",
    "external_counts",
    "tweets",
    "backlinks",
    "resolver_table",
];

/// Flat `key = value` settings. Later `set` calls override earlier ones;
/// relative paths from a file are taken relative to that file.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self, PipelineError> {
        let mut raw = RawConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PipelineError::Config(format!("line {}: expected key = value", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if PATH_KEYS.contains(&k) && !v.is_empty() {
                raw.set(k, base.join(v).to_string_lossy())?;
            } else {
                raw.set(k, v)?;
            }
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), PipelineError> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(PipelineError::Config(format!("unknown key {key:?}")));
        }
        self.entries.insert(key.to_string(), value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .get(key)
            .map(String::as_str)
            .filter(|v| !v.is_empty())
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub scope: CrawlScope,
    pub seeds: Vec<CanonicalUrl>,
    pub corpus_dir: PathBuf,
    pub report_dir: PathBuf,
    /// Recorded-response directory; replaces every network access.
    pub fixtures: Option<PathBuf>,
    pub max_depth: usize,
    pub granularity: Granularity,
    pub workers: usize,
    /// Scheme used for live requests.
    pub scheme: String,
    pub institution_aliases: Option<PathBuf>,
    pub journal_aliases: Option<PathBuf>,
    pub doi_rewrites: Option<PathBuf>,
    pub doi_journals: Option<PathBuf>,
    pub external_counts: Option<PathBuf>,
    pub tweets: Option<PathBuf>,
    pub backlinks: Option<PathBuf>,
    pub resolver_table: Option<PathBuf>,
}

fn parse_num<T: std::str::FromStr>(raw: &RawConfig, key: &str, default: T) -> Result<T, PipelineError> {
    match raw.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| PipelineError::Config(format!("{key}: cannot parse {v:?}"))),
    }
}

impl PipelineConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, PipelineError> {
        let fixtures = raw.get("fixtures").map(PathBuf::from);
        // Inputs default to the conventional file names inside the fixture
        // directory when they exist there.
        let input = |key: &str, file: &str| -> Option<PathBuf> {
            raw.get(key)
                .map(PathBuf::from)
                .or_else(|| fixtures.as_ref().map(|f| f.join(file)).filter(|p| p.exists()))
        };

        let seed_path = raw
            .get("seed_path")
            .ok_or_else(|| PipelineError::Config("seed_path is required".into()))?;
        let rate_limit = parse_num(raw, "rate_limit", DEFAULT_RATE_LIMIT)?;
        let hosts: Vec<String> = raw
            .get("allowed_hosts")
            .map(|h| h.split(',').map(str::to_string).collect())
            .unwrap_or_default();
        let scope = CrawlScope::new(seed_path, hosts, rate_limit)
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        let seeds = match raw.get("seeds") {
            Some(s) => s
                .split(',')
                .map(|u| CanonicalUrl::parse(u).map_err(|e| PipelineError::Config(format!("seeds: {e}"))))
                .collect::<Result<Vec<_>, _>>()?,
            None => vec![scope.seed_path().clone()],
        };
        let max_depth = parse_num(raw, "max_depth", DEFAULT_MAX_DEPTH)?;
        if max_depth < 1 {
            return Err(PipelineError::Config("max_depth must be at least 1".into()));
        }
        let granularity = match raw.get("granularity") {
            Some(g) => g.parse().map_err(PipelineError::Config)?,
            None => Granularity::Yearly,
        };
        // Fixture crawls run single-threaded so timestamps on the virtual
        // clock are reproducible.
        let workers = if fixtures.is_some() {
            1
        } else {
            parse_num(raw, "workers", DEFAULT_WORKERS)?.max(1)
        };
        Ok(PipelineConfig {
            seeds,
            corpus_dir: PathBuf::from(raw.get("corpus_dir").unwrap_or("corpus")),
            report_dir: PathBuf::from(raw.get("report_dir").unwrap_or("reports")),
            max_depth,
            granularity,
            workers,
            scheme: raw.get("scheme").unwrap_or("https").to_string(),
            institution_aliases: input("institution_aliases", "institution_aliases.csv"),
            journal_aliases: input("journal_aliases", "journal_aliases.csv"),
            doi_rewrites: input("doi_rewrites", "doi_rewrites.csv"),
            doi_journals: input("doi_journals", "doi_journals.csv"),
            external_counts: input("external_counts", "external_counts.csv"),
            tweets: input("tweets", "tweets.jsonl"),
            backlinks: input("backlinks", "backlinks.csv"),
            resolver_table: input("resolver_table", "resolver.csv"),
            scope,
            fixtures,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_file_with_relative_paths() {
        let raw = RawConfig::parse(
            "# comment\nseed_path = www.eurekalert.org/pub_releases\nrate_limit=0.5\ncorpus_dir = out/c\nmax_depth=3\n",
            Path::new("/etc/pr"),
        )
        .unwrap();
        let cfg = PipelineConfig::from_raw(&raw).unwrap();
        assert_eq!(cfg.corpus_dir, PathBuf::from("/etc/pr/out/c"));
        assert_eq!(cfg.max_depth, 3);
        assert_eq!(cfg.scope.rate_limit_secs(), 0.5);
        assert_eq!(
            cfg.seeds,
            vec![CanonicalUrl::parse("www.eurekalert.org/pub_releases").unwrap()]
        );
    }

    #[test]
    fn rejects_bad_values() {
        let mut raw = RawConfig::default();
        assert!(PipelineConfig::from_raw(&raw).is_err());
        raw.set("seed_path", "h.org/p").unwrap();
        raw.set("max_depth", "0").unwrap();
        assert!(PipelineConfig::from_raw(&raw).is_err());
        raw.set("max_depth", "2").unwrap();
        raw.set("granularity", "weekly").unwrap();
        assert!(PipelineConfig::from_raw(&raw).is_err());
        assert!(raw.set("colour", "blue").is_err());
        assert!(RawConfig::parse("no equals sign", Path::new(".")).is_err());
    }
}
