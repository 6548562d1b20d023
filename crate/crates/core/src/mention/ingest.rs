use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::resolve::{resolve_chain, RedirectOracle, UrlResolution};
use crate::canon::{CanonicalUrl, ReleaseId};
use crate::index::CorpusIndex;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("target path must not be empty")]
    EmptyPath,
    #[error("target path must not contain a double quote")]
    QuoteInPath,
}

/// Full-archive search expression: URL containment on `target_path`,
/// retweets excluded.
pub fn build_archive_query(target_path: &str) -> Result<String, QueryError> {
    if target_path.is_empty() {
        return Err(QueryError::EmptyPath);
    }
    if target_path.contains('"') {
        return Err(QueryError::QuoteInPath);
    }
    Ok(format!("url:\"{target_path}\" -is:retweet"))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "release_id", rename_all = "snake_case")]
pub enum MatchResult {
    Matched(ReleaseId),
    OutdatedUrl,
    OutOfScope,
}

impl MatchResult {
    pub fn release_id(&self) -> Option<&ReleaseId> {
        match self {
            MatchResult::Matched(id) => Some(id),
            _ => None,
        }
    }
}

pub fn match_to_release(final_url: &CanonicalUrl, index: &CorpusIndex) -> MatchResult {
    if let Some(id) = index.lookup(final_url) {
        MatchResult::Matched(id.clone())
    } else if index.in_fold(final_url) {
        MatchResult::OutdatedUrl
    } else {
        MatchResult::OutOfScope
    }
}

/// One line of the tweet archive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTweet {
    pub tweet_id: String,
    pub created_at: DateTime<Utc>,
    pub author_id: String,
    pub urls: Vec<String>,
    pub is_retweet: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetMention {
    pub tweet_id: String,
    pub created_at: DateTime<Utc>,
    pub author_id: String,
    pub embedded_urls: Vec<String>,
    /// Distinct final URLs, in order of first appearance.
    pub resolved_urls: Vec<CanonicalUrl>,
    pub is_retweet: bool,
    /// One entry per `resolved_urls` element, same order.
    pub matches: Vec<MatchResult>,
}

impl TweetMention {
    /// Distinct matched releases of this tweet.
    pub fn matched_releases(&self) -> BTreeSet<&ReleaseId> {
        self.matches.iter().filter_map(MatchResult::release_id).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    pub records: usize,
    pub malformed: usize,
    pub retweets: usize,
    /// Tweets whose URLs all fell outside the press-release fold.
    pub out_of_scope_only: usize,
    pub duplicates: usize,
    pub resolved_urls: usize,
    pub matched: usize,
    pub outdated: usize,
    pub out_of_scope: usize,
}

#[derive(Debug, Clone, Default)]
pub struct IngestOutcome {
    /// Sorted by tweet id.
    pub mentions: Vec<TweetMention>,
    pub stats: IngestStats,
    pub outdated_urls: BTreeSet<CanonicalUrl>,
    pub resolutions: BTreeMap<CanonicalUrl, UrlResolution>,
}

/// Cleansing rules: malformed lines are skipped; retweets are dropped;
/// tweets none of whose URLs land in the press-release fold are dropped;
/// the first record of a repeated tweet id wins.
pub fn ingest_tweets<I>(
    lines: I,
    oracle: &dyn RedirectOracle,
    max_depth: usize,
    index: &CorpusIndex,
) -> IngestOutcome
where
    I: IntoIterator,
    I::Item: AsRef<str>,
{
    let mut stats = IngestStats::default();
    let mut originals = Vec::new();
    for line in lines {
        let line = line.as_ref().trim();
        if line.is_empty() {
            continue;
        }
        stats.records += 1;
        match serde_json::from_str::<RawTweet>(line) {
            Ok(t) if t.is_retweet => stats.retweets += 1,
            Ok(t) if t.tweet_id.trim().is_empty() => {
                log::warn!("tweet record without id skipped");
                stats.malformed += 1;
            }
            Ok(t) => originals.push(t),
            Err(e) => {
                log::warn!("malformed tweet record skipped: {e}");
                stats.malformed += 1;
            }
        }
    }

    let unique: BTreeSet<CanonicalUrl> = originals
        .iter()
        .flat_map(|t| t.urls.iter())
        .filter_map(|u| CanonicalUrl::parse(u).ok())
        .collect();
    let resolutions: BTreeMap<CanonicalUrl, UrlResolution> = unique
        .into_par_iter()
        .map(|u| {
            let r = resolve_chain(&u, oracle, max_depth);
            (u, r)
        })
        .collect();

    let mut outdated_urls = BTreeSet::new();
    let mut by_id: HashMap<String, TweetMention> = HashMap::new();
    let mut seen_ids: HashSet<String> = HashSet::new();
    for t in originals {
        let mut resolved: Vec<CanonicalUrl> = Vec::new();
        for raw in &t.urls {
            let Ok(u) = CanonicalUrl::parse(raw) else {
                continue;
            };
            let f = resolutions[&u].final_url.clone();
            if !resolved.contains(&f) {
                resolved.push(f);
            }
        }
        let matches: Vec<MatchResult> = resolved.iter().map(|f| match_to_release(f, index)).collect();
        if !matches.iter().any(|m| !matches!(m, MatchResult::OutOfScope)) {
            stats.out_of_scope_only += 1;
            continue;
        }
        if !seen_ids.insert(t.tweet_id.clone()) {
            stats.duplicates += 1;
            continue;
        }
        for (url, m) in resolved.iter().zip(&matches) {
            stats.resolved_urls += 1;
            match m {
                MatchResult::Matched(_) => stats.matched += 1,
                MatchResult::OutdatedUrl => {
                    stats.outdated += 1;
                    outdated_urls.insert(url.clone());
                }
                MatchResult::OutOfScope => stats.out_of_scope += 1,
            }
        }
        by_id.insert(
            t.tweet_id.clone(),
            TweetMention {
                tweet_id: t.tweet_id,
                created_at: t.created_at,
                author_id: t.author_id,
                embedded_urls: t.urls,
                resolved_urls: resolved,
                is_retweet: false,
                matches,
            },
        );
    }

    let mut mentions: Vec<TweetMention> = by_id.into_values().collect();
    mentions.sort_by(|a, b| a.tweet_id.cmp(&b.tweet_id));
    IngestOutcome {
        mentions,
        stats,
        outdated_urls,
        resolutions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mention::TableOracle;

    fn c(s: &str) -> CanonicalUrl {
        CanonicalUrl::parse(s).unwrap()
    }

    fn index() -> CorpusIndex {
        let mut idx = CorpusIndex::new(c("www.eurekalert.org/pub_releases"));
        idx.insert(
            c("www.eurekalert.org/pub_releases/2016-10/a-1.php"),
            ReleaseId("a-1".into()),
        );
        idx
    }

    #[test]
    fn archive_query_grammar() {
        assert_eq!(
            build_archive_query("EurekAlert.org/press_release").unwrap(),
            r#"url:"EurekAlert.org/press_release" -is:retweet"#
        );
        assert_eq!(
            build_archive_query("example.org/p").unwrap(),
            r#"url:"example.org/p" -is:retweet"#
        );
        assert_eq!(build_archive_query(""), Err(QueryError::EmptyPath));
    }

    #[test]
    fn match_partition() {
        let idx = index();
        assert_eq!(
            match_to_release(
                &c("https://www.eurekalert.org/pub_releases/2016-10/a-1.php"),
                &idx
            ),
            MatchResult::Matched(ReleaseId("a-1".into()))
        );
        assert_eq!(
            match_to_release(&c("www.eurekalert.org/pub_releases/2000-10/old.php"), &idx),
            MatchResult::OutdatedUrl
        );
        assert_eq!(
            match_to_release(&c("example.com/news"), &idx),
            MatchResult::OutOfScope
        );
    }

    fn line(id: &str, urls: &[&str], rt: bool) -> String {
        serde_json::json!({
            "tweet_id": id, "created_at": "2016-10-03T12:00:00Z", "author_id": "u1",
            "urls": urls, "is_retweet": rt
        })
        .to_string()
    }

    #[test]
    fn empty_stream() {
        let out = ingest_tweets(Vec::<String>::new(), &TableOracle::default(), 5, &index());
        assert!(out.mentions.is_empty());
    }

    #[test]
    fn duplicates_retweets_and_malformed() {
        let rel = "https://www.eurekalert.org/pub_releases/2016-10/a-1.php";
        let lines = vec![
            line("2", &[rel], false),
            line("2", &[rel], false),
            line("3", &[rel], true),
            "{not json".to_string(),
            line("1", &["https://example.com/x", rel, rel], false),
        ];
        let out = ingest_tweets(lines, &TableOracle::default(), 5, &index());
        let ids: Vec<&str> = out.mentions.iter().map(|m| m.tweet_id.as_str()).collect();
        assert_eq!(ids, vec!["1", "2"]);
        assert_eq!(out.stats.duplicates, 1);
        assert_eq!(out.stats.retweets, 1);
        assert_eq!(out.stats.malformed, 1);
        let first = &out.mentions[0];
        assert_eq!(first.resolved_urls.len(), 2);
        assert!(first.resolved_urls.len() <= first.embedded_urls.len());
        assert_eq!(first.matches[1], MatchResult::Matched(ReleaseId("a-1".into())));
    }
}
