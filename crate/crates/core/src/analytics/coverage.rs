use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use chrono::Datelike;
use serde::Serialize;

use super::series::{Granularity, Series};
use crate::backlink::LinkCoverageIndex;
use crate::canon::ReleaseId;
use crate::fixed::Fixed;
use crate::mention::TweetMention;
use crate::release::PressRelease;

/// Tweets per year, counting only tweets with at least one matched
/// release.
pub fn mention_series(mentions: &[TweetMention]) -> Series {
    Series::from_dates(
        mentions
            .iter()
            .filter(|m| !m.matched_releases().is_empty())
            .map(|m| m.created_at.date_naive()),
        Granularity::Yearly,
    )
}

/// Per release year: tweets from that year linking a release of that same
/// year, divided by the releases published that year (two decimals).
/// Years without releases are omitted.
pub fn tweets_per_release(corpus: &[PressRelease], mentions: &[TweetMention]) -> BTreeMap<i32, Fixed> {
    let year_of: HashMap<&ReleaseId, i32> = corpus
        .iter()
        .filter(|r| !r.date_anomaly)
        .map(|r| (&r.id, r.year()))
        .collect();
    let mut published: BTreeMap<i32, u64> = BTreeMap::new();
    for y in year_of.values() {
        *published.entry(*y).or_default() += 1;
    }
    let mut same_year: HashMap<i32, HashSet<&str>> = HashMap::new();
    for m in mentions {
        let ty = m.created_at.year();
        if m.matched_releases()
            .into_iter()
            .any(|id| year_of.get(id) == Some(&ty))
        {
            same_year.entry(ty).or_default().insert(&m.tweet_id);
        }
    }
    published
        .into_iter()
        .map(|(y, n)| {
            let tweets = same_year.get(&y).map_or(0, |s| s.len() as u64);
            (y, Fixed::ratio(tweets, n, 2).expect("published > 0"))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageRow {
    pub year: i32,
    pub published: u64,
    pub tweeted: u64,
    pub pct_tweeted: Fixed,
    pub web_linked: u64,
    pub pct_web: Fixed,
}

/// Share of releases per publication year with at least one matched tweet
/// (any tweet year) and at least one attached backlink. Outdated URLs
/// never count: they carry no match and no attachment.
pub fn coverage_table(
    corpus: &[PressRelease],
    mentions: &[TweetMention],
    links: &LinkCoverageIndex,
) -> Vec<CoverageRow> {
    let tweeted: BTreeSet<&ReleaseId> = mentions.iter().flat_map(|m| m.matched_releases()).collect();
    let mut per_year: BTreeMap<i32, (u64, u64, u64)> = BTreeMap::new();
    for r in corpus.iter().filter(|r| !r.date_anomaly) {
        let e = per_year.entry(r.year()).or_default();
        e.0 += 1;
        if tweeted.contains(&r.id) {
            e.1 += 1;
        }
        if links.is_linked(&r.id) {
            e.2 += 1;
        }
    }
    per_year
        .into_iter()
        .map(|(year, (published, tw, web))| CoverageRow {
            year,
            published,
            tweeted: tw,
            pct_tweeted: Fixed::percent(tw, published, 2).expect("published > 0"),
            web_linked: web,
            pct_web: Fixed::percent(web, published, 1).expect("published > 0"),
        })
        .collect()
}
