use std::collections::HashSet;

use once_cell::sync::Lazy;
use scraper::{Html, Selector};

use super::fetch::{CrawlScope, FetchRecord};
use crate::canon::CanonicalUrl;

static ANCHORS: Lazy<Selector> = Lazy::new(|| Selector::parse("a[href], area[href]").unwrap());

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Expansion {
    pub urls: Vec<CanonicalUrl>,
    /// hrefs that could not be resolved to a URL at all.
    pub malformed: usize,
}

/// New in-scope links of a fetched page, in document order, without
/// duplicates and without anything already in `seen`. A redirect target
/// recorded on the fetch counts as a link.
pub fn expand_frontier(record: &FetchRecord, scope: &CrawlScope, seen: &HashSet<CanonicalUrl>) -> Expansion {
    let mut out = Expansion::default();
    let mut emitted: HashSet<CanonicalUrl> = HashSet::new();
    let mut push = |url: CanonicalUrl, out: &mut Expansion| {
        if scope.contains(&url) && !seen.contains(&url) && emitted.insert(url.clone()) {
            out.urls.push(url);
        }
    };

    if let Some(target) = &record.redirect_to {
        push(target.clone(), &mut out);
    }

    let Ok(text) = std::str::from_utf8(&record.body) else {
        return out;
    };
    if !text.contains('<') {
        return out;
    }
    let base = record.url.to_url("http");
    let doc = Html::parse_document(text);
    for anchor in doc.select(&ANCHORS) {
        let href = anchor.value().attr("href").unwrap_or_default().trim();
        if href.is_empty() || href.starts_with('#') {
            continue;
        }
        match base.join(href) {
            Ok(url) => {
                if let Ok(canon) = CanonicalUrl::from_url(&url) {
                    push(canon, &mut out);
                }
            }
            Err(_) => out.malformed += 1,
        }
    }
    out
}
