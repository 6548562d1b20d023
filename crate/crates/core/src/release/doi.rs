//! DOI discovery in press-release pages, with repair of the usual damage:
//! resolver wrappers, trailing punctuation, split resolver URLs, shortened
//! links and per-journal malformations.

use std::collections::HashMap;
use std::path::Path;

use once_cell::sync::Lazy;
use percent_encoding::percent_decode_str;
use regex::Regex;
use scraper::{Html, Node, Selector};
use serde::{Deserialize, Serialize};

use crate::canon::CanonicalUrl;
use crate::mention::{resolve_chain, RedirectOracle, DEFAULT_MAX_DEPTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoiRepair {
    None,
    StrippedWrapper,
    BrokenUrlFixed,
    Unshortened,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoiRef {
    pub raw: String,
    pub normalized: String,
    pub repair: DoiRepair,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DoiExtraction {
    pub dois: Vec<DoiRef>,
    /// DOI-looking candidates (resolver links, `doi:` markers) that no
    /// repair could turn into a valid DOI.
    pub dropped: usize,
}

static DOI_SYNTAX: Lazy<Regex> = Lazy::new(|| Regex::new(r"^10\.\d{4,9}/\S+$").unwrap());
static DOI_IN_TEXT: Lazy<Regex> = Lazy::new(|| Regex::new(r#"\b10\.\d{4,9}/[^\s"<>]+"#).unwrap());
// Resolver URL or doi: marker whose prefix and suffix got separated by
// whitespace instead of a slash (or by a slash followed by whitespace).
static BROKEN_RESOLVER: Lazy<Regex> = Lazy::new(|| {
    Regex::new(r#"(?i)(?:doi\.org/|doi:\s?)(10\.\d{4,9})(?:/?\s+|/?%20)([^\s/"<>][^\s"<>]*)"#).unwrap()
});
static DOI_MARKER: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"(?i)(?:(?:dx\.|www\.)?doi\.org/|\bdoi:\s?)").unwrap());
static SHORT_LINK: Lazy<Regex> = Lazy::new(|| {
    Regex::new(
        r"(?i)\b(?:https?://)?(?:bit\.ly|t\.co|goo\.gl|ow\.ly|tinyurl\.com|buff\.ly|j\.mp|is\.gd|dlvr\.it|trib\.al)/[A-Za-z0-9_-]+",
    )
    .unwrap()
});
// shortDOI service: doi.org/<short code>, no "10." prefix
static SHORT_DOI: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"(?i)\b(?:https?://)?(?:dx\.|www\.)?doi\.org/([a-z0-9]{4,12})\b").unwrap());
static ANCHORS: Lazy<Selector> = Lazy::new(|| Selector::parse("a[href]").unwrap());

const TRAILING: &[char] = &['.', ',', ';', ':', '"', '\'', '}', '>'];

/// True when `s` is a normalized-looking DOI: `10.` + 4-9 digits + `/` +
/// non-empty suffix, no whitespace, no trailing punctuation.
pub fn is_valid_doi(s: &str) -> bool {
    DOI_SYNTAX.is_match(s) && !s.ends_with(|c: char| TRAILING.contains(&c) || c == ')' || c == ']')
}

/// Removes trailing punctuation and unbalanced closing brackets. Returns the
/// cleaned candidate and whether anything was removed.
fn strip_wrapper(candidate: &str) -> (&str, bool) {
    let mut s = candidate;
    loop {
        let before = s.len();
        s = s.trim_end_matches(TRAILING);
        if s.ends_with(')') && s.matches(')').count() > s.matches('(').count() {
            s = &s[..s.len() - 1];
        }
        if s.ends_with(']') && s.matches(']').count() > s.matches('[').count() {
            s = &s[..s.len() - 1];
        }
        if s.len() == before {
            break;
        }
    }
    (s, s.len() != candidate.len())
}

/// Normalizes one candidate (`10.x/y` possibly followed by junk).
fn clean(candidate: &str) -> Option<(String, bool)> {
    let (s, stripped) = strip_wrapper(candidate.trim());
    let normalized = s.to_lowercase();
    is_valid_doi(&normalized).then_some((normalized, stripped))
}

#[derive(Debug, Clone)]
pub struct DoiRewrite {
    pub journal_pattern: Regex,
    pub find: Regex,
    pub replace: String,
}

#[derive(Debug, Deserialize)]
struct RewriteRow {
    journal_pattern: String,
    find: String,
    replace: String,
}

impl DoiRewrite {
    /// Loads `journal_pattern,find,replace` rows; both patterns are regular
    /// expressions, the journal one matched case-insensitively.
    pub fn load_csv<R: std::io::Read>(reader: R) -> Result<Vec<DoiRewrite>, crate::Error> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut out = Vec::new();
        for row in rdr.deserialize::<RewriteRow>() {
            let row = row?;
            out.push(DoiRewrite {
                journal_pattern: Regex::new(&format!("(?i){}", row.journal_pattern))?,
                find: Regex::new(&row.find)?,
                replace: row.replace,
            });
        }
        Ok(out)
    }

    pub fn load_path(path: &Path) -> Result<Vec<DoiRewrite>, crate::Error> {
        let file = std::fs::File::open(path).map_err(|e| crate::Error::io(path, e))?;
        Self::load_csv(file)
    }
}

/// Collects candidate DOIs keeping, per normalized value, the least invasive
/// repair; first-seen order is preserved.
#[derive(Default)]
struct Collector {
    order: Vec<String>,
    best: HashMap<String, DoiRef>,
}

impl Collector {
    fn add(&mut self, raw: &str, normalized: String, repair: DoiRepair) {
        match self.best.get_mut(&normalized) {
            Some(existing) => {
                if repair < existing.repair {
                    existing.repair = repair;
                    existing.raw = raw.to_string();
                }
            }
            None => {
                self.order.push(normalized.clone());
                self.best.insert(
                    normalized.clone(),
                    DoiRef {
                        raw: raw.to_string(),
                        normalized,
                        repair,
                    },
                );
            }
        }
    }

    fn contains(&self, normalized: &str) -> bool {
        self.best.contains_key(normalized)
    }

    fn finish(mut self) -> Vec<DoiRef> {
        self.order.iter().map(|k| self.best.remove(k).unwrap()).collect()
    }
}

pub struct DoiExtractor<'a> {
    rewrites: Vec<DoiRewrite>,
    resolver: Option<&'a dyn RedirectOracle>,
    max_depth: usize,
}

impl Default for DoiExtractor<'_> {
    fn default() -> Self {
        DoiExtractor {
            rewrites: Vec::new(),
            resolver: None,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

impl<'a> DoiExtractor<'a> {
    pub fn new(
        rewrites: Vec<DoiRewrite>,
        resolver: Option<&'a dyn RedirectOracle>,
        max_depth: usize,
    ) -> Self {
        DoiExtractor {
            rewrites,
            resolver,
            max_depth,
        }
    }

    /// DOIs in hyperlink targets, visible body text and the description.
    /// `journals` selects which rewrite rules apply.
    pub fn extract(&self, body: &[u8], description: &str, journals: &[String]) -> DoiExtraction {
        let text = String::from_utf8_lossy(body);
        let doc = Html::parse_document(&text);

        let mut sources: Vec<String> = doc
            .select(&ANCHORS)
            .filter_map(|a| a.value().attr("href"))
            .map(|href| percent_decode_str(href.trim()).decode_utf8_lossy().into_owned())
            .map(|href| strip_query(&href).to_string())
            .collect();
        sources.push(visible_text(&doc));
        if !description.is_empty() {
            sources.push(description.to_string());
        }

        let rules: Vec<&DoiRewrite> = self
            .rewrites
            .iter()
            .filter(|r| journals.iter().any(|j| r.journal_pattern.is_match(j)))
            .collect();

        let mut found = Collector::default();
        let mut dropped = 0;
        for source in &sources {
            dropped += self.scan(source, &rules, &mut found);
        }
        DoiExtraction {
            dois: found.finish(),
            dropped,
        }
    }

    /// Scans one source string; returns the number of dropped candidates.
    fn scan(&self, source: &str, rules: &[&DoiRewrite], out: &mut Collector) -> usize {
        let mut text = std::borrow::Cow::Borrowed(source);
        for rule in rules {
            if let std::borrow::Cow::Owned(changed) = rule.find.replace_all(&text, rule.replace.as_str()) {
                text = std::borrow::Cow::Owned(changed);
            }
        }
        let mut local = Collector::default();
        scan_plain(&text, &mut local);
        if text != source {
            // DOIs that only exist after a journal rewrite count as repaired
            let mut raw = Collector::default();
            scan_plain(source, &mut raw);
            for doi in local.best.values_mut() {
                if !raw.contains(&doi.normalized) {
                    doi.repair = DoiRepair::BrokenUrlFixed;
                }
            }
        }

        let mut unshortened_at = Vec::new();
        if let Some(resolver) = self.resolver {
            for m in SHORT_LINK.find_iter(&text).chain(short_doi_matches(&text)) {
                let Ok(start) = CanonicalUrl::parse(m.as_str()) else {
                    continue;
                };
                let res = resolve_chain(&start, resolver, self.max_depth);
                if res.depth == 0 {
                    continue;
                }
                if let Some(doi) = doi_from_resolver_url(&res.final_url) {
                    local.add(m.as_str(), doi, DoiRepair::Unshortened);
                    unshortened_at.push(m.range());
                }
            }
        }

        let dropped = DOI_MARKER
            .find_iter(&text)
            .filter(|marker| {
                let rest = &text[marker.end()..];
                let plain = DOI_IN_TEXT
                    .find(rest)
                    .is_some_and(|m| m.start() == 0 && clean(m.as_str()).is_some());
                let broken = BROKEN_RESOLVER
                    .find(&text[marker.start()..])
                    .is_some_and(|m| m.start() == 0);
                let unshortened = unshortened_at
                    .iter()
                    .any(|r| r.start <= marker.start() && marker.end() <= r.end);
                !(plain || broken || unshortened)
            })
            .count();

        for doi in local.finish() {
            out.add(&doi.raw, doi.normalized, doi.repair);
        }
        dropped
    }
}

fn short_doi_matches(source: &str) -> impl Iterator<Item = regex::Match<'_>> {
    SHORT_DOI
        .captures_iter(source)
        .filter(|c| !c[1].starts_with("10"))
        .map(|c| c.get(0).unwrap())
}

/// Plain and split-resolver DOIs in one string.
fn scan_plain(source: &str, out: &mut Collector) {
    for caps in BROKEN_RESOLVER.captures_iter(source) {
        let joined = format!("{}/{}", &caps[1], &caps[2]);
        if let Some((normalized, _)) = clean(&joined) {
            out.add(
                caps.get(0).unwrap().as_str(),
                normalized,
                DoiRepair::BrokenUrlFixed,
            );
        }
    }
    for m in DOI_IN_TEXT.find_iter(source) {
        if let Some((normalized, stripped)) = clean(m.as_str()) {
            let repair = if stripped {
                DoiRepair::StrippedWrapper
            } else {
                DoiRepair::None
            };
            out.add(m.as_str(), normalized, repair);
        }
    }
}

fn strip_query(href: &str) -> &str {
    // keep DOIs intact in resolver URLs, which may legitimately contain '?'
    // only after the DOI suffix; everything past '#' is never part of it
    let href = href.split('#').next().unwrap_or(href);
    match href.find('?') {
        Some(i) if !href[..i].contains("doi.org/") => &href[..i],
        _ => href,
    }
}

fn doi_from_resolver_url(url: &CanonicalUrl) -> Option<String> {
    let host = url.host();
    if !(host == "doi.org" || host.ends_with(".doi.org")) {
        return None;
    }
    let path = percent_decode_str(url.path().trim_start_matches('/')).decode_utf8_lossy();
    clean(&path).map(|(doi, _)| doi)
}

fn visible_text(doc: &Html) -> String {
    let mut out = String::new();
    for node in doc.tree.nodes() {
        let Node::Text(text) = node.value() else {
            continue;
        };
        let hidden = node.ancestors().any(|a| match a.value() {
            Node::Element(el) => matches!(el.name(), "script" | "style" | "head" | "noscript"),
            _ => false,
        });
        if !hidden {
            out.push_str(text);
            out.push(' ');
        }
    }
    out
}

/// Extraction with no rewrite table and no unshortening.
pub fn extract_dois(body: &[u8], description: &str) -> DoiExtraction {
    DoiExtractor::default().extract(body, description, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mention::TableOracle;

    fn norm(ex: &DoiExtraction) -> Vec<(&str, DoiRepair)> {
        ex.dois
            .iter()
            .map(|d| (d.normalized.as_str(), d.repair))
            .collect()
    }

    #[test]
    fn resolver_link_and_text_collapse() {
        let body = r#"<p>Read it at <a href="https://doi.org/10.1000/xyz123">the journal</a>
            (DOI 10.1000/xyz123)</p>"#;
        let ex = extract_dois(body.as_bytes(), "");
        assert_eq!(norm(&ex), vec![("10.1000/xyz123", DoiRepair::None)]);
    }

    #[test]
    fn split_resolver_url_is_fixed() {
        let body = r#"<p>Paper: https://doi.org/10.1063 5.0012345 published today</p>"#;
        let ex = extract_dois(body.as_bytes(), "");
        assert_eq!(norm(&ex), vec![("10.1063/5.0012345", DoiRepair::BrokenUrlFixed)]);
        assert_eq!(ex.dropped, 0);

        let href = r#"<a href="http://dx.doi.org/10.1063%205.0099">x</a>"#;
        let ex = extract_dois(href.as_bytes(), "");
        assert_eq!(norm(&ex), vec![("10.1063/5.0099", DoiRepair::BrokenUrlFixed)]);
    }

    #[test]
    fn wrappers_are_stripped() {
        let body = "<p>See (doi:10.1126/science.abc1234). Also 10.1016/0021-9681(87)90171-8.</p>";
        let ex = extract_dois(body.as_bytes(), "");
        assert_eq!(
            norm(&ex),
            vec![
                ("10.1126/science.abc1234", DoiRepair::StrippedWrapper),
                ("10.1016/0021-9681(87)90171-8", DoiRepair::StrippedWrapper),
            ]
        );
    }

    #[test]
    fn normalized_is_lowercase_and_valid() {
        let ex = extract_dois(b"<p>DOI: 10.1371/JOURNAL.PMED.1003000</p>", "");
        assert_eq!(ex.dois[0].normalized, "10.1371/journal.pmed.1003000");
        assert_eq!(ex.dois[0].raw, "10.1371/JOURNAL.PMED.1003000");
        assert!(is_valid_doi(&ex.dois[0].normalized));
    }

    #[test]
    fn description_is_scanned() {
        let ex = extract_dois(b"<p>nothing</p>", "Published as 10.1038/s41586-020-2012-7");
        assert_eq!(ex.dois.len(), 1);
    }

    #[test]
    fn unrepairable_candidates_are_counted() {
        let body = r#"<p>DOI: pending. Link: <a href="https://doi.org/">doi</a></p>"#;
        let ex = extract_dois(body.as_bytes(), "");
        assert!(ex.dois.is_empty());
        assert_eq!(ex.dropped, 2);
    }

    #[test]
    fn shortened_links_via_resolver() {
        let oracle = TableOracle::from_pairs([
            ("https://bit.ly/3abcDEF", "https://doi.org/10.1038/s41467-020-1"),
            ("https://doi.org/gfb7h9", "https://doi.org/10.1002/anie.202000001"),
            ("https://bit.ly/notadoi", "https://example.org/page"),
        ])
        .unwrap();
        let extractor = DoiExtractor::new(Vec::new(), Some(&oracle), 5);
        let body = r#"<a href="https://bit.ly/3abcDEF">paper</a> <a href="https://doi.org/gfb7h9">short</a>
            <a href="https://bit.ly/notadoi">news</a>"#;
        let ex = extractor.extract(body.as_bytes(), "", &[]);
        assert_eq!(
            norm(&ex),
            vec![
                ("10.1038/s41467-020-1", DoiRepair::Unshortened),
                ("10.1002/anie.202000001", DoiRepair::Unshortened),
            ]
        );
    }

    #[test]
    fn journal_rewrite_table() {
        let rules = DoiRewrite::load_csv(
            "journal_pattern,find,replace\n^APL Photonics$,doi\\.org/10\\.1063/app(\\d),doi.org/10.1063/5.$1\n".as_bytes(),
        )
        .unwrap();
        let extractor = DoiExtractor::new(rules, None, 5);
        let body = r#"<a href="https://doi.org/10.1063/app0012">x</a>"#;
        let ex = extractor.extract(body.as_bytes(), "", &["APL Photonics".to_string()]);
        assert_eq!(norm(&ex), vec![("10.1063/5.0012", DoiRepair::BrokenUrlFixed)]);
        // rule does not apply to other journals
        let ex = extractor.extract(body.as_bytes(), "", &["Nature".to_string()]);
        assert_eq!(norm(&ex), vec![("10.1063/app0012", DoiRepair::None)]);
    }

    #[test]
    fn scripts_are_not_visible_text() {
        let body = "<html><head><script>var d='10.9999/hidden';</script></head><body><script>x='10.9999/alsohidden'</script></body></html>";
        assert!(extract_dois(body.as_bytes(), "").dois.is_empty());
    }
}
