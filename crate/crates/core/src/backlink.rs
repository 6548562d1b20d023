//! Per-target backlink aggregates: protocol-variant merging and attachment
//! to corpus releases.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{CanonicalUrl, ReleaseId};
use crate::index::CorpusIndex;

pub const FLOW_MAX: i64 = 100;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinkError {
    #[error("record {row} ({target:?}): empty target_url")]
    EmptyTarget { row: usize, target: String },
    #[error("record {row} ({target:?}): bad target_url")]
    BadTarget { row: usize, target: String },
    #[error("record {row} ({target:?}): {field} = {value} outside 0..=100")]
    FlowOutOfRange {
        row: usize,
        target: String,
        field: &'static str,
        value: i64,
    },
    #[error("record {row} ({target:?}): mentioning_websites {websites} > mentioning_webpages {webpages}")]
    WebsitesExceedPages {
        row: usize,
        target: String,
        websites: u64,
        webpages: u64,
    },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
}

/// One row of the upstream link index, protocol still attached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawLinkRecord {
    pub target_url: String,
    pub mentioning_webpages: u64,
    pub mentioning_websites: u64,
    pub citation_flow: i64,
    pub trust_flow: i64,
    #[serde(default)]
    pub window_start: Option<NaiveDate>,
    #[serde(default)]
    pub window_end: Option<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinkSource {
    pub target_url: String,
    pub mentioning_webpages: u64,
    pub mentioning_websites: u64,
    pub citation_flow: u8,
    pub trust_flow: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BacklinkAggregate {
    pub target: CanonicalUrl,
    pub mentioning_webpages: u64,
    /// Summed across variants; an upper bound once more than one source
    /// contributed.
    pub mentioning_websites: u64,
    pub websites_is_upper_bound: bool,
    pub citation_flow: u8,
    pub trust_flow: u8,
    pub window_start: Option<NaiveDate>,
    pub window_end: Option<NaiveDate>,
    /// Sorted.
    pub sources: Vec<LinkSource>,
}

fn check_flow(row: usize, target: &str, field: &'static str, value: i64) -> Result<u8, LinkError> {
    if (0..=FLOW_MAX).contains(&value) {
        Ok(value as u8)
    } else {
        Err(LinkError::FlowOutOfRange {
            row,
            target: target.to_string(),
            field,
            value,
        })
    }
}

impl BacklinkAggregate {
    /// Validates one raw record (`row` is used in error messages only).
    pub fn from_record(row: usize, rec: &RawLinkRecord) -> Result<Self, LinkError> {
        let raw = rec.target_url.trim();
        if raw.is_empty() {
            return Err(LinkError::EmptyTarget {
                row,
                target: rec.target_url.clone(),
            });
        }
        let target = CanonicalUrl::parse(raw).map_err(|_| LinkError::BadTarget {
            row,
            target: raw.to_string(),
        })?;
        let citation_flow = check_flow(row, raw, "citation_flow", rec.citation_flow)?;
        let trust_flow = check_flow(row, raw, "trust_flow", rec.trust_flow)?;
        if rec.mentioning_websites > rec.mentioning_webpages {
            return Err(LinkError::WebsitesExceedPages {
                row,
                target: raw.to_string(),
                websites: rec.mentioning_websites,
                webpages: rec.mentioning_webpages,
            });
        }
        Ok(BacklinkAggregate {
            target,
            mentioning_webpages: rec.mentioning_webpages,
            mentioning_websites: rec.mentioning_websites,
            websites_is_upper_bound: false,
            citation_flow,
            trust_flow,
            window_start: rec.window_start,
            window_end: rec.window_end,
            sources: vec![LinkSource {
                target_url: raw.to_string(),
                mentioning_webpages: rec.mentioning_webpages,
                mentioning_websites: rec.mentioning_websites,
                citation_flow,
                trust_flow,
            }],
        })
    }

    fn absorb(&mut self, other: BacklinkAggregate) {
        self.mentioning_webpages += other.mentioning_webpages;
        self.mentioning_websites += other.mentioning_websites;
        self.citation_flow = self.citation_flow.max(other.citation_flow);
        self.trust_flow = self.trust_flow.max(other.trust_flow);
        self.window_start = min_opt(self.window_start, other.window_start);
        self.window_end = self.window_end.max(other.window_end);
        self.sources.extend(other.sources);
        self.sources.sort();
        self.websites_is_upper_bound = self.sources.len() > 1;
    }
}

fn min_opt(a: Option<NaiveDate>, b: Option<NaiveDate>) -> Option<NaiveDate> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Groups records by canonical target. Webpage and website counts are
/// summed, flow metrics take the maximum.
pub fn merge_protocol_variants(records: &[RawLinkRecord]) -> Result<Vec<BacklinkAggregate>, LinkError> {
    let aggs = records
        .iter()
        .enumerate()
        .map(|(i, r)| BacklinkAggregate::from_record(i + 1, r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(remerge(aggs))
}

/// Merges aggregates that share a target. Aggregates with distinct
/// targets pass through unchanged; output is ordered by target.
pub fn remerge(aggregates: impl IntoIterator<Item = BacklinkAggregate>) -> Vec<BacklinkAggregate> {
    let mut by_target: BTreeMap<CanonicalUrl, BacklinkAggregate> = BTreeMap::new();
    for a in aggregates {
        match by_target.get_mut(&a.target) {
            Some(existing) => existing.absorb(a),
            None => {
                by_target.insert(a.target.clone(), a);
            }
        }
    }
    by_target.into_values().collect()
}

pub fn read_link_csv<R: Read>(reader: R) -> Result<Vec<RawLinkRecord>, LinkError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.deserialize::<RawLinkRecord>() {
        let rec = rec.map_err(|e| LinkError::Csv {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn read_link_csv_path(path: &Path) -> Result<Vec<RawLinkRecord>, crate::Error> {
    let file = std::fs::File::open(path).map_err(|e| crate::Error::io(path, e))?;
    read_link_csv(file).map_err(|e| crate::Error::invalid(format!("{}: {e}", path.display())))
}

/// Link counts attached to one release, summed over every target that
/// resolves to it (the release page and its sub-pages).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReleaseBacklinks {
    pub release_id: ReleaseId,
    pub targets: Vec<CanonicalUrl>,
    pub mentioning_webpages: u64,
    pub mentioning_websites: u64,
    pub websites_is_upper_bound: bool,
    pub citation_flow: u8,
    pub trust_flow: u8,
    pub window_start: Option<NaiveDate>,
    pub window_end: Option<NaiveDate>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkCoverageIndex {
    pub attached: BTreeMap<ReleaseId, ReleaseBacklinks>,
    /// In the press-release fold but not a known release.
    pub outdated: Vec<CanonicalUrl>,
    /// Outside the fold.
    pub rejected: Vec<CanonicalUrl>,
}

impl LinkCoverageIndex {
    /// Releases with at least one mentioning webpage.
    pub fn is_linked(&self, id: &ReleaseId) -> bool {
        self.attached.get(id).is_some_and(|b| b.mentioning_webpages > 0)
    }
}

pub fn link_coverage_index(aggregates: &[BacklinkAggregate], index: &CorpusIndex) -> LinkCoverageIndex {
    let mut out = LinkCoverageIndex::default();
    for a in aggregates {
        if let Some(id) = index.lookup(&a.target) {
            match out.attached.get_mut(id) {
                Some(b) => {
                    b.targets.push(a.target.clone());
                    b.targets.sort();
                    b.mentioning_webpages += a.mentioning_webpages;
                    b.mentioning_websites += a.mentioning_websites;
                    b.websites_is_upper_bound = true;
                    b.citation_flow = b.citation_flow.max(a.citation_flow);
                    b.trust_flow = b.trust_flow.max(a.trust_flow);
                    b.window_start = min_opt(b.window_start, a.window_start);
                    b.window_end = b.window_end.max(a.window_end);
                }
                None => {
                    out.attached.insert(
                        id.clone(),
                        ReleaseBacklinks {
                            release_id: id.clone(),
                            targets: vec![a.target.clone()],
                            mentioning_webpages: a.mentioning_webpages,
                            mentioning_websites: a.mentioning_websites,
                            websites_is_upper_bound: a.websites_is_upper_bound,
                            citation_flow: a.citation_flow,
                            trust_flow: a.trust_flow,
                            window_start: a.window_start,
                            window_end: a.window_end,
                        },
                    );
                }
            }
        } else if index.in_fold(&a.target) {
            out.outdated.push(a.target.clone());
        } else {
            out.rejected.push(a.target.clone());
        }
    }
    out.outdated.sort();
    out.outdated.dedup();
    out.rejected.sort();
    out.rejected.dedup();
    out
}
