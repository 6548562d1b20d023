//! Press-release records: metadata fields, mentioned DOIs, institution
//! name normalization.

mod doi;
mod institution;
pub mod markup;
mod metadata;

use std::collections::HashSet;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::canon::{CanonicalUrl, ReleaseId};

pub use doi::{extract_dois, is_valid_doi, DoiExtraction, DoiExtractor, DoiRef, DoiRepair, DoiRewrite};
pub use institution::{fold_name, normalize_institution, AliasError, AliasTable};
pub use metadata::{extract_metadata, parse_date, MetadataRecord, ParseError, PressType, Region};

/// Releases dated before this year are kept but flagged as anomalous.
pub const PLATFORM_LAUNCH_YEAR: i32 = 1996;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "CorpusLine", from = "CorpusLine")]
pub struct PressRelease {
    pub id: ReleaseId,
    pub canonical_url: CanonicalUrl,
    pub metadata: MetadataRecord,
    pub dois: Vec<DoiRef>,
    pub date_anomaly: bool,
}

impl PressRelease {
    pub fn new(canonical_url: CanonicalUrl, metadata: MetadataRecord, dois: Vec<DoiRef>) -> Self {
        let mut seen = HashSet::new();
        let dois = dois
            .into_iter()
            .filter(|d| seen.insert(d.normalized.clone()))
            .collect();
        PressRelease {
            id: canonical_url.release_id(),
            date_anomaly: is_anomalous(metadata.date),
            canonical_url,
            metadata,
            dois,
        }
    }

    pub fn year(&self) -> i32 {
        self.metadata.date.year()
    }
}

pub fn is_anomalous(date: NaiveDate) -> bool {
    date.year() < PLATFORM_LAUNCH_YEAR
}

/// Parses a classified press-release page into a record.
pub fn parse_release(
    url: &CanonicalUrl,
    body: &[u8],
    extractor: &DoiExtractor<'_>,
) -> Result<(PressRelease, DoiExtraction), ParseError> {
    let metadata = extract_metadata(body)?;
    let extraction = extractor.extract(body, &metadata.description, &metadata.journal);
    let release = PressRelease::new(url.clone(), metadata, extraction.dois.clone());
    Ok((release, extraction))
}

/// Flat on-disk shape of one corpus line.
#[derive(Serialize, Deserialize)]
struct CorpusLine {
    id: ReleaseId,
    canonical_url: CanonicalUrl,
    date: NaiveDate,
    date_anomaly: bool,
    #[serde(rename = "type")]
    press_type: PressType,
    keywords: Vec<String>,
    description: String,
    funder: String,
    journal: Vec<String>,
    institution: String,
    meeting: String,
    region: Region,
    dois: Vec<DoiRef>,
}

impl From<PressRelease> for CorpusLine {
    fn from(r: PressRelease) -> Self {
        let m = r.metadata;
        CorpusLine {
            id: r.id,
            canonical_url: r.canonical_url,
            date: m.date,
            date_anomaly: r.date_anomaly,
            press_type: m.press_type,
            keywords: m.keywords,
            description: m.description,
            funder: m.funder,
            journal: m.journal,
            institution: m.institution,
            meeting: m.meeting,
            region: m.region,
            dois: r.dois,
        }
    }
}

impl From<CorpusLine> for PressRelease {
    fn from(l: CorpusLine) -> Self {
        PressRelease {
            id: l.id,
            canonical_url: l.canonical_url,
            date_anomaly: l.date_anomaly,
            metadata: MetadataRecord {
                keywords: l.keywords,
                description: l.description,
                date: l.date,
                funder: l.funder,
                journal: l.journal,
                press_type: l.press_type,
                institution: l.institution,
                meeting: l.meeting,
                region: l.region,
            },
            dois: l.dois,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAGE: &str = r#"<html><head>
        <meta name="release.date" content="1970-01-01">
        <meta name="release.type" content="Research">
        <meta name="release.keywords" content="Biology">
        </head><body>
        <a href="https://doi.org/10.1000/abc">1</a> and again doi:10.1000/ABC
        </body></html>"#;

    #[test]
    fn anomaly_flag_and_dedup() {
        let url = CanonicalUrl::parse("www.eurekalert.org/pub_releases/1970-01/x-y.php").unwrap();
        let (r, _) = parse_release(&url, PAGE.as_bytes(), &DoiExtractor::default()).unwrap();
        assert!(r.date_anomaly);
        assert_eq!(r.id.as_str(), "x-y");
        assert_eq!(r.dois.len(), 1);
    }

    #[test]
    fn parsing_is_deterministic() {
        let url = CanonicalUrl::parse("h.org/p/a.html").unwrap();
        let a = parse_release(&url, PAGE.as_bytes(), &DoiExtractor::default()).unwrap();
        let b = parse_release(&url, PAGE.as_bytes(), &DoiExtractor::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn corpus_line_field_names() {
        let url = CanonicalUrl::parse("h.org/p/a.html").unwrap();
        let (r, _) = parse_release(&url, PAGE.as_bytes(), &DoiExtractor::default()).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = json.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        let mut expected = vec![
            "id",
            "canonical_url",
            "date",
            "date_anomaly",
            "type",
            "keywords",
            "description",
            "funder",
            "journal",
            "institution",
            "meeting",
            "region",
            "dois",
        ];
        let mut got = keys.clone();
        got.sort();
        expected.sort();
        assert_eq!(got, expected);
        let back: PressRelease = serde_json::from_value(json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn launch_year_boundary() {
        assert!(is_anomalous(NaiveDate::from_ymd_opt(1995, 12, 31).unwrap()));
        assert!(!is_anomalous(NaiveDate::from_ymd_opt(1996, 1, 1).unwrap()));
    }
}
