use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use once_cell::sync::Lazy;
use scraper::{Html, Selector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::markup;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing required field `{0}`")]
    MissingField(&'static str),
    #[error("unrecognized press type {0:?}")]
    UnknownType(String),
    #[error("unparseable date {0:?}")]
    BadDate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PressType {
    Research,
    Business,
    Grant,
    Award,
    Meeting,
    Book,
    Media,
    Pubmeeting,
    Dissertation,
    Editorial,
}

impl PressType {
    pub const ALL: [PressType; 10] = [
        PressType::Research,
        PressType::Business,
        PressType::Grant,
        PressType::Award,
        PressType::Meeting,
        PressType::Book,
        PressType::Media,
        PressType::Pubmeeting,
        PressType::Dissertation,
        PressType::Editorial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PressType::Research => "Research",
            PressType::Business => "Business",
            PressType::Grant => "Grant",
            PressType::Award => "Award",
            PressType::Meeting => "Meeting",
            PressType::Book => "Book",
            PressType::Media => "Media",
            PressType::Pubmeeting => "Pubmeeting",
            PressType::Dissertation => "Dissertation",
            PressType::Editorial => "Editorial",
        }
    }
}

impl fmt::Display for PressType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PressType {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let folded = s.trim();
        PressType::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(folded))
            .ok_or_else(|| ParseError::UnknownType(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub enum Region {
    #[serde(rename = "North America")]
    NorthAmerica,
    Europe,
    Asia,
    Oceania,
    Africa,
    #[serde(rename = "South America")]
    SouthAmerica,
    #[default]
    #[serde(rename = "unknown")]
    Unknown,
}

impl Region {
    pub const KNOWN: [Region; 6] = [
        Region::NorthAmerica,
        Region::Europe,
        Region::Asia,
        Region::Oceania,
        Region::Africa,
        Region::SouthAmerica,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Region::NorthAmerica => "North America",
            Region::Europe => "Europe",
            Region::Asia => "Asia",
            Region::Oceania => "Oceania",
            Region::Africa => "Africa",
            Region::SouthAmerica => "South America",
            Region::Unknown => "unknown",
        }
    }

    /// Lenient, case-insensitive; anything unrecognized is `Unknown`.
    pub fn parse_lenient(s: &str) -> Region {
        let folded: String = s
            .trim()
            .chars()
            .map(|c| {
                if c == '_' || c == '-' {
                    ' '
                } else {
                    c.to_ascii_lowercase()
                }
            })
            .collect();
        let folded = folded.split_whitespace().collect::<Vec<_>>().join(" ");
        Region::KNOWN
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(&folded))
            .unwrap_or(Region::Unknown)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetadataRecord {
    pub keywords: Vec<String>,
    pub description: String,
    pub date: NaiveDate,
    pub funder: String,
    pub journal: Vec<String>,
    #[serde(rename = "type")]
    pub press_type: PressType,
    pub institution: String,
    pub meeting: String,
    pub region: Region,
}

static META: Lazy<Selector> = Lazy::new(|| Selector::parse("meta[name]").unwrap());

const DATE_FORMATS: [&str; 5] = ["%Y-%m-%d", "%Y/%m/%d", "%d-%b-%Y", "%B %d, %Y", "%d %B %Y"];

pub fn parse_date(raw: &str) -> Result<NaiveDate, ParseError> {
    let s = raw.trim();
    // tolerate a trailing time component: 2020-03-05T12:00:00Z
    let date_part = s.split(['T', ' ']).next().unwrap_or(s);
    DATE_FORMATS
        .iter()
        .find_map(|f| NaiveDate::parse_from_str(date_part, f).ok())
        .or_else(|| {
            DATE_FORMATS
                .iter()
                .find_map(|f| NaiveDate::parse_from_str(s, f).ok())
        })
        .ok_or_else(|| ParseError::BadDate(raw.to_string()))
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn split_list(values: &[String]) -> Vec<String> {
    values
        .iter()
        .flat_map(|v| v.split(';'))
        .map(collapse_ws)
        .filter(|v| !v.is_empty())
        .collect()
}

/// Reads the nine metadata fields. Keywords are case-folded and kept in
/// document order (repeats included); the press type is matched
/// case-insensitively.
pub fn extract_metadata(body: &[u8]) -> Result<MetadataRecord, ParseError> {
    let text = String::from_utf8_lossy(body);
    let doc = Html::parse_document(&text);

    let mut keywords = Vec::new();
    let mut journals = Vec::new();
    let (mut description, mut fallback_description) = (None, None);
    let (mut date, mut funder, mut press_type) = (None, None, None);
    let (mut institution, mut meeting, mut region) = (None, None, None);

    for meta in doc.select(&META) {
        let name = meta
            .value()
            .attr("name")
            .unwrap_or_default()
            .trim()
            .to_ascii_lowercase();
        let Some(content) = meta.value().attr("content") else {
            continue;
        };
        let content = content.to_string();
        let slot = match name.as_str() {
            markup::KEYWORDS => {
                keywords.push(content);
                continue;
            }
            markup::JOURNAL => {
                journals.push(content);
                continue;
            }
            markup::DESCRIPTION => &mut description,
            markup::FALLBACK_DESCRIPTION => &mut fallback_description,
            markup::DATE => &mut date,
            markup::FUNDER => &mut funder,
            markup::TYPE => &mut press_type,
            markup::INSTITUTION => &mut institution,
            markup::MEETING => &mut meeting,
            markup::REGION => &mut region,
            _ => continue,
        };
        if slot.is_none() {
            *slot = Some(content);
        }
    }

    let non_empty = |v: Option<String>| v.map(|s| collapse_ws(&s)).filter(|s| !s.is_empty());
    let date = non_empty(date).ok_or(ParseError::MissingField("date"))?;
    let press_type = non_empty(press_type).ok_or(ParseError::MissingField("type"))?;

    Ok(MetadataRecord {
        keywords: split_list(&keywords)
            .into_iter()
            .map(|k| k.to_lowercase())
            .collect(),
        description: non_empty(description)
            .or_else(|| non_empty(fallback_description))
            .unwrap_or_default(),
        date: parse_date(&date)?,
        funder: non_empty(funder).unwrap_or_default(),
        journal: split_list(&journals),
        press_type: press_type.parse()?,
        institution: non_empty(institution).unwrap_or_default(),
        meeting: non_empty(meeting).unwrap_or_default(),
        region: non_empty(region)
            .map(|r| Region::parse_lenient(&r))
            .unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn page(extra: &str) -> String {
        format!(
            r#"<html><head>
            <meta name="release.date" content="2020-03-05">
            {extra}
            </head><body><p>Text</p></body></html>"#
        )
    }

    #[test]
    fn full_block_verbatim() {
        let body = page(
            r#"<meta name="release.type" content="Research">
            <meta name="release.region" content="Europe">
            <meta name="release.keywords" content="Biology">
            <meta name="release.keywords" content="Cell biology; Genetics">
            <meta name="release.description" content="New  cell   findings">
            <meta name="release.funder" content="ERC">
            <meta name="release.journal" content="Nature">
            <meta name="release.institution" content="University of X">
            <meta name="release.meeting" content="ASCB 2020">"#,
        );
        let md = extract_metadata(body.as_bytes()).unwrap();
        assert_eq!(md.press_type, PressType::Research);
        assert_eq!(md.region, Region::Europe);
        assert_eq!(md.keywords, vec!["biology", "cell biology", "genetics"]);
        assert_eq!(md.description, "New cell findings");
        assert_eq!(md.date, NaiveDate::from_ymd_opt(2020, 3, 5).unwrap());
        assert_eq!(md.funder, "ERC");
        assert_eq!(md.journal, vec!["Nature"]);
        assert_eq!(md.institution, "University of X");
        assert_eq!(md.meeting, "ASCB 2020");
    }

    #[test]
    fn optional_fields_absent() {
        let md = extract_metadata(page(r#"<meta name="release.type" content="Grant">"#).as_bytes()).unwrap();
        assert!(md.funder.is_empty());
        assert!(md.meeting.is_empty());
        assert!(md.journal.is_empty());
        assert!(md.keywords.is_empty());
        assert_eq!(md.region, Region::Unknown);
    }

    #[test]
    fn type_is_case_folded() {
        let md =
            extract_metadata(page(r#"<meta name="release.type" content="RESEARCH">"#).as_bytes()).unwrap();
        assert_eq!(md.press_type, PressType::Research);
    }

    #[test]
    fn missing_required_fields() {
        assert_eq!(
            extract_metadata(page("").as_bytes()).unwrap_err(),
            ParseError::MissingField("type")
        );
        let no_date = r#"<meta name="release.type" content="Book">"#;
        assert_eq!(
            extract_metadata(no_date.as_bytes()).unwrap_err(),
            ParseError::MissingField("date")
        );
        let unknown = page(r#"<meta name="release.type" content="Rumour">"#);
        assert!(matches!(
            extract_metadata(unknown.as_bytes()),
            Err(ParseError::UnknownType(_))
        ));
    }

    #[test]
    fn empty_keywords_are_dropped() {
        let body = page(
            r#"<meta name="release.type" content="Award"><meta name="release.keywords" content=" ; Cancer ;;">"#,
        );
        assert_eq!(
            extract_metadata(body.as_bytes()).unwrap().keywords,
            vec!["cancer"]
        );
    }

    #[test]
    fn date_formats() {
        let d = NaiveDate::from_ymd_opt(2016, 10, 3).unwrap();
        for raw in [
            "2016-10-03",
            "2016/10/03",
            "3-Oct-2016",
            "October 3, 2016",
            "2016-10-03T09:00:00Z",
        ] {
            assert_eq!(parse_date(raw).unwrap(), d, "{raw}");
        }
        assert!(parse_date("someday").is_err());
    }

    #[test]
    fn press_type_is_closed_set_of_ten() {
        assert_eq!(PressType::ALL.len(), 10);
        for t in PressType::ALL {
            assert_eq!(t.name().to_lowercase().parse::<PressType>().unwrap(), t);
        }
    }

    #[test]
    fn region_lenient() {
        assert_eq!(Region::parse_lenient("north_america"), Region::NorthAmerica);
        assert_eq!(Region::parse_lenient("SOUTH  AMERICA"), Region::SouthAmerica);
        assert_eq!(Region::parse_lenient("Atlantis"), Region::Unknown);
    }
}
