use once_cell::sync::Lazy;
use regex::Regex;
use scraper::{Html, Selector};
use serde::{Deserialize, Serialize};

use crate::release::markup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonContentReason {
    Sitemap,
    Form,
    ServerMessage,
    Empty,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class", content = "reason", rename_all = "snake_case")]
pub enum PageClass {
    PressReleasePage,
    NonContent(NonContentReason),
}

impl PageClass {
    pub fn is_press_release(self) -> bool {
        matches!(self, PageClass::PressReleasePage)
    }

    pub fn label(self) -> &'static str {
        match self {
            PageClass::PressReleasePage => "press_release",
            PageClass::NonContent(NonContentReason::Sitemap) => "sitemap",
            PageClass::NonContent(NonContentReason::Form) => "form",
            PageClass::NonContent(NonContentReason::ServerMessage) => "server_message",
            PageClass::NonContent(NonContentReason::Empty) => "empty",
            PageClass::NonContent(NonContentReason::Other) => "other",
        }
    }

    pub fn from_label(label: &str) -> Option<PageClass> {
        Some(match label {
            "press_release" => PageClass::PressReleasePage,
            "sitemap" => PageClass::NonContent(NonContentReason::Sitemap),
            "form" => PageClass::NonContent(NonContentReason::Form),
            "server_message" => PageClass::NonContent(NonContentReason::ServerMessage),
            "empty" => PageClass::NonContent(NonContentReason::Empty),
            "other" => PageClass::NonContent(NonContentReason::Other),
            _ => return None,
        })
    }
}

static SITEMAP_ROOT: Lazy<Regex> = Lazy::new(|| Regex::new(r"(?i)<\s*(urlset|sitemapindex)[\s>]").unwrap());
static ERROR_TEXT: Lazy<Regex> = Lazy::new(|| {
    Regex::new(
        r"(?i)\b([45]\d\d\b|not found|error|unavailable|forbidden|moved permanently|maintenance|bad gateway|internal server)",
    )
    .unwrap()
});
static META: Lazy<Selector> = Lazy::new(|| Selector::parse("meta[name]").unwrap());
static FORM: Lazy<Selector> = Lazy::new(|| Selector::parse("form").unwrap());
static HEADINGS: Lazy<Selector> = Lazy::new(|| Selector::parse("title, h1").unwrap());

/// Press-release pages are recognized by the machine-readable date and type
/// fields of the metadata block; URL shape plays no part.
pub fn classify_page(body: &[u8]) -> PageClass {
    let text = String::from_utf8_lossy(body);
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return PageClass::NonContent(NonContentReason::Empty);
    }
    let head = &trimmed[..trimmed.len().min(2048)];
    if SITEMAP_ROOT.is_match(head) {
        return PageClass::NonContent(NonContentReason::Sitemap);
    }

    let doc = Html::parse_document(trimmed);
    let (mut has_date, mut has_type) = (false, false);
    for meta in doc.select(&META) {
        let name = meta.value().attr("name").unwrap_or_default();
        let has_content = meta.value().attr("content").is_some_and(|c| !c.trim().is_empty());
        if !has_content {
            continue;
        }
        if name.eq_ignore_ascii_case(markup::DATE) {
            has_date = true;
        } else if name.eq_ignore_ascii_case(markup::TYPE) {
            has_type = true;
        }
    }
    if has_date && has_type {
        return PageClass::PressReleasePage;
    }
    if doc.select(&FORM).next().is_some() {
        return PageClass::NonContent(NonContentReason::Form);
    }
    let server_message = doc.select(&HEADINGS).any(|el| {
        let t: String = el.text().collect();
        ERROR_TEXT.is_match(&t)
    });
    if server_message {
        return PageClass::NonContent(NonContentReason::ServerMessage);
    }
    PageClass::NonContent(NonContentReason::Other)
}
