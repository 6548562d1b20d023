//! `<meta name=...>` vocabulary of the press-release metadata block.
//!
//! List-valued fields may repeat the tag or pack several values into one
//! `content` attribute separated by `;`.

pub const KEYWORDS: &str = "release.keywords";
pub const DESCRIPTION: &str = "release.description";
pub const DATE: &str = "release.date";
pub const FUNDER: &str = "release.funder";
pub const JOURNAL: &str = "release.journal";
pub const TYPE: &str = "release.type";
pub const INSTITUTION: &str = "release.institution";
pub const MEETING: &str = "release.meeting";
pub const REGION: &str = "release.region";

/// Plain `<meta name="description">`, used when the block has none.
pub const FALLBACK_DESCRIPTION: &str = "description";
