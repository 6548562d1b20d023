//! Harvesting and analysis of a science press-release corpus: crawling,
//! record parsing, tweet and backlink ingestion, release/journal coupling,
//! and the descriptive tables built on top.

pub mod analytics;
pub mod backlink;
pub mod canon;
pub mod coupling;
mod error;
pub mod fixed;
pub mod harvester;
pub mod index;
pub mod mention;
pub mod pipeline;
pub mod release;

pub use canon::{CanonError, CanonicalUrl, ReleaseId};
pub use error::{Error, Result};
pub use fixed::Fixed;
pub use index::CorpusIndex;
pub use release::{MetadataRecord, PressRelease, PressType, Region};
