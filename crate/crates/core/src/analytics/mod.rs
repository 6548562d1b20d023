//! Descriptive statistics over a parsed corpus and its mentions.

mod coverage;
mod distribution;
mod keywords;
mod series;

pub use coverage::{coverage_table, mention_series, tweets_per_release, CoverageRow};
pub use distribution::{pio_ranking, region_distribution, type_distribution, Distribution, Share};
pub use keywords::{cooccurrence_graph, keyword_frequency, CoGraph, GraphExport, GraphLink, GraphNode};
pub use series::{output_series, Bucket, Granularity, Series};

/// Sorts `(name, count)` pairs by count descending, then name.
pub fn rank<K: Ord>(mut items: Vec<(K, u64)>) -> Vec<(K, u64)> {
    items.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    items
}
