use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::rank;
use crate::fixed::Fixed;
use crate::release::{normalize_institution, AliasTable, PressRelease, PressType, Region};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Share<K> {
    pub key: K,
    pub count: u64,
    pub pct: Fixed,
}

/// Counts and one-decimal shares over a restricted population, sorted by
/// count descending, then by the key's label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution<K> {
    pub rows: Vec<Share<K>>,
    pub population: u64,
}

impl<K: Ord + Clone + fmt::Display> Distribution<K> {
    pub fn from_counts(counts: BTreeMap<K, u64>) -> Self {
        let population: u64 = counts.values().sum();
        let mut ranked: Vec<(K, u64)> = counts.into_iter().collect();
        ranked.sort_by_cached_key(|(k, n)| (Reverse(*n), k.to_string()));
        let rows = ranked
            .into_iter()
            .map(|(key, count)| Share {
                key,
                count,
                pct: Fixed::percent(count, population, 1).unwrap_or(Fixed::zero(1)),
            })
            .collect();
        Distribution { rows, population }
    }

    pub fn get(&self, key: &K) -> Option<&Share<K>> {
        self.rows.iter().find(|s| &s.key == key)
    }
}

/// Every parsed release has a type, so the population is the whole corpus
/// (date-anomalous releases included).
pub fn type_distribution<'a>(corpus: impl IntoIterator<Item = &'a PressRelease>) -> Distribution<PressType> {
    let mut counts = BTreeMap::new();
    for r in corpus {
        *counts.entry(r.metadata.press_type).or_default() += 1;
    }
    Distribution::from_counts(counts)
}

/// Restricted to releases whose region is known.
pub fn region_distribution<'a>(corpus: impl IntoIterator<Item = &'a PressRelease>) -> Distribution<Region> {
    let mut counts = BTreeMap::new();
    for r in corpus {
        if r.metadata.region != Region::Unknown {
            *counts.entry(r.metadata.region).or_default() += 1;
        }
    }
    Distribution::from_counts(counts)
}

/// Releases per normalized submitting institution. Releases without an
/// institution are skipped.
pub fn pio_ranking<'a>(
    corpus: impl IntoIterator<Item = &'a PressRelease>,
    aliases: &AliasTable,
) -> Vec<(String, u64)> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for r in corpus {
        if r.metadata.institution.trim().is_empty() {
            continue;
        }
        *counts
            .entry(normalize_institution(&r.metadata.institution, aliases))
            .or_default() += 1;
    }
    rank(counts.into_iter().collect())
}
