use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rank;
use crate::release::PressRelease;

/// Distinct non-empty keywords of one release, sorted.
fn release_keywords(r: &PressRelease) -> BTreeSet<&str> {
    r.metadata
        .keywords
        .iter()
        .map(|k| k.trim())
        .filter(|k| !k.is_empty())
        .collect()
}

/// Keyword -> number of releases listing it, ranked.
pub fn keyword_frequency(corpus: &[PressRelease]) -> Vec<(String, u64)> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for r in corpus {
        for k in release_keywords(r) {
            *counts.entry(k.to_string()).or_default() += 1;
        }
    }
    rank(counts.into_iter().collect())
}

/// Keyword co-occurrence network. Edge keys are ordered pairs `(a, b)`
/// with `a < b`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoGraph {
    pub nodes: BTreeMap<String, u64>,
    pub edges: BTreeMap<(String, String), u64>,
    pub link_strength: BTreeMap<String, u64>,
}

impl CoGraph {
    pub fn weight(&self, a: &str, b: &str) -> u64 {
        let key = if a < b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        self.edges.get(&key).copied().unwrap_or(0)
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Keywords ranked by link strength, ties by name.
    pub fn by_link_strength(&self) -> Vec<(String, u64)> {
        rank(self.link_strength.iter().map(|(k, v)| (k.clone(), *v)).collect())
    }

    /// Network JSON with integer ids assigned in label order from 1.
    pub fn export(&self) -> GraphExport {
        let ids: HashMap<&str, u32> = self
            .nodes
            .keys()
            .enumerate()
            .map(|(i, k)| (k.as_str(), i as u32 + 1))
            .collect();
        GraphExport {
            nodes: self
                .nodes
                .iter()
                .map(|(k, &occ)| GraphNode {
                    id: ids[k.as_str()],
                    label: k.clone(),
                    occurrences: occ,
                    link_strength: self.link_strength.get(k).copied().unwrap_or(0),
                })
                .collect(),
            links: self
                .edges
                .iter()
                .map(|((a, b), &w)| GraphLink {
                    source: ids[a.as_str()],
                    target: ids[b.as_str()],
                    weight: w,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: u32,
    pub label: String,
    pub occurrences: u64,
    pub link_strength: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphLink {
    pub source: u32,
    pub target: u32,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphExport {
    pub nodes: Vec<GraphNode>,
    pub links: Vec<GraphLink>,
}

type PairCounts = HashMap<(String, String), u64>;

pub fn cooccurrence_graph(corpus: &[PressRelease]) -> CoGraph {
    let pairs: PairCounts = corpus
        .par_iter()
        .fold(PairCounts::new, |mut acc, r| {
            let kws: Vec<&str> = release_keywords(r).into_iter().collect();
            for i in 0..kws.len() {
                for j in i + 1..kws.len() {
                    *acc.entry((kws[i].to_string(), kws[j].to_string())).or_default() += 1;
                }
            }
            acc
        })
        .reduce(PairCounts::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });

    let nodes: BTreeMap<String, u64> = keyword_frequency(corpus).into_iter().collect();
    let mut link_strength: BTreeMap<String, u64> = nodes.keys().map(|k| (k.clone(), 0)).collect();
    for ((a, b), w) in &pairs {
        *link_strength.get_mut(a).expect("edge endpoint is a node") += w;
        *link_strength.get_mut(b).expect("edge endpoint is a node") += w;
    }
    CoGraph {
        nodes,
        edges: pairs.into_iter().collect(),
        link_strength,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::CanonicalUrl;
    use crate::release::{MetadataRecord, PressType, Region};
    use chrono::NaiveDate;

    fn rel(i: usize, kws: &[&str]) -> PressRelease {
        PressRelease::new(
            CanonicalUrl::parse(&format!("h.org/pr/{i}.php")).unwrap(),
            MetadataRecord {
                keywords: kws.iter().map(|s| s.to_string()).collect(),
                description: String::new(),
                date: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
                funder: String::new(),
                journal: vec![],
                press_type: PressType::Research,
                institution: String::new(),
                meeting: String::new(),
                region: Region::Unknown,
            },
            vec![],
        )
    }

    #[test]
    fn triangle() {
        let g = cooccurrence_graph(&[rel(0, &["a", "b", "c"])]);
        assert_eq!(g.edges.len(), 3);
        assert!(g.edges.values().all(|&w| w == 1));
        assert_eq!(g.link_strength["a"], 2);
    }

    #[test]
    fn single_keyword_has_no_edges() {
        let g = cooccurrence_graph(&[rel(0, &["a"])]);
        assert!(g.edges.is_empty());
        assert_eq!(g.nodes["a"], 1);
        assert_eq!(g.link_strength["a"], 0);
    }

    #[test]
    fn repeated_keyword_counts_once() {
        let corpus = [rel(0, &["x", "x", "y"]), rel(1, &["y"])];
        assert_eq!(
            keyword_frequency(&corpus),
            vec![("y".to_string(), 2), ("x".to_string(), 1)]
        );
        assert_eq!(cooccurrence_graph(&corpus).weight("y", "x"), 1);
    }

    #[test]
    fn export_ids() {
        let g = cooccurrence_graph(&[rel(0, &["b", "a"]), rel(1, &["a", "c"])]);
        let e = g.export();
        assert_eq!(e.nodes[0].label, "a");
        assert_eq!(e.nodes[0].link_strength, 2);
        assert_eq!(
            e.links[0],
            GraphLink {
                source: 1,
                target: 2,
                weight: 1
            }
        );
    }
}
