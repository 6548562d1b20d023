//! Helpers shared by the integration targets: the recorded press-room site,
//! its hand-labelled truth file and a few brute-force tallies.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use prmetrics::pipeline::{PipelineConfig, RawConfig};
use serde_json::Value;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/pressroom")
}

pub fn truth() -> Value {
    let text = fs::read_to_string(fixture_dir().join("truth.json")).expect("truth.json");
    serde_json::from_str(&text).expect("truth.json parses")
}

/// Fixture-mode config writing into `work/corpus` and `work/reports`.
pub fn fixture_config(work: &Path) -> PipelineConfig {
    let dir = fixture_dir();
    let mut raw = RawConfig::load(&dir.join("pipeline.conf")).expect("pipeline.conf");
    raw.set("fixtures", dir.to_string_lossy()).unwrap();
    raw.set("corpus_dir", work.join("corpus").to_string_lossy())
        .unwrap();
    raw.set("report_dir", work.join("reports").to_string_lossy())
        .unwrap();
    PipelineConfig::from_raw(&raw).expect("fixture config")
}

/// Data rows of a CSV file (header dropped).
pub fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    rdr.records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

/// Every regular file under `root`, keyed by relative path.
pub fn tree_bytes(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .replace('\\', "/");
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

/// Round-half-up percentage with integer arithmetic, formatted with
/// exactly `places` decimals.
pub fn pct_oracle(part: u64, whole: u64, places: u32) -> String {
    ratio_oracle(part * 100, whole, places)
}

pub fn ratio_oracle(num: u64, den: u64, places: u32) -> String {
    let scale = 10u128.pow(places);
    let scaled = num as u128 * scale;
    let mut q = scaled / den as u128;
    if 2 * (scaled % den as u128) >= den as u128 {
        q += 1;
    }
    if places == 0 {
        return q.to_string();
    }
    format!("{}.{:0width$}", q / scale, q % scale, width = places as usize)
}

/// Count-descending, then name-ascending.
pub fn ranked<K: Ord + Clone>(counts: &BTreeMap<K, u64>) -> Vec<(K, u64)> {
    let mut v: Vec<(K, u64)> = counts.iter().map(|(k, c)| (k.clone(), *c)).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v
}

/// Pair counter over keyword sets: every unordered pair of distinct
/// keywords in one release adds one.
pub fn brute_pairs<'a>(
    sets: impl IntoIterator<Item = &'a BTreeSet<String>>,
) -> BTreeMap<(String, String), u64> {
    let mut edges = BTreeMap::new();
    for set in sets {
        let kws: Vec<&String> = set.iter().collect();
        for i in 0..kws.len() {
            for j in 0..kws.len() {
                if kws[i] < kws[j] {
                    *edges.entry((kws[i].clone(), kws[j].clone())).or_insert(0) += 1;
                }
            }
        }
    }
    edges
}

pub fn str_set(v: &Value) -> BTreeSet<String> {
    v.as_array()
        .map(|a| a.iter().map(|x| x.as_str().unwrap().to_string()).collect())
        .unwrap_or_default()
}
