//! Release -> DOI -> journal couplings and journal coverage against
//! external publication counts.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::canon::ReleaseId;
use crate::fixed::Fixed;
use crate::release::{fold_name, normalize_institution, AliasTable, PressRelease};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CouplingEdge {
    pub release_id: ReleaseId,
    pub doi: String,
    pub journal: Option<String>,
}

/// Optional DOI -> journal enrichment, used for releases that carry no
/// journal metadata. Keys are lowercase DOIs.
#[derive(Debug, Clone, Default)]
pub struct DoiJournalTable {
    map: HashMap<String, String>,
}

#[derive(Deserialize)]
struct DoiJournalRow {
    doi: String,
    journal: String,
}

impl DoiJournalTable {
    pub fn new<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        DoiJournalTable {
            map: pairs
                .into_iter()
                .map(|(d, j)| (d.as_ref().trim().to_lowercase(), j.as_ref().trim().to_string()))
                .collect(),
        }
    }

    /// `doi,journal` CSV with header.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, crate::Error> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut pairs = Vec::new();
        for row in rdr.deserialize::<DoiJournalRow>() {
            let row = row?;
            pairs.push((row.doi, row.journal));
        }
        Ok(DoiJournalTable::new(pairs))
    }

    pub fn get(&self, doi: &str) -> Option<&str> {
        self.map.get(&doi.to_lowercase()).map(String::as_str)
    }
}

/// One edge per (release, distinct normalized DOI), sorted by release then
/// DOI. The journal comes from the release's first journal field, or else
/// from `doi_journals`.
pub fn build_coupling_graph<'a>(
    corpus: impl IntoIterator<Item = &'a PressRelease>,
    doi_journals: Option<&DoiJournalTable>,
) -> Vec<CouplingEdge> {
    let mut edges = BTreeSet::new();
    for r in corpus {
        let own = r
            .metadata
            .journal
            .iter()
            .map(|j| j.trim())
            .find(|j| !j.is_empty());
        for d in &r.dois {
            let journal = own.map(str::to_string).or_else(|| {
                doi_journals
                    .and_then(|t| t.get(&d.normalized))
                    .map(str::to_string)
            });
            edges.insert((r.id.clone(), d.normalized.clone(), journal));
        }
    }
    // Same (release, doi) with two journal values cannot happen: the journal
    // is a function of the release or of the doi.
    edges
        .into_iter()
        .map(|(release_id, doi, journal)| CouplingEdge {
            release_id,
            doi,
            journal,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalCount {
    pub journal: String,
    pub publications_with_doi: u64,
}

pub fn read_external_counts<R: Read>(reader: R) -> Result<Vec<ExternalCount>, crate::Error> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize::<ExternalCount>() {
        out.push(row?);
    }
    Ok(out)
}

pub fn read_external_counts_path(path: &Path) -> Result<Vec<ExternalCount>, crate::Error> {
    let file = std::fs::File::open(path).map_err(|e| crate::Error::io(path, e))?;
    read_external_counts(file)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JournalCoverage {
    pub journal: String,
    pub publications_with_doi: u64,
    pub press_release_count: u64,
    /// One decimal; `None` when there are no external publications.
    pub coverage_pct: Option<Fixed>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoverageReport {
    pub rows: Vec<JournalCoverage>,
    pub warnings: Vec<String>,
    /// Releases naming at least one journal.
    pub population: usize,
}

fn journal_key(name: &str, aliases: &AliasTable) -> String {
    fold_name(&normalize_institution(name, aliases))
}

/// Coverage per journal listed in `external`. Journal names on both sides
/// are matched after alias normalization; a release is counted at most
/// once per journal. Rows are sorted by press-release count descending,
/// then by name.
pub fn journal_coverage<'a>(
    corpus: impl IntoIterator<Item = &'a PressRelease>,
    external: &[ExternalCount],
    aliases: &AliasTable,
) -> Result<CoverageReport, crate::Error> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut population = 0;
    for r in corpus {
        let keys: HashSet<String> = r
            .metadata
            .journal
            .iter()
            .filter(|j| !j.trim().is_empty())
            .map(|j| journal_key(j, aliases))
            .collect();
        if !keys.is_empty() {
            population += 1;
        }
        for k in keys {
            *counts.entry(k).or_default() += 1;
        }
    }

    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for e in external {
        let key = journal_key(&e.journal, aliases);
        if !seen.insert(key.clone()) {
            return Err(crate::Error::invalid(format!(
                "journal {:?} listed twice in external counts",
                e.journal
            )));
        }
        let press_release_count = counts.get(&key).copied().unwrap_or(0);
        let coverage_pct = Fixed::percent(press_release_count, e.publications_with_doi, 1);
        if coverage_pct.is_none() && press_release_count > 0 {
            let msg = format!(
                "journal {:?}: {press_release_count} press releases but no external publications; coverage undefined",
                e.journal
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
        rows.push(JournalCoverage {
            journal: e.journal.trim().to_string(),
            publications_with_doi: e.publications_with_doi,
            press_release_count,
            coverage_pct,
        });
    }
    rows.sort_by(|a, b| {
        b.press_release_count
            .cmp(&a.press_release_count)
            .then_with(|| a.journal.cmp(&b.journal))
    });
    Ok(CoverageReport {
        rows,
        warnings,
        population,
    })
}
