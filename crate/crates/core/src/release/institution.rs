use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AliasError {
    #[error("alias chain: {variant:?} -> {canonical:?}, but {canonical:?} is itself a variant of {next:?}")]
    Chain {
        variant: String,
        canonical: String,
        next: String,
    },
    #[error("conflicting aliases for {variant:?}: {first:?} and {second:?}")]
    Conflict {
        variant: String,
        first: String,
        second: String,
    },
}

/// Comparison key: trimmed, whitespace-collapsed, lowercased.
pub fn fold_name(name: &str) -> String {
    name.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Variant -> canonical name mapping, looked up on folded keys. Canonical
/// values are returned as written in the table.
#[derive(Debug, Clone, Default)]
pub struct AliasTable {
    map: HashMap<String, String>,
}

#[derive(Debug, Deserialize)]
struct AliasRow {
    variant: String,
    canonical: String,
}

impl AliasTable {
    pub fn new<I, S>(pairs: I) -> Result<Self, AliasError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut map: HashMap<String, String> = HashMap::new();
        for (variant, canonical) in pairs {
            let key = fold_name(variant.as_ref());
            let canonical = canonical
                .as_ref()
                .split_whitespace()
                .collect::<Vec<_>>()
                .join(" ");
            if let Some(prev) = map.get(&key) {
                if fold_name(prev) != fold_name(&canonical) {
                    return Err(AliasError::Conflict {
                        variant: variant.as_ref().to_string(),
                        first: prev.clone(),
                        second: canonical,
                    });
                }
            }
            map.insert(key, canonical);
        }
        for (variant, canonical) in &map {
            let canon_key = fold_name(canonical);
            if let Some(next) = map.get(&canon_key) {
                if fold_name(next) != canon_key {
                    return Err(AliasError::Chain {
                        variant: variant.clone(),
                        canonical: canonical.clone(),
                        next: next.clone(),
                    });
                }
            }
        }
        // a canonical name written out in full is its own alias
        let canonicals: Vec<String> = map.values().cloned().collect();
        for canonical in canonicals {
            map.entry(fold_name(&canonical)).or_insert(canonical);
        }
        Ok(AliasTable { map })
    }

    /// `variant,canonical` CSV with header.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self, crate::Error> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut pairs = Vec::new();
        for row in rdr.deserialize::<AliasRow>() {
            let row = row?;
            pairs.push((row.variant, row.canonical));
        }
        Ok(AliasTable::new(pairs)?)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self, crate::Error> {
        let file = std::fs::File::open(path).map_err(|e| crate::Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.map.get(&fold_name(name)).map(String::as_str)
    }
}

/// Canonical name for `name`: the alias-table value when the folded name
/// is listed, otherwise the folded name itself.
pub fn normalize_institution(name: &str, aliases: &AliasTable) -> String {
    let folded = fold_name(name);
    match aliases.map.get(&folded) {
        Some(canonical) => canonical.clone(),
        None => folded,
    }
}
