use std::collections::HashMap;

use crate::canon::{CanonicalUrl, ReleaseId};
use crate::release::PressRelease;

/// Canonical release URL -> release id, plus the fold the corpus was
/// harvested from.
#[derive(Debug, Clone)]
pub struct CorpusIndex {
    seed_path: CanonicalUrl,
    by_url: HashMap<CanonicalUrl, ReleaseId>,
}

impl CorpusIndex {
    pub fn new(seed_path: CanonicalUrl) -> Self {
        CorpusIndex {
            seed_path,
            by_url: HashMap::new(),
        }
    }

    pub fn from_corpus<'a>(
        seed_path: CanonicalUrl,
        corpus: impl IntoIterator<Item = &'a PressRelease>,
    ) -> Self {
        let mut index = CorpusIndex::new(seed_path);
        for r in corpus {
            index.insert(r.canonical_url.clone(), r.id.clone());
        }
        index
    }

    pub fn insert(&mut self, url: CanonicalUrl, id: ReleaseId) {
        self.by_url.insert(url, id);
    }

    pub fn seed_path(&self) -> &CanonicalUrl {
        &self.seed_path
    }

    pub fn len(&self) -> usize {
        self.by_url.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_url.is_empty()
    }

    pub fn contains_id(&self, id: &ReleaseId) -> bool {
        self.by_url.values().any(|v| v == id)
    }

    /// Exact canonical match, or else the nearest release URL that is a
    /// path ancestor of `url` (sub-pages of a release resolve to it).
    pub fn lookup(&self, url: &CanonicalUrl) -> Option<&ReleaseId> {
        if let Some(id) = self.by_url.get(url) {
            return Some(id);
        }
        url.ancestors().find_map(|a| self.by_url.get(&a))
    }

    pub fn in_fold(&self, url: &CanonicalUrl) -> bool {
        url.is_under(&self.seed_path)
    }
}
