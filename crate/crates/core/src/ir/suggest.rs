use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::thesaurus::{OntologyGraph, Thesaurus};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suggestion {
    pub term: String,
    pub count: u64,
}

/// Prefix completion over canonical phrases and ontology labels.
#[derive(Clone, Debug, Default)]
pub struct Suggester {
    /// Sorted by count descending, then term.
    terms: Vec<(String, u64)>,
}

impl Suggester {
    pub fn new(thesaurus: &Thesaurus, ontologies: &[OntologyGraph]) -> Self {
        // Keyed by lowercase form; the first spelling seen is kept.
        let mut by_key: BTreeMap<String, (String, u64)> = BTreeMap::new();
        for (dim, phrase) in thesaurus.phrases().iter().enumerate() {
            by_key.insert(phrase.to_lowercase(), (phrase.clone(), thesaurus.count(dim as u32)));
        }
        for o in ontologies {
            for t in o.terms() {
                let key = t.label.to_lowercase();
                let count = thesaurus.lookup(&key).map_or(0, |d| thesaurus.count(d));
                let e = by_key.entry(key).or_insert_with(|| (t.label.clone(), count));
                e.1 = e.1.max(count);
            }
        }
        let mut terms: Vec<(String, u64)> = by_key.into_values().collect();
        terms.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Suggester { terms }
    }

    pub fn suggest(&self, prefix: &str, limit: usize) -> Vec<Suggestion> {
        let prefix = prefix.trim().to_lowercase();
        if prefix.is_empty() {
            return Vec::new();
        }
        self.terms
            .iter()
            .filter(|(t, _)| t.to_lowercase().starts_with(&prefix))
            .take(limit)
            .map(|(term, count)| Suggestion {
                term: term.clone(),
                count: *count,
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

pub fn suggest_terms(
    thesaurus: &Thesaurus,
    ontologies: &[OntologyGraph],
    prefix: &str,
    limit: usize,
) -> Vec<Suggestion> {
    Suggester::new(thesaurus, ontologies).suggest(prefix, limit)
}
