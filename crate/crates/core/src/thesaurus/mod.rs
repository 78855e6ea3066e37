//! Corpus-derived thesaurus: canonical phrases (the vector dimensions),
//! synonym sets and hyponym→hypernym edges.

mod build;
mod ontology;
mod phrases;
mod snapshot;
mod synonyms;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use sha2::{Digest, Sha256};

pub use build::{build_thesaurus, enrich_from_ontology, Enriched, ThesaurusConfig};
pub use ontology::{load_ontology, OntologyError, OntologyGraph, OntologyTerm};
pub use phrases::{extract_phrases, PhraseConfig, PhraseStats};
pub use snapshot::SnapshotError;
pub use synonyms::{context_cosine, synonym_candidates, SynonymPair};

use crate::disjoint::DisjointSets;
use crate::text::normalize_phrase;

/// Immutable thesaurus. Dimension `i` is `phrases()[i]`, the
/// lexicographically least member of its synonym set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thesaurus {
    surfaces: BTreeMap<String, u64>,
    corpus_pairs: BTreeSet<(String, String)>,
    ontology_pairs: BTreeSet<(String, String)>,
    surface_edges: BTreeSet<(String, String)>,

    phrases: Vec<String>,
    counts: Vec<u64>,
    members: Vec<Vec<String>>,
    surface_map: BTreeMap<String, u32>,
    hyper_edges: BTreeSet<(u32, u32)>,
    hypernyms: Vec<Vec<u32>>,
    hyponyms: Vec<Vec<u32>>,
    max_tokens: usize,
    dropped_edges: Vec<(String, String)>,
    version_hash: String,
}

/// Accumulates raw surfaces and relations; [`ThesaurusBuilder::build`]
/// derives the canonical view.
#[derive(Clone, Debug, Default)]
pub struct ThesaurusBuilder {
    surfaces: BTreeMap<String, u64>,
    corpus_pairs: BTreeSet<(String, String)>,
    ontology_pairs: BTreeSet<(String, String)>,
    surface_edges: BTreeSet<(String, String)>,
}

fn ordered(a: String, b: String) -> (String, String) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl ThesaurusBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn surface(&mut self, phrase: &str) -> Option<String> {
        let key = normalize_phrase(phrase);
        if key.is_empty() {
            return None;
        }
        self.surfaces.entry(key.clone()).or_insert(0);
        Some(key)
    }

    /// Adds `count` corpus occurrences of `phrase`.
    pub fn phrase(mut self, phrase: &str, count: u64) -> Self {
        if let Some(k) = self.surface(phrase) {
            *self.surfaces.get_mut(&k).unwrap() += count;
        }
        self
    }

    /// Distributional synonym evidence from the corpus.
    pub fn corpus_synonyms(mut self, a: &str, b: &str) -> Self {
        if let (Some(a), Some(b)) = (self.surface(a), self.surface(b)) {
            if a != b {
                self.corpus_pairs.insert(ordered(a, b));
            }
        }
        self
    }

    /// Curated synonymy, e.g. from an ontology.
    pub fn synonyms(mut self, a: &str, b: &str) -> Self {
        if let (Some(a), Some(b)) = (self.surface(a), self.surface(b)) {
            if a != b {
                self.ontology_pairs.insert(ordered(a, b));
            }
        }
        self
    }

    pub fn hypernym(mut self, hyponym: &str, hypernym: &str) -> Self {
        if let (Some(a), Some(b)) = (self.surface(hyponym), self.surface(hypernym)) {
            self.surface_edges.insert((a, b));
        }
        self
    }

    pub fn build(self) -> Thesaurus {
        Thesaurus::derive(
            self.surfaces,
            self.corpus_pairs,
            self.ontology_pairs,
            self.surface_edges,
        )
    }
}

impl Thesaurus {
    pub fn builder() -> ThesaurusBuilder {
        ThesaurusBuilder::new()
    }

    pub fn empty() -> Self {
        ThesaurusBuilder::new().build()
    }

    pub(crate) fn into_builder(self) -> ThesaurusBuilder {
        ThesaurusBuilder {
            surfaces: self.surfaces,
            corpus_pairs: self.corpus_pairs,
            ontology_pairs: self.ontology_pairs,
            surface_edges: self.surface_edges,
        }
    }

    fn derive(
        surfaces: BTreeMap<String, u64>,
        corpus_pairs: BTreeSet<(String, String)>,
        ontology_pairs: BTreeSet<(String, String)>,
        surface_edges: BTreeSet<(String, String)>,
    ) -> Self {
        let names: Vec<&String> = surfaces.keys().collect();
        let index_of = |s: &str| names.binary_search_by(|n| n.as_str().cmp(s)).ok();
        let mut sets = DisjointSets::new(names.len());
        for (a, b) in corpus_pairs.iter().chain(&ontology_pairs) {
            if let (Some(i), Some(j)) = (index_of(a), index_of(b)) {
                sets.union(i, j);
            }
        }
        // Surfaces are sorted, so each group's first member is its least
        // element and groups come out ordered by canonical phrase.
        let groups = sets.groups();
        let mut phrases = Vec::with_capacity(groups.len());
        let mut counts = Vec::with_capacity(groups.len());
        let mut members = Vec::with_capacity(groups.len());
        let mut surface_map = BTreeMap::new();
        let mut max_tokens = 0;
        for (dim, group) in groups.iter().enumerate() {
            let set: Vec<String> = group.iter().map(|&i| names[i].clone()).collect();
            for s in &set {
                surface_map.insert(s.clone(), dim as u32);
                max_tokens = max_tokens.max(s.split(' ').count());
            }
            phrases.push(set[0].clone());
            counts.push(set.iter().map(|s| surfaces[s]).sum());
            members.push(set);
        }

        let n = phrases.len();
        let mut hypernyms: Vec<Vec<u32>> = (0..n).map(|_| Vec::new()).collect();
        let mut hyper_edges = BTreeSet::new();
        let mut dropped_edges = Vec::new();
        for (hypo, hyper) in &surface_edges {
            let (Some(&a), Some(&b)) = (surface_map.get(hypo), surface_map.get(hyper)) else {
                continue;
            };
            if a == b || hyper_edges.contains(&(a, b)) {
                continue;
            }
            if reaches(&hypernyms, b, a) {
                dropped_edges.push((hypo.clone(), hyper.clone()));
                continue;
            }
            hyper_edges.insert((a, b));
            hypernyms[a as usize].push(b);
        }
        let mut hyponyms: Vec<Vec<u32>> = (0..n).map(|_| Vec::new()).collect();
        for list in hypernyms.iter_mut() {
            list.sort_unstable();
        }
        for &(a, b) in &hyper_edges {
            hyponyms[b as usize].push(a);
        }

        let mut t = Thesaurus {
            surfaces,
            corpus_pairs,
            ontology_pairs,
            surface_edges,
            phrases,
            counts,
            members,
            surface_map,
            hyper_edges,
            hypernyms,
            hyponyms,
            max_tokens,
            dropped_edges,
            version_hash: String::new(),
        };
        t.version_hash = hex_digest(snapshot::body(&t).as_bytes());
        t
    }

    /// Number of dimensions.
    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn phrases(&self) -> &[String] {
        &self.phrases
    }

    pub fn phrase(&self, dim: u32) -> &str {
        &self.phrases[dim as usize]
    }

    /// Summed corpus count over the synonym set.
    pub fn count(&self, dim: u32) -> u64 {
        self.counts[dim as usize]
    }

    /// Every surface form folded onto `dim`, sorted.
    pub fn synonyms(&self, dim: u32) -> &[String] {
        &self.members[dim as usize]
    }

    pub fn lookup(&self, surface: &str) -> Option<u32> {
        self.surface_map.get(surface).copied()
    }

    pub fn surface_map(&self) -> &BTreeMap<String, u32> {
        &self.surface_map
    }

    /// Longest surface form, in tokens.
    pub fn max_phrase_tokens(&self) -> usize {
        self.max_tokens
    }

    pub fn hyper_edges(&self) -> &BTreeSet<(u32, u32)> {
        &self.hyper_edges
    }

    pub fn hypernyms(&self, dim: u32) -> &[u32] {
        &self.hypernyms[dim as usize]
    }

    pub fn hyponyms(&self, dim: u32) -> &[u32] {
        &self.hyponyms[dim as usize]
    }

    /// Raw corpus synonym evidence still in force.
    pub fn corpus_pairs(&self) -> &BTreeSet<(String, String)> {
        &self.corpus_pairs
    }

    /// Hypernym edges discarded because they would close a cycle.
    pub fn dropped_edges(&self) -> &[(String, String)] {
        &self.dropped_edges
    }

    pub fn version_hash(&self) -> &str {
        &self.version_hash
    }
}

fn reaches(hypernyms: &[Vec<u32>], from: u32, to: u32) -> bool {
    let mut seen = BTreeSet::new();
    let mut stack = alloc::vec![from];
    while let Some(x) = stack.pop() {
        if x == to {
            return true;
        }
        if seen.insert(x) {
            stack.extend(hypernyms[x as usize].iter().copied());
        }
    }
    false
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    use core::fmt::Write;
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(s, "{b:02x}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_is_least_member_and_surfaces_fold() {
        let t = Thesaurus::builder()
            .phrase("RNA-seq", 4)
            .phrase("rnaseq", 2)
            .phrase("gene", 9)
            .corpus_synonyms("rnaseq", "rna-seq")
            .synonyms("rna-seq", "RNA sequencing")
            .build();
        assert_eq!(t.phrases(), ["gene", "rna sequencing"]);
        let d = t.lookup("rnaseq").unwrap();
        assert_eq!(t.lookup("rna-seq"), Some(d));
        assert_eq!(t.phrase(d), "rna sequencing");
        assert_eq!(t.count(d), 6);
        assert_eq!(t.synonyms(d), ["rna sequencing", "rna-seq", "rnaseq"]);
        assert_eq!(t.max_phrase_tokens(), 2);
    }

    #[test]
    fn cyclic_edges_dropped() {
        let t = Thesaurus::builder()
            .hypernym("a", "b")
            .hypernym("b", "c")
            .hypernym("c", "a")
            .build();
        assert_eq!(t.hyper_edges().len(), 2);
        assert_eq!(t.dropped_edges(), [("c".into(), "a".into())]);
    }

    #[test]
    fn edges_collapsing_into_one_set_vanish() {
        let t = Thesaurus::builder().synonyms("a", "b").hypernym("a", "b").build();
        assert!(t.hyper_edges().is_empty());
    }

    #[test]
    fn hash_depends_on_content() {
        let a = Thesaurus::builder().phrase("x", 1).build();
        let b = Thesaurus::builder().phrase("x", 2).build();
        assert_eq!(
            a.version_hash(),
            Thesaurus::builder().phrase("x", 1).build().version_hash()
        );
        assert_ne!(a.version_hash(), b.version_hash());
        assert_eq!(a.version_hash().len(), 64);
    }
}
