use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::vector::{PhraseVector, SparseVector};
use crate::text::{tokenize, Token};
use crate::thesaurus::Thesaurus;

/// A thesaurus phrase found in text, as a half-open token range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhraseMatch {
    pub dim: u32,
    pub first_token: usize,
    pub end_token: usize,
}

fn key(tokens: &[Token]) -> String {
    let mut s = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(&t.text);
    }
    s
}

pub(crate) fn longest_matches(
    tokens: &[Token],
    max_tokens: usize,
    mut lookup: impl FnMut(&str) -> Option<u32>,
) -> Vec<PhraseMatch> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let seg = tokens[i].segment;
        let span = tokens[i..]
            .iter()
            .take(max_tokens)
            .take_while(|t| t.segment == seg)
            .count();
        let found = (1..=span)
            .rev()
            .find_map(|n| lookup(&key(&tokens[i..i + n])).map(|d| (n, d)));
        match found {
            Some((n, dim)) => {
                out.push(PhraseMatch {
                    dim,
                    first_token: i,
                    end_token: i + n,
                });
                i += n;
            }
            None => i += 1,
        }
    }
    out
}

/// Greedy leftmost-longest matching of thesaurus surface forms; matches
/// never cross phrase-breaking punctuation.
pub fn match_phrases(text: &str, thesaurus: &Thesaurus) -> Vec<PhraseMatch> {
    if thesaurus.is_empty() {
        return Vec::new();
    }
    longest_matches(&tokenize(text), thesaurus.max_phrase_tokens(), |k| thesaurus.lookup(k))
}

/// Occurrences per canonical dimension; synonyms accrue to one dimension.
pub fn phrase_counts(text: &str, thesaurus: &Thesaurus) -> BTreeMap<u32, u64> {
    let mut counts = BTreeMap::new();
    for m in match_phrases(text, thesaurus) {
        *counts.entry(m.dim).or_insert(0) += 1;
    }
    counts
}

/// Smoothed inverse document frequency, `ln((1 + n) / (1 + df)) + 1`.
pub fn idf_weight(df: u64, n_docs: u64) -> f64 {
    libm::log((1.0 + n_docs as f64) / (1.0 + df as f64)) + 1.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdfTable {
    docs: u64,
    values: Vec<f64>,
}

impl IdfTable {
    pub fn from_document_frequencies(df: &[u64], n_docs: u64) -> Self {
        IdfTable {
            docs: n_docs,
            values: df.iter().map(|&d| idf_weight(d, n_docs)).collect(),
        }
    }

    /// Every dimension weighted 1.
    pub fn uniform(dims: usize) -> Self {
        IdfTable {
            docs: 0,
            values: alloc::vec![1.0; dims],
        }
    }

    pub(crate) fn from_values(docs: u64, values: Vec<f64>) -> Self {
        IdfTable { docs, values }
    }

    pub fn get(&self, dim: u32) -> f64 {
        self.values.get(dim as usize).copied().unwrap_or(1.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Corpus size the table was computed over.
    pub fn docs(&self) -> u64 {
        self.docs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub(crate) fn weigh(counts: &BTreeMap<u32, u64>, idf: &IdfTable, dims: usize) -> PhraseVector {
    let raw = SparseVector::from_pairs(counts.iter().map(|(&d, &tf)| (d, tf as f64 * idf.get(d))));
    PhraseVector {
        dims,
        weights: raw.normalized(),
    }
}

/// tf × idf over canonical dimensions, L2-normalized.
pub fn vectorize_document(text: &str, thesaurus: &Thesaurus, idf: &IdfTable) -> PhraseVector {
    weigh(&phrase_counts(text, thesaurus), idf, thesaurus.len())
}
