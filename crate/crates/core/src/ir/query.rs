use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::vector::{PhraseVector, SparseVector};
use super::vectorize::match_phrases;
use crate::thesaurus::Thesaurus;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionConfig {
    /// Pre-normalization weight of hypernyms and hyponyms of query phrases.
    pub related_weight: f64,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        ExpansionConfig { related_weight: 0.4 }
    }
}

/// Canonical dimensions mentioned by the query, in order of first mention.
pub fn query_phrases(text: &str, thesaurus: &Thesaurus) -> Vec<u32> {
    let mut dims: Vec<u32> = Vec::new();
    for m in match_phrases(text, thesaurus) {
        if !dims.contains(&m.dim) {
            dims.push(m.dim);
        }
    }
    dims
}

/// Query vector: matched phrases at weight 1 (synonyms already share a
/// dimension), their direct hypernyms and hyponyms at `related_weight`,
/// then L2-normalized.
pub fn tokenize_and_expand_query(text: &str, thesaurus: &Thesaurus, config: &ExpansionConfig) -> PhraseVector {
    let base = query_phrases(text, thesaurus);
    let mut weights: BTreeMap<u32, f64> = base.iter().map(|&d| (d, 1.0)).collect();
    for &d in &base {
        for &r in thesaurus.hypernyms(d).iter().chain(thesaurus.hyponyms(d)) {
            let w = weights.entry(r).or_insert(0.0);
            if *w < config.related_weight {
                *w = config.related_weight;
            }
        }
    }
    PhraseVector {
        dims: thesaurus.len(),
        weights: SparseVector::from_pairs(weights).normalized(),
    }
}
