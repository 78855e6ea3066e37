use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::phrases::PhraseStats;

#[derive(Clone, Debug, PartialEq)]
pub struct SynonymPair {
    /// Lexicographically smaller phrase.
    pub a: String,
    pub b: String,
    pub similarity: f64,
}

/// Cosine of two context vectors sorted by key.
pub fn context_cosine(x: &[(String, f64)], y: &[(String, f64)]) -> f64 {
    let (mut i, mut j, mut dot) = (0, 0, 0.0);
    while i < x.len() && j < y.len() {
        match x[i].0.cmp(&y[j].0) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                dot += x[i].1 * y[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    let nx = libm::sqrt(x.iter().map(|(_, v)| v * v).sum());
    let ny = libm::sqrt(y.iter().map(|(_, v)| v * v).sum());
    if nx == 0.0 || ny == 0.0 {
        0.0
    } else {
        (dot / (nx * ny)).min(1.0)
    }
}

/// All unordered phrase pairs whose context cosine reaches `tau`, ordered
/// by `(a, b)`.
pub fn synonym_candidates(stats: &[PhraseStats], tau: f64) -> Vec<SynonymPair> {
    // Only pairs sharing a context word can have non-zero cosine.
    let mut by_word: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, s) in stats.iter().enumerate() {
        for (w, _) in &s.context {
            by_word.entry(w.as_str()).or_default().push(i);
        }
    }
    let mut partners: Vec<Vec<usize>> = (0..stats.len()).map(|_| Vec::new()).collect();
    for list in by_word.values() {
        for (k, &i) in list.iter().enumerate() {
            partners[i].extend(list[k + 1..].iter().copied().filter(|&j| j != i));
        }
    }
    let mut out = Vec::new();
    for (i, ps) in partners.iter_mut().enumerate() {
        ps.sort_unstable();
        ps.dedup();
        for &j in ps.iter() {
            let sim = context_cosine(&stats[i].context, &stats[j].context);
            if sim >= tau {
                let (a, b) = if stats[i].phrase <= stats[j].phrase {
                    (i, j)
                } else {
                    (j, i)
                };
                out.push(SynonymPair {
                    a: stats[a].phrase.clone(),
                    b: stats[b].phrase.clone(),
                    similarity: sim,
                });
            }
        }
    }
    out.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    out.dedup_by(|x, y| x.a == y.a && x.b == y.b);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::Stopwords;
    use crate::thesaurus::{extract_phrases, PhraseConfig};
    use alloc::format;
    use alloc::vec;

    fn stat(p: &str, ctx: &[(&str, f64)]) -> PhraseStats {
        PhraseStats {
            phrase: p.into(),
            count: 1,
            context: ctx.iter().map(|(w, v)| (String::from(*w), *v)).collect(),
        }
    }

    #[test]
    fn self_pairs_never_emitted() {
        let s = vec![stat("x", &[("c", 1.0)])];
        assert!(synonym_candidates(&s, 0.0).is_empty());
    }

    #[test]
    fn disjoint_contexts_excluded() {
        let s = vec![stat("x", &[("c", 1.0)]), stat("y", &[("d", 1.0)])];
        assert!(synonym_candidates(&s, 0.01).is_empty());
    }

    #[test]
    fn spelling_variants_in_identical_contexts() {
        let mut corpus = vec![];
        for ctx in [
            "reads aligned genome",
            "transcript quantification pipeline",
            "library preparation protocol",
        ] {
            for variant in ["rna-seq", "rnaseq"] {
                corpus.push(format!("{ctx} {variant} {ctx}"));
            }
        }
        let cfg = PhraseConfig {
            min_count: 2,
            max_len: 1,
            window: 4,
        };
        let stats = extract_phrases(corpus.iter().map(String::as_str), &cfg, &Stopwords::english());
        let a = stats.iter().find(|s| s.phrase == "rna-seq").unwrap();
        let b = stats.iter().find(|s| s.phrase == "rnaseq").unwrap();
        // Direct cosine over the two context maps.
        let dot: f64 = a
            .context
            .iter()
            .map(|(w, v)| v * b.context.iter().find(|(x, _)| x == w).map_or(0.0, |p| p.1))
            .sum();
        let na: f64 = a.context.iter().map(|p| p.1 * p.1).sum::<f64>().sqrt();
        let nb: f64 = b.context.iter().map(|p| p.1 * p.1).sum::<f64>().sqrt();
        assert!((dot / (na * nb) - 1.0).abs() < 1e-12);
        let pairs = synonym_candidates(&stats, 0.7);
        assert!(pairs
            .iter()
            .any(|p| p.a == "rna-seq" && p.b == "rnaseq" && p.similarity > 0.999_999));
    }

    #[test]
    fn threshold_is_inclusive_and_symmetric() {
        let s = vec![stat("b", &[("c", 1.0), ("d", 1.0)]), stat("a", &[("c", 1.0)])];
        let cos = 1.0 / 2f64.sqrt();
        let pairs = synonym_candidates(&s, cos);
        assert_eq!(pairs.len(), 1);
        assert_eq!((pairs[0].a.as_str(), pairs[0].b.as_str()), ("a", "b"));
        assert!(synonym_candidates(&s, cos + 1e-9).is_empty());
    }
}
