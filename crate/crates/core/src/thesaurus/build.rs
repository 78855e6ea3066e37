use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::phrases::{extract_phrases, is_nested, PhraseConfig};
use super::synonyms::synonym_candidates;
use super::{OntologyGraph, Thesaurus, ThesaurusBuilder};
use crate::text::{normalize_phrase, Stopwords};

#[derive(Clone, Debug)]
pub struct ThesaurusConfig {
    pub phrases: PhraseConfig,
    /// Minimum context cosine for a synonym pair.
    pub tau: f64,
    /// Ignore candidate pairs where one phrase is a sub-phrase of the other;
    /// overlapping n-grams share most of their contexts by construction.
    pub skip_nested: bool,
    pub stopwords: Stopwords,
}

impl Default for ThesaurusConfig {
    fn default() -> Self {
        ThesaurusConfig {
            phrases: PhraseConfig::default(),
            tau: 0.7,
            skip_nested: true,
            stopwords: Stopwords::english(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Enriched {
    pub thesaurus: Thesaurus,
    pub warnings: Vec<String>,
}

/// Merges ontology knowledge into a thesaurus.
///
/// Terms with at least one name already in the thesaurus contribute all of
/// their names as synonyms, and parent links between such terms become
/// hypernym edges. A corpus synonym pair whose phrases the ontology places
/// in an ancestor/descendant relation is replaced by the corresponding edge.
pub fn enrich_from_ontology(thesaurus: &Thesaurus, ontology: &OntologyGraph) -> Enriched {
    let before: BTreeSet<(String, String)> = thesaurus.dropped_edges().iter().cloned().collect();
    let mut b: ThesaurusBuilder = thesaurus.clone().into_builder();
    let present = |id: &str| -> bool {
        ontology
            .get(id)
            .is_some_and(|t| t.names().any(|n| thesaurus.lookup(&normalize_phrase(n)).is_some()))
    };
    let label = |id: &str| normalize_phrase(&ontology.get(id).unwrap().label);

    for term in ontology.terms() {
        if !present(&term.id) {
            continue;
        }
        let lead = normalize_phrase(&term.label);
        for name in term.names() {
            b = b.synonyms(&lead, name);
        }
        b = b.phrase(&lead, 0);
        for p in &term.parents {
            if present(p) {
                b = b.hypernym(&lead, &label(p));
            }
        }
    }

    let mut demoted = Vec::new();
    for (x, y) in &b.corpus_pairs {
        let (tx, ty) = (ontology.lookup(x), ontology.lookup(y));
        let relation = tx
            .iter()
            .flat_map(|a| ty.iter().map(move |c| (a, c)))
            .find_map(|(a, c)| {
                if ontology.is_strict_ancestor(a, c) {
                    Some((y.clone(), x.clone()))
                } else if ontology.is_strict_ancestor(c, a) {
                    Some((x.clone(), y.clone()))
                } else {
                    None
                }
            });
        if let Some(edge) = relation {
            demoted.push(((x.clone(), y.clone()), edge));
        }
    }
    let mut warnings = Vec::new();
    for (pair, edge) in demoted {
        b.corpus_pairs.remove(&pair);
        warnings.push(format!(
            "corpus synonyms {:?}/{:?} demoted: ontology places {:?} under {:?}",
            pair.0, pair.1, edge.0, edge.1
        ));
        b.surface_edges.insert(edge);
    }

    let thesaurus = b.build();
    for (hypo, hyper) in thesaurus.dropped_edges() {
        if !before.contains(&(hypo.clone(), hyper.clone())) {
            warnings.push(format!("edge {hypo:?} -> {hyper:?} dropped: it would close a cycle"));
        }
    }
    Enriched { thesaurus, warnings }
}

/// Phrase extraction, synonym discovery, union-find merge, then enrichment
/// by each ontology in order.
pub fn build_thesaurus<'a, I>(corpus: I, ontologies: &[OntologyGraph], config: &ThesaurusConfig) -> Enriched
where
    I: IntoIterator<Item = &'a str>,
{
    let stats = extract_phrases(corpus, &config.phrases, &config.stopwords);
    let pairs = synonym_candidates(&stats, config.tau);
    let mut b = Thesaurus::builder();
    for s in &stats {
        b = b.phrase(&s.phrase, s.count);
    }
    for p in &pairs {
        if config.skip_nested && (is_nested(&p.a, &p.b) || is_nested(&p.b, &p.a)) {
            continue;
        }
        b = b.corpus_synonyms(&p.a, &p.b);
    }
    let mut enriched = Enriched {
        thesaurus: b.build(),
        warnings: Vec::new(),
    };
    for ontology in ontologies {
        let next = enrich_from_ontology(&enriched.thesaurus, ontology);
        enriched.thesaurus = next.thesaurus;
        enriched.warnings.extend(next.warnings);
    }
    enriched
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thesaurus::load_ontology;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn ontology_synonym_joins_set() {
        let t = Thesaurus::builder().phrase("sequence alignment", 3).build();
        let o = load_ontology("T2\tSequence alignment\talignment of sequences\t\n").unwrap();
        let e = enrich_from_ontology(&t, &o).thesaurus;
        assert_eq!(e.lookup("alignment of sequences"), e.lookup("sequence alignment"));
        assert!(e.lookup("sequence alignment").is_some());
    }

    #[test]
    fn corpus_pair_under_ancestry_is_demoted() {
        let t = Thesaurus::builder()
            .phrase("sequence analysis", 5)
            .phrase("sequence alignment", 5)
            .corpus_synonyms("sequence analysis", "sequence alignment")
            .build();
        assert_eq!(t.len(), 1);
        let o = load_ontology("A\tSequence analysis\t\t\nB\tSequence alignment\t\tA\n").unwrap();
        let e = enrich_from_ontology(&t, &o);
        let th = e.thesaurus;
        assert_eq!(th.len(), 2);
        let (a, b) = (
            th.lookup("sequence analysis").unwrap(),
            th.lookup("sequence alignment").unwrap(),
        );
        assert_eq!(th.hyper_edges().iter().copied().collect::<Vec<_>>(), [(b, a)]);
        assert!(th.corpus_pairs().is_empty());
        assert_eq!(e.warnings.len(), 1);
    }

    #[test]
    fn empty_ontology_is_identity() {
        let t = Thesaurus::builder()
            .phrase("gene", 3)
            .phrase("genes", 2)
            .corpus_synonyms("gene", "genes")
            .build();
        let e = enrich_from_ontology(&t, &OntologyGraph::default());
        assert_eq!(e.thesaurus, t);
        assert!(e.warnings.is_empty());
    }

    #[test]
    fn absent_terms_are_not_added() {
        let t = Thesaurus::builder().phrase("proteomics", 1).build();
        let o = load_ontology("P\tProteomics\t\tO\nO\tOmics\t\t\nM\tMetabolomics\t\tO\n").unwrap();
        let e = enrich_from_ontology(&t, &o).thesaurus;
        assert_eq!(e.phrases(), ["proteomics"]);
        assert!(e.hyper_edges().is_empty());
    }

    #[test]
    fn ontology_cycle_edges_are_reported() {
        let t = Thesaurus::builder().phrase("a", 1).phrase("b", 1).build();
        let o = load_ontology("A\ta\t\tB\nB\tb\t\tA\n").unwrap();
        let e = enrich_from_ontology(&t, &o);
        assert_eq!(e.thesaurus.hyper_edges().len(), 1);
        assert_eq!(e.warnings.len(), 1);
    }

    /// Stage-by-stage re-run of the pipeline, independent of
    /// `build_thesaurus`'s wiring.
    #[test]
    fn pipeline_matches_stagewise_oracle() {
        let mut corpus = vec![];
        for ctx in [
            "reads aligned genome",
            "transcript quantification pipeline",
            "library preparation protocol",
        ] {
            for v in ["rna-seq", "rnaseq"] {
                corpus.push(format!("{ctx} {v} {ctx}"));
            }
        }
        corpus.push("sequence alignment of reads".to_string());
        let config = ThesaurusConfig {
            phrases: PhraseConfig {
                min_count: 2,
                ..PhraseConfig::default()
            },
            ..ThesaurusConfig::default()
        };
        let ont = load_ontology("S\tRNA-Seq\tRNA sequencing\t\n").unwrap();
        let built = build_thesaurus(corpus.iter().map(String::as_str), core::slice::from_ref(&ont), &config);

        let stats = extract_phrases(corpus.iter().map(String::as_str), &config.phrases, &config.stopwords);
        let mut surfaces: BTreeSet<String> = stats.iter().map(|s| s.phrase.clone()).collect();
        surfaces.insert("rna sequencing".into());
        let merged: Vec<(String, String)> = synonym_candidates(&stats, 0.7)
            .into_iter()
            .filter(|p| !is_nested(&p.a, &p.b) && !is_nested(&p.b, &p.a))
            .map(|p| (p.a, p.b))
            .collect();
        assert!(merged.contains(&("rna-seq".into(), "rnaseq".into())));
        // Every oracle surface is present, and the three spellings share a dimension.
        for s in &surfaces {
            assert!(built.thesaurus.lookup(s).is_some(), "{s}");
        }
        // Naive set merging over the surviving pairs plus the ontology's names.
        let mut groups: Vec<BTreeSet<String>> = surfaces.iter().map(|s| [s.clone()].into()).collect();
        let links = merged
            .iter()
            .cloned()
            .chain([("rna-seq".to_string(), "rna sequencing".to_string())]);
        for (a, b) in links {
            let ia = groups.iter().position(|g| g.contains(&a)).unwrap();
            let ib = groups.iter().position(|g| g.contains(&b)).unwrap();
            if ia != ib {
                let moved = groups.remove(ia.max(ib));
                groups[ia.min(ib)].extend(moved);
            }
        }
        let mut oracle_phrases: Vec<String> = groups.iter().map(|g| g.iter().next().unwrap().clone()).collect();
        oracle_phrases.sort();
        assert_eq!(built.thesaurus.phrases(), oracle_phrases.as_slice());
        let d = built.thesaurus.lookup("rnaseq").unwrap();
        assert_eq!(built.thesaurus.synonyms(d), ["rna sequencing", "rna-seq", "rnaseq"]);
        assert_eq!(built.thesaurus.phrase(d), "rna sequencing");
        let again = build_thesaurus(corpus.iter().map(String::as_str), &[ont], &config);
        assert_eq!(again.thesaurus.version_hash(), built.thesaurus.version_hash());
    }
}
