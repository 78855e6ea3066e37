use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::centroid::{Centroids, Counts};
use super::{ClassifyError, LabeledCorpus, Prediction, TopicClassifier};
use crate::ir::{phrase_counts, IdfTable, SparseVector};
use crate::text::{tokenize, Stopwords};
use crate::thesaurus::Thesaurus;

/// Nearest-centroid topic model in thesaurus space.
#[derive(Clone, Debug)]
pub struct TopicModel {
    thesaurus: Thesaurus,
    inner: Centroids,
}

pub fn train_topic_model(corpus: &LabeledCorpus, thesaurus: &Thesaurus) -> Result<TopicModel, ClassifyError> {
    let docs: Vec<(Counts, &str)> = corpus
        .items
        .iter()
        .map(|d| (phrase_counts(&d.doc_text, thesaurus), d.label.as_str()))
        .collect();
    Ok(TopicModel {
        thesaurus: thesaurus.clone(),
        inner: Centroids::train(&docs, thesaurus.len())?,
    })
}

pub fn predict_topic(doc_text: &str, model: &TopicModel) -> Prediction {
    model.inner.predict(&phrase_counts(doc_text, &model.thesaurus))
}

impl TopicModel {
    pub fn thesaurus_hash(&self) -> &str {
        self.thesaurus.version_hash()
    }

    pub fn ensure_thesaurus(&self, current: &Thesaurus) -> Result<(), ClassifyError> {
        if current.version_hash() == self.thesaurus_hash() {
            Ok(())
        } else {
            Err(ClassifyError::ThesaurusMismatch)
        }
    }

    pub fn centroid(&self, label: &str) -> Option<&SparseVector> {
        let i = self.inner.labels.iter().position(|l| l == label)?;
        Some(&self.inner.centroids[i])
    }

    pub fn idf(&self) -> &IdfTable {
        &self.inner.idf
    }
}

impl TopicClassifier for TopicModel {
    fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    fn predict(&self, doc_text: &str) -> Prediction {
        predict_topic(doc_text, self)
    }
}

/// Same nearest-centroid contract over raw word unigrams.
#[derive(Clone, Debug)]
pub struct TfidfBaseline {
    vocab: BTreeMap<String, u32>,
    stopwords: Stopwords,
    inner: Centroids,
}

fn unigram_counts(text: &str, vocab: &BTreeMap<String, u32>, stopwords: &Stopwords) -> Counts {
    let mut counts = Counts::new();
    for t in tokenize(text) {
        if stopwords.contains(&t.text) {
            continue;
        }
        if let Some(&d) = vocab.get(&t.text) {
            *counts.entry(d).or_insert(0) += 1;
        }
    }
    counts
}

pub fn train_tfidf_baseline(corpus: &LabeledCorpus) -> Result<TfidfBaseline, ClassifyError> {
    let stopwords = Stopwords::english();
    let mut words: Vec<String> = corpus
        .items
        .iter()
        .flat_map(|d| tokenize(&d.doc_text))
        .map(|t| t.text)
        .filter(|w| !stopwords.contains(w))
        .collect();
    words.sort();
    words.dedup();
    let vocab: BTreeMap<String, u32> = words.into_iter().enumerate().map(|(i, w)| (w, i as u32)).collect();
    let docs: Vec<(Counts, &str)> = corpus
        .items
        .iter()
        .map(|d| (unigram_counts(&d.doc_text, &vocab, &stopwords), d.label.as_str()))
        .collect();
    let inner = Centroids::train(&docs, vocab.len())?;
    Ok(TfidfBaseline {
        vocab,
        stopwords,
        inner,
    })
}

impl TfidfBaseline {
    pub fn vocabulary_size(&self) -> usize {
        self.vocab.len()
    }
}

impl TopicClassifier for TfidfBaseline {
    fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    fn predict(&self, doc_text: &str) -> Prediction {
        self.inner
            .predict(&unigram_counts(doc_text, &self.vocab, &self.stopwords))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::centroid::centroid_idf;
    use crate::ir::cosine;
    use alloc::format;
    use alloc::string::ToString;
    use alloc::vec;

    fn th() -> Thesaurus {
        Thesaurus::builder()
            .phrase("gene expression", 3)
            .synonyms("gene expression", "transcript abundance")
            .phrase("mass spectrometry", 3)
            .synonyms("mass spectrometry", "ms analysis")
            .phrase("microscopy", 3)
            .synonyms("microscopy", "light imaging")
            .phrase("sequencing", 3)
            .phrase("peptide", 3)
            .phrase("cell", 3)
            .build()
    }

    fn corpus(items: &[(&str, &str)]) -> LabeledCorpus {
        LabeledCorpus::new(items.iter().map(|(t, l)| (t.to_string(), l.to_string())))
    }

    fn three_labels() -> LabeledCorpus {
        corpus(&[
            ("gene expression by sequencing", "genomics"),
            ("sequencing of gene expression and sequencing", "genomics"),
            ("mass spectrometry of peptide", "proteomics"),
            ("peptide mass spectrometry", "proteomics"),
            ("cell microscopy", "imaging"),
        ])
    }

    #[test]
    fn one_doc_per_label() {
        let c = corpus(&[("gene expression", "a"), ("microscopy of a cell", "b")]);
        let m = train_topic_model(&c, &th()).unwrap();
        for d in &c.items {
            let doc = crate::ir::vectorize_document(&d.doc_text, &th(), m.idf()).weights;
            assert_eq!(m.centroid(&d.label).unwrap(), &doc);
            assert_eq!(
                predict_topic(&d.doc_text, &m),
                Prediction::Label {
                    label: d.label.clone(),
                    score: cosine(&doc, &doc)
                }
            );
        }
    }

    #[test]
    fn centroids_match_hand_means() {
        let t = th();
        let c = three_labels();
        let m = train_topic_model(&c, &t).unwrap();
        // Oracle: dense arithmetic over the same definitions.
        let n = c.len() as u64;
        let dims = t.len();
        let counts: Vec<Vec<f64>> = c
            .items
            .iter()
            .map(|d| {
                let mut v = vec![0.0; dims];
                for (k, n) in phrase_counts(&d.doc_text, &t) {
                    v[k as usize] = n as f64;
                }
                v
            })
            .collect();
        let idf: Vec<f64> = (0..dims)
            .map(|k| centroid_idf(counts.iter().filter(|v| v[k] > 0.0).count() as u64, n))
            .collect();
        let unit = |v: Vec<f64>| {
            let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
            v.into_iter().map(|x| x / norm).collect::<Vec<f64>>()
        };
        for label in c.labels() {
            let members: Vec<Vec<f64>> = c
                .items
                .iter()
                .zip(&counts)
                .filter(|(d, _)| d.label == label)
                .map(|(_, v)| unit(v.iter().zip(&idf).map(|(a, b)| a * b).collect()))
                .collect();
            let mean: Vec<f64> = (0..dims)
                .map(|k| members.iter().map(|v| v[k]).sum::<f64>() / members.len() as f64)
                .collect();
            let want = unit(mean);
            let got = m.centroid(&label).unwrap();
            for (k, w) in want.iter().enumerate() {
                assert!((got.get(k as u32) - w).abs() < 1e-12, "{label} dim {k}");
            }
        }
    }

    #[test]
    fn duplicated_corpus_gives_identical_model() {
        let c = three_labels();
        let mut twice = c.clone();
        twice.items.extend(c.items.clone());
        let a = train_topic_model(&c, &th()).unwrap();
        let b = train_topic_model(&twice, &th()).unwrap();
        for l in c.labels() {
            let (x, y) = (a.centroid(&l).unwrap(), b.centroid(&l).unwrap());
            for (p, q) in x.entries().iter().zip(y.entries()) {
                assert_eq!(p.0, q.0);
                assert!((p.1 - q.1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_centroid_is_an_error() {
        let c = corpus(&[("gene expression", "a"), ("nothing known", "b")]);
        assert_eq!(
            train_topic_model(&c, &th()).unwrap_err(),
            ClassifyError::ZeroCentroid("b".into())
        );
        assert_eq!(
            train_topic_model(&LabeledCorpus::default(), &th()).unwrap_err(),
            ClassifyError::EmptyCorpus
        );
    }

    #[test]
    fn repetition_keeps_the_label() {
        let m = train_topic_model(&three_labels(), &th()).unwrap();
        for text in ["gene expression and peptide", "cell peptide microscopy", "sequencing"] {
            let once = predict_topic(text, &m);
            let thrice = predict_topic(&format!("{text}. {text}. {text}"), &m);
            assert_eq!(once.label(), thrice.label());
        }
    }

    #[test]
    fn synonym_paraphrase_beats_baseline() {
        let c = three_labels();
        let m = train_topic_model(&c, &th()).unwrap();
        let b = train_tfidf_baseline(&c).unwrap();
        let paraphrase = "transcript abundance";
        assert_eq!(m.predict(paraphrase).label(), Some("genomics"));
        assert_ne!(b.predict(paraphrase).label(), Some("genomics"));
        for d in &c.items {
            assert!(b.predict(&d.doc_text).label().is_some());
        }
        assert_eq!(m.predict(""), Prediction::Unclassifiable);
        assert_eq!(b.predict(""), Prediction::Unclassifiable);
    }

    #[test]
    fn ties_go_to_the_smaller_label() {
        let c = corpus(&[("cell", "zeta"), ("cell", "alpha")]);
        let m = train_topic_model(&c, &th()).unwrap();
        assert_eq!(m.predict("cell").label(), Some("alpha"));
    }
}
