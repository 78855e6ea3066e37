use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::ir::{vectorize_document, IdfTable, SparseVector};
use crate::registry::Person;
use crate::thesaurus::Thesaurus;

/// One article from the publication feed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PublicationRecord {
    pub pub_id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub subject_headings: Vec<String>,
    pub journal: String,
    pub year: i32,
    pub full_text: Option<String>,
    pub authors: Vec<Person>,
    pub institutions: Vec<String>,
}

impl PublicationRecord {
    /// Text contributed to the thesaurus corpus: title, abstract and subject
    /// headings as separate sentences.
    pub fn c1_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&self.title);
        s.push_str(".\n");
        s.push_str(&self.abstract_text);
        for h in &self.subject_headings {
            s.push_str(".\n");
            s.push_str(h);
        }
        s
    }

    fn gate_text(&self) -> String {
        let mut s = String::with_capacity(self.title.len() + self.abstract_text.len() + 2);
        s.push_str(&self.title);
        s.push_str(".\n");
        s.push_str(&self.abstract_text);
        s
    }
}

/// Decision threshold on the tool score.
pub const TOOL_THRESHOLD: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolLabel {
    pub is_tool: bool,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifierError {
    #[error("classifier has not been trained")]
    Untrained,
    #[error("training set is empty")]
    EmptyTrainingSet,
}

/// Anything that scores a publication in `[0, 1]` for "describes a tool".
pub trait PublicationClassifier {
    fn score(&self, publication: &PublicationRecord) -> Result<f64, ClassifierError>;
}

pub fn classify_publication(
    publication: &PublicationRecord,
    model: &dyn PublicationClassifier,
) -> Result<ToolLabel, ClassifierError> {
    let score = model.score(publication)?;
    Ok(ToolLabel {
        is_tool: score >= TOOL_THRESHOLD,
        score,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogisticConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            epochs: 500,
            learning_rate: 2.0,
            l2: 1e-4,
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-z))
}

/// Logistic regression over normalized thesaurus phrase counts of title and
/// abstract, fitted by full-batch gradient descent.
#[derive(Clone, Debug)]
pub struct LogisticClassifier {
    thesaurus: Thesaurus,
    params: Option<(Vec<f64>, f64)>,
}

impl LogisticClassifier {
    pub fn untrained(thesaurus: Thesaurus) -> Self {
        LogisticClassifier {
            thesaurus,
            params: None,
        }
    }

    pub fn train(
        thesaurus: Thesaurus,
        examples: &[(PublicationRecord, bool)],
        config: &LogisticConfig,
    ) -> Result<Self, ClassifierError> {
        if examples.is_empty() {
            return Err(ClassifierError::EmptyTrainingSet);
        }
        let mut model = LogisticClassifier::untrained(thesaurus);
        let xs: Vec<(SparseVector, f64)> = examples
            .iter()
            .map(|(p, y)| (model.features(p), if *y { 1.0 } else { 0.0 }))
            .collect();
        let dims = model.thesaurus.len();
        let n = xs.len() as f64;
        let mut w = alloc::vec![0.0; dims];
        let mut b = 0.0;
        let mut grad = alloc::vec![0.0; dims];
        for _ in 0..config.epochs {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut gb = 0.0;
            for (x, y) in &xs {
                let z = b + x.entries().iter().map(|&(d, v)| w[d as usize] * v).sum::<f64>();
                let err = sigmoid(z) - y;
                for &(d, v) in x.entries() {
                    grad[d as usize] += err * v;
                }
                gb += err;
            }
            for (wi, gi) in w.iter_mut().zip(&grad) {
                *wi -= config.learning_rate * (gi / n + config.l2 * *wi);
            }
            b -= config.learning_rate * gb / n;
        }
        model.params = Some((w, b));
        Ok(model)
    }

    pub fn features(&self, publication: &PublicationRecord) -> SparseVector {
        let idf = IdfTable::uniform(self.thesaurus.len());
        vectorize_document(&publication.gate_text(), &self.thesaurus, &idf).weights
    }

    pub fn is_trained(&self) -> bool {
        self.params.is_some()
    }

    /// Weights and bias once trained.
    pub fn parameters(&self) -> Option<(&[f64], f64)> {
        self.params.as_ref().map(|(w, b)| (w.as_slice(), *b))
    }
}

impl PublicationClassifier for LogisticClassifier {
    fn score(&self, publication: &PublicationRecord) -> Result<f64, ClassifierError> {
        let (w, b) = self.params.as_ref().ok_or(ClassifierError::Untrained)?;
        let x = self.features(publication);
        let z = b + x.entries().iter().map(|&(d, v)| w[d as usize] * v).sum::<f64>();
        Ok(sigmoid(z))
    }
}
