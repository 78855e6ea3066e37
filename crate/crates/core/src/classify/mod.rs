//! Topic classification of tool descriptions by nearest centroid, with a
//! unigram TF-IDF baseline and an evaluation harness.

mod centroid;
mod corpus;
mod eval;
mod model;

use alloc::string::String;

use serde::{Deserialize, Serialize};

pub use centroid::centroid_idf;
pub use corpus::{default_domain_labels, LabeledCorpus, LabeledDoc};
pub use eval::{evaluate, evaluate_predictions, ClassMetrics, EvalReport};
pub use model::{predict_topic, train_tfidf_baseline, train_topic_model, TfidfBaseline, TopicModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    Label {
        label: String,
        score: f64,
    },
    /// The document shares no feature with the model.
    Unclassifiable,
}

impl Prediction {
    pub fn label(&self) -> Option<&str> {
        match self {
            Prediction::Label { label, .. } => Some(label),
            Prediction::Unclassifiable => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("every document labeled {0:?} has an empty feature vector")]
    ZeroCentroid(String),
    #[error("label {0:?} is not configured")]
    UnknownLabel(String),
    #[error("held-out corpus is empty")]
    EmptyHeldout,
    #[error("model was trained against a different thesaurus")]
    ThesaurusMismatch,
}

/// Anything that maps a description to one domain label.
pub trait TopicClassifier {
    /// Labels the model can emit, sorted.
    fn labels(&self) -> &[String];
    fn predict(&self, doc_text: &str) -> Prediction;
}
