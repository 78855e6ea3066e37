use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ClassifyError, LabeledCorpus, Prediction, TopicClassifier};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub support: u64,
}

/// Rows are true labels; columns are predicted labels followed by one
/// column for unclassifiable documents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub labels: Vec<String>,
    pub confusion: Vec<Vec<u64>>,
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    pub total: u64,
}

/// Report for `(true label, prediction)` pairs over `labels`.
pub fn evaluate_predictions<'a>(
    labels: &[String],
    outcomes: impl IntoIterator<Item = (&'a str, Prediction)>,
) -> Result<EvalReport, ClassifyError> {
    let k = labels.len();
    let mut confusion = alloc::vec![alloc::vec![0u64; k + 1]; k];
    let mut total = 0u64;
    let index = |l: &str| labels.iter().position(|x| x == l);
    for (truth, pred) in outcomes {
        let row = index(truth).ok_or_else(|| ClassifyError::UnknownLabel(truth.into()))?;
        let col = match &pred {
            Prediction::Label { label, .. } => {
                index(label).ok_or_else(|| ClassifyError::UnknownLabel(label.clone()))?
            }
            Prediction::Unclassifiable => k,
        };
        confusion[row][col] += 1;
        total += 1;
    }
    if total == 0 {
        return Err(ClassifyError::EmptyHeldout);
    }
    let trace: u64 = (0..k).map(|i| confusion[i][i]).sum();
    let per_class = (0..k)
        .map(|i| {
            let tp = confusion[i][i] as f64;
            let predicted: u64 = confusion.iter().map(|r| r[i]).sum();
            let support: u64 = confusion[i].iter().sum();
            ClassMetrics {
                label: labels[i].clone(),
                precision: if predicted == 0 { 0.0 } else { tp / predicted as f64 },
                recall: if support == 0 { 0.0 } else { tp / support as f64 },
                support,
            }
        })
        .collect();
    Ok(EvalReport {
        labels: labels.to_vec(),
        confusion,
        accuracy: trace as f64 / total as f64,
        per_class,
        total,
    })
}

/// Predicts every held-out document; unclassifiable counts as wrong.
pub fn evaluate(model: &dyn TopicClassifier, heldout: &LabeledCorpus) -> Result<EvalReport, ClassifyError> {
    let mut labels: Vec<String> = model.labels().to_vec();
    for l in heldout.labels() {
        if !labels.contains(&l) {
            labels.push(l);
        }
    }
    evaluate_predictions(
        &labels,
        heldout
            .items
            .iter()
            .map(|d| (d.label.as_str(), model.predict(&d.doc_text))),
    )
}
