use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ClassifyError;
use crate::data;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDoc {
    pub doc_text: String,
    pub label: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledCorpus {
    pub items: Vec<LabeledDoc>,
}

impl LabeledCorpus {
    pub fn new(items: impl IntoIterator<Item = (String, String)>) -> Self {
        LabeledCorpus {
            items: items
                .into_iter()
                .map(|(doc_text, label)| LabeledDoc { doc_text, label })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Distinct labels, sorted.
    pub fn labels(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.items.iter().map(|d| d.label.as_str()).collect();
        set.into_iter().map(String::from).collect()
    }

    /// Fails on the first label outside `allowed`.
    pub fn check_labels(&self, allowed: &[String]) -> Result<(), ClassifyError> {
        match self.items.iter().find(|d| !allowed.contains(&d.label)) {
            Some(d) => Err(ClassifyError::UnknownLabel(d.label.clone())),
            None => Ok(()),
        }
    }
}

/// The shipped domain labels, in file order.
pub fn default_domain_labels() -> Vec<String> {
    data::list_lines(data::DOMAINS)
        .filter_map(|l| l.split('\t').next())
        .map(String::from)
        .collect()
}
