use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{ClassifyError, Prediction};
use crate::ir::cosine;
use crate::ir::{IdfTable, SparseVector};

pub(crate) type Counts = BTreeMap<u32, u64>;

/// `1 + ln(n / df)`: positive, and unchanged when the corpus is duplicated.
pub fn centroid_idf(df: u64, n_docs: u64) -> f64 {
    if df == 0 {
        return 1.0;
    }
    1.0 + libm::log(n_docs as f64 / df as f64)
}

pub(crate) fn tfidf(counts: &Counts, idf: &IdfTable) -> SparseVector {
    SparseVector::from_pairs(counts.iter().map(|(&d, &tf)| (d, tf as f64 * idf.get(d)))).normalized()
}

/// Nearest-centroid core shared by the thesaurus model and the baseline.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Centroids {
    pub idf: IdfTable,
    /// Sorted, unique.
    pub labels: Vec<String>,
    pub centroids: Vec<SparseVector>,
}

impl Centroids {
    pub fn train(docs: &[(Counts, &str)], dims: usize) -> Result<Self, ClassifyError> {
        if docs.is_empty() {
            return Err(ClassifyError::EmptyCorpus);
        }
        let mut df = alloc::vec![0u64; dims];
        for (c, _) in docs {
            for &d in c.keys() {
                df[d as usize] += 1;
            }
        }
        let n = docs.len() as u64;
        let idf = IdfTable::from_values(n, df.iter().map(|&d| centroid_idf(d, n)).collect());
        let mut sums: BTreeMap<&str, (BTreeMap<u32, f64>, u64)> = BTreeMap::new();
        for (c, label) in docs {
            let entry = sums.entry(label).or_default();
            entry.1 += 1;
            for &(d, w) in tfidf(c, &idf).entries() {
                *entry.0.entry(d).or_insert(0.0) += w;
            }
        }
        let mut labels = Vec::with_capacity(sums.len());
        let mut centroids = Vec::with_capacity(sums.len());
        for (label, (sum, count)) in sums {
            let mean = SparseVector::from_pairs(sum.into_iter().map(|(d, w)| (d, w / count as f64)));
            if mean.is_zero() {
                return Err(ClassifyError::ZeroCentroid(String::from(label)));
            }
            labels.push(String::from(label));
            centroids.push(mean.normalized());
        }
        Ok(Centroids { idf, labels, centroids })
    }

    pub fn predict(&self, counts: &Counts) -> Prediction {
        let v = tfidf(counts, &self.idf);
        if v.is_zero() {
            return Prediction::Unclassifiable;
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in self.centroids.iter().enumerate() {
            let s = cosine(&v, c);
            // Labels are sorted, so keeping the first maximum breaks ties
            // lexicographically.
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        match best {
            Some((i, score)) => Prediction::Label {
                label: self.labels[i].clone(),
                score,
            },
            None => Prediction::Unclassifiable,
        }
    }
}
