use alloc::vec::Vec;

/// Sparse non-negative vector, entries sorted by index with no zeros.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    /// Builds from `(index, weight)` pairs; zero weights are dropped and
    /// duplicate indices summed.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut entries: Vec<(u32, f64)> = pairs.into_iter().collect();
        entries.sort_by_key(|e| e.0);
        let mut out: Vec<(u32, f64)> = Vec::with_capacity(entries.len());
        for (i, w) in entries {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += w,
                _ => out.push((i, w)),
            }
        }
        out.retain(|e| e.1 != 0.0);
        SparseVector { entries: out }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    /// Number of non-zero entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: u32) -> f64 {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map_or(0.0, |k| self.entries[k].1)
    }

    /// One past the largest populated index.
    pub fn bound(&self) -> u32 {
        self.entries.last().map_or(0, |e| e.0 + 1)
    }

    /// Euclidean norm, summed in index order.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.entries.iter().map(|e| e.1 * e.1).sum())
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return SparseVector::default();
        }
        SparseVector {
            entries: self.entries.iter().map(|&(i, w)| (i, w / n)).collect(),
        }
    }

    /// Dot product, accumulated in index order.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut sum) = (0, 0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    sum += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }
}

/// Cosine similarity clamped to `[0, 1]`; zero when either side is zero.
pub fn cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    cosine_with_norms(a, a.norm(), b, b.norm())
}

pub(crate) fn cosine_with_norms(a: &SparseVector, na: f64, b: &SparseVector, nb: f64) -> f64 {
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (a.dot(b) / (na * nb)).clamp(0.0, 1.0)
}

/// A vector in the space of one thesaurus: every index is below `dims`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhraseVector {
    pub dims: usize,
    pub weights: SparseVector,
}

impl PhraseVector {
    pub fn is_zero(&self) -> bool {
        self.weights.is_zero()
    }
}
