use alloc::vec::Vec;
use core::cmp::Ordering;

use super::search::SearchHit;

/// Width of a relevance band.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Orders hits by similarity, then groups them into bands: a band starts at
/// the best remaining hit and takes every hit within `eps` of it. Inside a
/// band hits are ordered by usage score, then accession. Ranks are 1-based.
pub fn rank_with_usage(mut hits: Vec<SearchHit>, eps: f64) -> Vec<SearchHit> {
    hits.sort_by(|a, b| {
        b.similarity
            .partial_cmp(&a.similarity)
            .unwrap_or(Ordering::Equal)
            .then(a.doc_id.cmp(&b.doc_id))
    });
    let mut start = 0;
    while start < hits.len() {
        let leader = hits[start].similarity;
        let mut end = start + 1;
        while end < hits.len() && leader - hits[end].similarity <= eps {
            end += 1;
        }
        hits[start..end].sort_by(|a, b| {
            b.usage_score
                .partial_cmp(&a.usage_score)
                .unwrap_or(Ordering::Equal)
                .then(a.doc_id.cmp(&b.doc_id))
        });
        start = end;
    }
    for (i, h) in hits.iter_mut().enumerate() {
        h.rank = i as u32 + 1;
    }
    hits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::ResourceId;
    use alloc::vec;

    fn hit(n: u64, similarity: f64, usage_score: f64) -> SearchHit {
        SearchHit {
            doc_id: ResourceId::new(n).unwrap(),
            similarity,
            usage_score,
            rank: 0,
        }
    }

    fn ids(h: &[SearchHit]) -> Vec<u64> {
        h.iter().map(|h| h.doc_id.number()).collect()
    }

    #[test]
    fn usage_breaks_near_ties_only() {
        let hits = vec![
            hit(1, 0.900, 0.0),
            hit(2, 0.895, 5.0),
            hit(3, 0.70, 9.0),
            hit(4, 0.95, 0.0),
        ];
        let ranked = rank_with_usage(hits, DEFAULT_EPSILON);
        assert_eq!(ids(&ranked), [4, 2, 1, 3]);
        assert_eq!(ranked.iter().map(|h| h.rank).collect::<Vec<_>>(), [1, 2, 3, 4]);
    }

    #[test]
    fn bands_are_anchored_at_their_leader() {
        // 0.90 and 0.885 are not within eps of each other even though a
        // chain through 0.895 would connect them.
        let hits = vec![hit(1, 0.90, 0.0), hit(2, 0.895, 1.0), hit(3, 0.885, 9.0)];
        assert_eq!(ids(&rank_with_usage(hits, 0.01)), [2, 1, 3]);
    }

    #[test]
    fn full_ties_fall_back_to_accession() {
        let hits = vec![hit(9, 0.5, 1.0), hit(3, 0.5, 1.0), hit(5, 0.5, 1.0)];
        assert_eq!(ids(&rank_with_usage(hits, 0.01)), [3, 5, 9]);
    }

    #[test]
    fn zero_eps_is_pure_similarity() {
        let hits = vec![hit(1, 0.5, 9.0), hit(2, 0.6, 0.0)];
        assert_eq!(ids(&rank_with_usage(hits, 0.0)), [2, 1]);
    }
}
