use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::disjoint::DisjointSets;
use crate::registry::ToolRecord;
use crate::url;

fn keys(record: &ToolRecord) -> Vec<String> {
    let mut out = Vec::new();
    let name = record.name.trim().to_lowercase();
    if !name.is_empty() {
        let mut k = String::from("name:");
        k.push_str(&name);
        out.push(k);
    }
    for u in record.links.iter().chain(&record.source_repos) {
        let norm = url::normalize(u);
        if !norm.is_empty() {
            let mut k = String::from("url:");
            k.push_str(&norm);
            out.push(k);
        }
    }
    out
}

/// Groups candidate records that share a case-folded name or any normalized
/// link or repository URL, closed transitively. Returns index clusters
/// ordered by their first member; every index appears exactly once.
pub fn match_duplicates(candidates: &[ToolRecord]) -> Vec<Vec<usize>> {
    let mut sets = DisjointSets::new(candidates.len());
    let mut first_with: BTreeMap<String, usize> = BTreeMap::new();
    for (i, r) in candidates.iter().enumerate() {
        for k in keys(r) {
            match first_with.get(&k) {
                Some(&j) => sets.union(i, j),
                None => {
                    first_with.insert(k, i);
                }
            }
        }
    }
    sets.groups()
}
