//! Minimal ontology exchange format: one term per line,
//! `term_id<TAB>label<TAB>syn1|syn2|…<TAB>parent1|parent2|…`, trailing
//! columns optional, `#` starts a comment line.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::text::normalize_phrase;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OntologyTerm {
    pub id: String,
    pub label: String,
    pub synonyms: Vec<String>,
    pub parents: Vec<String>,
}

impl OntologyTerm {
    /// Label followed by synonyms.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        core::iter::once(self.label.as_str()).chain(self.synonyms.iter().map(String::as_str))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OntologyError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate term id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: term {id:?} has undefined parent {parent:?}")]
    UnknownParent { line: usize, id: String, parent: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OntologyGraph {
    terms: BTreeMap<String, OntologyTerm>,
    order: Vec<String>,
    surfaces: BTreeMap<String, Vec<String>>,
    children: BTreeMap<String, Vec<String>>,
}

fn split_list(col: Option<&str>) -> Vec<String> {
    col.unwrap_or("")
        .split('|')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

pub fn load_ontology(text: &str) -> Result<OntologyGraph, OntologyError> {
    let mut graph = OntologyGraph::default();
    let mut lines_of: BTreeMap<String, usize> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let row = raw.trim_end_matches('\r');
        if row.trim().is_empty() || row.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = row.split('\t').collect();
        if cols.len() < 2 || cols.len() > 4 {
            return Err(OntologyError::Malformed {
                line,
                message: alloc::format!("expected 2 to 4 tab-separated columns, found {}", cols.len()),
            });
        }
        let id = cols[0].trim();
        let label = cols[1].trim();
        if id.is_empty() || label.is_empty() {
            return Err(OntologyError::Malformed {
                line,
                message: "term id and label must be non-empty".into(),
            });
        }
        if lines_of.insert(id.to_string(), line).is_some() {
            return Err(OntologyError::DuplicateId { line, id: id.into() });
        }
        graph.order.push(id.to_string());
        graph.terms.insert(
            id.to_string(),
            OntologyTerm {
                id: id.into(),
                label: label.into(),
                synonyms: split_list(cols.get(2).copied()),
                parents: split_list(cols.get(3).copied()),
            },
        );
    }
    for id in &graph.order {
        let term = &graph.terms[id];
        for p in &term.parents {
            if !graph.terms.contains_key(p) {
                return Err(OntologyError::UnknownParent {
                    line: lines_of[id],
                    id: id.clone(),
                    parent: p.clone(),
                });
            }
            graph.children.entry(p.clone()).or_default().push(id.clone());
        }
        for name in term.names() {
            let key = normalize_phrase(name);
            if !key.is_empty() {
                let ids = graph.surfaces.entry(key).or_default();
                if !ids.contains(id) {
                    ids.push(id.clone());
                }
            }
        }
    }
    Ok(graph)
}

impl OntologyGraph {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&OntologyTerm> {
        self.terms.get(id)
    }

    /// Terms in file order.
    pub fn terms(&self) -> impl Iterator<Item = &OntologyTerm> {
        self.order.iter().map(|id| &self.terms[id])
    }

    /// Term ids whose label or synonym normalizes to `surface`.
    pub fn lookup(&self, surface: &str) -> &[String] {
        self.surfaces.get(&normalize_phrase(surface)).map_or(&[], Vec::as_slice)
    }

    /// Normalized label/synonym surfaces with the ids they name.
    pub fn surfaces(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.surfaces.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn children(&self, id: &str) -> &[String] {
        self.children.get(id).map_or(&[], Vec::as_slice)
    }

    /// All transitive parents of `id`, excluding `id` itself unless the
    /// file contains a cycle through it.
    pub fn ancestors(&self, id: &str) -> BTreeSet<&str> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&str> = self
            .get(id)
            .map(|t| t.parents.iter().map(String::as_str).collect())
            .unwrap_or_default();
        while let Some(p) = stack.pop() {
            if seen.insert(p) {
                if let Some(t) = self.get(p) {
                    stack.extend(t.parents.iter().map(String::as_str));
                }
            }
        }
        seen
    }

    pub fn is_strict_ancestor(&self, ancestor: &str, of: &str) -> bool {
        ancestor != of && self.ancestors(of).contains(ancestor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "# id\tlabel\tsynonyms\tparents\n\
        T1\tSequence analysis\t\t\n\
        T2\tSequence alignment\talignment of sequences|sequence aligning\tT1\n\
        T3\tRead mapping\t\tT2|T1\n";

    #[test]
    fn parses_rows_and_edges() {
        let g = load_ontology(FIXTURE).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.get("T3").unwrap().parents, ["T2", "T1"]);
        assert_eq!(g.children("T1"), ["T2", "T3"]);
        assert!(g.is_strict_ancestor("T1", "T3"));
        assert!(!g.is_strict_ancestor("T3", "T1"));
        assert!(!g.is_strict_ancestor("T2", "T2"));
    }

    #[test]
    fn synonyms_reach_the_surface_lookup() {
        let g = load_ontology(FIXTURE).unwrap();
        assert_eq!(g.lookup("Alignment of Sequences"), ["T2"]);
        assert_eq!(g.lookup("sequence aligning"), ["T2"]);
        assert_eq!(g.lookup("sequence alignment"), ["T2"]);
        assert!(g.lookup("protein").is_empty());
    }

    #[test]
    fn undefined_parent_names_the_row() {
        let err = load_ontology("A\tAlpha\t\t\nB\tBeta\t\tX9\n").unwrap_err();
        assert_eq!(
            err,
            OntologyError::UnknownParent {
                line: 2,
                id: "B".into(),
                parent: "X9".into()
            }
        );
    }

    #[test]
    fn duplicate_ids_and_bad_rows() {
        assert!(matches!(
            load_ontology("A\tAlpha\nA\tAgain\n"),
            Err(OntologyError::DuplicateId { line: 2, .. })
        ));
        assert!(matches!(
            load_ontology("A\n"),
            Err(OntologyError::Malformed { line: 1, .. })
        ));
        assert!(matches!(load_ontology("A\t \n"), Err(OntologyError::Malformed { .. })));
    }

    #[test]
    fn shipped_vocabularies_load() {
        for text in [crate::data::DOMAINS, crate::data::FUNCTIONS, crate::data::FORMATS] {
            assert!(load_ontology(text).unwrap().len() >= 15);
        }
        assert_eq!(load_ontology(crate::data::DOMAINS).unwrap().len(), 17);
    }
}
