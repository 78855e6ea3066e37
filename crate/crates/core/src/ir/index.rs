use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use super::vector::SparseVector;
use super::vectorize::{phrase_counts, weigh, IdfTable};
use crate::registry::{ResourceId, ToolRecord, UsageMetrics};
use crate::thesaurus::{OntologyGraph, Thesaurus};

/// Term id → human label, used to spell out function and domain ids in
/// document text.
#[derive(Clone, Debug, Default)]
pub struct TermLabels(BTreeMap<String, String>);

impl TermLabels {
    pub fn from_ontologies<'a>(ontologies: impl IntoIterator<Item = &'a OntologyGraph>) -> Self {
        let mut map = BTreeMap::new();
        for o in ontologies {
            for t in o.terms() {
                map.entry(t.id.clone()).or_insert_with(|| t.label.clone());
            }
        }
        TermLabels(map)
    }

    pub fn label<'a>(&'a self, id: &'a str) -> &'a str {
        self.0.get(id).map_or(id, String::as_str)
    }
}

/// Searchable document text: name, description, then function and domain
/// labels, separated so phrases never span two parts.
pub fn document_text(record: &ToolRecord, labels: &TermLabels) -> String {
    let mut s = String::new();
    s.push_str(&record.name);
    s.push_str(".\n");
    s.push_str(&record.description);
    for id in record.functions.iter().chain(&record.domains) {
        s.push_str(".\n");
        s.push_str(labels.label(id));
    }
    s
}

/// Values the search cascade can filter, sort and facet on.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocFields {
    pub name: String,
    pub tool_type: Option<String>,
    pub domains: Vec<String>,
    pub platforms: Vec<String>,
    pub languages: Vec<String>,
    pub functions: Vec<String>,
    pub funding_sources: Vec<String>,
    pub award_numbers: Vec<String>,
    pub usage: UsageMetrics,
    pub parked: bool,
}

impl DocFields {
    pub fn of(record: &ToolRecord) -> Self {
        DocFields {
            name: record.name.clone(),
            tool_type: record.tool_type.clone(),
            domains: record.domains.clone(),
            platforms: record.platforms.clone(),
            languages: record.languages.clone(),
            functions: record.functions.clone(),
            funding_sources: record.funding_sources.clone(),
            award_numbers: record.award_numbers.clone(),
            usage: record.usage,
            parked: record.is_parked(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexedDoc {
    pub vector: SparseVector,
    pub norm: f64,
    pub fields: DocFields,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("record {0:?} has no accession")]
    MissingAccession(String),
    #[error("accession {0} appears twice")]
    DuplicateAccession(ResourceId),
    #[error("index built against thesaurus {index}, current thesaurus is {thesaurus}; rebuild required")]
    RebuildRequired { index: String, thesaurus: String },
    #[error("index snapshot line {line}: {message}")]
    Snapshot { line: usize, message: String },
}

/// Immutable searchable snapshot of tool documents in thesaurus space.
#[derive(Clone, Debug, PartialEq)]
pub struct PhraseIndex {
    thesaurus_hash: String,
    dims: usize,
    idf: IdfTable,
    docs: BTreeMap<ResourceId, IndexedDoc>,
    postings: Vec<Vec<ResourceId>>,
}

pub fn build_index(
    records: &[ToolRecord],
    thesaurus: &Thesaurus,
    labels: &TermLabels,
) -> Result<PhraseIndex, IndexError> {
    let dims = thesaurus.len();
    let mut counted = Vec::with_capacity(records.len());
    let mut df = alloc::vec![0u64; dims];
    let mut seen = BTreeMap::new();
    for r in records {
        let id = r
            .accession
            .ok_or_else(|| IndexError::MissingAccession(r.name.clone()))?;
        if seen.insert(id, ()).is_some() {
            return Err(IndexError::DuplicateAccession(id));
        }
        let counts = phrase_counts(&document_text(r, labels), thesaurus);
        for d in counts.keys() {
            df[*d as usize] += 1;
        }
        counted.push((id, counts, DocFields::of(r)));
    }
    let idf = IdfTable::from_document_frequencies(&df, records.len() as u64);
    let mut index = PhraseIndex {
        thesaurus_hash: thesaurus.version_hash().to_string(),
        dims,
        idf,
        docs: BTreeMap::new(),
        postings: alloc::vec![Vec::new(); dims],
    };
    for (id, counts, fields) in counted {
        let vector = weigh(&counts, &index.idf, dims).weights;
        index.insert_doc(id, vector, fields);
    }
    Ok(index)
}

impl PhraseIndex {
    pub fn empty(thesaurus: &Thesaurus) -> Self {
        PhraseIndex {
            thesaurus_hash: thesaurus.version_hash().to_string(),
            dims: thesaurus.len(),
            idf: IdfTable::from_document_frequencies(&alloc::vec![0; thesaurus.len()], 0),
            docs: BTreeMap::new(),
            postings: alloc::vec![Vec::new(); thesaurus.len()],
        }
    }

    fn insert_doc(&mut self, id: ResourceId, vector: SparseVector, fields: DocFields) {
        for &(d, _) in vector.entries() {
            let list = &mut self.postings[d as usize];
            if let Err(pos) = list.binary_search(&id) {
                list.insert(pos, id);
            }
        }
        let norm = vector.norm();
        self.docs.insert(id, IndexedDoc { vector, norm, fields });
    }

    fn remove_doc(&mut self, id: ResourceId) -> bool {
        let Some(old) = self.docs.remove(&id) else {
            return false;
        };
        for &(d, _) in old.vector.entries() {
            let list = &mut self.postings[d as usize];
            if let Ok(pos) = list.binary_search(&id) {
                list.remove(pos);
            }
        }
        true
    }

    /// New snapshot with `record` added or replaced, weighted with this
    /// snapshot's idf table. A full rebuild refreshes idf.
    pub fn with_record(
        &self,
        record: &ToolRecord,
        thesaurus: &Thesaurus,
        labels: &TermLabels,
    ) -> Result<PhraseIndex, IndexError> {
        self.ensure_compatible(thesaurus)?;
        let id = record
            .accession
            .ok_or_else(|| IndexError::MissingAccession(record.name.clone()))?;
        let mut next = self.clone();
        next.remove_doc(id);
        let counts = phrase_counts(&document_text(record, labels), thesaurus);
        let vector = weigh(&counts, &next.idf, next.dims).weights;
        next.insert_doc(id, vector, DocFields::of(record));
        Ok(next)
    }

    pub fn without_record(&self, id: ResourceId) -> PhraseIndex {
        let mut next = self.clone();
        next.remove_doc(id);
        next
    }

    pub fn ensure_compatible(&self, thesaurus: &Thesaurus) -> Result<(), IndexError> {
        if self.thesaurus_hash == thesaurus.version_hash() {
            Ok(())
        } else {
            Err(IndexError::RebuildRequired {
                index: self.thesaurus_hash.clone(),
                thesaurus: thesaurus.version_hash().to_string(),
            })
        }
    }

    pub fn thesaurus_hash(&self) -> &str {
        &self.thesaurus_hash
    }

    /// Dimensionality, equal to the thesaurus length.
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn idf(&self) -> &IdfTable {
        &self.idf
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn get(&self, id: ResourceId) -> Option<&IndexedDoc> {
        self.docs.get(&id)
    }

    pub fn docs(&self) -> impl Iterator<Item = (ResourceId, &IndexedDoc)> {
        self.docs.iter().map(|(k, v)| (*k, v))
    }

    pub fn postings(&self, dim: u32) -> &[ResourceId] {
        self.postings.get(dim as usize).map_or(&[], Vec::as_slice)
    }

    /// Byte-deterministic text snapshot.
    pub fn to_snapshot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "phrase-index v1");
        let _ = writeln!(s, "thesaurus {}", self.thesaurus_hash);
        let _ = writeln!(s, "docs {}", self.docs.len());
        let _ = writeln!(s, "dims {}", self.dims);
        let _ = writeln!(s, "idf_docs {}", self.idf.docs());
        s.push_str("[idf]\n");
        for v in self.idf.values() {
            let _ = writeln!(s, "{v:?}");
        }
        s.push_str("[vectors]\n");
        for (id, doc) in &self.docs {
            let _ = write!(s, "{id}\t");
            for (k, &(d, w)) in doc.vector.entries().iter().enumerate() {
                if k > 0 {
                    s.push(' ');
                }
                let _ = write!(s, "{d}:{w:?}");
            }
            s.push('\n');
        }
        s.push_str("[postings]\n");
        for (d, list) in self.postings.iter().enumerate() {
            if list.is_empty() {
                continue;
            }
            let _ = write!(s, "{d}\t");
            for (k, id) in list.iter().enumerate() {
                if k > 0 {
                    s.push(' ');
                }
                let _ = write!(s, "{id}");
            }
            s.push('\n');
        }
        s.push_str("[fields]\n");
        for (id, doc) in &self.docs {
            let json = serde_json::to_string(&doc.fields).expect("fields serialize");
            let _ = writeln!(s, "{id}\t{json}");
        }
        s
    }

    pub fn from_snapshot(text: &str) -> Result<PhraseIndex, IndexError> {
        let bad = |line: usize, message: &str| IndexError::Snapshot {
            line,
            message: message.to_string(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut header = |n: usize, key: &str| -> Result<String, IndexError> {
            match lines.next() {
                Some((_, l)) if n == 1 && l == key => Ok(String::new()),
                Some((_, l)) => l
                    .strip_prefix(key)
                    .and_then(|r| r.strip_prefix(' '))
                    .map(String::from)
                    .ok_or_else(|| bad(n, &format!("expected {key}"))),
                None => Err(bad(n, &format!("expected {key}"))),
            }
        };
        header(1, "phrase-index v1")?;
        let thesaurus_hash = header(2, "thesaurus")?;
        let n_docs: usize = header(3, "docs")?.parse().map_err(|_| bad(3, "bad doc count"))?;
        let dims: usize = header(4, "dims")?.parse().map_err(|_| bad(4, "bad dims"))?;
        let idf_docs: u64 = header(5, "idf_docs")?.parse().map_err(|_| bad(5, "bad idf_docs"))?;

        let mut idf = Vec::with_capacity(dims);
        let mut vectors: BTreeMap<ResourceId, SparseVector> = BTreeMap::new();
        let mut postings_text: Vec<(usize, &str)> = Vec::new();
        let mut fields: BTreeMap<ResourceId, DocFields> = BTreeMap::new();
        let mut section = "";
        for (n, line) in lines {
            if line.starts_with('[') {
                section = line;
                continue;
            }
            let rid = |s: &str| s.parse::<ResourceId>().map_err(|_| bad(n, "bad accession"));
            match section {
                "[idf]" => idf.push(line.parse::<f64>().map_err(|_| bad(n, "bad idf value"))?),
                "[vectors]" => {
                    let (id, rest) = line.split_once('\t').ok_or_else(|| bad(n, "missing tab"))?;
                    let mut entries = Vec::new();
                    for e in rest.split(' ').filter(|e| !e.is_empty()) {
                        let (d, w) = e.split_once(':').ok_or_else(|| bad(n, "bad vector entry"))?;
                        let d: u32 = d.parse().map_err(|_| bad(n, "bad dimension"))?;
                        let w: f64 = w.parse().map_err(|_| bad(n, "bad weight"))?;
                        if d as usize >= dims || w.is_nan() || w <= 0.0 {
                            return Err(bad(n, "vector entry out of range"));
                        }
                        entries.push((d, w));
                    }
                    if entries.windows(2).any(|p| p[0].0 >= p[1].0) {
                        return Err(bad(n, "vector entries not strictly increasing"));
                    }
                    vectors.insert(rid(id)?, SparseVector::from_pairs(entries));
                }
                "[postings]" => postings_text.push((n, line)),
                "[fields]" => {
                    let (id, json) = line.split_once('\t').ok_or_else(|| bad(n, "missing tab"))?;
                    let f: DocFields = serde_json::from_str(json).map_err(|_| bad(n, "bad field record"))?;
                    fields.insert(rid(id)?, f);
                }
                _ => return Err(bad(n, "line outside a known section")),
            }
        }
        if idf.len() != dims {
            return Err(bad(5, "idf table length differs from dims"));
        }
        if vectors.len() != n_docs || fields.len() != n_docs || vectors.keys().ne(fields.keys()) {
            return Err(bad(3, "vectors and fields disagree with doc count"));
        }
        let mut index = PhraseIndex {
            thesaurus_hash,
            dims,
            idf: IdfTable::from_values(idf_docs, idf),
            docs: BTreeMap::new(),
            postings: alloc::vec![Vec::new(); dims],
        };
        for (id, vector) in vectors {
            let f = fields.remove(&id).unwrap_or_default();
            index.insert_doc(id, vector, f);
        }
        // Postings are derived data; the stored copy must agree.
        let mut stored: Vec<Vec<ResourceId>> = alloc::vec![Vec::new(); dims];
        for (n, line) in postings_text {
            let (d, rest) = line.split_once('\t').ok_or_else(|| bad(n, "missing tab"))?;
            let d: usize = d.parse().map_err(|_| bad(n, "bad dimension"))?;
            if d >= dims {
                return Err(bad(n, "posting dimension out of range"));
            }
            for id in rest.split(' ') {
                stored[d].push(id.parse().map_err(|_| bad(n, "bad accession"))?);
            }
        }
        if stored != index.postings {
            return Err(bad(0, "postings inconsistent with vectors"));
        }
        Ok(index)
    }
}
