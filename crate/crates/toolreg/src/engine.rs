//! Shared retrieval state: thesaurus, ontologies, the current phrase index
//! and the helpers derived from them.
//!
//! The index is an immutable snapshot behind an `Arc`. Readers clone the
//! pointer and never block writers; a write builds a successor snapshot and
//! publishes it with a single pointer swap.

use std::sync::{Arc, Mutex, RwLock};

use toolreg_core::data;
use toolreg_core::ingest::{FunderRegistry, IcTable, PublicationRecord};
use toolreg_core::ir::{
    build_index, document_text, search, search_all, Highlighter, IndexError, PhraseIndex, QueryPlan, SearchConfig,
    SearchError, SearchHit, SearchPage, Suggester, TermLabels,
};
use toolreg_core::thesaurus::{build_thesaurus, load_ontology, OntologyGraph, ThesaurusConfig};
use toolreg_core::{Thesaurus, ToolRecord};

use crate::config::Config;
use crate::formats::{self, FormatError};

/// The shipped domain, function and format ontologies.
pub fn builtin_ontologies() -> Vec<OntologyGraph> {
    [data::DOMAINS, data::FUNCTIONS, data::FORMATS]
        .into_iter()
        .map(|t| load_ontology(t).expect("shipped ontologies parse"))
        .collect()
}

/// Static inputs loaded once at startup.
pub struct Resources {
    pub thesaurus: Thesaurus,
    pub ontologies: Vec<OntologyGraph>,
    pub highlight_ontology: OntologyGraph,
    pub ic_table: IcTable,
    pub funders: FunderRegistry,
    pub labels: TermLabels,
}

impl Resources {
    pub fn new(thesaurus: Thesaurus, ontologies: Vec<OntologyGraph>) -> Self {
        let highlight_ontology = ontologies
            .first()
            .cloned()
            .unwrap_or_else(|| load_ontology(data::FUNCTIONS).expect("shipped ontologies parse"));
        let labels = TermLabels::from_ontologies(&ontologies);
        Resources {
            thesaurus,
            ontologies,
            highlight_ontology,
            ic_table: IcTable::builtin(),
            funders: FunderRegistry::builtin(),
            labels,
        }
    }

    /// Loads everything the configuration names. Without a thesaurus
    /// snapshot one is built from the configured publication corpus plus the
    /// text of `records`.
    pub fn load(cfg: &Config, records: &[ToolRecord]) -> Result<Self, FormatError> {
        let p = &cfg.paths;
        let ontologies = if p.ontologies.is_empty() {
            builtin_ontologies()
        } else {
            p.ontologies
                .iter()
                .map(|o| formats::read_ontology(o))
                .collect::<Result<_, _>>()?
        };
        let labels = TermLabels::from_ontologies(&ontologies);
        let thesaurus = match &p.thesaurus {
            Some(path) if path.exists() => formats::read_thesaurus(path)?,
            _ => {
                let publications = match &p.corpus {
                    Some(path) => formats::read_publications(path)?,
                    None => Vec::new(),
                };
                thesaurus_from(&publications, records, &labels, &ontologies, &cfg.thesaurus_config())
            }
        };
        let mut res = Resources::new(thesaurus, ontologies);
        if let Some(path) = &p.highlight_ontology {
            res.highlight_ontology = formats::read_ontology(path)?;
        }
        if let Some(path) = &p.ic_table {
            res.ic_table = formats::read_ic_table(path)?;
        }
        if let Some(path) = &p.funders {
            res.funders = formats::read_funders(path)?;
        }
        Ok(res)
    }
}

/// Thesaurus over publication text and tool documents.
pub fn thesaurus_from(
    publications: &[PublicationRecord],
    records: &[ToolRecord],
    labels: &TermLabels,
    ontologies: &[OntologyGraph],
    config: &ThesaurusConfig,
) -> Thesaurus {
    let texts: Vec<String> = publications
        .iter()
        .map(PublicationRecord::c1_text)
        .chain(records.iter().map(|r| document_text(r, labels)))
        .collect();
    build_thesaurus(texts.iter().map(String::as_str), ontologies, config).thesaurus
}

/// One published view of the searchable catalog.
pub struct Catalog {
    pub resources: Arc<Resources>,
    pub index: PhraseIndex,
    pub suggester: Suggester,
    pub highlighter: Highlighter,
}

pub struct Engine {
    current: RwLock<Arc<Catalog>>,
    writer: Mutex<()>,
    pub search_config: SearchConfig,
}

impl Engine {
    pub fn new(
        resources: Resources,
        records: &[ToolRecord],
        search_config: SearchConfig,
        highlight_url: &str,
    ) -> Result<Self, IndexError> {
        let index = build_index(records, &resources.thesaurus, &resources.labels)?;
        Engine::with_index(resources, index, search_config, highlight_url)
    }

    /// Starts from a prebuilt index, which must match the thesaurus.
    pub fn with_index(
        resources: Resources,
        index: PhraseIndex,
        search_config: SearchConfig,
        highlight_url: &str,
    ) -> Result<Self, IndexError> {
        index.ensure_compatible(&resources.thesaurus)?;
        let suggester = Suggester::new(&resources.thesaurus, &resources.ontologies);
        let highlighter = Highlighter::new(&resources.highlight_ontology, highlight_url);
        Ok(Engine {
            current: RwLock::new(Arc::new(Catalog {
                resources: Arc::new(resources),
                index,
                suggester,
                highlighter,
            })),
            writer: Mutex::new(()),
            search_config,
        })
    }

    pub fn snapshot(&self) -> Arc<Catalog> {
        self.current.read().unwrap_or_else(|p| p.into_inner()).clone()
    }

    fn publish(&self, base: &Catalog, index: PhraseIndex) {
        let next = Arc::new(Catalog {
            resources: base.resources.clone(),
            index,
            suggester: base.suggester.clone(),
            highlighter: base.highlighter.clone(),
        });
        *self.current.write().unwrap_or_else(|p| p.into_inner()) = next;
    }

    /// Adds or replaces one record, keeping the current idf weights.
    pub fn upsert(&self, record: &ToolRecord) -> Result<(), IndexError> {
        let _w = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        let base = self.snapshot();
        let index = base
            .index
            .with_record(record, &base.resources.thesaurus, &base.resources.labels)?;
        self.publish(&base, index);
        Ok(())
    }

    /// Rebuilds the index from scratch and swaps it in.
    pub fn reindex(&self, records: &[ToolRecord]) -> Result<usize, IndexError> {
        let _w = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        let base = self.snapshot();
        let index = build_index(records, &base.resources.thesaurus, &base.resources.labels)?;
        let n = index.len();
        self.publish(&base, index);
        Ok(n)
    }

    pub fn search(&self, plan: &QueryPlan) -> Result<SearchPage, SearchError> {
        let cat = self.snapshot();
        search(&cat.index, &cat.resources.thesaurus, plan, &self.search_config)
    }

    pub fn search_all(&self, plan: &QueryPlan) -> Result<Vec<SearchHit>, SearchError> {
        let cat = self.snapshot();
        search_all(&cat.index, &cat.resources.thesaurus, plan, &self.search_config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use toolreg_core::ir::Stage;
    use toolreg_core::ResourceId;

    fn rec(n: u64, name: &str, desc: &str) -> ToolRecord {
        ToolRecord {
            name: name.into(),
            description: desc.into(),
            accession: ResourceId::new(n),
            ..Default::default()
        }
    }

    fn engine() -> Engine {
        let th = Thesaurus::builder()
            .phrase("read alignment", 3)
            .phrase("variant calling", 2)
            .synonyms("read alignment", "read mapping")
            .build();
        let records = [
            rec(1, "Bowtie", "Fast read alignment."),
            rec(2, "GATK", "Variant calling toolkit."),
        ];
        Engine::new(
            Resources::new(th, builtin_ontologies()),
            &records,
            SearchConfig::default(),
            "x/{id}",
        )
        .unwrap()
    }

    #[test]
    fn upsert_is_visible_to_later_snapshots_only() {
        let e = engine();
        let before = e.snapshot();
        e.upsert(&rec(3, "BWA", "Read mapping for short reads.")).unwrap();
        assert_eq!(before.index.len(), 2);
        let hits = e.search_all(&QueryPlan::query("read alignment")).unwrap();
        let ids: Vec<u64> = hits.iter().map(|h| h.doc_id.number()).collect();
        assert_eq!(ids.len(), 2);
        assert!(ids.contains(&1) && ids.contains(&3));
    }

    #[test]
    fn reindex_keeps_results_for_unchanged_data() {
        let e = engine();
        let plan = QueryPlan::new(vec![Stage::All]);
        let a = e.search(&plan).unwrap();
        let records = [
            rec(1, "Bowtie", "Fast read alignment."),
            rec(2, "GATK", "Variant calling toolkit."),
        ];
        assert_eq!(e.reindex(&records).unwrap(), 2);
        assert_eq!(e.search(&plan).unwrap(), a);
    }

    #[test]
    fn builtin_ontologies_load() {
        let o = builtin_ontologies();
        assert_eq!(o.len(), 3);
        assert!(o.iter().all(|g| !g.is_empty()));
    }
}
