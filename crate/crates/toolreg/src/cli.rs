//! Command-line front end. Data goes to stdout, logs to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use toolreg_core::classify::{evaluate, train_tfidf_baseline, train_topic_model, EvalReport, LabeledCorpus};
use toolreg_core::ingest::{parse_index_dump, DumpFormat, LogisticClassifier, LogisticConfig};
use toolreg_core::ir::{build_index, TermLabels};
use toolreg_core::registry::{validate_record, ValidationReport};
use toolreg_core::thesaurus::{build_thesaurus, OntologyGraph};
use toolreg_core::{Thesaurus, ToolRecord};

use crate::config::Config;
use crate::engine::{builtin_ontologies, thesaurus_from, Engine, Resources};
use crate::events::EventLog;
use crate::formats::{self, FixtureRepoClient};
use crate::pipeline::{self, IngestReport, PipelineContext, TrainingExample};
use crate::service::{self, AppState};
use crate::store::RecordStore;
use crate::synth;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "toolreg", version, about = "Scientific software registry")]
pub struct Cli {
    /// Configuration file (TOML).
    #[arg(long, global = true, env = "TOOLREG_CONFIG")]
    pub config: Option<PathBuf>,
    /// Output format for command results.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify, extract, deduplicate and store publications or index dumps.
    Ingest(IngestArgs),
    /// Build a thesaurus snapshot from a publication corpus and ontologies.
    BuildThesaurus(BuildThesaurusArgs),
    /// Build a phrase index snapshot over stored records.
    BuildIndex(BuildIndexArgs),
    /// Train and evaluate the topic classifier and the TF-IDF baseline.
    ClassifyEval(ClassifyEvalArgs),
    /// Validate records against the metadata table.
    Validate(ValidateArgs),
    /// Run the REST service.
    Serve(ServeArgs),
    /// Write the synthetic paraphrase benchmark.
    SynthBenchmark(SynthBenchmarkArgs),
    /// Write synthetic tool records as JSON lines.
    SynthRecords(SynthRecordsArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Publication corpus (JSON lines).
    #[arg(long, required_unless_present = "dump")]
    pub corpus: Option<PathBuf>,
    /// Repository metadata fixture (JSON lines).
    #[arg(long)]
    pub repos: Option<PathBuf>,
    /// Labeled publications for the tool/non-tool gate (JSON lines).
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Aggregator index dump.
    #[arg(long, requires = "dump_format")]
    pub dump: Option<PathBuf>,
    /// Registered dump format id.
    #[arg(long)]
    pub dump_format: Option<String>,
    /// Record store journal; overrides the configuration.
    #[arg(long)]
    pub store: Option<PathBuf>,
    /// Report what would happen without writing.
    #[arg(long)]
    pub dry_run: bool,
}

#[derive(Debug, Args)]
pub struct BuildThesaurusArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long = "ontology")]
    pub ontologies: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BuildIndexArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Records to index (JSON lines, minted); defaults to the configured store.
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Thesaurus snapshot; defaults to the configured one.
    #[arg(long)]
    pub thesaurus: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyEvalArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// Thesaurus snapshot; built from the training documents when absent.
    #[arg(long)]
    pub thesaurus: Option<PathBuf>,
    /// Ontologies enriching a built thesaurus.
    #[arg(long = "ontology")]
    pub ontologies: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// One JSON record or JSON lines.
    #[arg(long)]
    pub record: PathBuf,
    /// Treat records as unsubmitted drafts that have no accession yet.
    #[arg(long)]
    pub draft: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Configuration file; takes precedence over the global flag.
    #[arg(long = "config", id = "serve_config")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthBenchmarkArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Directory for train.jsonl, test.jsonl and ontology.tsv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthRecordsArgs {
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Command result: a JSON value plus its human-readable rendering.
pub struct Outcome {
    pub json: serde_json::Value,
    pub text: String,
    pub success: bool,
}

impl Outcome {
    fn ok(json: serde_json::Value, text: String) -> Self {
        Outcome {
            json,
            text,
            success: true,
        }
    }

    pub fn emit(&self, format: OutputFormat, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            OutputFormat::Json => writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&self.json).expect("json values serialize")
            ),
            OutputFormat::Text => write!(out, "{}", self.text),
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<Config> {
    let mut cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.apply_process_env()?;
    cfg.check_inputs()?;
    Ok(cfg)
}

fn load_ontologies(paths: &[PathBuf]) -> Result<Vec<OntologyGraph>> {
    if paths.is_empty() {
        return Ok(builtin_ontologies());
    }
    paths.iter().map(|p| Ok(formats::read_ontology(p)?)).collect()
}

pub async fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Ingest(a) => ingest(&load_config(cli.config.as_deref())?, a),
        Command::BuildThesaurus(a) => build_thesaurus_cmd(&load_config(cli.config.as_deref())?, a),
        Command::BuildIndex(a) => build_index_cmd(&load_config(cli.config.as_deref())?, a),
        Command::ClassifyEval(a) => classify_eval(&load_config(cli.config.as_deref())?, a),
        Command::Validate(a) => validate(a),
        Command::Serve(a) => {
            let cfg = load_config(a.config.as_deref().or(cli.config.as_deref()))?;
            serve(cfg).await
        }
        Command::SynthBenchmark(a) => synth_benchmark(a),
        Command::SynthRecords(a) => synth_records(a),
    }
}

fn store_path(cfg: &Config, flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.paths.store.clone())
        .unwrap_or_else(|| PathBuf::from("toolreg-store.jsonl"))
}

fn ingest(cfg: &Config, a: IngestArgs) -> Result<Outcome> {
    let store = RecordStore::open(&store_path(cfg, a.store.as_deref()))?;
    let at = crate::now();
    let mut report = IngestReport::default();
    let mut incoming: Vec<ToolRecord> = Vec::new();
    let mut row_errors = Vec::new();

    if let Some(corpus) = &a.corpus {
        let pubs = formats::read_publications(corpus)?;
        let ontologies = load_ontologies(&cfg.paths.ontologies)?;
        let labels = TermLabels::from_ontologies(&ontologies);
        let thesaurus = match &cfg.paths.thesaurus {
            Some(p) if p.exists() => formats::read_thesaurus(p)?,
            _ => thesaurus_from(&pubs, &[], &labels, &ontologies, &cfg.thesaurus_config()),
        };
        let train_path = a
            .train
            .clone()
            .or_else(|| cfg.paths.publication_training.clone())
            .ok_or_else(|| anyhow!("no labeled publications for the tool classifier; pass --train"))?;
        let examples: Vec<TrainingExample> = formats::read_jsonl(&train_path)?;
        let examples: Vec<_> = examples.into_iter().map(|e| (e.publication, e.is_tool)).collect();
        let classifier = LogisticClassifier::train(thesaurus.clone(), &examples, &LogisticConfig::default())?;
        let topic_model = match &cfg.paths.labeled_corpus {
            Some(p) => Some(train_topic_model(&formats::read_labeled_corpus(p)?, &thesaurus)?),
            None => None,
        };
        let repos = match a.repos.as_ref().or(cfg.paths.repos.as_ref()) {
            Some(p) => FixtureRepoClient::load(p)?,
            None => FixtureRepoClient::default(),
        };
        let ic_table = match &cfg.paths.ic_table {
            Some(p) => formats::read_ic_table(p)?,
            None => toolreg_core::ingest::IcTable::builtin(),
        };
        let funders = match &cfg.paths.funders {
            Some(p) => formats::read_funders(p)?,
            None => toolreg_core::ingest::FunderRegistry::builtin(),
        };
        let mut ctx = PipelineContext::new(&classifier, &repos, &ic_table, &funders);
        ctx.topic_model = topic_model.as_ref();
        ctx.retrieved_at = at;
        incoming.extend(pipeline::prepare_publications(&pubs, &ctx, &mut report)?);
    }
    if let Some(dump) = &a.dump {
        let id = a.dump_format.as_deref().expect("clap requires a format with a dump");
        let format = DumpFormat::by_id(id)?;
        let parsed = parse_index_dump(&formats::read_text(dump)?, &format, at)?;
        report.records_built += parsed.records.len();
        report.needs_curation += parsed.records.iter().filter(|r| r.is_parked()).count();
        row_errors = parsed.errors;
        incoming.extend(parsed.records);
    }
    pipeline::commit(&store, incoming, "ingest", at, a.dry_run, &mut report)?;

    let mut text = String::new();
    for (k, v) in serde_json::to_value(&report)?.as_object().expect("report is an object") {
        text.push_str(&format!("{k:<18} {v}\n"));
    }
    for e in &row_errors {
        text.push_str(&format!("row error at line {}: {}\n", e.line, e.message));
    }
    Ok(Outcome::ok(json!({ "report": report, "row_errors": row_errors }), text))
}

fn build_thesaurus_cmd(cfg: &Config, a: BuildThesaurusArgs) -> Result<Outcome> {
    let pubs = formats::read_publications(&a.corpus)?;
    let ontologies = load_ontologies(&a.ontologies)?;
    let texts: Vec<String> = pubs.iter().map(|p| p.c1_text()).collect();
    let enriched = build_thesaurus(texts.iter().map(String::as_str), &ontologies, &cfg.thesaurus_config());
    for w in &enriched.warnings {
        tracing::warn!("{w}");
    }
    let th = enriched.thesaurus;
    formats::atomic_write(&a.out, th.to_snapshot().as_bytes())?;
    let summary = json!({
        "out": a.out,
        "dimensions": th.len(),
        "version_hash": th.version_hash(),
        "warnings": enriched.warnings,
    });
    let text = format!(
        "wrote {} ({} dimensions, version {})\n",
        a.out.display(),
        th.len(),
        th.version_hash()
    );
    Ok(Outcome::ok(summary, text))
}

fn resolve_thesaurus(cfg: &Config, flag: Option<&Path>) -> Result<Thesaurus> {
    let path = flag
        .map(Path::to_path_buf)
        .or_else(|| cfg.paths.thesaurus.clone())
        .ok_or_else(|| anyhow!("no thesaurus snapshot; pass --thesaurus or configure paths.thesaurus"))?;
    Ok(formats::read_thesaurus(&path)?)
}

fn build_index_cmd(cfg: &Config, a: BuildIndexArgs) -> Result<Outcome> {
    let records = match &a.records {
        Some(p) => formats::read_records(p)?,
        None => RecordStore::open(&store_path(cfg, None))?.list(),
    };
    let thesaurus = resolve_thesaurus(cfg, a.thesaurus.as_deref())?;
    let labels = TermLabels::from_ontologies(&load_ontologies(&cfg.paths.ontologies)?);
    let index = build_index(&records, &thesaurus, &labels)?;
    formats::atomic_write(&a.out, index.to_snapshot().as_bytes())?;
    let text = format!(
        "wrote {} ({} documents, {} dimensions)\n",
        a.out.display(),
        index.len(),
        index.dims()
    );
    Ok(Outcome::ok(
        json!({ "out": a.out, "documents": index.len(), "dimensions": index.dims(), "thesaurus": index.thesaurus_hash() }),
        text,
    ))
}

fn report_table(name: &str, r: &EvalReport) -> String {
    let mut s = format!("{name}: accuracy {:.4} over {} documents\n", r.accuracy, r.total);
    s.push_str(&format!(
        "  {:<24} {:>9} {:>9} {:>8}\n",
        "label", "precision", "recall", "support"
    ));
    for c in &r.per_class {
        s.push_str(&format!(
            "  {:<24} {:>9.4} {:>9.4} {:>8}\n",
            c.label, c.precision, c.recall, c.support
        ));
    }
    s
}

/// Evaluation of both classifiers on one split.
#[derive(Serialize)]
pub struct ComparedReports {
    pub thesaurus_model: EvalReport,
    pub tfidf_baseline: EvalReport,
    pub dimensions: usize,
}

pub fn compare_classifiers(
    train: &LabeledCorpus,
    test: &LabeledCorpus,
    thesaurus: Option<Thesaurus>,
    ontologies: &[OntologyGraph],
    cfg: &Config,
) -> Result<ComparedReports> {
    if !cfg.domains.is_empty() {
        train.check_labels(&cfg.domains)?;
        test.check_labels(&cfg.domains)?;
    }
    let thesaurus = match thesaurus {
        Some(t) => t,
        None => {
            let texts = train.items.iter().map(|d| d.doc_text.as_str());
            build_thesaurus(texts, ontologies, &cfg.thesaurus_config()).thesaurus
        }
    };
    let model = train_topic_model(train, &thesaurus)?;
    let baseline = train_tfidf_baseline(train)?;
    Ok(ComparedReports {
        thesaurus_model: evaluate(&model, test)?,
        tfidf_baseline: evaluate(&baseline, test)?,
        dimensions: thesaurus.len(),
    })
}

fn classify_eval(cfg: &Config, a: ClassifyEvalArgs) -> Result<Outcome> {
    let train = formats::read_labeled_corpus(&a.train)?;
    let test = formats::read_labeled_corpus(&a.test)?;
    let thesaurus = match &a.thesaurus {
        Some(p) => Some(formats::read_thesaurus(p)?),
        None => None,
    };
    let ontologies = load_ontologies(&a.ontologies)?;
    let reports = compare_classifiers(&train, &test, thesaurus, &ontologies, cfg)?;
    let text = format!(
        "{}{}",
        report_table("thesaurus model", &reports.thesaurus_model),
        report_table("tf-idf baseline", &reports.tfidf_baseline)
    );
    Ok(Outcome::ok(serde_json::to_value(&reports)?, text))
}

fn validate(a: ValidateArgs) -> Result<Outcome> {
    let text = formats::read_text(&a.record)?;
    let records: Vec<ToolRecord> = match serde_json::from_str::<ToolRecord>(&text) {
        Ok(r) => vec![r],
        Err(_) => formats::parse_jsonl(&text, &a.record)?,
    };
    if records.is_empty() {
        bail!("{}: no records", a.record.display());
    }
    let vocab = toolreg_core::registry::Vocabularies::builtin();
    let reports: Vec<ValidationReport> = records
        .iter()
        .map(|r| {
            let rep = validate_record(r, &vocab);
            if a.draft {
                rep.without_accession()
            } else {
                rep
            }
        })
        .collect();
    let mut out = String::new();
    for (r, rep) in records.iter().zip(&reports) {
        if rep.is_valid() {
            out.push_str(&format!("{}: valid\n", r.name));
        } else {
            for v in &rep.violations {
                out.push_str(&format!("{}: {} [{:?}] {}\n", r.name, v.field, v.rule, v.detail));
            }
        }
    }
    let success = reports.iter().all(ValidationReport::is_valid);
    Ok(Outcome {
        json: json!({ "valid": success, "reports": reports }),
        text: out,
        success,
    })
}

/// Builds the shared application state described by `cfg`.
pub fn app_state(cfg: &Config) -> Result<AppState> {
    let store = RecordStore::open(&store_path(cfg, None))?;
    let events = match &cfg.paths.events {
        Some(p) => EventLog::open(p).with_context(|| format!("opening event log {}", p.display()))?,
        None => EventLog::in_memory(),
    };
    let records = store.list();
    let resources = Resources::load(cfg, &records)?;
    let search = cfg.search_config();
    let prebuilt = match &cfg.paths.index {
        Some(p) if p.exists() => {
            let idx = formats::read_index(p)?;
            if idx.ensure_compatible(&resources.thesaurus).is_ok() && idx.len() == records.len() {
                Some(idx)
            } else {
                tracing::warn!(path = %p.display(), "index snapshot is stale; rebuilding");
                None
            }
        }
        _ => None,
    };
    let engine = match prebuilt {
        Some(idx) => Engine::with_index(resources, idx, search, &cfg.ir.highlight_url)?,
        None => Engine::new(resources, &records, search, &cfg.ir.highlight_url)?,
    };
    Ok(AppState::new(store, events, engine)
        .with_roles(&cfg.auth.admins, &cfg.auth.curators)
        .with_base_url(&cfg.server.public_base_url))
}

async fn serve(cfg: Config) -> Result<Outcome> {
    let state = Arc::new(app_state(&cfg)?);
    let app = service::router(state.clone(), cfg.server.cors_origin.as_deref());
    let listener = tokio::net::TcpListener::bind(cfg.server.bind)
        .await
        .with_context(|| format!("binding {}", cfg.server.bind))?;
    let addr = listener.local_addr()?;
    tracing::info!(%addr, records = state.store.len(), "serving");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(Outcome::ok(
        json!({ "stopped": addr.to_string() }),
        format!("stopped {addr}\n"),
    ))
}

fn synth_benchmark(a: SynthBenchmarkArgs) -> Result<Outcome> {
    let b = synth::paraphrase_benchmark(a.seed, &synth::BenchmarkShape::default());
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    formats::write_jsonl(&a.out.join("train.jsonl"), &b.train.items)?;
    formats::write_jsonl(&a.out.join("test.jsonl"), &b.test.items)?;
    formats::atomic_write(&a.out.join("ontology.tsv"), synth::paraphrase_ontology_tsv().as_bytes())?;
    Ok(Outcome::ok(
        json!({ "out": a.out, "train": b.train.len(), "test": b.test.len(), "seed": a.seed }),
        format!(
            "wrote {} ({} train, {} test)\n",
            a.out.display(),
            b.train.len(),
            b.test.len()
        ),
    ))
}

fn synth_records(a: SynthRecordsArgs) -> Result<Outcome> {
    let records = synth::synthetic_records(a.count, a.seed);
    formats::write_jsonl(&a.out, &records)?;
    Ok(Outcome::ok(
        json!({ "out": a.out, "records": records.len() }),
        format!("wrote {} records to {}\n", records.len(), a.out.display()),
    ))
}
