//! Operator configuration: one TOML file plus environment overrides.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use toolreg_core::ir::{ExpansionConfig, SearchConfig, DEFAULT_EPSILON};
use toolreg_core::thesaurus::{PhraseConfig, ThesaurusConfig};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid value for {key}: {message}")]
    Value { key: String, message: String },
    #[error("configured file does not exist: {0}")]
    Missing(PathBuf),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerConfig {
    pub bind: SocketAddr,
    /// Base used for resolvable tool URLs in API responses.
    pub public_base_url: String,
    /// Allowed browser origin; `*` allows any.
    pub cors_origin: Option<String>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            bind: SocketAddr::from(([127, 0, 0, 1], 8080)),
            public_base_url: "http://127.0.0.1:8080".into(),
            cors_origin: None,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub store: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub thesaurus: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub ontologies: Vec<PathBuf>,
    pub highlight_ontology: Option<PathBuf>,
    pub ic_table: Option<PathBuf>,
    pub funders: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub repos: Option<PathBuf>,
    pub labeled_corpus: Option<PathBuf>,
    pub publication_training: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IrConfig {
    pub epsilon: f64,
    pub related_weight: f64,
    /// `{id}` is replaced by the ontology term id.
    pub highlight_url: String,
}

impl Default for IrConfig {
    fn default() -> Self {
        IrConfig {
            epsilon: DEFAULT_EPSILON,
            related_weight: ExpansionConfig::default().related_weight,
            highlight_url: "https://bioportal.bioontology.org/search?q={id}".into(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThesaurusSettings {
    pub min_count: u64,
    pub max_len: usize,
    pub window: usize,
    pub tau: f64,
    pub skip_nested: bool,
}

impl Default for ThesaurusSettings {
    fn default() -> Self {
        let d = ThesaurusConfig::default();
        ThesaurusSettings {
            min_count: d.phrases.min_count,
            max_len: d.phrases.max_len,
            window: d.phrases.window,
            tau: d.tau,
            skip_nested: d.skip_nested,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuthConfig {
    pub admins: Vec<String>,
    pub curators: Vec<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub server: ServerConfig,
    pub paths: PathsConfig,
    pub ir: IrConfig,
    pub thesaurus: ThesaurusSettings,
    pub auth: AuthConfig,
    /// Domain labels for topic classification; empty means the built-in list.
    pub domains: Vec<String>,
}

impl Config {
    /// Parses TOML. Relative paths resolve against `base_dir`.
    pub fn parse(text: &str, origin: &Path, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg: Config = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.resolve_paths(base_dir);
        cfg.check_values()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Config::parse(&text, path, base)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let p = &mut self.paths;
        for opt in [
            &mut p.store,
            &mut p.events,
            &mut p.thesaurus,
            &mut p.index,
            &mut p.highlight_ontology,
            &mut p.ic_table,
            &mut p.funders,
            &mut p.corpus,
            &mut p.repos,
            &mut p.labeled_corpus,
            &mut p.publication_training,
        ] {
            if let Some(path) = opt.as_mut() {
                fix(path);
            }
        }
        p.ontologies.iter_mut().for_each(fix);
    }

    fn check_values(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, message: &str| ConfigError::Value {
            key: key.into(),
            message: message.into(),
        };
        if !(self.ir.epsilon.is_finite() && self.ir.epsilon >= 0.0) {
            return Err(bad("ir.epsilon", "must be a finite non-negative number"));
        }
        if !(self.ir.related_weight.is_finite() && self.ir.related_weight >= 0.0) {
            return Err(bad("ir.related_weight", "must be a finite non-negative number"));
        }
        if !(0.0..=1.0).contains(&self.thesaurus.tau) {
            return Err(bad("thesaurus.tau", "must lie in [0, 1]"));
        }
        if self.thesaurus.max_len == 0 {
            return Err(bad("thesaurus.max_len", "must be at least 1"));
        }
        Ok(())
    }

    /// Applies `TOOLREG_PORT`, `TOOLREG_STORE`, `TOOLREG_EVENTS`,
    /// `TOOLREG_INDEX` and `TOOLREG_THESAURUS`.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(port) = lookup("TOOLREG_PORT") {
            let port: u16 = port.trim().parse().map_err(|_| ConfigError::Value {
                key: "TOOLREG_PORT".into(),
                message: format!("{port:?} is not a port number"),
            })?;
            self.server.bind.set_port(port);
        }
        let slots: [(&str, &mut Option<PathBuf>); 4] = [
            ("TOOLREG_STORE", &mut self.paths.store),
            ("TOOLREG_EVENTS", &mut self.paths.events),
            ("TOOLREG_INDEX", &mut self.paths.index),
            ("TOOLREG_THESAURUS", &mut self.paths.thesaurus),
        ];
        for (var, slot) in slots {
            if let Some(v) = lookup(var).filter(|v| !v.is_empty()) {
                *slot = Some(PathBuf::from(v));
            }
        }
        Ok(())
    }

    pub fn apply_process_env(&mut self) -> Result<(), ConfigError> {
        self.apply_env(|k| std::env::var(k).ok())
    }

    /// Input files that must already exist. Store, event log and index are
    /// outputs and may be created.
    pub fn check_inputs(&self) -> Result<(), ConfigError> {
        let p = &self.paths;
        let inputs = p
            .ontologies
            .iter()
            .chain(p.highlight_ontology.iter())
            .chain(p.ic_table.iter())
            .chain(p.funders.iter())
            .chain(p.corpus.iter())
            .chain(p.repos.iter())
            .chain(p.labeled_corpus.iter())
            .chain(p.publication_training.iter());
        for path in inputs {
            if !path.exists() {
                return Err(ConfigError::Missing(path.clone()));
            }
        }
        Ok(())
    }

    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            epsilon: self.ir.epsilon,
            expansion: ExpansionConfig {
                related_weight: self.ir.related_weight,
            },
        }
    }

    pub fn thesaurus_config(&self) -> ThesaurusConfig {
        let t = &self.thesaurus;
        ThesaurusConfig {
            phrases: PhraseConfig {
                min_count: t.min_count,
                max_len: t.max_len,
                window: t.window,
            },
            tau: t.tau,
            skip_nested: t.skip_nested,
            ..ThesaurusConfig::default()
        }
    }
}
