//! Run configuration (flat `key = value` file) and the [`Engine`] that
//! loads every resource the pipeline needs.
//!
//! Recognized keys: `store_dir`, `general_ontology`, `domain_ontology`,
//! `culture_graph`, `vectors`, `ladder` (optional, bundled default
//! otherwise), `weights` (optional, `skills=2,domain=2,culture=2,required=2`
//! otherwise). Relative paths resolve against the config file's directory.
//! The `SKILLMATCH_CONFIG` environment variable supplies the config path
//! when the command line does not.

use std::fs;
use std::path::{Path, PathBuf};

use crate::culture::CultureGraph;
use crate::docstore::{DocKind, DocStore, Document};
use crate::embeddings::VectorStore;
use crate::error::{Error, Result};
use crate::ontology::Ontology;
use crate::screenrank::{
    self, DegreeLadder, InterestWeights, MatchContext, MatchReport, RankedList,
};
use crate::skillgraph::{self, ConceptGraph};
use crate::textkit::TextAnalyzer;

pub const CONFIG_ENV_VAR: &str = "SKILLMATCH_CONFIG";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub store_dir: PathBuf,
    pub general_ontology_path: PathBuf,
    pub domain_ontology_path: PathBuf,
    pub culture_graph_path: PathBuf,
    pub vectors_path: PathBuf,
    /// Bundled equivalence table when absent.
    pub ladder_path: Option<PathBuf>,
    pub default_weights: InterestWeights,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_str_at(&content, path)
    }

    /// Parse config text; relative paths resolve against `path`'s parent.
    pub fn from_str_at(content: &str, path: &Path) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new("."));
        let mut store_dir = None;
        let mut general = None;
        let mut domain = None;
        let mut culture = None;
        let mut vectors = None;
        let mut ladder = None;
        let mut weights = None;
        for (idx, line) in content.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse(path, idx + 1, "expected `key = value`")
            })?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(Error::parse(path, idx + 1, format!("empty value for `{key}`")));
            }
            let resolve = |v: &str| -> PathBuf {
                let p = PathBuf::from(v);
                if p.is_absolute() {
                    p
                } else {
                    base.join(p)
                }
            };
            match key {
                "store_dir" => store_dir = Some(resolve(value)),
                "general_ontology" => general = Some(resolve(value)),
                "domain_ontology" => domain = Some(resolve(value)),
                "culture_graph" => culture = Some(resolve(value)),
                "vectors" => vectors = Some(resolve(value)),
                "ladder" => ladder = Some(resolve(value)),
                "weights" => weights = Some(InterestWeights::parse(value)?),
                other => {
                    return Err(Error::parse(path, idx + 1, format!("unknown key `{other}`")))
                }
            }
        }
        let require = |opt: Option<PathBuf>, key: &str| -> Result<PathBuf> {
            opt.ok_or_else(|| Error::Config(format!("missing required key `{key}` in {}", path.display())))
        };
        Ok(RunConfig {
            store_dir: require(store_dir, "store_dir")?,
            general_ontology_path: require(general, "general_ontology")?,
            domain_ontology_path: require(domain, "domain_ontology")?,
            culture_graph_path: require(culture, "culture_graph")?,
            vectors_path: require(vectors, "vectors")?,
            ladder_path: ladder,
            default_weights: weights
                .unwrap_or(InterestWeights {
                    skills: 2,
                    domain_skills: 2,
                    culture: 2,
                    required_skills: 2,
                }),
        })
    }

    /// Every referenced file must exist before a command starts.
    pub fn check_files(&self) -> Result<()> {
        let mut files = vec![
            &self.general_ontology_path,
            &self.domain_ontology_path,
            &self.culture_graph_path,
            &self.vectors_path,
        ];
        if let Some(l) = &self.ladder_path {
            files.push(l);
        }
        for f in files {
            if !f.is_file() {
                return Err(Error::Config(format!(
                    "referenced file does not exist: {}",
                    f.display()
                )));
            }
        }
        Ok(())
    }
}

/// Which ontology an extraction runs against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OntologyRole {
    General,
    Domain,
}

/// Per-file ingestion outcome.
#[derive(Debug, Clone, Default)]
pub struct IngestSummary {
    pub stored: Vec<(PathBuf, String)>,
    pub failures: Vec<(PathBuf, String)>,
}

/// All loaded resources behind one handle; what the CLI and the C ABI
/// drive.
pub struct Engine {
    store: DocStore,
    general: Ontology,
    domain: Ontology,
    vectors: VectorStore,
    culture: CultureGraph,
    ladder: DegreeLadder,
    analyzer: TextAnalyzer,
    default_weights: InterestWeights,
}

impl Engine {
    pub fn from_config(config: &RunConfig) -> Result<Self> {
        config.check_files()?;
        let store = DocStore::open(&config.store_dir)?;
        let general = Ontology::load(&config.general_ontology_path)?;
        let domain = Ontology::load(&config.domain_ontology_path)?;
        let vectors = VectorStore::load(&config.vectors_path)?;
        let culture = CultureGraph::load(&config.culture_graph_path)?;
        let ladder = match &config.ladder_path {
            Some(p) => DegreeLadder::load(p)?,
            None => DegreeLadder::default(),
        };
        Ok(Engine {
            store,
            general,
            domain,
            vectors,
            culture,
            ladder,
            analyzer: TextAnalyzer::default(),
            default_weights: config.default_weights,
        })
    }

    pub fn store(&self) -> &DocStore {
        &self.store
    }

    pub fn default_weights(&self) -> InterestWeights {
        self.default_weights
    }

    pub fn context(&self) -> MatchContext<'_> {
        MatchContext {
            general: &self.general,
            domain: &self.domain,
            vectors: &self.vectors,
            culture: &self.culture,
            ladder: &self.ladder,
            analyzer: &self.analyzer,
            cost_model: Default::default(),
        }
    }

    /// Ingest one JSON file or every `*.json` in a directory (sorted, so
    /// summaries are stable). Re-ingesting an identical document is a
    /// no-op success; a duplicate id with different content is a failure
    /// unless `overwrite` is set.
    pub fn ingest_path(&self, path: &Path, kind: DocKind, overwrite: bool) -> IngestSummary {
        let mut summary = IngestSummary::default();
        let files = match collect_json_files(path) {
            Ok(f) => f,
            Err(e) => {
                summary.failures.push((path.to_path_buf(), e.to_string()));
                return summary;
            }
        };
        for file in files {
            match self.ingest_file(&file, kind, overwrite) {
                Ok(id) => summary.stored.push((file, id)),
                Err(e) => summary.failures.push((file, e.to_string())),
            }
        }
        summary
    }

    fn ingest_file(&self, file: &Path, kind: DocKind, overwrite: bool) -> Result<String> {
        let content = fs::read_to_string(file).map_err(|e| Error::io(file, e))?;
        let doc: Document = serde_json::from_str(&content).map_err(|e| Error::Json {
            path: file.to_path_buf(),
            source: e,
        })?;
        if doc.kind != kind {
            return Err(Error::schema(
                "kind",
                format!("expected {:?} per the ingest command", kind),
            ));
        }
        self.ingest_document(doc, overwrite)
    }

    pub fn ingest_document(&self, mut doc: Document, overwrite: bool) -> Result<String> {
        doc.validate()?;
        if doc.id.is_empty() {
            doc.id = doc.content_hash();
        }
        match self.store.put(doc.clone(), overwrite) {
            Ok(id) => Ok(id),
            Err(Error::DuplicateId(id)) => {
                if self.store.get(&id)? == doc {
                    Ok(id)
                } else {
                    Err(Error::DuplicateId(id))
                }
            }
            Err(e) => Err(e),
        }
    }

    pub fn match_one(
        &self,
        cv_id: &str,
        job_id: &str,
        weights: Option<&InterestWeights>,
        explain: bool,
    ) -> Result<MatchReport> {
        let weights = weights.copied().unwrap_or(self.default_weights);
        screenrank::match_one(&self.store, &self.context(), cv_id, job_id, &weights, explain)
    }

    /// `cv_ids = None` ranks every stored CV.
    pub fn rank(
        &self,
        job_id: &str,
        cv_ids: Option<&[String]>,
        weights: Option<&InterestWeights>,
    ) -> Result<RankedList> {
        let weights = weights.copied().unwrap_or(self.default_weights);
        let ids: Vec<String> = match cv_ids {
            Some(ids) => ids.to_vec(),
            None => self.store.list(Some(DocKind::Cv))?,
        };
        screenrank::match_many(&self.store, &self.context(), &ids, job_id, &weights)
    }

    pub fn extract(&self, text: &str, role: OntologyRole) -> ConceptGraph {
        let ontology = match role {
            OntologyRole::General => &self.general,
            OntologyRole::Domain => &self.domain,
        };
        skillgraph::extract(text, ontology, &self.vectors, &self.analyzer)
    }
}

fn collect_json_files(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(Error::Config(format!(
                "no .json files under {}",
                path.display()
            )));
        }
        return Ok(files);
    }
    Err(Error::Config(format!("unreadable path: {}", path.display())))
}
