//! Filesystem store for parsed CVs and job posts.
//!
//! One JSON file per document under `store/{cv,job_post}/<id>.json`;
//! writes go through a temp file and an atomic rename. IDs are caller
//! supplied or default to a hex digest of the canonicalized content, so
//! re-ingesting the same file is idempotent.
//!
//! Single-writer, multi-reader: nothing here holds state between calls.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocKind {
    Cv,
    JobPost,
}

impl DocKind {
    pub fn dir_name(self) -> &'static str {
        match self {
            DocKind::Cv => "cv",
            DocKind::JobPost => "job_post",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EducationEntry {
    /// The degree as written ("MSc", "BAC+5", ...).
    pub degree_raw: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub institution: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    /// Unique within a store; empty means "assign a content hash on put".
    #[serde(default)]
    pub id: String,
    pub kind: DocKind,
    /// Section name -> free text ("experience", "skills", "summary", ...).
    #[serde(default)]
    pub sections: BTreeMap<String, String>,
    #[serde(default)]
    pub education: Vec<EducationEntry>,
    /// Job posts only; must be empty on CVs.
    #[serde(default)]
    pub required_skills: Vec<String>,
    #[serde(default = "default_language")]
    pub language: String,
}

fn default_language() -> String {
    "en".to_string()
}

impl Document {
    pub fn new(id: impl Into<String>, kind: DocKind) -> Self {
        Document {
            id: id.into(),
            kind,
            sections: BTreeMap::new(),
            education: Vec::new(),
            required_skills: Vec::new(),
            language: default_language(),
        }
    }

    pub fn with_section(mut self, name: impl Into<String>, text: impl Into<String>) -> Self {
        self.sections.insert(name.into(), text.into());
        self
    }

    /// All section texts joined in section-name order.
    pub fn full_text(&self) -> String {
        self.sections
            .values()
            .map(String::as_str)
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Field-level schema validation (id character set, kind/required-skill
    /// coupling, education entries).
    pub fn validate(&self) -> Result<()> {
        if !self.id.is_empty() && !valid_id(&self.id) {
            return Err(Error::schema(
                "id",
                "must contain only [A-Za-z0-9._-] characters",
            ));
        }
        if self.kind == DocKind::Cv && !self.required_skills.is_empty() {
            return Err(Error::schema(
                "required_skills",
                "must be empty for kind=cv",
            ));
        }
        for (i, entry) in self.education.iter().enumerate() {
            if entry.degree_raw.trim().is_empty() {
                return Err(Error::schema(
                    format!("education[{i}].degree_raw"),
                    "must be nonempty",
                ));
            }
        }
        for name in self.sections.keys() {
            if name.trim().is_empty() {
                return Err(Error::schema("sections", "section names must be nonempty"));
            }
        }
        if self.language.trim().is_empty() {
            return Err(Error::schema("language", "must be nonempty"));
        }
        Ok(())
    }

    /// Hex digest of the canonical JSON content with the id field blanked;
    /// what `put` assigns when the caller supplies no id.
    pub fn content_hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.id = String::new();
        let bytes = serde_json::to_vec(&canonical).expect("document serializes");
        let digest = Sha256::digest(&bytes);
        hex::encode(&digest[..8])
    }
}

fn valid_id(id: &str) -> bool {
    id.chars()
        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'))
}

/// Directory-backed document store.
#[derive(Debug, Clone)]
pub struct DocStore {
    root: PathBuf,
}

impl DocStore {
    /// Open (creating directories as needed) a store rooted at `root`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        for kind in [DocKind::Cv, DocKind::JobPost] {
            let dir = root.join(kind.dir_name());
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
        Ok(DocStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path_for(&self, kind: DocKind, id: &str) -> PathBuf {
        self.root.join(kind.dir_name()).join(format!("{id}.json"))
    }

    fn find(&self, id: &str) -> Option<(DocKind, PathBuf)> {
        [DocKind::Cv, DocKind::JobPost]
            .into_iter()
            .map(|k| (k, self.path_for(k, id)))
            .find(|(_, p)| p.exists())
    }

    /// Validate and persist; returns the stored id (assigned from the
    /// content hash when the document carries none). Duplicate ids are
    /// rejected unless `overwrite` is set.
    pub fn put(&self, mut doc: Document, overwrite: bool) -> Result<String> {
        doc.validate()?;
        if doc.id.is_empty() {
            doc.id = doc.content_hash();
        }
        if let Some((existing_kind, existing_path)) = self.find(&doc.id) {
            if !overwrite {
                return Err(Error::DuplicateId(doc.id));
            }
            if existing_kind != doc.kind {
                fs::remove_file(&existing_path).map_err(|e| Error::io(&existing_path, e))?;
            }
        }
        let path = self.path_for(doc.kind, &doc.id);
        let json = serde_json::to_string_pretty(&doc).expect("document serializes");
        // Write-then-rename keeps a half-written file from ever being
        // visible under the final name.
        let tmp = path.with_extension("json.tmp");
        {
            let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
            f.write_all(json.as_bytes()).map_err(|e| Error::io(&tmp, e))?;
            f.write_all(b"\n").map_err(|e| Error::io(&tmp, e))?;
            f.sync_all().map_err(|e| Error::io(&tmp, e))?;
        }
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(doc.id)
    }

    pub fn get(&self, id: &str) -> Result<Document> {
        let (_, path) = self.find(id).ok_or_else(|| Error::NotFound(id.to_string()))?;
        let content = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let doc: Document = serde_json::from_str(&content).map_err(|e| Error::Json {
            path: path.clone(),
            source: e,
        })?;
        Ok(doc)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.find(id).is_some()
    }

    /// Ids of stored documents, lexicographically sorted; optionally
    /// restricted to one kind.
    pub fn list(&self, kind: Option<DocKind>) -> Result<Vec<String>> {
        let kinds = match kind {
            Some(k) => vec![k],
            None => vec![DocKind::Cv, DocKind::JobPost],
        };
        let mut ids = Vec::new();
        for k in kinds {
            let dir = self.root.join(k.dir_name());
            let entries = fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))?;
            for entry in entries {
                let entry = entry.map_err(|e| Error::io(&dir, e))?;
                let name = entry.file_name();
                let name = name.to_string_lossy();
                if let Some(stem) = name.strip_suffix(".json") {
                    ids.push(stem.to_string());
                }
            }
        }
        ids.sort();
        Ok(ids)
    }
}
