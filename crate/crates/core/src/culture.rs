//! The organizational-culture value tree and document profiling.
//!
//! Six value dimensions, each split into two antonym poles; every pole
//! carries descriptors, every descriptor a list of descriptor terms. Only
//! the terms (the leaves) take part in matching: a document is profiled by
//! the cosine between each term's phrase vector and the document's content
//! centroid, averaged per pole, giving a 12-value profile. Two profiles
//! compare by normalized Euclidean distance.
//!
//! The default tree ships in `data/culture_graph.json` and is plain,
//! editable data; the file format is a JSON tree
//! `{dimension: {pole: {descriptor: [terms]}}}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::embeddings::{cosine, VectorStore};
use crate::error::{Error, Result};
use crate::textkit::TextAnalyzer;

/// Dimension names the tree must carry, in canonical order.
pub const DIMENSIONS: [&str; 6] = [
    "Power Distance",
    "Individualism",
    "Uncertainty Avoidance",
    "Masculinity & Femininity",
    "Long Term Orientation",
    "Indulgence Vs Restraint",
];

pub const POLE_COUNT: usize = 12;

const DEFAULT_GRAPH: &str = include_str!("../data/culture_graph.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Descriptor {
    pub name: String,
    pub terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pole {
    pub name: String,
    pub descriptors: Vec<Descriptor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    /// Exactly two antonym poles, file order preserved.
    pub poles: Vec<Pole>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CultureGraph {
    /// The six dimensions in canonical order.
    dimensions: Vec<Dimension>,
}

/// A document's affinity to the 12 poles, each value in [0, 1], pole order
/// fixed by the graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CultureProfile {
    pub pole_values: Vec<f64>,
    /// Fraction of descriptor terms that had an in-vocabulary vector.
    pub coverage: f64,
}

impl CultureGraph {
    pub fn load_default() -> Self {
        // The bundled tree is validated by tests.
        Self::from_json_str(DEFAULT_GRAPH).expect("bundled culture graph is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&content)
    }

    pub fn from_json_str(content: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(content)
            .map_err(|e| Error::Validation(format!("culture graph is not valid JSON: {e}")))?;
        let Value::Object(dims) = root else {
            return Err(Error::Validation(
                "culture graph root must be an object of dimensions".into(),
            ));
        };
        if dims.len() != DIMENSIONS.len() {
            return Err(Error::Validation(format!(
                "expected {} dimensions, found {}",
                DIMENSIONS.len(),
                dims.len()
            )));
        }
        let mut dimensions = Vec::new();
        for canonical in DIMENSIONS {
            let Some(poles_value) = dims.get(canonical) else {
                return Err(Error::Validation(format!(
                    "missing dimension `{canonical}`"
                )));
            };
            let Value::Object(poles) = poles_value else {
                return Err(Error::Validation(format!(
                    "dimension `{canonical}` must map poles to descriptors"
                )));
            };
            if poles.len() != 2 {
                return Err(Error::Validation(format!(
                    "dimension `{canonical}` needs exactly 2 poles, found {}",
                    poles.len()
                )));
            }
            let mut parsed_poles = Vec::new();
            for (pole_name, descs_value) in poles {
                let Value::Object(descs) = descs_value else {
                    return Err(Error::Validation(format!(
                        "pole `{pole_name}` must map descriptors to term lists"
                    )));
                };
                if descs.is_empty() {
                    return Err(Error::Validation(format!(
                        "pole `{pole_name}` has no descriptors"
                    )));
                }
                let mut descriptors = Vec::new();
                for (desc_name, terms_value) in descs {
                    let Value::Array(raw_terms) = terms_value else {
                        return Err(Error::Validation(format!(
                            "descriptor `{desc_name}` must hold an array of terms"
                        )));
                    };
                    let mut terms = Vec::new();
                    for t in raw_terms {
                        match t.as_str() {
                            Some(s) if !s.trim().is_empty() => {
                                terms.push(s.trim().to_lowercase())
                            }
                            _ => {
                                return Err(Error::Validation(format!(
                                    "descriptor `{desc_name}` has a non-string or empty term"
                                )))
                            }
                        }
                    }
                    if terms.is_empty() {
                        return Err(Error::Validation(format!(
                            "descriptor `{desc_name}` has no terms"
                        )));
                    }
                    descriptors.push(Descriptor {
                        name: desc_name.clone(),
                        terms,
                    });
                }
                parsed_poles.push(Pole {
                    name: pole_name.clone(),
                    descriptors,
                });
            }
            dimensions.push(Dimension {
                name: canonical.to_string(),
                poles: parsed_poles,
            });
        }

        // The tree property: no term belongs to two poles.
        let mut seen: std::collections::HashMap<&str, &str> = std::collections::HashMap::new();
        for dim in &dimensions {
            for pole in &dim.poles {
                for desc in &pole.descriptors {
                    for term in &desc.terms {
                        if let Some(prev) = seen.insert(term.as_str(), pole.name.as_str()) {
                            if prev != pole.name {
                                return Err(Error::Validation(format!(
                                    "term `{term}` is shared by poles `{prev}` and `{}`",
                                    pole.name
                                )));
                            }
                        }
                    }
                }
            }
        }

        Ok(CultureGraph { dimensions })
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dimensions
    }

    /// The 12 pole names in profile order.
    pub fn pole_names(&self) -> Vec<&str> {
        self.dimensions
            .iter()
            .flat_map(|d| d.poles.iter().map(|p| p.name.as_str()))
            .collect()
    }

    fn poles(&self) -> impl Iterator<Item = &Pole> {
        self.dimensions.iter().flat_map(|d| d.poles.iter())
    }

    fn term_count(&self) -> usize {
        self.poles()
            .flat_map(|p| p.descriptors.iter())
            .map(|d| d.terms.len())
            .sum()
    }
}

/// Profile a text onto the 12 poles.
///
/// The text vector is the centroid of the distinct content words (so the
/// profile depends only on the set of words, not their order or count).
/// Per descriptor term, the clamped-to-[0,1] cosine against the text
/// vector; each pole averages over its in-vocabulary terms, a pole with
/// none scores 0.
pub fn profile(
    text: &str,
    graph: &CultureGraph,
    vectors: &VectorStore,
    analyzer: &TextAnalyzer,
) -> Result<CultureProfile> {
    let ts = analyzer.tokenize(text);
    let mut words: Vec<&str> = ts.content_words();
    words.sort_unstable();
    words.dedup();
    if words.is_empty() {
        return Err(Error::Validation(
            "text is empty after stop-word removal".into(),
        ));
    }
    let centroid = vectors.centroid(&words)?;
    if centroid.degenerate {
        return Err(Error::Validation(
            "text centroid is degenerate (zero vector)".into(),
        ));
    }

    let mut pole_values = Vec::with_capacity(POLE_COUNT);
    let mut in_vocab_terms = 0usize;
    for pole in graph.poles() {
        let mut sum = 0.0;
        let mut counted = 0usize;
        for desc in &pole.descriptors {
            for term in &desc.terms {
                let Ok(term_vec) = vectors.phrase_vector(term) else {
                    continue;
                };
                let Ok(sim) = cosine(&term_vec.vector, &centroid.vector) else {
                    continue;
                };
                sum += sim.clamp(0.0, 1.0);
                counted += 1;
            }
        }
        in_vocab_terms += counted;
        pole_values.push(if counted == 0 { 0.0 } else { sum / counted as f64 });
    }
    let coverage = in_vocab_terms as f64 / graph.term_count() as f64;
    Ok(CultureProfile {
        pole_values,
        coverage,
    })
}

/// Similarity of two profiles: `1 - d / sqrt(12)` with `d` the Euclidean
/// distance, the maximum distance over the clamped unit hypercube.
pub fn culture_match(p1: &CultureProfile, p2: &CultureProfile) -> Result<f64> {
    if p1.pole_values.len() != POLE_COUNT || p2.pole_values.len() != POLE_COUNT {
        return Err(Error::Validation(format!(
            "culture profiles must have exactly {POLE_COUNT} values"
        )));
    }
    let d: f64 = p1
        .pole_values
        .iter()
        .zip(&p2.pole_values)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok((1.0 - d / (POLE_COUNT as f64).sqrt()).clamp(0.0, 1.0))
}
