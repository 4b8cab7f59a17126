//! Concept-graph extraction from document text against an ontology.
//!
//! Two extraction paths feed one graph:
//!
//! - the *syntactic* path matches stop-word-free 1..3-grams to ontology
//!   labels by normalized edit similarity at the 0.94 threshold;
//! - the *semantic* path decomposes noun-phrase chunks into n-grams,
//!   pulls each gram's top-10 embedding neighbors, and fuzzily matches
//!   the neighbor words back to ontology labels.
//!
//! Candidates from both paths pool their counts, are ranked by frequency
//! x diversity (direct label hits outrank everything), cut at the elbow
//! of the score curve, and finally expanded with the direct super-topics
//! of every surviving concept.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::embeddings::VectorStore;
use crate::ontology::{Ontology, RelationKind};
use crate::textkit::{chunk_noun_phrases, ngrams, TextAnalyzer, TokenStream};

/// Label-similarity floor shared by the syntactic path and the semantic
/// path's neighbor-to-label matching.
pub const LABEL_SIMILARITY_THRESHOLD: f64 = 0.94;

/// Embedding neighbors consulted per n-gram in the semantic path.
pub const SEMANTIC_TOP_K: usize = 10;

/// How a node ended up in the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeOrigin {
    /// Found by both paths: a direct label hit that the embeddings agree on.
    Direct,
    /// Direct label hit from the syntactic path only.
    Syntactic,
    /// Inferred through embedding neighbors only.
    Semantic,
    /// Added as a direct super-topic of a selected concept.
    Expanded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    pub relevance: f64,
    pub origin: NodeOrigin,
}

/// Undirected edge between two included concepts, labeled by the ontology
/// relation that induced it. Endpoints are stored in sorted order.
pub type GraphEdge = (String, String, RelationKind);

/// Extracted subgraph of an ontology for one piece of text.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConceptGraph {
    nodes: BTreeMap<String, GraphNode>,
    edges: BTreeSet<GraphEdge>,
}

impl ConceptGraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn node(&self, id: &str) -> Option<&GraphNode> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.values()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(String::as_str)
    }

    pub fn edges(&self) -> impl Iterator<Item = &GraphEdge> {
        self.edges.iter()
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        self.edges
            .iter()
            .any(|(ea, eb, _)| ea == x && eb == y)
    }

    /// Union of two extractions: relevance takes the max, origins keep the
    /// strongest claim (direct > syntactic > semantic > expanded), edges
    /// union.
    pub fn union(&self, other: &ConceptGraph) -> ConceptGraph {
        let mut nodes = self.nodes.clone();
        for (id, node) in &other.nodes {
            nodes
                .entry(id.clone())
                .and_modify(|n| {
                    n.relevance = n.relevance.max(node.relevance);
                    n.origin = n.origin.min(node.origin);
                })
                .or_insert_with(|| node.clone());
        }
        let edges = self.edges.union(&other.edges).cloned().collect();
        ConceptGraph { nodes, edges }
    }

    /// View for the edit-distance routines: node labels are concept ids,
    /// edge labels the relation kind.
    pub fn to_sim_graph(&self) -> crate::graphsim::SimGraph<String, RelationKind> {
        let labels: Vec<String> = self.nodes.keys().cloned().collect();
        let index: BTreeMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|(a, b, rel)| (index[a.as_str()], index[b.as_str()], *rel))
            .collect();
        crate::graphsim::SimGraph::new(labels, edges)
    }
}

/// A concept hit by at least one extraction path, keyed by the canonical
/// representative of its equivalence class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateConcept {
    pub concept_id: String,
    /// Times any gram identified this concept (occurrences, not distinct).
    pub frequency: u32,
    /// Distinct source n-grams that led here.
    pub sources: BTreeSet<String>,
    /// Found by the syntactic path (exact or fuzzy label hit).
    pub direct: bool,
    /// Found by the semantic path.
    pub semantic: bool,
    /// Semantic provenance: source gram -> neighbor words that matched.
    pub neighbors: BTreeMap<String, BTreeSet<String>>,
}

impl CandidateConcept {
    fn new(concept_id: &str) -> Self {
        CandidateConcept {
            concept_id: concept_id.to_string(),
            frequency: 0,
            sources: BTreeSet::new(),
            direct: false,
            semantic: false,
            neighbors: BTreeMap::new(),
        }
    }

    /// Distinct source n-grams.
    pub fn diversity(&self) -> u32 {
        self.sources.len() as u32
    }
}

/// Semantic-path output: candidates plus grams that had no usable vector.
#[derive(Debug, Clone, Default)]
pub struct SemanticExtraction {
    pub candidates: Vec<CandidateConcept>,
    pub oov_grams: Vec<String>,
}

/// Matches stop-word-free 1..3-grams against ontology labels at the 0.94
/// threshold; every hit is a direct candidate.
pub fn syntactic_extract(ts: &TokenStream, ontology: &Ontology) -> Vec<CandidateConcept> {
    let mut acc: BTreeMap<String, CandidateConcept> = BTreeMap::new();
    for gram in ngrams(ts, 3) {
        let mut reps: BTreeSet<&str> = BTreeSet::new();
        for (concept, _) in ontology.find_by_label(&gram.text, LABEL_SIMILARITY_THRESHOLD) {
            reps.insert(ontology.class_rep(&concept.id));
        }
        for rep in reps {
            let cand = acc
                .entry(rep.to_string())
                .or_insert_with(|| CandidateConcept::new(rep));
            cand.frequency += 1;
            cand.sources.insert(gram.text.clone());
            cand.direct = true;
        }
    }
    acc.into_values().collect()
}

/// Infers concepts the text never names: noun chunks are decomposed into
/// n-grams, each gram's top-10 embedding neighbors are fuzzily matched to
/// ontology labels.
pub fn semantic_extract(
    ts: &TokenStream,
    ontology: &Ontology,
    vectors: &VectorStore,
    analyzer: &TextAnalyzer,
) -> SemanticExtraction {
    let mut acc: BTreeMap<String, CandidateConcept> = BTreeMap::new();
    let mut oov = Vec::new();
    for chunk in chunk_noun_phrases(ts) {
        let chunk_ts = analyzer.tokenize(&chunk.text);
        for gram in ngrams(&chunk_ts, 3) {
            let words: Vec<&str> = gram.text.split_whitespace().collect();
            let neighbors = if words.len() == 1 && vectors.contains(words[0]) {
                vectors.top_k_word(words[0], SEMANTIC_TOP_K)
            } else {
                vectors
                    .centroid(&words)
                    .and_then(|c| vectors.top_k_vector(&c.vector, SEMANTIC_TOP_K))
            };
            let neighbors = match neighbors {
                Ok(n) => n,
                Err(_) => {
                    oov.push(gram.text.clone());
                    continue;
                }
            };
            for neighbor in &neighbors {
                let mut reps: BTreeSet<&str> = BTreeSet::new();
                for (concept, _) in
                    ontology.find_by_label(&neighbor.word, LABEL_SIMILARITY_THRESHOLD)
                {
                    reps.insert(ontology.class_rep(&concept.id));
                }
                for rep in reps {
                    let cand = acc
                        .entry(rep.to_string())
                        .or_insert_with(|| CandidateConcept::new(rep));
                    cand.frequency += 1;
                    cand.sources.insert(gram.text.clone());
                    cand.semantic = true;
                    cand.neighbors
                        .entry(gram.text.clone())
                        .or_default()
                        .insert(neighbor.word.clone());
                }
            }
        }
    }
    SemanticExtraction {
        candidates: acc.into_values().collect(),
        oov_grams: oov,
    }
}

/// Pool candidates from both paths: frequencies add, source sets union,
/// flags OR. Commutative, so extraction order cannot matter.
pub fn merge_candidates(
    a: Vec<CandidateConcept>,
    b: Vec<CandidateConcept>,
) -> Vec<CandidateConcept> {
    let mut acc: BTreeMap<String, CandidateConcept> = BTreeMap::new();
    for cand in a.into_iter().chain(b) {
        match acc.get_mut(&cand.concept_id) {
            None => {
                acc.insert(cand.concept_id.clone(), cand);
            }
            Some(existing) => {
                existing.frequency += cand.frequency;
                existing.sources.extend(cand.sources);
                existing.direct |= cand.direct;
                existing.semantic |= cand.semantic;
                for (gram, words) in cand.neighbors {
                    existing.neighbors.entry(gram).or_default().extend(words);
                }
            }
        }
    }
    acc.into_values().collect()
}

/// Relevance = frequency x diversity; direct hits get one more than the
/// best indirect score so they always lead. Descending, ties by id.
pub fn rank_candidates(cands: &[CandidateConcept]) -> Vec<(String, f64)> {
    let indirect_max = cands
        .iter()
        .filter(|c| !c.direct)
        .map(|c| (c.frequency * c.diversity()) as f64)
        .fold(0.0, f64::max);
    let mut ranked: Vec<(String, f64)> = cands
        .iter()
        .map(|c| {
            let relevance = if c.direct {
                indirect_max + 1.0
            } else {
                (c.frequency * c.diversity()) as f64
            };
            (c.concept_id.clone(), relevance)
        })
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

/// Cut the descending score curve at the elbow: the point with maximum
/// perpendicular distance to the chord between the first and last points,
/// kept inclusively. Fewer than 3 points, or a curve with no bend, keeps
/// everything.
pub fn select_concepts(ranked: &[(String, f64)]) -> Vec<(String, f64)> {
    if ranked.len() < 3 {
        return ranked.to_vec();
    }
    let elbow = elbow_index(&ranked.iter().map(|(_, r)| *r).collect::<Vec<_>>());
    match elbow {
        Some(i) => ranked[..=i].to_vec(),
        None => ranked.to_vec(),
    }
}

/// Index of maximum perpendicular distance to the first-to-last chord;
/// `None` when every distance is (numerically) zero. First index wins ties.
fn elbow_index(ys: &[f64]) -> Option<usize> {
    let n = ys.len();
    let (x1, y1) = (0.0, ys[0]);
    let (x2, y2) = ((n - 1) as f64, ys[n - 1]);
    let len = ((x2 - x1).powi(2) + (y2 - y1).powi(2)).sqrt();
    let mut best: Option<(usize, f64)> = None;
    for (i, &y) in ys.iter().enumerate() {
        let x = i as f64;
        let num = ((y2 - y1) * x - (x2 - x1) * y + x2 * y1 - y2 * x1).abs();
        let d = num / len;
        if best.map_or(true, |(_, bd)| d > bd + 1e-12) {
            best = Some((i, d));
        }
    }
    match best {
        Some((_, d)) if d <= 1e-12 => None,
        Some((i, _)) => Some(i),
        None => None,
    }
}

/// One selected concept with the metadata the graph needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedConcept {
    pub id: String,
    pub relevance: f64,
    pub origin: NodeOrigin,
}

/// Build the final graph: selected concepts plus their direct super-topics
/// (relevance = best child), edges drawn from every ontology relation
/// between included nodes.
pub fn build_graph(selected: &[SelectedConcept], ontology: &Ontology) -> ConceptGraph {
    let mut nodes: BTreeMap<String, GraphNode> = BTreeMap::new();
    for sel in selected {
        nodes.insert(
            sel.id.clone(),
            GraphNode {
                id: sel.id.clone(),
                relevance: sel.relevance,
                origin: sel.origin,
            },
        );
    }
    for sel in selected {
        // Parents of any equivalence-class member count as parents of the
        // selected concept.
        let members: Vec<String> = ontology.class_of(&sel.id).to_vec();
        for member in &members {
            for parent in ontology.direct_parents(member) {
                let rep = ontology.class_rep(parent).to_string();
                nodes
                    .entry(rep.clone())
                    .and_modify(|n| {
                        if n.origin == NodeOrigin::Expanded {
                            n.relevance = n.relevance.max(sel.relevance);
                        }
                    })
                    .or_insert_with(|| GraphNode {
                        id: rep.clone(),
                        relevance: sel.relevance,
                        origin: NodeOrigin::Expanded,
                    });
            }
        }
    }

    let mut edges = BTreeSet::new();
    for (src, rel, dst) in ontology.edges() {
        let (a, b) = (ontology.class_rep(src), ontology.class_rep(dst));
        if a != b && nodes.contains_key(a) && nodes.contains_key(b) {
            let (x, y) = if a <= b { (a, b) } else { (b, a) };
            edges.insert((x.to_string(), y.to_string(), *rel));
        }
    }
    ConceptGraph { nodes, edges }
}

/// Extraction diagnostics kept for audits: which grams and neighbor words
/// produced each node.
#[derive(Debug, Clone, Default)]
pub struct ExtractionTrace {
    pub candidates: Vec<CandidateConcept>,
    pub ranked: Vec<(String, f64)>,
    pub selected: Vec<(String, f64)>,
    pub oov_grams: Vec<String>,
}

/// Full pipeline for one piece of text. Deterministic in all inputs.
pub fn extract(
    text: &str,
    ontology: &Ontology,
    vectors: &VectorStore,
    analyzer: &TextAnalyzer,
) -> ConceptGraph {
    extract_with_trace(text, ontology, vectors, analyzer).0
}

pub fn extract_with_trace(
    text: &str,
    ontology: &Ontology,
    vectors: &VectorStore,
    analyzer: &TextAnalyzer,
) -> (ConceptGraph, ExtractionTrace) {
    let ts = analyzer.tokenize(text);
    let syntactic = syntactic_extract(&ts, ontology);
    let semantic = semantic_extract(&ts, ontology, vectors, analyzer);
    let oov_grams = semantic.oov_grams;
    let merged = merge_candidates(syntactic, semantic.candidates);
    let ranked = rank_candidates(&merged);
    let selected = select_concepts(&ranked);

    let by_id: BTreeMap<&str, &CandidateConcept> = merged
        .iter()
        .map(|c| (c.concept_id.as_str(), c))
        .collect();
    let selected_concepts: Vec<SelectedConcept> = selected
        .iter()
        .map(|(id, relevance)| {
            let cand = by_id[id.as_str()];
            let origin = match (cand.direct, cand.semantic) {
                (true, true) => NodeOrigin::Direct,
                (true, false) => NodeOrigin::Syntactic,
                (false, _) => NodeOrigin::Semantic,
            };
            SelectedConcept {
                id: id.clone(),
                relevance: *relevance,
                origin,
            }
        })
        .collect();
    let graph = build_graph(&selected_concepts, ontology);
    (
        graph,
        ExtractionTrace {
            candidates: merged,
            ranked,
            selected,
            oov_grams,
        },
    )
}

/// Extract each named section independently and union the results; the
/// per-axis graphs.
pub fn extract_sections(
    sections: &BTreeMap<String, String>,
    names: &[&str],
    ontology: &Ontology,
    vectors: &VectorStore,
    analyzer: &TextAnalyzer,
) -> ConceptGraph {
    let mut graph = ConceptGraph::default();
    for name in names {
        if let Some(text) = sections.get(*name) {
            graph = graph.union(&extract(text, ontology, vectors, analyzer));
        }
    }
    graph
}
