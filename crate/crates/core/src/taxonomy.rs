//! Bootstrap a draft domain ontology from a job-post corpus: count
//! stop-word-free 1..3-grams corpus-wide, keep the top candidates,
//! vectorize them, cluster with seeded k-means, and emit one super-topic
//! per cluster. The drafts are meant for human review, not as finished
//! ontologies.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use std::collections::BTreeMap;

use crate::docstore::Document;
use crate::embeddings::VectorStore;
use crate::error::{Error, Result};
use crate::ontology::{Concept, Edge, Ontology, RelationKind};
use crate::textkit::{ngrams, TextAnalyzer};

pub const DEFAULT_TOP_N: usize = 200;
pub const DEFAULT_K: usize = 12;
pub const MAX_ITERATIONS: usize = 100;
pub const CONVERGENCE_EPS: f64 = 1e-9;

/// Corpus-wide n-gram counts, sorted by count descending (ties
/// lexicographic), truncated to the requested size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptCandidateTable {
    pub entries: Vec<(String, u32)>,
    pub corpus_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub centroid: Vec<f64>,
    /// Member n-grams, sorted.
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSet {
    pub k: usize,
    pub clusters: Vec<Cluster>,
    /// Candidates dropped because no token had a vector.
    pub skipped_oov: Vec<String>,
    pub iterations: usize,
    /// Within-cluster sum of squares after each assignment step.
    pub objective_trace: Vec<f64>,
    /// Times an empty cluster had to be repaired by splitting the largest.
    pub repairs: usize,
}

/// Count stop-word-free 1..3-grams over every section of every document
/// and keep the `top_n` most frequent.
pub fn harvest_candidates(
    corpus: &[Document],
    top_n: usize,
    analyzer: &TextAnalyzer,
) -> Result<ConceptCandidateTable> {
    if corpus.is_empty() {
        return Err(Error::Validation("corpus is empty".into()));
    }
    if top_n == 0 {
        return Err(Error::Validation("top_n must be >= 1".into()));
    }
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    for doc in corpus {
        let ts = analyzer.tokenize(&doc.full_text());
        for gram in ngrams(&ts, 3) {
            *counts.entry(gram.text).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<(String, u32)> = counts.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(top_n);
    Ok(ConceptCandidateTable {
        entries,
        corpus_size: corpus.len(),
    })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Seeded k-means over candidate phrase centroids (Euclidean distance).
/// Fully OOV candidates are excluded and reported; empty clusters are
/// repaired by handing them the farthest member of the largest cluster.
pub fn cluster_candidates(
    table: &ConceptCandidateTable,
    vectors: &VectorStore,
    k: usize,
    seed: u64,
) -> Result<ClusterSet> {
    let mut points: Vec<(String, Vec<f64>)> = Vec::new();
    let mut skipped = Vec::new();
    for (gram, _) in &table.entries {
        match vectors.phrase_vector(gram) {
            Ok(c) => points.push((gram.clone(), c.vector)),
            Err(_) => skipped.push(gram.clone()),
        }
    }
    if points.is_empty() {
        return Err(Error::Validation(
            "no candidate has an in-vocabulary vector".into(),
        ));
    }
    if k == 0 || k > points.len() {
        return Err(Error::Validation(format!(
            "k must be in 1..={} (vectorizable candidates), got {k}",
            points.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Vec<f64>> = sample(&mut rng, points.len(), k)
        .iter()
        .map(|i| points[i].1.clone())
        .collect();

    let mut assignment = vec![0usize; points.len()];
    let mut iterations = 0;
    let mut objective_trace = Vec::new();
    let mut repairs = 0usize;
    loop {
        iterations += 1;
        // Assign to the nearest centroid, ties to the lowest index.
        let mut objective = 0.0;
        for (p, slot) in points.iter().zip(assignment.iter_mut()) {
            let (mut best_i, mut best_d) = (0usize, f64::INFINITY);
            for (i, c) in centroids.iter().enumerate() {
                let d = sq_dist(&p.1, c);
                if d < best_d {
                    best_d = d;
                    best_i = i;
                }
            }
            *slot = best_i;
            objective += best_d;
        }
        objective_trace.push(objective);

        let mut sizes = vec![0usize; k];
        for &a in &assignment {
            sizes[a] += 1;
        }
        for empty in 0..k {
            if sizes[empty] > 0 {
                continue;
            }
            repairs += 1;
            let largest = (0..k).max_by_key(|&i| sizes[i]).unwrap();
            let farthest = assignment
                .iter()
                .enumerate()
                .filter(|(_, &a)| a == largest)
                .max_by(|(i, _), (j, _)| {
                    sq_dist(&points[*i].1, &centroids[largest])
                        .total_cmp(&sq_dist(&points[*j].1, &centroids[largest]))
                        .then_with(|| points[*j].0.cmp(&points[*i].0))
                })
                .map(|(i, _)| i)
                .unwrap();
            assignment[farthest] = empty;
            sizes[largest] -= 1;
            sizes[empty] += 1;
        }

        // Recompute centroids as member means.
        let dim = vectors.dim();
        let mut sums = vec![vec![0.0; dim]; k];
        for (p, &a) in points.iter().zip(&assignment) {
            for (s, x) in sums[a].iter_mut().zip(&p.1) {
                *s += x;
            }
        }
        let mut movement = 0.0f64;
        for i in 0..k {
            for s in &mut sums[i] {
                *s /= sizes[i] as f64;
            }
            movement = movement.max(sq_dist(&sums[i], &centroids[i]).sqrt());
        }
        centroids = sums;

        if movement < CONVERGENCE_EPS || iterations >= MAX_ITERATIONS {
            break;
        }
    }

    let mut clusters: Vec<Cluster> = centroids
        .into_iter()
        .map(|centroid| Cluster {
            centroid,
            members: Vec::new(),
        })
        .collect();
    for ((gram, _), &a) in points.iter().zip(&assignment) {
        clusters[a].members.push(gram.clone());
    }
    for c in &mut clusters {
        c.members.sort();
    }
    Ok(ClusterSet {
        k,
        clusters,
        skipped_oov: skipped,
        iterations,
        objective_trace,
        repairs,
    })
}

fn slug(label: &str) -> String {
    let mut out = String::new();
    let mut last_was_sep = true;
    for ch in label.chars() {
        if ch.is_alphanumeric() {
            out.extend(ch.to_lowercase());
            last_was_sep = false;
        } else if !last_was_sep {
            out.push('_');
            last_was_sep = true;
        }
    }
    while out.ends_with('_') {
        out.pop();
    }
    out
}

/// Turn clusters into a loadable draft ontology: per cluster one parent
/// topic labeled like the member closest to the centroid, every member a
/// child via `super_topic`. Singleton clusters collapse to the member
/// itself (no self edge). Parent ids carry a `topic__` prefix so they
/// cannot collide with member ids.
pub fn emit_draft_ontology(cs: &ClusterSet, vectors: &VectorStore) -> Result<Ontology> {
    if cs.clusters.is_empty() {
        return Err(Error::Validation("cluster set is empty".into()));
    }
    let mut concepts: Vec<Concept> = Vec::new();
    let mut edges: std::collections::BTreeSet<Edge> = std::collections::BTreeSet::new();
    for cluster in &cs.clusters {
        if cluster.members.is_empty() {
            continue;
        }
        if cluster.members.len() == 1 {
            let m = &cluster.members[0];
            concepts.push(Concept::new(slug(m), m.clone()));
            continue;
        }
        let label = cluster
            .members
            .iter()
            .min_by(|a, b| {
                let da = vectors
                    .phrase_vector(a)
                    .map(|c| sq_dist(&c.vector, &cluster.centroid))
                    .unwrap_or(f64::INFINITY);
                let db = vectors
                    .phrase_vector(b)
                    .map(|c| sq_dist(&c.vector, &cluster.centroid))
                    .unwrap_or(f64::INFINITY);
                da.total_cmp(&db).then_with(|| a.cmp(b))
            })
            .expect("cluster has members");
        let parent_id = format!("topic__{}", slug(label));
        concepts.push(Concept::new(parent_id.clone(), label.clone()));
        for member in &cluster.members {
            let child_id = slug(member);
            concepts.push(Concept::new(child_id.clone(), member.clone()));
            edges.insert((child_id, RelationKind::SuperTopic, parent_id.clone()));
        }
    }
    Ontology::from_parts(concepts, edges)
}
