//! Skill ontologies: labeled concepts joined by equivalence, super-topic,
//! and contributes-to relations.
//!
//! The on-disk format is CSV with two row shapes:
//!
//! ```text
//! concept,<id>,<primary label>[,<alt label>...]
//! <src>,<relation>,<dst>
//! ```
//!
//! where `<relation>` is one of `equivalent`, `super_topic` (child ->
//! parent), `contributes_to`, and `<src>`/`<dst>` are concept ids or,
//! failing that, unambiguous labels. Lines starting with `#` and blank
//! lines are skipped. Labels are lowercase-normalized on load.
//!
//! Both the general technical-skill ontology and corpus-derived domain
//! ontologies use this one type; the matcher takes either.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textkit::lev_similarity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    /// Two topics treated as the same for matching; symmetric under closure.
    Equivalent,
    /// Directed child -> parent ("is a sub-area of").
    SuperTopic,
    /// Research output of one topic feeds another; never used for expansion.
    ContributesTo,
}

impl RelationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::Equivalent => "equivalent",
            RelationKind::SuperTopic => "super_topic",
            RelationKind::ContributesTo => "contributes_to",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "equivalent" => Some(RelationKind::Equivalent),
            "super_topic" => Some(RelationKind::SuperTopic),
            "contributes_to" => Some(RelationKind::ContributesTo),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Concept {
    pub id: String,
    pub primary_label: String,
    pub alt_labels: Vec<String>,
}

impl Concept {
    pub fn new(id: impl Into<String>, primary_label: impl Into<String>) -> Self {
        Concept {
            id: id.into(),
            primary_label: primary_label.into().to_lowercase(),
            alt_labels: Vec::new(),
        }
    }

    pub fn with_alt(mut self, alt: impl Into<String>) -> Self {
        self.alt_labels.push(alt.into().to_lowercase());
        self
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.primary_label.as_str())
            .chain(self.alt_labels.iter().map(String::as_str))
    }
}

pub type Edge = (String, RelationKind, String);

#[derive(Debug, Clone)]
pub struct Ontology {
    concepts: BTreeMap<String, Concept>,
    edges: BTreeSet<Edge>,
    /// child id -> direct super-topic parent ids.
    parents: HashMap<String, BTreeSet<String>>,
    /// concept id -> canonical representative of its equivalence class
    /// (lexicographically smallest member id).
    class_rep: HashMap<String, String>,
    /// canonical representative -> all member ids, sorted.
    class_members: BTreeMap<String, Vec<String>>,
}

impl Ontology {
    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&content, path)
    }

    pub fn from_csv_str(content: &str, path: &Path) -> Result<Self> {
        let mut concepts: BTreeMap<String, Concept> = BTreeMap::new();
        let mut raw_edges: Vec<(usize, String, RelationKind, String)> = Vec::new();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .comment(Some(b'#'))
            .from_reader(content.as_bytes());
        for (idx, record) in reader.records().enumerate() {
            let lineno = idx + 1;
            let record = record.map_err(|e| Error::parse(path, lineno, e.to_string()))?;
            let fields: Vec<&str> = record.iter().map(str::trim).collect();
            if fields.iter().all(|f| f.is_empty()) {
                continue;
            }
            if fields[0] == "concept" {
                if fields.len() < 3 || fields[1].is_empty() || fields[2].is_empty() {
                    return Err(Error::parse(
                        path,
                        lineno,
                        "concept row needs `concept,<id>,<primary label>`",
                    ));
                }
                let mut c = Concept::new(fields[1], fields[2]);
                for alt in &fields[3..] {
                    if !alt.is_empty() {
                        c = c.with_alt(*alt);
                    }
                }
                if concepts.insert(c.id.clone(), c).is_some() {
                    return Err(Error::parse(
                        path,
                        lineno,
                        format!("duplicate concept id `{}`", fields[1]),
                    ));
                }
            } else {
                if fields.len() != 3 {
                    return Err(Error::parse(
                        path,
                        lineno,
                        "relation row needs `src,relation,dst`",
                    ));
                }
                let rel = RelationKind::parse(fields[1]).ok_or_else(|| {
                    Error::parse(path, lineno, format!("unknown relation `{}`", fields[1]))
                })?;
                raw_edges.push((lineno, fields[0].to_string(), rel, fields[2].to_string()));
            }
        }

        // Endpoint resolution: exact id, else unique label.
        let mut by_label: HashMap<String, Vec<String>> = HashMap::new();
        for c in concepts.values() {
            for l in c.labels() {
                by_label.entry(l.to_string()).or_default().push(c.id.clone());
            }
        }
        let resolve = |name: &str, lineno: usize| -> Result<String> {
            if concepts.contains_key(name) {
                return Ok(name.to_string());
            }
            match by_label.get(&name.to_lowercase()).map(Vec::as_slice) {
                Some([id]) => Ok(id.clone()),
                Some(ids) => Err(Error::parse(
                    path,
                    lineno,
                    format!("label `{name}` is ambiguous between {ids:?}"),
                )),
                None => Err(Error::parse(
                    path,
                    lineno,
                    format!("edge endpoint `{name}` matches no concept"),
                )),
            }
        };

        let mut edges = BTreeSet::new();
        for (lineno, src, rel, dst) in raw_edges {
            let src = resolve(&src, lineno)?;
            let dst = resolve(&dst, lineno)?;
            if rel == RelationKind::SuperTopic && src == dst {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("self-loop super_topic edge on `{src}`"),
                ));
            }
            edges.insert((src, rel, dst));
        }

        Self::from_parts(concepts.into_values().collect(), edges)
    }

    /// Assemble and validate an ontology from already-built parts.
    pub fn from_parts(concepts: Vec<Concept>, edges: BTreeSet<Edge>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for mut c in concepts {
            if c.primary_label.is_empty() {
                return Err(Error::Validation(format!(
                    "concept `{}` has an empty primary label",
                    c.id
                )));
            }
            c.primary_label = c.primary_label.to_lowercase();
            for l in &mut c.alt_labels {
                *l = l.to_lowercase();
            }
            if map.insert(c.id.clone(), c).is_some() {
                return Err(Error::Validation("duplicate concept id".into()));
            }
        }
        for (src, rel, dst) in &edges {
            for end in [src, dst] {
                if !map.contains_key(end) {
                    return Err(Error::Validation(format!(
                        "edge endpoint `{end}` matches no concept"
                    )));
                }
            }
            if *rel == RelationKind::SuperTopic && src == dst {
                return Err(Error::Validation(format!(
                    "self-loop super_topic edge on `{src}`"
                )));
            }
        }

        let mut parents: HashMap<String, BTreeSet<String>> = HashMap::new();
        for (src, rel, dst) in &edges {
            if *rel == RelationKind::SuperTopic {
                parents.entry(src.clone()).or_default().insert(dst.clone());
            }
        }
        check_acyclic(&parents)?;

        // Equivalence closure via union-find keyed on concept ids.
        let ids: Vec<String> = map.keys().cloned().collect();
        let index: HashMap<&str, usize> =
            ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let mut uf: Vec<usize> = (0..ids.len()).collect();
        fn find(uf: &mut Vec<usize>, i: usize) -> usize {
            let mut root = i;
            while uf[root] != root {
                root = uf[root];
            }
            let mut cur = i;
            while uf[cur] != root {
                let next = uf[cur];
                uf[cur] = root;
                cur = next;
            }
            root
        }
        for (src, rel, dst) in &edges {
            if *rel == RelationKind::Equivalent {
                let (a, b) = (index[src.as_str()], index[dst.as_str()]);
                let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
                if ra != rb {
                    uf[ra] = rb;
                }
            }
        }
        let mut classes: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for (i, id) in ids.iter().enumerate() {
            classes.entry(find(&mut uf, i)).or_default().push(id.clone());
        }
        let mut class_rep = HashMap::new();
        let mut class_members = BTreeMap::new();
        for (_, mut members) in classes {
            members.sort();
            let rep = members[0].clone();
            for m in &members {
                class_rep.insert(m.clone(), rep.clone());
            }
            class_members.insert(rep, members);
        }

        Ok(Ontology {
            concepts: map,
            edges,
            parents,
            class_rep,
            class_members,
        })
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concept(&self, id: &str) -> Option<&Concept> {
        self.concepts.get(id)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter()
    }

    /// Canonical representative of `id`'s equivalence class (falls back to
    /// `id` itself for unknown ids).
    pub fn class_rep<'a>(&'a self, id: &'a str) -> &'a str {
        self.class_rep.get(id).map(String::as_str).unwrap_or(id)
    }

    /// All ids equivalent to `id`, including itself, sorted.
    pub fn class_of(&self, id: &str) -> &[String] {
        self.class_rep
            .get(id)
            .and_then(|rep| self.class_members.get(rep))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Concepts with any label (primary or alt) at normalized Levenshtein
    /// similarity >= `min_sim` to `label`, expanded over equivalence
    /// classes, highest similarity first, ties by id.
    pub fn find_by_label(&self, label: &str, min_sim: f64) -> Vec<(&Concept, f64)> {
        let query = label.to_lowercase();
        // Best direct similarity per equivalence class.
        let mut class_best: BTreeMap<&str, f64> = BTreeMap::new();
        for c in self.concepts.values() {
            let best = c
                .labels()
                .map(|l| lev_similarity(&query, l))
                .fold(f64::NEG_INFINITY, f64::max);
            if best >= min_sim {
                let rep = self.class_rep(&c.id);
                let e = class_best.entry(rep).or_insert(f64::NEG_INFINITY);
                *e = e.max(best);
            }
        }
        let mut out: Vec<(&Concept, f64)> = Vec::new();
        for (rep, sim) in class_best {
            for m in self.class_members.get(rep).into_iter().flatten() {
                out.push((&self.concepts[m], sim));
            }
        }
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.id.cmp(&b.0.id)));
        out
    }

    /// Ancestors of `id` within `depth` hops along `super_topic`; depth 1
    /// means direct parents only.
    pub fn super_topics(&self, id: &str, depth: usize) -> Result<BTreeSet<&Concept>> {
        if !self.concepts.contains_key(id) {
            return Err(Error::UnknownConcept(id.to_string()));
        }
        assert!(depth >= 1, "depth must be >= 1");
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut frontier: Vec<&str> = vec![id];
        for _ in 0..depth {
            let mut next = Vec::new();
            for node in frontier {
                for p in self.parents.get(node).into_iter().flatten() {
                    if p != id && seen.insert(p) {
                        next.push(p.as_str());
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(seen.into_iter().map(|id| &self.concepts[id]).collect())
    }

    /// Direct super-topic parent ids of `id`, sorted.
    pub fn direct_parents(&self, id: &str) -> Vec<&str> {
        self.parents
            .get(id)
            .map(|s| s.iter().map(String::as_str).collect())
            .unwrap_or_default()
    }

    /// Tab-separated `src relation dst` lines, sorted; a graph-interchange
    /// edge list for visualization tools.
    pub fn export_edge_list(&self) -> String {
        let mut out = String::new();
        for (src, rel, dst) in &self.edges {
            out.push_str(src);
            out.push('\t');
            out.push_str(rel.as_str());
            out.push('\t');
            out.push_str(dst);
            out.push('\n');
        }
        out
    }

    /// Serialize back to the CSV format accepted by [`Ontology::load`].
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in self.concepts.values() {
            out.push_str("concept,");
            out.push_str(&csv_field(&c.id));
            out.push(',');
            out.push_str(&csv_field(&c.primary_label));
            for alt in &c.alt_labels {
                out.push(',');
                out.push_str(&csv_field(alt));
            }
            out.push('\n');
        }
        for (src, rel, dst) in &self.edges {
            out.push_str(&format!(
                "{},{},{}\n",
                csv_field(src),
                rel.as_str(),
                csv_field(dst)
            ));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// DFS cycle check over the super-topic edges; reports one cycle by ids.
fn check_acyclic(parents: &HashMap<String, BTreeSet<String>>) -> Result<()> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: HashMap<&str, Mark> = HashMap::new();
    let mut stack: Vec<&str> = Vec::new();

    fn visit<'a>(
        node: &'a str,
        parents: &'a HashMap<String, BTreeSet<String>>,
        marks: &mut HashMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
    ) -> Result<()> {
        match marks.get(node) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Open) => {
                let start = stack.iter().position(|n| *n == node).unwrap_or(0);
                let mut cycle: Vec<String> =
                    stack[start..].iter().map(|s| s.to_string()).collect();
                cycle.push(node.to_string());
                return Err(Error::SuperTopicCycle(cycle));
            }
            None => {}
        }
        marks.insert(node, Mark::Open);
        stack.push(node);
        for next in parents.get(node).into_iter().flatten() {
            visit(next, parents, marks, stack)?;
        }
        stack.pop();
        marks.insert(node, Mark::Done);
        Ok(())
    }

    let mut roots: Vec<&str> = parents.keys().map(String::as_str).collect();
    roots.sort();
    for node in roots {
        visit(node, parents, &mut marks, &mut stack)?;
    }
    Ok(())
}
