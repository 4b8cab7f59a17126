//! Graph-edit-distance similarity between labeled graphs: a Hausdorff
//! matching lower bound, a greedy-assignment upper bound, and a
//! normalization of the upper bound to a [0, 1] match score.
//!
//! Graphs are undirected, with labels on nodes and edges. Node relevance
//! and other metadata play no role here; only the labeled structure does.

/// Undirected labeled graph in the form the edit-distance routines want.
///
/// Nodes are indices into `labels`; parallel edges between the same pair
/// are allowed when their labels differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimGraph<N, E> {
    labels: Vec<N>,
    edges: Vec<(usize, usize, E)>,
}

impl<N, E: Ord> SimGraph<N, E> {
    pub fn new(labels: Vec<N>, mut edges: Vec<(usize, usize, E)>) -> Self {
        let n = labels.len();
        for e in &mut edges {
            assert!(e.0 < n && e.1 < n, "edge endpoint out of range");
            if e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
        }
        edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then_with(|| a.2.cmp(&b.2)));
        edges.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1 && a.2 == b.2);
        SimGraph { labels, edges }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[N] {
        &self.labels
    }

    pub fn edges(&self) -> &[(usize, usize, E)] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Per-operation edit costs. Substitution costs apply only when the two
/// labels differ; identical labels substitute for free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EditCostModel {
    pub node_ins: f64,
    pub node_del: f64,
    pub node_sub: f64,
    pub edge_ins: f64,
    pub edge_del: f64,
    pub edge_sub: f64,
}

impl Default for EditCostModel {
    /// Unit costs: every operation costs 1, substitution 0/1 on label
    /// equality.
    fn default() -> Self {
        EditCostModel {
            node_ins: 1.0,
            node_del: 1.0,
            node_sub: 1.0,
            edge_ins: 1.0,
            edge_del: 1.0,
            edge_sub: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GedResult {
    /// Hausdorff matching bound; never exceeds the exact edit distance.
    pub lower: f64,
    /// Greedy assignment bound; never below the exact edit distance.
    pub upper: f64,
    /// `1 - upper / C` where `C` deletes one graph and inserts the other.
    pub similarity: f64,
}

/// The node mapping the greedy bound committed to.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    /// `(index in g1, index in g2)` substitution pairs.
    pub pairs: Vec<(usize, usize)>,
    pub deleted: Vec<usize>,
    pub inserted: Vec<usize>,
}

fn sub_cost<T: Eq>(a: &T, b: &T, cost: f64) -> f64 {
    if a == b {
        0.0
    } else {
        cost
    }
}

/// Hausdorff matching lower bound.
///
/// Each node (edge) contributes the cheaper of its deletion/insertion and
/// half its best substitution against the other graph; halving the
/// substitutions keeps the double-counted total below any real edit
/// script.
pub fn ged_hausdorff<N: Eq, E: Eq>(
    g1: &SimGraph<N, E>,
    g2: &SimGraph<N, E>,
    cm: &EditCostModel,
) -> f64 {
    let node_side = |from: &[N], to: &[N], removal: f64| -> f64 {
        from.iter()
            .map(|a| {
                to.iter()
                    .map(|b| sub_cost(a, b, cm.node_sub) / 2.0)
                    .fold(removal, f64::min)
            })
            .sum::<f64>()
    };
    let edge_side = |from: &[(usize, usize, E)], to: &[(usize, usize, E)], removal: f64| -> f64 {
        from.iter()
            .map(|(_, _, a)| {
                to.iter()
                    .map(|(_, _, b)| sub_cost(a, b, cm.edge_sub) / 2.0)
                    .fold(removal, f64::min)
            })
            .sum::<f64>()
    };
    node_side(&g1.labels, &g2.labels, cm.node_del)
        + node_side(&g2.labels, &g1.labels, cm.node_ins)
        + edge_side(&g1.edges, &g2.edges, cm.edge_del)
        + edge_side(&g2.edges, &g1.edges, cm.edge_ins)
}

/// Greedy-assignment upper bound.
///
/// Node pairs are sorted by substitution cost (ties by label pair, then
/// index pair) and assigned first-come; unassigned nodes are deleted or
/// inserted, and edge operations are the ones the assignment induces.
pub fn ged_greedy<N: Ord, E: Ord>(
    g1: &SimGraph<N, E>,
    g2: &SimGraph<N, E>,
    cm: &EditCostModel,
) -> (f64, Assignment) {
    let (n1, n2) = (g1.labels.len(), g2.labels.len());
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n1 * n2);
    for (i, a) in g1.labels.iter().enumerate() {
        for (j, b) in g2.labels.iter().enumerate() {
            pairs.push((sub_cost(a, b, cm.node_sub), i, j));
        }
    }
    pairs.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then_with(|| {
                let (la, lb) = (&g1.labels[x.1], &g2.labels[x.2]);
                let (lc, ld) = (&g1.labels[y.1], &g2.labels[y.2]);
                (la.min(lb), la.max(lb)).cmp(&(lc.min(ld), lc.max(ld)))
            })
            .then_with(|| (x.1, x.2).cmp(&(y.1, y.2)))
    });

    let mut to2: Vec<Option<usize>> = vec![None; n1];
    let mut from1: Vec<Option<usize>> = vec![None; n2];
    let mut cost = 0.0;
    let mut assignment = Assignment::default();
    for (c, i, j) in pairs {
        if to2[i].is_none() && from1[j].is_none() {
            to2[i] = Some(j);
            from1[j] = Some(i);
            cost += c;
            assignment.pairs.push((i, j));
        }
    }
    for (i, m) in to2.iter().enumerate() {
        if m.is_none() {
            cost += cm.node_del;
            assignment.deleted.push(i);
        }
    }
    for (j, m) in from1.iter().enumerate() {
        if m.is_none() {
            cost += cm.node_ins;
            assignment.inserted.push(j);
        }
    }
    assignment.pairs.sort_unstable();

    cost += induced_edge_cost(g1, g2, &to2, cm);
    (cost, assignment)
}

/// Edge operations forced by a node mapping: edges whose endpoints map to
/// an existing pair substitute (identical labels free), the rest are
/// deleted or inserted.
///
/// Works on sorted runs instead of maps; `g2.edges` is already sorted by
/// construction.
fn induced_edge_cost<N, E: Ord>(
    g1: &SimGraph<N, E>,
    g2: &SimGraph<N, E>,
    to2: &[Option<usize>],
    cm: &EditCostModel,
) -> f64 {
    let mut unmappable = 0usize;
    let mut mapped: Vec<(usize, usize, &E)> = Vec::with_capacity(g1.edges.len());
    for (a, b, l) in &g1.edges {
        match (to2[*a], to2[*b]) {
            (Some(x), Some(y)) => mapped.push((x.min(y), x.max(y), l)),
            _ => unmappable += 1,
        }
    }
    mapped.sort_unstable_by(|p, q| (p.0, p.1, p.2).cmp(&(q.0, q.1, q.2)));

    let target = &g2.edges;
    let mut cost = unmappable as f64 * cm.edge_del;
    let mut handled_targets = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    while i < mapped.len() && j < target.len() {
        let k1 = (mapped[i].0, mapped[i].1);
        let k2 = (target[j].0, target[j].1);
        if k1 < k2 {
            cost += cm.edge_del;
            i += 1;
        } else if k2 < k1 {
            j += 1;
        } else {
            let (gi, gj) = (i, j);
            while i < mapped.len() && (mapped[i].0, mapped[i].1) == k1 {
                i += 1;
            }
            while j < target.len() && (target[j].0, target[j].1) == k2 {
                j += 1;
            }
            // Labels are sorted within each run; a merge walk counts the
            // free identical-label matches.
            let (mut x, mut y) = (gi, gj);
            let mut equal = 0usize;
            while x < i && y < j {
                match mapped[x].2.cmp(&target[y].2) {
                    std::cmp::Ordering::Less => x += 1,
                    std::cmp::Ordering::Greater => y += 1,
                    std::cmp::Ordering::Equal => {
                        equal += 1;
                        x += 1;
                        y += 1;
                    }
                }
            }
            let from_rem = (i - gi) - equal;
            let to_rem = (j - gj) - equal;
            let subs = from_rem.min(to_rem);
            cost += subs as f64 * cm.edge_sub
                + (from_rem - subs) as f64 * cm.edge_del
                + (to_rem - subs) as f64 * cm.edge_ins;
            handled_targets += j - gj;
        }
    }
    cost += (mapped.len() - i) as f64 * cm.edge_del;
    cost += (target.len() - handled_targets) as f64 * cm.edge_ins;
    cost
}

/// Full [`GedResult`]: both bounds plus the normalized similarity.
///
/// The normalizer `C` is the always-feasible script that deletes `g1`
/// entirely and inserts `g2` entirely; two empty graphs are perfectly
/// similar.
pub fn similarity<N: Ord, E: Ord>(
    g1: &SimGraph<N, E>,
    g2: &SimGraph<N, E>,
    cm: &EditCostModel,
) -> GedResult {
    let lower = ged_hausdorff(g1, g2, cm);
    let (upper, _) = ged_greedy(g1, g2, cm);
    let c = g1.node_count() as f64 * cm.node_del
        + g1.edge_count() as f64 * cm.edge_del
        + g2.node_count() as f64 * cm.node_ins
        + g2.edge_count() as f64 * cm.edge_ins;
    let similarity = if c == 0.0 {
        1.0
    } else {
        (1.0 - upper / c).clamp(0.0, 1.0)
    };
    GedResult {
        lower,
        upper,
        similarity,
    }
}
