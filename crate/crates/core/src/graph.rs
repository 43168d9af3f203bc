//! Coloured directed acyclic graphs.
//!
//! A [`ColouredDag`] is built from a [`GraphDocument`] (the JSON wire format)
//! and validated on construction. Vertices are stored by ascending id, so the
//! vertex index used throughout the crate is also the row index of a sample
//! matrix.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = u64;

/// Vertex-to-colour assignment keyed by vertex id.
pub type VertexColouring = BTreeMap<VertexId, String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub id: VertexId,
    pub colour: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub source: VertexId,
    pub target: VertexId,
    pub colour: String,
}

/// Serialisable description of a coloured DAG.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<VertexSpec>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
}

impl GraphDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph document serialises")
    }
}

/// A directed edge between vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub colour: String,
}

/// A validated vertex- and edge-coloured DAG.
///
/// Immutable after construction. Edges are kept sorted by (target, source).
#[derive(Debug, Clone)]
pub struct ColouredDag {
    ids: Vec<VertexId>,
    colours: Vec<String>,
    index: HashMap<VertexId, usize>,
    edges: Vec<Edge>,
    edge_index: HashMap<(usize, usize), usize>,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
    topo: Vec<usize>,
    classes: BTreeMap<String, Vec<usize>>,
    prc: BTreeMap<String, BTreeSet<String>>,
}

impl ColouredDag {
    /// Validate a graph document and derive parent/child maps, a topological
    /// order and the per-colour statistics.
    pub fn from_document(doc: &GraphDocument) -> Result<Self> {
        if doc.vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut specs: Vec<&VertexSpec> = doc.vertices.iter().collect();
        specs.sort_by_key(|v| v.id);
        for pair in specs.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::DuplicateVertex(pair[0].id));
            }
        }
        if let Some(v) = specs.iter().find(|v| v.id == 0) {
            return Err(Error::InvalidVertexId(v.id));
        }

        let ids: Vec<VertexId> = specs.iter().map(|v| v.id).collect();
        let colours: Vec<String> = specs.iter().map(|v| v.colour.clone()).collect();
        let index: HashMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();

        let mut edges = Vec::with_capacity(doc.edges.len());
        let mut seen = BTreeSet::new();
        for e in &doc.edges {
            let source = *index
                .get(&e.source)
                .ok_or(Error::UnknownVertexReference(e.source))?;
            let target = *index
                .get(&e.target)
                .ok_or(Error::UnknownVertexReference(e.target))?;
            if source == target {
                return Err(Error::SelfLoop(e.source));
            }
            if !seen.insert((source, target)) {
                return Err(Error::DuplicateEdge {
                    from: e.source,
                    to: e.target,
                });
            }
            edges.push(Edge {
                source,
                target,
                colour: e.colour.clone(),
            });
        }
        edges.sort_by_key(|e| (e.target, e.source));

        let m = ids.len();
        let mut in_edges = vec![Vec::new(); m];
        let mut out_edges = vec![Vec::new(); m];
        let mut edge_index = HashMap::with_capacity(edges.len());
        for (k, e) in edges.iter().enumerate() {
            in_edges[e.target].push(k);
            out_edges[e.source].push(k);
            edge_index.insert((e.source, e.target), k);
        }

        let topo =
            topological_order(m, &edges, &out_edges).map_err(|cycle| Error::CycleDetected {
                cycle: cycle.into_iter().map(|i| ids[i]).collect(),
            })?;

        let mut classes: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, c) in colours.iter().enumerate() {
            classes.entry(c.clone()).or_default().push(i);
        }
        let mut prc: BTreeMap<String, BTreeSet<String>> = classes
            .keys()
            .map(|s| (s.clone(), BTreeSet::new()))
            .collect();
        for e in &edges {
            prc.get_mut(&colours[e.target])
                .expect("target colour is declared")
                .insert(e.colour.clone());
        }

        Ok(ColouredDag {
            ids,
            colours,
            index,
            edges,
            edge_index,
            in_edges,
            out_edges,
            topo,
            classes,
            prc,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(&GraphDocument::from_json(text)?)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            vertices: self
                .ids
                .iter()
                .zip(&self.colours)
                .map(|(&id, c)| VertexSpec {
                    id,
                    colour: c.clone(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    source: self.ids[e.source],
                    target: self.ids[e.target],
                    colour: e.colour.clone(),
                })
                .collect(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Vertex ids in ascending order; position is the vertex index.
    pub fn vertex_ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn vertex_id(&self, index: usize) -> VertexId {
        self.ids[index]
    }

    pub fn index_of(&self, id: VertexId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn vertex_colour(&self, index: usize) -> &str {
        &self.colours[index]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, source: usize, target: usize) -> Option<&Edge> {
        self.edge_index
            .get(&(source, target))
            .map(|&k| &self.edges[k])
    }

    pub fn has_edge(&self, source: usize, target: usize) -> bool {
        self.edge_index.contains_key(&(source, target))
    }

    /// Either `a -> b` or `b -> a` is present.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// Edges pointing into `index`, sorted by source.
    pub fn in_edges(&self, index: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.in_edges[index].iter().map(move |&k| &self.edges[k])
    }

    /// Edges leaving `index`.
    pub fn out_edges(&self, index: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.out_edges[index].iter().map(move |&k| &self.edges[k])
    }

    pub fn parents(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        self.in_edges(index).map(|e| e.source)
    }

    pub fn children(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_edges(index).map(|e| e.target)
    }

    /// A topological order in which every parent precedes its children.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// Declared vertex colours in sorted order.
    pub fn vertex_colours(&self) -> impl Iterator<Item = &str> + '_ {
        self.classes.keys().map(String::as_str)
    }

    pub fn has_vertex_colour(&self, colour: &str) -> bool {
        self.classes.contains_key(colour)
    }

    /// Vertex indices of colour `colour`, ascending by id.
    pub fn colour_class(&self, colour: &str) -> Option<&[usize]> {
        self.classes.get(colour).map(Vec::as_slice)
    }

    /// Number of vertices of the given colour.
    pub fn alpha(&self, colour: &str) -> usize {
        self.classes.get(colour).map_or(0, Vec::len)
    }

    /// Parent relationship colours: colours of edges whose target has colour `colour`.
    pub fn prc(&self, colour: &str) -> Option<&BTreeSet<String>> {
        self.prc.get(colour)
    }

    pub fn beta(&self, colour: &str) -> usize {
        self.prc.get(colour).map_or(0, BTreeSet::len)
    }

    pub fn edge_colours(&self) -> BTreeSet<&str> {
        self.edges.iter().map(|e| e.colour.as_str()).collect()
    }

    pub fn colour_stats(&self) -> Vec<ColourStats> {
        self.classes
            .iter()
            .map(|(s, members)| ColourStats {
                colour: s.clone(),
                alpha: members.len(),
                beta: self.prc[s].len(),
                prc: self.prc[s].iter().cloned().collect(),
            })
            .collect()
    }

    /// Vertex colouring keyed by id.
    pub fn vertex_colouring(&self) -> VertexColouring {
        self.ids
            .iter()
            .zip(&self.colours)
            .map(|(&id, c)| (id, c.clone()))
            .collect()
    }

    /// Same graph and edge colours, with vertex colours replaced.
    pub fn with_vertex_colouring(&self, colouring: &VertexColouring) -> Result<ColouredDag> {
        let mut doc = self.to_document();
        for v in &mut doc.vertices {
            v.colour = colouring
                .get(&v.id)
                .ok_or(Error::UnknownVertexReference(v.id))?
                .clone();
        }
        ColouredDag::from_document(&doc)
    }

    /// The same DAG with every vertex and every edge in its own colour.
    pub fn uncoloured(&self) -> ColouredDag {
        let mut doc = self.to_document();
        for v in &mut doc.vertices {
            v.colour = format!("v{}", v.id);
        }
        for e in &mut doc.edges {
            e.colour = format!("e{}_{}", e.source, e.target);
        }
        ColouredDag::from_document(&doc).expect("recolouring preserves validity")
    }

    /// Check the two compatibility conditions and list every violation.
    pub fn check_compatibility(&self) -> CompatibilityReport {
        let mut violations = Vec::new();
        let edge_colours = self.edge_colours();
        for (i, c) in self.colours.iter().enumerate() {
            if edge_colours.contains(c.as_str()) {
                for e in self.edges.iter().filter(|e| &e.colour == c) {
                    violations.push(Violation::Disjointness {
                        vertex: self.ids[i],
                        edge: self.edge_ids(e),
                    });
                }
            }
        }
        let mut by_colour: BTreeMap<&str, Vec<&Edge>> = BTreeMap::new();
        for e in &self.edges {
            by_colour.entry(&e.colour).or_default().push(e);
        }
        for group in by_colour.values() {
            for (a, e1) in group.iter().enumerate() {
                for e2 in &group[a + 1..] {
                    if self.colours[e1.target] != self.colours[e2.target] {
                        violations.push(Violation::ChildColour {
                            first: self.edge_ids(e1),
                            second: self.edge_ids(e2),
                        });
                    }
                }
            }
        }
        CompatibilityReport {
            is_compatible: violations.is_empty(),
            violations,
        }
    }

    pub fn is_compatible(&self) -> bool {
        self.check_compatibility().is_compatible
    }

    pub(crate) fn require_compatible(&self) -> Result<()> {
        let report = self.check_compatibility();
        if report.is_compatible {
            Ok(())
        } else {
            Err(Error::IncompatibleColouring {
                violations: report.violations.len(),
            })
        }
    }

    /// Edge endpoints as (source id, target id).
    pub fn edge_ids(&self, e: &Edge) -> (VertexId, VertexId) {
        (self.ids[e.source], self.ids[e.target])
    }

    /// The finest vertex colouring that makes the current edge colouring
    /// compatible: targets of equally coloured edges are merged, nothing else.
    ///
    /// Class labels are `v0, v1, ...` numbered by smallest member id, and never
    /// collide with an edge colour.
    pub fn finest_compatible_vertex_colouring(&self) -> VertexColouring {
        let m = self.num_vertices();
        let mut sets = DisjointSets::new(m);
        let mut first_target: HashMap<&str, usize> = HashMap::new();
        for e in &self.edges {
            match first_target.get(e.colour.as_str()) {
                Some(&t) => sets.union(t, e.target),
                None => {
                    first_target.insert(&e.colour, e.target);
                }
            }
        }
        let edge_colours = self.edge_colours();
        let mut labels: HashMap<usize, String> = HashMap::new();
        let mut colouring = VertexColouring::new();
        for i in 0..m {
            let root = sets.find(i);
            let next = labels.len();
            let label = labels
                .entry(root)
                .or_insert_with(|| fresh_label(next, &edge_colours))
                .clone();
            colouring.insert(self.ids[i], label);
        }
        colouring
    }
}

fn fresh_label(k: usize, taken: &BTreeSet<&str>) -> String {
    let mut label = format!("v{k}");
    let mut suffix = 0;
    while taken.contains(label.as_str()) {
        suffix += 1;
        label = format!("v{k}_{suffix}");
    }
    label
}

/// Kahn's algorithm, smallest index first. On failure returns a cycle.
fn topological_order(
    m: usize,
    edges: &[Edge],
    out_edges: &[Vec<usize>],
) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let mut indegree = vec![0usize; m];
    for e in edges {
        indegree[e.target] += 1;
    }
    let mut ready: BTreeSet<usize> = (0..m).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &k in &out_edges[i] {
            let t = edges[k].target;
            indegree[t] -= 1;
            if indegree[t] == 0 {
                ready.insert(t);
            }
        }
    }
    if order.len() == m {
        return Ok(order);
    }
    // Every remaining vertex has a remaining parent; walk parents until one repeats.
    let remaining: Vec<bool> = (0..m).map(|i| indegree[i] > 0).collect();
    let start = (0..m).find(|&i| remaining[i]).expect("some vertex remains");
    let mut parent_of = vec![usize::MAX; m];
    for e in edges {
        if remaining[e.source] && remaining[e.target] && parent_of[e.target] == usize::MAX {
            parent_of[e.target] = e.source;
        }
    }
    let mut visited = vec![false; m];
    let mut v = start;
    while !visited[v] {
        visited[v] = true;
        v = parent_of[v];
    }
    let mut cycle = vec![v];
    let mut u = parent_of[v];
    while u != v {
        cycle.push(u);
        u = parent_of[u];
    }
    cycle.reverse();
    cycle.push(cycle[0]);
    Err(cycle)
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Summary of one vertex colour class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColourStats {
    pub colour: String,
    pub alpha: usize,
    pub beta: usize,
    pub prc: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    /// A vertex shares its colour label with an edge.
    Disjointness {
        vertex: VertexId,
        edge: (VertexId, VertexId),
    },
    /// Two equally coloured edges point at differently coloured targets.
    ChildColour {
        first: (VertexId, VertexId),
        second: (VertexId, VertexId),
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompatibilityReport {
    pub is_compatible: bool,
    pub violations: Vec<Violation>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(vertices: &[(u64, &str)], edges: &[(u64, u64, &str)]) -> GraphDocument {
        GraphDocument {
            vertices: vertices
                .iter()
                .map(|&(id, c)| VertexSpec {
                    id,
                    colour: c.into(),
                })
                .collect(),
            edges: edges
                .iter()
                .map(|&(s, t, c)| EdgeSpec {
                    source: s,
                    target: t,
                    colour: c.into(),
                })
                .collect(),
        }
    }

    fn running() -> ColouredDag {
        ColouredDag::from_document(&doc(
            &[(1, "blue"), (2, "blue"), (3, "black")],
            &[(3, 1, "red"), (3, 2, "red")],
        ))
        .unwrap()
    }

    #[test]
    fn running_example_statistics() {
        let g = running();
        assert_eq!(g.alpha("blue"), 2);
        assert_eq!(g.alpha("black"), 1);
        assert_eq!(g.beta("blue"), 1);
        assert_eq!(g.beta("black"), 0);
        assert_eq!(
            g.prc("blue").unwrap().iter().collect::<Vec<_>>(),
            vec!["red"]
        );
        assert_eq!(g.colour_class("blue").unwrap(), &[0, 1]);
        let topo = g.topological_order();
        assert_eq!(topo[0], 2);
    }

    #[test]
    fn single_vertex() {
        let g = ColouredDag::from_document(&doc(&[(7, "s")], &[])).unwrap();
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.beta("s"), 0);
        assert_eq!(g.alpha("s"), 1);
    }

    #[test]
    fn two_cycle_rejected() {
        let err =
            ColouredDag::from_document(&doc(&[(1, "a"), (2, "a")], &[(1, 2, "x"), (2, 1, "y")]))
                .unwrap_err();
        match err {
            Error::CycleDetected { cycle } => {
                assert_eq!(cycle.first(), cycle.last());
                assert_eq!(cycle.len(), 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn longer_cycle_named() {
        let err = ColouredDag::from_document(&doc(
            &[(1, "a"), (2, "a"), (3, "a"), (4, "a")],
            &[(4, 1, "x"), (1, 2, "x"), (2, 3, "x"), (3, 1, "x")],
        ))
        .unwrap_err();
        let Error::CycleDetected { cycle } = err else {
            panic!("expected cycle")
        };
        let body: BTreeSet<_> = cycle.iter().copied().collect();
        assert_eq!(body, BTreeSet::from([1, 2, 3]));
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            ColouredDag::from_document(&doc(&[(1, "a")], &[(1, 1, "x")])),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            ColouredDag::from_document(&doc(&[(1, "a"), (2, "a")], &[(1, 2, "x"), (1, 2, "y")])),
            Err(Error::DuplicateEdge { from: 1, to: 2 })
        ));
        assert!(matches!(
            ColouredDag::from_document(&doc(&[(1, "a")], &[(1, 5, "x")])),
            Err(Error::UnknownVertexReference(5))
        ));
        assert!(matches!(
            ColouredDag::from_document(&doc(&[(1, "a"), (1, "b")], &[])),
            Err(Error::DuplicateVertex(1))
        ));
        assert!(matches!(
            ColouredDag::from_document(&doc(&[], &[])),
            Err(Error::EmptyGraph)
        ));
        assert!(matches!(
            ColouredDag::from_document(&doc(&[(0, "a")], &[])),
            Err(Error::InvalidVertexId(0))
        ));
    }

    #[test]
    fn arbitrary_id_orientation_accepted() {
        // Parent with the smaller id.
        let g = ColouredDag::from_document(&doc(&[(1, "a"), (2, "b")], &[(1, 2, "x")])).unwrap();
        assert_eq!(g.topological_order(), &[0, 1]);
    }

    #[test]
    fn compatibility_cases() {
        assert!(running().is_compatible());

        let g = ColouredDag::from_document(&doc(
            &[(1, "blue"), (2, "black"), (3, "black")],
            &[(3, 1, "red"), (3, 2, "red")],
        ))
        .unwrap();
        let report = g.check_compatibility();
        assert!(!report.is_compatible);
        assert_eq!(
            report.violations,
            vec![Violation::ChildColour {
                first: (3, 1),
                second: (3, 2)
            }]
        );

        let g = ColouredDag::from_document(&doc(
            &[(1, "red"), (2, "blue"), (3, "black")],
            &[(3, 2, "red")],
        ))
        .unwrap();
        let report = g.check_compatibility();
        assert_eq!(
            report.violations,
            vec![Violation::Disjointness {
                vertex: 1,
                edge: (3, 2)
            }]
        );
    }

    #[test]
    fn finest_colouring_running_example() {
        let g = running();
        let c = g.finest_compatible_vertex_colouring();
        assert_eq!(c[&1], c[&2]);
        assert_ne!(c[&1], c[&3]);
        let recoloured = g.with_vertex_colouring(&c).unwrap();
        assert!(recoloured.is_compatible());
    }

    #[test]
    fn finest_colouring_distinct_edges() {
        let g = ColouredDag::from_document(&doc(
            &[(1, "a"), (2, "a"), (3, "a")],
            &[(3, 1, "x"), (3, 2, "y"), (2, 1, "z")],
        ))
        .unwrap();
        let c = g.finest_compatible_vertex_colouring();
        let distinct: BTreeSet<_> = c.values().collect();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn fresh_labels_avoid_edge_colours() {
        let g = ColouredDag::from_document(&doc(&[(1, "a"), (2, "b")], &[(2, 1, "v0")])).unwrap();
        let c = g.finest_compatible_vertex_colouring();
        assert!(c.values().all(|l| l != "v0"));
        assert!(g.with_vertex_colouring(&c).unwrap().is_compatible());
    }

    #[test]
    fn uncoloured_is_all_distinct() {
        let g = running().uncoloured();
        assert_eq!(g.vertex_colours().count(), 3);
        assert_eq!(g.edge_colours().len(), 2);
        assert!(g.is_compatible());
    }
}
