//! Structural criteria on coloured DAGs: colliders, RCON equality,
//! transitivity and the butterfly group criterion.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::graph::{ColouredDag, Edge, VertexId};

/// The star at a vertex: its colour and the (edge colour, child colour) pairs
/// of its outgoing edges, sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StarSignature {
    pub centre: String,
    pub leaves: Vec<(String, String)>,
}

/// The wedge of an edge j -> i: the colour of i and, for each shared child k,
/// the colour of k with the unordered pair of colours of i -> k and j -> k.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WedgeSignature {
    pub centre: String,
    pub shared: Vec<(String, (String, String))>,
}

/// The butterfly of a pair (i, j): colours of i and j and, for each k with
/// j -> k -> i, the ordered pair (colour of k -> i, colour of j -> k).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ButterflySignature {
    pub target: String,
    pub source: String,
    pub paths: Vec<(String, String)>,
}

pub fn star_signature(g: &ColouredDag, i: usize) -> StarSignature {
    let mut leaves: Vec<(String, String)> = g
        .out_edges(i)
        .map(|e| (e.colour.clone(), g.vertex_colour(e.target).to_string()))
        .collect();
    leaves.sort();
    StarSignature {
        centre: g.vertex_colour(i).to_string(),
        leaves,
    }
}

/// Wedge signature for the pair (i, j); meaningful for an edge j -> i.
pub fn wedge_signature(g: &ColouredDag, i: usize, j: usize) -> WedgeSignature {
    let mut shared = Vec::new();
    for e in g.out_edges(i) {
        let k = e.target;
        if let Some(f) = g.edge(j, k) {
            let (a, b) = if e.colour <= f.colour {
                (e.colour.clone(), f.colour.clone())
            } else {
                (f.colour.clone(), e.colour.clone())
            };
            shared.push((g.vertex_colour(k).to_string(), (a, b)));
        }
    }
    shared.sort();
    WedgeSignature {
        centre: g.vertex_colour(i).to_string(),
        shared,
    }
}

/// Butterfly signature for target i and source j.
pub fn butterfly_signature(g: &ColouredDag, i: usize, j: usize) -> ButterflySignature {
    let mut paths = Vec::new();
    for e in g.out_edges(j) {
        let k = e.target;
        if let Some(f) = g.edge(k, i) {
            paths.push((f.colour.clone(), e.colour.clone()));
        }
    }
    paths.sort();
    ButterflySignature {
        target: g.vertex_colour(i).to_string(),
        source: g.vertex_colour(j).to_string(),
        paths,
    }
}

/// Every triple (i, p, j) with i -> p <- j, i < j, and i, j non-adjacent.
/// Reported by vertex id.
pub fn find_unshielded_colliders(g: &ColouredDag) -> Vec<(VertexId, VertexId, VertexId)> {
    let mut out = Vec::new();
    for p in 0..g.num_vertices() {
        let parents: Vec<usize> = g.parents(p).collect();
        for (a, &i) in parents.iter().enumerate() {
            for &j in &parents[a + 1..] {
                if !g.adjacent(i, j) {
                    let (x, y) = (g.vertex_id(i), g.vertex_id(j));
                    out.push((x.min(y), g.vertex_id(p), x.max(y)));
                }
            }
        }
    }
    out.sort();
    out
}

/// Why the RDAG and RCON models differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition")]
pub enum RconFailure {
    /// (a) an unshielded collider i -> p <- j.
    #[serde(rename = "a")]
    UnshieldedCollider {
        i: VertexId,
        p: VertexId,
        j: VertexId,
    },
    /// (b) two vertices of one colour with non-isomorphic stars.
    #[serde(rename = "b")]
    StarMismatch { first: VertexId, second: VertexId },
    /// (c) two edges of one colour with non-isomorphic wedges.
    #[serde(rename = "c")]
    WedgeMismatch {
        first: (VertexId, VertexId),
        second: (VertexId, VertexId),
    },
}

impl RconFailure {
    pub fn condition(&self) -> char {
        match self {
            RconFailure::UnshieldedCollider { .. } => 'a',
            RconFailure::StarMismatch { .. } => 'b',
            RconFailure::WedgeMismatch { .. } => 'c',
        }
    }
}

impl fmt::Display for RconFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RconFailure::UnshieldedCollider { i, p, j } => {
                write!(f, "condition a: unshielded collider {i} -> {p} <- {j}")
            }
            RconFailure::StarMismatch { first, second } => write!(
                f,
                "condition b: vertices {first} and {second} share a colour but their stars differ"
            ),
            RconFailure::WedgeMismatch { first, second } => write!(
                f,
                "condition c: edges {} -> {} and {} -> {} share a colour but their wedges differ",
                first.0, first.1, second.0, second.1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RconDecision {
    pub equal: bool,
    pub failure: Option<RconFailure>,
}

/// Decide whether the RDAG model equals the RCON model on the undirected graph.
pub fn rcon_equivalent(g: &ColouredDag) -> Result<RconDecision> {
    g.require_compatible()?;
    let failure = rcon_failure(g);
    Ok(RconDecision {
        equal: failure.is_none(),
        failure,
    })
}

fn rcon_failure(g: &ColouredDag) -> Option<RconFailure> {
    if let Some(&(i, p, j)) = find_unshielded_colliders(g).first() {
        return Some(RconFailure::UnshieldedCollider { i, p, j });
    }
    for s in g.vertex_colours() {
        let class = g.colour_class(s).expect("declared colour");
        let reference = star_signature(g, class[0]);
        for &v in &class[1..] {
            if star_signature(g, v) != reference {
                return Some(RconFailure::StarMismatch {
                    first: g.vertex_id(class[0]),
                    second: g.vertex_id(v),
                });
            }
        }
    }
    first_mismatch(g, |e| wedge_signature(g, e.target, e.source))
        .map(|(first, second)| RconFailure::WedgeMismatch { first, second })
}

/// First pair of same-coloured edges whose signatures differ, as
/// ((source, target), (source, target)) ids.
fn first_mismatch<S: PartialEq>(
    g: &ColouredDag,
    signature: impl Fn(&Edge) -> S,
) -> Option<((VertexId, VertexId), (VertexId, VertexId))> {
    let colours: BTreeSet<&str> = g.edge_colours();
    for t in colours {
        let mut edges = g.edges().iter().filter(|e| e.colour == t);
        let first = edges.next().expect("colour occurs");
        let reference = signature(first);
        for e in edges {
            if signature(e) != reference {
                return Some((g.edge_ids(first), g.edge_ids(e)));
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitivityCheck {
    pub transitive: bool,
    /// A missing shortcut (source, target) closing some 2-path.
    pub missing: Option<(VertexId, VertexId)>,
}

pub fn is_transitive(g: &ColouredDag) -> TransitivityCheck {
    for &k in g.topological_order() {
        for j in g.children(k) {
            for i in g.children(j) {
                if !g.has_edge(k, i) {
                    return TransitivityCheck {
                        transitive: false,
                        missing: Some((g.vertex_id(k), g.vertex_id(i))),
                    };
                }
            }
        }
    }
    TransitivityCheck {
        transitive: true,
        missing: None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum GroupFailure {
    NotTransitive {
        source: VertexId,
        target: VertexId,
    },
    ButterflyMismatch {
        first: (VertexId, VertexId),
        second: (VertexId, VertexId),
    },
}

impl fmt::Display for GroupFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupFailure::NotTransitive { source, target } => {
                write!(f, "not transitive: missing edge {source} -> {target}")
            }
            GroupFailure::ButterflyMismatch { first, second } => write!(
                f,
                "butterflies differ on edges {} -> {} and {} -> {}",
                first.0, first.1, second.0, second.1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupDecision {
    pub group: bool,
    pub failure: Option<GroupFailure>,
}

/// Decide whether A(G, c) is closed under multiplication.
pub fn is_group(g: &ColouredDag) -> Result<GroupDecision> {
    g.require_compatible()?;
    let failure = if let Some((source, target)) = is_transitive(g).missing {
        Some(GroupFailure::NotTransitive { source, target })
    } else {
        first_mismatch(g, |e| butterfly_signature(g, e.target, e.source))
            .map(|(first, second)| GroupFailure::ButterflyMismatch { first, second })
    };
    Ok(GroupDecision {
        group: failure.is_none(),
        failure,
    })
}

/// An edge whose endpoints share a vertex colour, as (source, target) ids.
pub fn has_monochrome_edge(g: &ColouredDag) -> Option<(VertexId, VertexId)> {
    g.edges()
        .iter()
        .find(|e| g.vertex_colour(e.source) == g.vertex_colour(e.target))
        .map(|e| g.edge_ids(e))
}
