//! Small named coloured DAGs used in tests, benches and documentation.

use crate::graph::{ColouredDag, EdgeSpec, GraphDocument, VertexSpec};

/// Build a graph from `(id, colour)` vertices and `(source, target, colour)` edges.
///
/// Panics if the description is not a valid DAG.
pub fn build(vertices: &[(u64, &str)], edges: &[(u64, u64, &str)]) -> ColouredDag {
    let doc = GraphDocument {
        vertices: vertices
            .iter()
            .map(|&(id, c)| VertexSpec {
                id,
                colour: c.to_string(),
            })
            .collect(),
        edges: edges
            .iter()
            .map(|&(source, target, c)| EdgeSpec {
                source,
                target,
                colour: c.to_string(),
            })
            .collect(),
    };
    ColouredDag::from_document(&doc).expect("fixture is a valid DAG")
}

/// A parent (3, black) with two children (1, 2, blue) joined by red edges.
pub fn mother_daughters() -> ColouredDag {
    build(
        &[(1, "blue"), (2, "blue"), (3, "black")],
        &[(3, 1, "red"), (3, 2, "red")],
    )
}

/// Two blue vertices joined by a single red edge 2 -> 1.
pub fn same_colour_pair() -> ColouredDag {
    build(&[(1, "blue"), (2, "blue")], &[(2, 1, "red")])
}

/// Blue targets 1 and 2, black sources 3..k+2; each source points at both
/// targets with an edge colour of its own.
pub fn two_target_fan(k: usize) -> ColouredDag {
    let mut vertices = vec![(1, "blue".to_string()), (2, "blue".to_string())];
    let mut edges = Vec::new();
    for j in 3..(k as u64 + 3) {
        vertices.push((j, "black".to_string()));
        edges.push((j, 1, format!("c{j}")));
        edges.push((j, 2, format!("c{j}")));
    }
    let v: Vec<(u64, &str)> = vertices.iter().map(|(i, c)| (*i, c.as_str())).collect();
    let e: Vec<(u64, u64, &str)> = edges.iter().map(|(s, t, c)| (*s, *t, c.as_str())).collect();
    build(&v, &e)
}

const BLACK_SOURCES: [(u64, &str); 7] = [
    (1, "blue"),
    (2, "blue"),
    (3, "black"),
    (4, "black"),
    (5, "black"),
    (6, "black"),
    (7, "black"),
];

/// Two blue targets, five black sources, one shared edge colour.
/// Thresholds (2, 4).
pub fn partial_fan() -> ColouredDag {
    build(
        &BLACK_SOURCES,
        &[
            (3, 1, "red"),
            (4, 1, "orange"),
            (4, 2, "brown"),
            (5, 1, "green"),
            (6, 1, "purple"),
            (7, 1, "brown"),
        ],
    )
}

/// Two blue targets, five black sources with crossing edge colours.
/// Thresholds (3, 3).
pub fn cross_fan() -> ColouredDag {
    build(
        &BLACK_SOURCES,
        &[
            (3, 1, "red"),
            (3, 2, "orange"),
            (4, 1, "brown"),
            (4, 2, "green"),
            (5, 1, "green"),
            (5, 2, "orange"),
            (6, 1, "purple"),
            (6, 2, "orange"),
            (7, 1, "brown"),
        ],
    )
}

const DOG_VERTICES: [(u64, &str); 6] = [
    (1, "black"),
    (2, "blue"),
    (3, "black"),
    (4, "blue"),
    (5, "purple"),
    (6, "grey"),
];

/// Two parents (5, 6), each with its own pair of children.
pub fn dog_separate() -> ColouredDag {
    build(
        &DOG_VERTICES,
        &[
            (5, 1, "red"),
            (5, 3, "red"),
            (6, 2, "green"),
            (6, 4, "green"),
        ],
    )
}

/// As [`dog_separate`], with each parent also pointing at the other pair.
/// Thresholds (1, 2).
pub fn dog_crossed() -> ColouredDag {
    build(
        &DOG_VERTICES,
        &[
            (5, 1, "red"),
            (5, 3, "red"),
            (6, 2, "green"),
            (6, 4, "green"),
            (5, 2, "brown"),
            (5, 4, "brown"),
            (6, 1, "orange"),
            (6, 3, "orange"),
        ],
    )
}

/// Ten vertices in two non-isomorphic components whose RDAG and RCON models agree.
pub fn twin_stars() -> ColouredDag {
    build(
        &[
            (1, "black"),
            (2, "black"),
            (3, "black"),
            (4, "black"),
            (5, "black"),
            (6, "black"),
            (7, "blue"),
            (8, "blue"),
            (9, "purple"),
            (10, "purple"),
        ],
        &[
            (9, 3, "orange"),
            (9, 2, "green"),
            (9, 1, "red"),
            (9, 7, "brown"),
            (7, 3, "green"),
            (7, 2, "red"),
            (7, 1, "orange"),
            (10, 4, "orange"),
            (10, 5, "green"),
            (10, 6, "red"),
            (10, 8, "brown"),
            (8, 4, "red"),
            (8, 5, "orange"),
            (8, 6, "green"),
        ],
    )
}

/// Chain 3 -> 2 -> 1 without the shortcut, every colour distinct.
pub fn open_chain() -> ColouredDag {
    build(&[(1, "a"), (2, "b"), (3, "c")], &[(3, 2, "x"), (2, 1, "y")])
}

/// Complete DAG on `m` vertices (j -> i for j > i), every colour distinct.
pub fn complete_uncoloured(m: u64) -> ColouredDag {
    let vertices: Vec<(u64, String)> = (1..=m).map(|i| (i, format!("v{i}"))).collect();
    let edges: Vec<(u64, u64, String)> = (1..=m)
        .flat_map(|i| ((i + 1)..=m).map(move |j| (j, i, format!("e{j}_{i}"))))
        .collect();
    let v: Vec<(u64, &str)> = vertices.iter().map(|(i, c)| (*i, c.as_str())).collect();
    let e: Vec<(u64, u64, &str)> = edges.iter().map(|(s, t, c)| (*s, *t, c.as_str())).collect();
    build(&v, &e)
}

/// Two transitive group graphs with identical butterfly graphs that are not
/// isomorphic. The second swaps two edge colours on the middle layer.
pub fn butterfly_pair() -> (ColouredDag, ColouredDag) {
    (butterfly_graph(false), butterfly_graph(true))
}

fn butterfly_graph(swap: bool) -> ColouredDag {
    // a1 = 1, b1..b4 = 2..5, c1..c4 = 6..9, d1 = 10.
    let b = |i: u64| 1 + i;
    let c = |i: u64| 5 + i;
    let sigma = |i: u64| [0, 4, 1, 2, 3][i as usize];
    let (second, third) = if swap {
        ("green", "orange")
    } else {
        ("orange", "green")
    };
    let mut edges: Vec<(u64, u64, &str)> = Vec::new();
    for i in 1..=4 {
        edges.push((b(i), c(i), "red"));
        edges.push((b(i), c(sigma(i)), second));
        edges.push((b(i), c(sigma(sigma(i))), third));
        edges.push((c(i), 10, "brown"));
        edges.push((1, b(i), "brown"));
        edges.push((1, c(i), "purple"));
        edges.push((b(i), 10, "blue"));
    }
    edges.push((1, 10, "yellow"));
    let vertices: Vec<(u64, &str)> = (1..=10).map(|i| (i, "black")).collect();
    build(&vertices, &edges)
}
