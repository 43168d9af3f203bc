//! Independent oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rdag::nalgebra::{DMatrix, DVector};
use rdag::{
    concentration, log_likelihood, ColouredDag, EdgeSpec, GraphDocument, MleVerdict,
    RdagParameters, SampleMatrix, VertexColouring, VertexSpec,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random DAG on 1..=m (edges j -> i for j > i) with edge colours from a
/// palette of `colours`, coloured by a random coarsening of the finest
/// compatible vertex colouring.
pub fn random_coloured_dag(r: &mut ChaCha8Rng, m: usize, p: f64, colours: usize) -> ColouredDag {
    let palette: Vec<String> = (0..colours).map(|c| format!("t{c}")).collect();
    let mut edges = Vec::new();
    for j in 1..=m as u64 {
        for i in 1..j {
            if r.random_bool(p) {
                edges.push(EdgeSpec {
                    source: j,
                    target: i,
                    colour: palette.choose(r).unwrap().clone(),
                });
            }
        }
    }
    let doc = GraphDocument {
        vertices: (1..=m as u64)
            .map(|id| VertexSpec {
                id,
                colour: "x".into(),
            })
            .collect(),
        edges,
    };
    let g = ColouredDag::from_document(&doc).unwrap();
    let finest = g.finest_compatible_vertex_colouring();
    let mut classes: Vec<String> = finest.values().cloned().collect();
    classes.sort();
    classes.dedup();
    // Each class joins one of a few buckets.
    let buckets = r.random_range(1..=classes.len());
    let bucket_of: BTreeMap<String, String> = classes
        .iter()
        .map(|c| (c.clone(), format!("s{}", r.random_range(0..buckets))))
        .collect();
    let coarse: VertexColouring = finest
        .iter()
        .map(|(&v, c)| (v, bucket_of[c].clone()))
        .collect();
    g.with_vertex_colouring(&coarse).unwrap()
}

/// Random DAG with every vertex and edge in its own colour.
pub fn random_uncoloured_dag(r: &mut ChaCha8Rng, m: usize, p: f64) -> ColouredDag {
    random_coloured_dag(r, m, p, 1).uncoloured()
}

pub fn normal_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| r.sample::<f64, _>(StandardNormal))
}

/// Random sample matrix; sometimes deliberately degenerate (a zero row, or a
/// row equal to the sum of its parents).
pub fn random_samples(r: &mut ChaCha8Rng, g: &ColouredDag, n: usize) -> SampleMatrix {
    let m = g.num_vertices();
    let mut y = normal_matrix(r, m, n);
    match r.random_range(0..5) {
        0 => {
            let i = r.random_range(0..m);
            y.row_mut(i).fill(0.0);
        }
        1 => {
            let i = r.random_range(0..m);
            let parents: Vec<usize> = g.parents(i).collect();
            if !parents.is_empty() {
                let mut row = DVector::zeros(n).transpose();
                for &j in &parents {
                    row += y.row(j);
                }
                y.set_row(i, &row);
            }
        }
        _ => {}
    }
    SampleMatrix::new(y).unwrap()
}

/// Per-vertex ordinary least squares through the normal equations.
/// Returns (coefficient of each edge keyed by (source, target) index, residual variance per vertex).
pub fn ols(g: &ColouredDag, y: &SampleMatrix) -> (BTreeMap<(usize, usize), f64>, Vec<f64>) {
    let y = y.as_matrix();
    let n = y.ncols() as f64;
    let mut coef = BTreeMap::new();
    let mut var = Vec::new();
    for i in 0..g.num_vertices() {
        let pa: Vec<usize> = g.parents(i).collect();
        let target = y.row(i).transpose();
        if pa.is_empty() {
            var.push(target.norm_squared() / n);
            continue;
        }
        let x = DMatrix::from_fn(pa.len(), y.ncols(), |a, c| y[(pa[a], c)]);
        let gram = &x * x.transpose();
        let rhs = &x * &target;
        let beta = gram
            .lu()
            .solve(&rhs)
            .expect("parents are linearly independent");
        let resid = &target - x.transpose() * &beta;
        for (a, &j) in pa.iter().enumerate() {
            coef.insert((j, i), beta[a]);
        }
        var.push(resid.norm_squared() / n);
    }
    (coef, var)
}

/// Rows of the augmented matrix of one colour, built directly from the
/// definition: top row first, then one row per parent-relationship colour.
pub fn naive_augmented(
    g: &ColouredDag,
    y: &SampleMatrix,
    s: &str,
) -> (DVector<f64>, Vec<DVector<f64>>) {
    let y = y.as_matrix();
    let n = y.ncols();
    let class: Vec<usize> = (0..g.num_vertices())
        .filter(|&i| g.vertex_colour(i) == s)
        .collect();
    let prc: Vec<String> = g.prc(s).unwrap().iter().cloned().collect();
    let mut top = DVector::zeros(class.len() * n);
    let mut rows = vec![DVector::zeros(class.len() * n); prc.len()];
    for (b, &k) in class.iter().enumerate() {
        for c in 0..n {
            top[b * n + c] = y[(k, c)];
        }
        for j in 0..g.num_vertices() {
            if let Some(e) = g.edge(j, k) {
                let t = prc.iter().position(|x| *x == e.colour).unwrap();
                for c in 0..n {
                    rows[t][b * n + c] += y[(j, c)];
                }
            }
        }
    }
    (top, rows)
}

/// Outcome of Gauss–Seidel coordinate descent on one colour's summand
/// α log ω + ζ(λ) / (n ω).
#[derive(Debug, Clone)]
pub struct DescentResult {
    pub lambda: Vec<f64>,
    pub zeta: f64,
    pub top_sq: f64,
}

pub fn coordinate_descent(
    top: &DVector<f64>,
    rows: &[DVector<f64>],
    start: &[f64],
    sweeps: usize,
) -> DescentResult {
    let mut lambda = start.to_vec();
    let mut resid = top.clone();
    for (t, r) in rows.iter().enumerate() {
        resid -= r * lambda[t];
    }
    for _ in 0..sweeps {
        for (t, r) in rows.iter().enumerate() {
            let rr = r.norm_squared();
            if rr == 0.0 {
                continue;
            }
            // Exact minimisation of ζ along coordinate t; ω follows in closed form.
            let step = resid.dot(r) / rr;
            lambda[t] += step;
            resid -= r * step;
        }
    }
    let zeta = {
        let mut r = top.clone();
        for (t, row) in rows.iter().enumerate() {
            r -= row * lambda[t];
        }
        r.norm_squared()
    };
    DescentResult {
        lambda,
        zeta,
        top_sq: top.norm_squared(),
    }
}

/// The descent oracle's verdict over all colours, and its value of the
/// maximised log-likelihood when finite.
pub fn descent_oracle(
    r: &mut ChaCha8Rng,
    g: &ColouredDag,
    y: &SampleMatrix,
    sweeps: usize,
) -> (MleVerdict, Option<f64>) {
    let n = y.ncols() as f64;
    let mut diverges = false;
    let mut flat = false;
    let mut loglik = 0.0;
    for s in g.vertex_colours() {
        let (top, rows) = naive_augmented(g, y, s);
        let alpha = g.alpha(s) as f64;
        let beta = rows.len();
        let a: Vec<f64> = (0..beta).map(|_| r.sample(StandardNormal)).collect();
        let b: Vec<f64> = (0..beta).map(|_| r.sample(StandardNormal)).collect();
        let ra = coordinate_descent(&top, &rows, &a, sweeps);
        let rb = coordinate_descent(&top, &rows, &b, sweeps);
        if ra.top_sq == 0.0 || ra.zeta <= 1e-14 * ra.top_sq {
            diverges = true;
            continue;
        }
        let objective = |z: f64| {
            let w = z / (alpha * n);
            alpha * w.ln() + z / (n * w)
        };
        let (fa, fb) = (objective(ra.zeta), objective(rb.zeta));
        assert!(
            (fa - fb).abs() < 1e-6,
            "descent did not converge: {fa} vs {fb}"
        );
        let scale = 1.0 + ra.lambda.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let spread = ra
            .lambda
            .iter()
            .zip(&rb.lambda)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        if spread > 1e-6 * scale {
            flat = true;
        }
        loglik -= fa;
    }
    if diverges {
        (MleVerdict::UnboundedLikelihood, None)
    } else if flat {
        (MleVerdict::ExistsNonUnique, Some(loglik))
    } else {
        (MleVerdict::ExistsUnique, Some(loglik))
    }
}

/// −ℓ_Y through the full concentration matrix.
pub fn neg_loglik_full(g: &ColouredDag, y: &SampleMatrix, p: &RdagParameters) -> f64 {
    -log_likelihood(&concentration(g, p).unwrap(), y).unwrap()
}

/// Central finite-difference gradient of −ℓ_Y over all colour parameters.
pub fn fd_gradient(g: &ColouredDag, y: &SampleMatrix, p: &RdagParameters) -> Vec<f64> {
    let mut grad = Vec::new();
    for key in p.lambda.keys() {
        let x = p.lambda[key];
        let h = 1e-4 * x.abs().max(1.0);
        let mut up = p.clone();
        let mut down = p.clone();
        *up.lambda.get_mut(key).unwrap() = x + h;
        *down.lambda.get_mut(key).unwrap() = x - h;
        grad.push((neg_loglik_full(g, y, &up) - neg_loglik_full(g, y, &down)) / (2.0 * h));
    }
    for key in p.omega.keys() {
        let x = p.omega[key];
        let h = 1e-5 * x;
        let mut up = p.clone();
        let mut down = p.clone();
        *up.omega.get_mut(key).unwrap() = x + h;
        *down.omega.get_mut(key).unwrap() = x - h;
        // Gradient in log ω, so the scale of ω does not matter.
        grad.push(x * (neg_loglik_full(g, y, &up) - neg_loglik_full(g, y, &down)) / (2.0 * h));
    }
    grad
}

/// Random member of A(G, c) with integer entries: one nonzero diagonal value
/// per vertex colour and one value per edge colour.
pub fn integer_member(r: &mut ChaCha8Rng, g: &ColouredDag) -> Vec<Vec<i128>> {
    let m = g.num_vertices();
    let mut diag = BTreeMap::new();
    for s in g.vertex_colours() {
        let mut d = 0;
        while d == 0 {
            d = r.random_range(-1000..=1000);
        }
        diag.insert(s.to_string(), d as i128);
    }
    let mut off = BTreeMap::new();
    for t in g.edge_colours() {
        off.insert(t.to_string(), r.random_range(-1000..=1000) as i128);
    }
    let mut a = vec![vec![0i128; m]; m];
    for i in 0..m {
        a[i][i] = diag[g.vertex_colour(i)];
    }
    for e in g.edges() {
        a[e.target][e.source] = off[&e.colour];
    }
    a
}

/// Exact check that an integer matrix satisfies the support and colour
/// constraints of A(G, c).
pub fn in_pattern(g: &ColouredDag, a: &[Vec<i128>]) -> bool {
    let m = g.num_vertices();
    let mut diag: BTreeMap<&str, i128> = BTreeMap::new();
    let mut off: BTreeMap<&str, i128> = BTreeMap::new();
    for i in 0..m {
        if *diag.entry(g.vertex_colour(i)).or_insert(a[i][i]) != a[i][i] {
            return false;
        }
        for j in 0..m {
            if i == j {
                continue;
            }
            match g.edge(j, i) {
                Some(e) => {
                    if *off.entry(&e.colour).or_insert(a[i][j]) != a[i][j] {
                        return false;
                    }
                }
                None => {
                    if a[i][j] != 0 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

pub fn int_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let m = a.len();
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| (0..m).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Closure of A(G, c) under multiplication, tested on random member pairs.
pub fn closure_oracle(r: &mut ChaCha8Rng, g: &ColouredDag, pairs: usize) -> bool {
    (0..pairs).all(|_| {
        let a = integer_member(r, g);
        let b = integer_member(r, g);
        in_pattern(g, &int_mul(&a, &b))
    })
}

/// Random real member of A(G, c) with positive diagonal.
pub fn real_member(r: &mut ChaCha8Rng, g: &ColouredDag) -> DMatrix<f64> {
    let m = g.num_vertices();
    let diag: BTreeMap<String, f64> = g
        .vertex_colours()
        .map(|s| (s.to_string(), r.random_range(0.5..2.0)))
        .collect();
    let off: BTreeMap<String, f64> = g
        .edge_colours()
        .into_iter()
        .map(|t| (t.to_string(), r.random_range(-1.0..1.0)))
        .collect();
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        a[(i, i)] = diag[g.vertex_colour(i)];
    }
    for e in g.edges() {
        a[(e.target, e.source)] = off[&e.colour];
    }
    a
}

/// Random positive definite member of the RCON model on the undirected graph.
pub fn rcon_point(r: &mut ChaCha8Rng, g: &ColouredDag) -> DMatrix<f64> {
    let m = g.num_vertices();
    let diag: BTreeMap<String, f64> = g
        .vertex_colours()
        .map(|s| (s.to_string(), r.random_range(m as f64..m as f64 + 1.0)))
        .collect();
    let off: BTreeMap<String, f64> = g
        .edge_colours()
        .into_iter()
        .map(|t| (t.to_string(), r.random_range(-1.0..1.0)))
        .collect();
    let mut psi = DMatrix::zeros(m, m);
    for i in 0..m {
        psi[(i, i)] = diag[g.vertex_colour(i)];
    }
    for e in g.edges() {
        psi[(e.target, e.source)] = off[&e.colour];
        psi[(e.source, e.target)] = off[&e.colour];
    }
    psi
}

/// Ψ satisfies the RCON constraints on the undirected graph within `tol`.
pub fn in_rcon(g: &ColouredDag, psi: &DMatrix<f64>, tol: f64) -> bool {
    let m = g.num_vertices();
    let mut diag: BTreeMap<&str, f64> = BTreeMap::new();
    let mut off: BTreeMap<&str, f64> = BTreeMap::new();
    for i in 0..m {
        let d = *diag.entry(g.vertex_colour(i)).or_insert(psi[(i, i)]);
        if (d - psi[(i, i)]).abs() > tol {
            return false;
        }
        for j in 0..m {
            if i == j {
                continue;
            }
            let e = g.edge(j, i).or_else(|| g.edge(i, j));
            match e {
                Some(e) => {
                    let v = *off.entry(&e.colour).or_insert(psi[(i, j)]);
                    if (v - psi[(i, j)]).abs() > tol {
                        return false;
                    }
                }
                None => {
                    if psi[(i, j)].abs() > tol {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Ψ lies in the RDAG model: its Cholesky factor, taken in an order where
/// children precede parents, satisfies the constraints of A(G, c) within `tol`.
pub fn in_rdag(g: &ColouredDag, psi: &DMatrix<f64>, tol: f64) -> bool {
    let m = g.num_vertices();
    let order: Vec<usize> = g.topological_order().iter().rev().copied().collect();
    let permuted = DMatrix::from_fn(m, m, |a, b| psi[(order[a], order[b])]);
    let Some(chol) = permuted.cholesky() else {
        return false;
    };
    let upper = chol.l().transpose();
    let mut pos = vec![0; m];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    let a = DMatrix::from_fn(m, m, |i, j| upper[(pos[i], pos[j])]);
    let mut diag: BTreeMap<&str, f64> = BTreeMap::new();
    let mut off: BTreeMap<&str, f64> = BTreeMap::new();
    for i in 0..m {
        let d = *diag.entry(g.vertex_colour(i)).or_insert(a[(i, i)]);
        if (d - a[(i, i)]).abs() > tol {
            return false;
        }
        for j in 0..m {
            if i == j {
                continue;
            }
            match g.edge(j, i) {
                Some(e) => {
                    let v = *off.entry(&e.colour).or_insert(a[(i, j)]);
                    if (v - a[(i, j)]).abs() > tol {
                        return false;
                    }
                }
                None => {
                    if a[(i, j)].abs() > tol {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Model equality decided by sampling points of each model and testing
/// membership in the other.
pub fn rcon_equality_oracle(r: &mut ChaCha8Rng, g: &ColouredDag, points: usize) -> bool {
    for _ in 0..points {
        let a = real_member(r, g);
        if !in_rcon(g, &(a.transpose() * &a), 1e-8) {
            return false;
        }
        if !in_rdag(g, &rcon_point(r, g), 1e-8) {
            return false;
        }
    }
    true
}
