//! Simulation harness comparing coloured (RDAG) and uncoloured (DAG)
//! maximum likelihood estimation on random models.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::DMatrix;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augmented::SampleMatrix;
use crate::error::{Error, Result};
use crate::estimator::{classify, fit, MleFit, MleVerdict, RdagParameters, DEFAULT_TOL};
use crate::graph::{ColouredDag, EdgeSpec, GraphDocument, VertexSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Number of vertices.
    pub m: usize,
    /// Edge inclusion probability.
    pub p: f64,
    /// Number of edge colours.
    pub k: usize,
    /// Samples per replicate.
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    /// Error variances are drawn uniformly from [lo, hi).
    pub omega_range: (f64, f64),
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            m: 10,
            p: 0.5,
            k: 5,
            n: 100,
            replicates: 50,
            seed: 0,
            omega_range: (0.01, 1.0),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.m < 2 {
            return bad(format!("m must be at least 2, got {}", self.m));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return bad(format!("p must lie in (0, 1], got {}", self.p));
        }
        let pairs = self.m * (self.m - 1) / 2;
        if self.k < 1 || self.k > pairs {
            return bad(format!("K must lie in 1..={pairs}, got {}", self.k));
        }
        if self.n < 1 || self.replicates < 1 {
            return bad("n and replicates must be positive".into());
        }
        let (lo, hi) = self.omega_range;
        if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
            return bad(format!("invalid omega range [{lo}, {hi})"));
        }
        Ok(())
    }
}

/// A random coloured DAG with its true parameters.
#[derive(Debug, Clone)]
pub struct RandomModel {
    pub graph: ColouredDag,
    pub params: RdagParameters,
}

/// Independent per-replicate seed derived from the master seed.
pub fn replicate_seed(master: u64, replicate: usize) -> u64 {
    let mut z = master ^ (replicate as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform on [−1, −0.25] ∪ [0.25, 1].
pub fn draw_edge_weight<R: Rng>(rng: &mut R) -> f64 {
    let magnitude = rng.random_range(0.25..=1.0);
    if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

/// Erdős–Rényi skeleton on vertices 1..=m, edges directed from the larger to
/// the smaller id, edge colours drawn uniformly from K labels, and the finest
/// compatible vertex colouring.
pub fn generate_random_rdag(cfg: &SimConfig, seed: u64) -> Result<RandomModel> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let palette: Vec<String> = (0..cfg.k).map(|c| format!("e{c}")).collect();
    let mut edges = Vec::new();
    for j in 1..=cfg.m as u64 {
        for i in 1..j {
            if rng.random_bool(cfg.p) {
                edges.push(EdgeSpec {
                    source: j,
                    target: i,
                    colour: palette.choose(&mut rng).expect("K >= 1").clone(),
                });
            }
        }
    }
    let doc = GraphDocument {
        vertices: (1..=cfg.m as u64)
            .map(|id| VertexSpec {
                id,
                colour: String::new(),
            })
            .collect(),
        edges,
    };
    let skeleton = ColouredDag::from_document(&doc)?;
    let graph = skeleton.with_vertex_colouring(&skeleton.finest_compatible_vertex_colouring())?;

    let lambda: BTreeMap<String, f64> = graph
        .edge_colours()
        .into_iter()
        .map(|t| (t.to_string(), draw_edge_weight(&mut rng)))
        .collect();
    let (lo, hi) = cfg.omega_range;
    let omega: BTreeMap<String, f64> = graph
        .vertex_colours()
        .map(|s| (s.to_string(), rng.random_range(lo..hi)))
        .collect();
    Ok(RandomModel {
        graph,
        params: RdagParameters { lambda, omega },
    })
}

/// Draw n columns y = (I − Λ)⁻¹ ε with independent ε_i ~ N(0, ω_{c(i)}).
pub fn sample_from_model(
    g: &ColouredDag,
    params: &RdagParameters,
    n: usize,
    seed: u64,
) -> Result<SampleMatrix> {
    if n == 0 {
        return Err(Error::InvalidConfig(
            "sample count must be at least 1".into(),
        ));
    }
    let l = params.lambda_matrix(g)?;
    let w = params.omega_vector(g)?;
    if w.iter().any(|&x| x.is_nan() || x <= 0.0) {
        return Err(Error::InvalidConfig(
            "error variances must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let m = g.num_vertices();
    let mut y = DMatrix::zeros(m, n);
    for col in 0..n {
        for &i in g.topological_order() {
            let noise: f64 = rng.sample(StandardNormal);
            let mut v = noise * w[i].sqrt();
            for j in g.parents(i) {
                v += l[(i, j)] * y[(j, col)];
            }
            y[(i, col)] = v;
        }
    }
    SampleMatrix::new(y)
}

/// Per-edge λ followed by per-vertex ω, in the graph's edge and vertex order.
pub fn expanded_parameters(g: &ColouredDag, params: &RdagParameters) -> Result<Vec<f64>> {
    let l = params.lambda_matrix(g)?;
    let w = params.omega_vector(g)?;
    Ok(g.edges()
        .iter()
        .map(|e| l[(e.target, e.source)])
        .chain(w.iter().copied())
        .collect())
}

/// log10 of the Euclidean distance between expanded parameter vectors.
pub fn parameter_error(
    g: &ColouredDag,
    truth: &RdagParameters,
    estimate: &RdagParameters,
) -> Result<f64> {
    let a = expanded_parameters(g, truth)?;
    let b = expanded_parameters(g, estimate)?;
    let d2: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum();
    Ok(d2.sqrt().log10())
}

#[derive(Debug, Clone)]
pub struct SimRecord {
    pub replicate: usize,
    pub seed: u64,
    pub m: usize,
    pub p: f64,
    pub k: usize,
    pub n: usize,
    pub num_edges: usize,
    pub num_vertex_colours: usize,
    pub truth: RdagParameters,
    pub rdag_verdict: MleVerdict,
    pub dag_verdict: MleVerdict,
    pub rdag_error: Option<f64>,
    pub dag_error: Option<f64>,
    pub dag_fit: Option<MleFit>,
}

fn estimate(g: &ColouredDag, y: &SampleMatrix) -> Result<(MleVerdict, Option<MleFit>)> {
    let verdict = classify(g, y, DEFAULT_TOL)?.verdict;
    if verdict == MleVerdict::UnboundedLikelihood {
        return Ok((verdict, None));
    }
    Ok((verdict, Some(fit(g, y, DEFAULT_TOL)?)))
}

pub fn run_replicate(cfg: &SimConfig, replicate: usize) -> Result<SimRecord> {
    let seed = replicate_seed(cfg.seed, replicate);
    let model = generate_random_rdag(cfg, seed)?;
    let g = &model.graph;
    let y = sample_from_model(g, &model.params, cfg.n, seed)?;

    let (rdag_verdict, rdag_fit) = estimate(g, &y)?;
    let rdag_error = rdag_fit
        .map(|f| parameter_error(g, &model.params, &f.parameters()))
        .transpose()?;

    let dag = g.uncoloured();
    let (dag_verdict, dag_fit) = estimate(&dag, &y)?;
    let dag_error = match &dag_fit {
        Some(f) => {
            let truth = expanded_parameters(g, &model.params)?;
            let est = expanded_parameters(&dag, &f.parameters())?;
            let d2: f64 = truth.iter().zip(&est).map(|(a, b)| (a - b).powi(2)).sum();
            Some(d2.sqrt().log10())
        }
        None => None,
    };

    Ok(SimRecord {
        replicate,
        seed,
        m: cfg.m,
        p: cfg.p,
        k: cfg.k,
        n: cfg.n,
        num_edges: g.num_edges(),
        num_vertex_colours: g.vertex_colours().count(),
        truth: model.params,
        rdag_verdict,
        dag_verdict,
        rdag_error,
        dag_error,
        dag_fit,
    })
}

/// Run every replicate (in parallel); records come back ordered by replicate id.
pub fn run_comparison(cfg: &SimConfig) -> Result<Vec<SimRecord>> {
    cfg.validate()?;
    (0..cfg.replicates)
        .into_par_iter()
        .map(|r| run_replicate(cfg, r))
        .collect()
}

#[derive(Serialize)]
struct CsvRow<'a> {
    replicate: usize,
    seed: u64,
    m: usize,
    p: f64,
    #[serde(rename = "K")]
    k: usize,
    n: usize,
    num_vertex_colours: usize,
    rdag_verdict: &'a str,
    dag_verdict: &'a str,
    rdag_error: Option<f64>,
    dag_error: Option<f64>,
}

pub fn write_csv<W: Write>(records: &[SimRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow {
            replicate: r.replicate,
            seed: r.seed,
            m: r.m,
            p: r.p,
            k: r.k,
            n: r.n,
            num_vertex_colours: r.num_vertex_colours,
            rdag_verdict: r.rdag_verdict.as_str(),
            dag_verdict: r.dag_verdict.as_str(),
            rdag_error: r.rdag_error,
            dag_error: r.dag_error,
        })?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "<csv output>".into(),
        source: e,
    })?;
    Ok(())
}

/// Median of the finite values, if any.
pub fn median(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let h = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[h]
    } else {
        0.5 * (v[h - 1] + v[h])
    })
}
