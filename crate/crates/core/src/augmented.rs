//! Sample matrices, augmented sample matrices and their rank services.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field;
use crate::graph::{ColouredDag, VertexId};
use crate::linalg;

pub use crate::linalg::numeric_rank;

/// An m×n matrix of observations; row i belongs to the i-th vertex in
/// ascending-id order and each column is one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    data: DMatrix<f64>,
}

impl SampleMatrix {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::InvalidSamples(format!(
                "sample matrix must be non-empty, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            let (r, c) = (pos % data.nrows(), pos / data.nrows());
            return Err(Error::InvalidSamples(format!(
                "entry ({}, {}) is not finite",
                r + 1,
                c + 1
            )));
        }
        Ok(SampleMatrix { data })
    }

    /// Build from row vectors (one per vertex).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::RaggedRows {
                    line: i + 1,
                    expected: n,
                    found: r.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    /// Subtract each row's sample mean.
    pub fn centred(&self) -> SampleMatrix {
        let means: Vec<f64> = self.data.row_iter().map(|r| r.mean()).collect();
        self.minus_means(&means)
            .expect("one mean per row by construction")
    }

    /// Subtract a given mean from each row.
    pub fn minus_means(&self, means: &[f64]) -> Result<SampleMatrix> {
        if means.len() != self.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.nrows(),
                found: means.len(),
            });
        }
        let mut data = self.data.clone();
        for (i, mu) in means.iter().enumerate() {
            data.row_mut(i).add_scalar_mut(-mu);
        }
        SampleMatrix::new(data)
    }

    /// Sample covariance (1/n) Y Yᵀ.
    pub fn covariance(&self) -> DMatrix<f64> {
        &self.data * self.data.transpose() / self.ncols() as f64
    }

    fn check_rows(&self, g: &ColouredDag) -> Result<()> {
        if self.nrows() != g.num_vertices() {
            return Err(Error::DimensionMismatch {
                expected: g.num_vertices(),
                found: self.nrows(),
            });
        }
        Ok(())
    }
}

/// Which parent rows feed which block, for one vertex colour.
#[derive(Debug, Clone)]
struct Layout {
    blocks: Vec<usize>,
    rows: Vec<String>,
    /// (row index >= 1, block, source vertex)
    terms: Vec<(usize, usize, usize)>,
}

fn layout(g: &ColouredDag, colour: &str) -> Result<Layout> {
    let blocks = g
        .colour_class(colour)
        .ok_or_else(|| Error::UnknownColour(colour.to_string()))?
        .to_vec();
    let rows: Vec<String> = g
        .prc(colour)
        .expect("declared colour has a prc entry")
        .iter()
        .cloned()
        .collect();
    let mut terms = Vec::new();
    for (b, &k) in blocks.iter().enumerate() {
        for e in g.in_edges(k) {
            let t = rows
                .iter()
                .position(|r| *r == e.colour)
                .expect("edge colour is in prc of its target colour");
            terms.push((t + 1, b, e.source));
        }
    }
    Ok(Layout {
        blocks,
        rows,
        terms,
    })
}

/// The augmented sample matrix of one vertex colour.
///
/// Row 0 concatenates the samples of the colour-s vertices; row t sums, per
/// block, the samples of the parents joined by an edge of colour `row_labels[t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedMatrix {
    pub colour: String,
    /// Row 0 carries the vertex colour; rows 1.. the sorted parent-relationship colours.
    pub row_labels: Vec<String>,
    /// Vertex ids of the blocks, ascending.
    pub blocks: Vec<VertexId>,
    pub samples: usize,
    pub matrix: DMatrix<f64>,
}

impl AugmentedMatrix {
    pub fn alpha(&self) -> usize {
        self.blocks.len()
    }

    pub fn beta(&self) -> usize {
        self.row_labels.len() - 1
    }

    pub fn top_row(&self) -> DVector<f64> {
        self.matrix.row(0).transpose()
    }

    /// M without its top row.
    pub fn parent_rows(&self) -> DMatrix<f64> {
        self.matrix.rows(1, self.beta()).into_owned()
    }
}

pub fn build_augmented(g: &ColouredDag, y: &SampleMatrix, colour: &str) -> Result<AugmentedMatrix> {
    y.check_rows(g)?;
    let lay = layout(g, colour)?;
    let n = y.ncols();
    let data = y.as_matrix();
    let mut matrix = DMatrix::zeros(lay.rows.len() + 1, lay.blocks.len() * n);
    for (b, &v) in lay.blocks.iter().enumerate() {
        matrix.view_mut((0, b * n), (1, n)).copy_from(&data.row(v));
    }
    for &(t, b, j) in &lay.terms {
        let mut dst = matrix.view_mut((t, b * n), (1, n));
        dst += data.row(j);
    }
    let mut row_labels = Vec::with_capacity(lay.rows.len() + 1);
    row_labels.push(colour.to_string());
    row_labels.extend(lay.rows);
    Ok(AugmentedMatrix {
        colour: colour.to_string(),
        row_labels,
        blocks: lay.blocks.iter().map(|&i| g.vertex_id(i)).collect(),
        samples: n,
        matrix,
    })
}

/// Outcome of projecting the top row onto the span of the parent rows.
#[derive(Debug, Clone)]
pub struct SpanTest {
    pub in_span: bool,
    pub residual_norm_sq: f64,
    /// Minimal-norm coefficients, ordered like `row_labels[1..]`.
    pub coefficients: DVector<f64>,
    /// Numeric rank of the parent rows.
    pub parent_rank: usize,
}

impl SpanTest {
    /// M has full row rank.
    pub fn full_row_rank(&self, beta: usize) -> bool {
        !self.in_span && self.parent_rank == beta
    }
}

pub fn row_in_span(m: &AugmentedMatrix, tol: f64) -> SpanTest {
    let top = m.top_row();
    let top_sq = top.norm_squared();
    let p = linalg::project_onto_rows(&m.parent_rows(), &top, tol);
    let in_span = top_sq == 0.0 || p.residual_norm_sq <= tol * tol * top_sq;
    SpanTest {
        in_span,
        residual_norm_sq: if top_sq == 0.0 {
            0.0
        } else {
            p.residual_norm_sq
        },
        coefficients: p.coefficients,
        parent_rank: p.rank,
    }
}

/// Rank of M_{Y,s} (or of M' without the top row) for generic Y, evaluated at
/// uniformly random points of a 61-bit prime field. The maximum over `trials`
/// independent evaluations is returned.
pub fn generic_rank(
    g: &ColouredDag,
    colour: &str,
    samples: usize,
    include_top_row: bool,
    seed: u64,
    trials: usize,
) -> Result<usize> {
    if samples == 0 {
        return Err(Error::InvalidConfig(
            "sample count must be at least 1".into(),
        ));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let lay = layout(g, colour)?;
    let mut best = 0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let y = random_field_samples(&mut rng, g.num_vertices(), samples);
        let rows = field_rows(&lay, &y, samples, include_top_row);
        best = best.max(field::rank(rows));
    }
    Ok(best)
}

/// Generic ranks of both M and M' from the same random evaluations.
pub(crate) fn generic_rank_pair(
    g: &ColouredDag,
    colour: &str,
    samples: usize,
    seed: u64,
    trials: usize,
) -> Result<(usize, usize)> {
    let lay = layout(g, colour)?;
    let (mut full, mut parents) = (0, 0);
    for trial in 0..trials.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let y = random_field_samples(&mut rng, g.num_vertices(), samples);
        full = full.max(field::rank(field_rows(&lay, &y, samples, true)));
        parents = parents.max(field::rank(field_rows(&lay, &y, samples, false)));
    }
    Ok((full, parents))
}

fn random_field_samples(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<Vec<u64>> {
    (0..m)
        .map(|_| {
            (0..n)
                .map(|_| rng.random_range(0..field::MODULUS))
                .collect()
        })
        .collect()
}

fn field_rows(lay: &Layout, y: &[Vec<u64>], n: usize, include_top_row: bool) -> Vec<Vec<u64>> {
    let width = lay.blocks.len() * n;
    let mut rows = vec![vec![0u64; width]; lay.rows.len() + 1];
    for (b, &v) in lay.blocks.iter().enumerate() {
        rows[0][b * n..(b + 1) * n].copy_from_slice(&y[v]);
    }
    for &(t, b, j) in &lay.terms {
        for (dst, &src) in rows[t][b * n..(b + 1) * n].iter_mut().zip(&y[j]) {
            *dst = field::add(*dst, src);
        }
    }
    if !include_top_row {
        rows.remove(0);
    }
    rows
}
