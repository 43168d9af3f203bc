//! Stability of sample matrices under the determinant-one part of A(G, c),
//! decided through the equivalent linear-independence conditions.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::augmented::SampleMatrix;
use crate::error::{Error, Result};
use crate::estimator::{analyse, kernel_bases, ColourDiagnosis, KernelBasis};
use crate::graph::ColouredDag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StabilityClass {
    Unstable,
    PolystableNotStable,
    Stable,
}

impl StabilityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StabilityClass::Unstable => "Unstable",
            StabilityClass::PolystableNotStable => "PolystableNotStable",
            StabilityClass::Stable => "Stable",
        }
    }
}

impl std::fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub class: StabilityClass,
    pub colours: Vec<ColourDiagnosis>,
    /// Dimension of the stabiliser; `None` when the sample is unstable.
    pub stabiliser_dimension: Option<usize>,
}

pub fn classify_stability(g: &ColouredDag, y: &SampleMatrix, tol: f64) -> Result<StabilityReport> {
    let analysis = analyse(g, y, tol)?;
    let colours: Vec<ColourDiagnosis> = analysis
        .iter()
        .map(|a| ColourDiagnosis {
            colour: a.aug.colour.clone(),
            alpha: a.aug.alpha(),
            beta: a.aug.beta(),
            in_span: a.span.in_span,
            full_row_rank: a.span.full_row_rank(a.aug.beta()),
            parent_rank: a.span.parent_rank,
            residual_norm_sq: a.span.residual_norm_sq,
        })
        .collect();
    let (class, stabiliser_dimension) = if colours.iter().any(|c| c.in_span) {
        (StabilityClass::Unstable, None)
    } else {
        let dim: usize = colours.iter().map(|c| c.beta - c.parent_rank).sum();
        let class = if colours.iter().all(|c| c.full_row_rank) {
            StabilityClass::Stable
        } else {
            StabilityClass::PolystableNotStable
        };
        (class, Some(dim))
    };
    Ok(StabilityReport {
        class,
        colours,
        stabiliser_dimension,
    })
}

/// Per-colour coefficient vectors κ with Σ_t κ_t M^{(t)} = 0, spanning the
/// unipotent directions of the stabiliser of a polystable sample.
pub fn stabiliser_basis(g: &ColouredDag, y: &SampleMatrix, tol: f64) -> Result<Vec<KernelBasis>> {
    let analysis = analyse(g, y, tol)?;
    if let Some(a) = analysis.iter().find(|a| a.span.in_span) {
        return Err(Error::NotPolystable {
            colour: a.aug.colour.clone(),
        });
    }
    Ok(kernel_bases(&analysis, tol))
}

/// Expand a kernel vector of one colour into the matrix b with
/// b[i][j] = κ_t on every edge j -> i of colour t.
pub fn unipotent_direction(g: &ColouredDag, basis: &KernelBasis, vector: &[f64]) -> DMatrix<f64> {
    let m = g.num_vertices();
    let mut b = DMatrix::zeros(m, m);
    for e in g.edges() {
        if let Some(t) = basis.edge_colours.iter().position(|c| *c == e.colour) {
            b[(e.target, e.source)] = vector[t];
        }
    }
    b
}

/// For an unstable sample, an element a of A(G, c) with det a = 1 and
/// ‖aY‖ < eps. It combines the unipotent element that cancels the offending
/// colour's top row with a diagonal scaling that shrinks the other rows.
///
/// Returns `Ok(None)` when the sample is not unstable or when the residual
/// left by the projection is too large to reach `eps`.
pub fn destabilising_element(
    g: &ColouredDag,
    y: &SampleMatrix,
    tol: f64,
    eps: f64,
) -> Result<Option<DMatrix<f64>>> {
    let analysis = analyse(g, y, tol)?;
    let Some(a) = analysis.iter().find(|a| a.span.in_span) else {
        return Ok(None);
    };
    let m = g.num_vertices();
    let s = &a.aug.colour;
    let mut u = DMatrix::identity(m, m);
    for e in g.edges() {
        if let Some(t) = a.aug.row_labels[1..].iter().position(|c| *c == e.colour) {
            u[(e.target, e.source)] = -a.span.coefficients[t];
        }
    }
    let alpha = a.aug.alpha() as f64;
    let rest = m as f64 - alpha;
    let uy = &u * y.as_matrix();
    let (mut inside, mut outside) = (0.0, 0.0);
    for i in 0..m {
        let r = uy.row(i).norm_squared();
        if g.vertex_colour(i) == s {
            inside += r;
        } else {
            outside += r;
        }
    }
    // Colour s scaled by d_s, every other colour by d, with d_s^α d^(m−α) = 1.
    // d minimises inside·d^(−2k) + outside·d² for k = (m−α)/α.
    let k = rest / alpha;
    let d = if rest == 0.0 || outside == 0.0 {
        1.0
    } else if inside == 0.0 {
        (eps * eps / (4.0 * outside)).sqrt()
    } else {
        (k * inside / outside).powf(1.0 / (2.0 * k + 2.0))
    };
    let d_s = if rest == 0.0 {
        1.0
    } else {
        d.powf(-rest / alpha)
    };
    if inside * d_s * d_s + outside * d * d >= eps * eps {
        return Ok(None);
    }
    let mut out = u;
    for i in 0..m {
        let f = if g.vertex_colour(i) == s { d_s } else { d };
        out.row_mut(i).scale_mut(f);
    }
    Ok(Some(out))
}
