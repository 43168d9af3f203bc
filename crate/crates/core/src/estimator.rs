//! Closed-form maximum likelihood estimation for RDAG models.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::augmented::{build_augmented, row_in_span, AugmentedMatrix, SampleMatrix, SpanTest};
use crate::error::{Error, Result};
use crate::graph::ColouredDag;
use crate::linalg;

/// Default relative tolerance for rank and span decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Colour-indexed model parameters: one regression coefficient per edge colour
/// and one error variance per vertex colour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RdagParameters {
    pub lambda: BTreeMap<String, f64>,
    pub omega: BTreeMap<String, f64>,
}

impl RdagParameters {
    fn lambda_of(&self, colour: &str) -> Result<f64> {
        self.lambda
            .get(colour)
            .copied()
            .ok_or_else(|| Error::MissingParameter(colour.to_string()))
    }

    fn omega_of(&self, colour: &str) -> Result<f64> {
        self.omega
            .get(colour)
            .copied()
            .ok_or_else(|| Error::MissingParameter(colour.to_string()))
    }

    /// The full m×m coefficient matrix Λ with Λ[i][j] = λ on each edge j -> i.
    pub fn lambda_matrix(&self, g: &ColouredDag) -> Result<DMatrix<f64>> {
        let m = g.num_vertices();
        let mut l = DMatrix::zeros(m, m);
        for e in g.edges() {
            l[(e.target, e.source)] = self.lambda_of(&e.colour)?;
        }
        Ok(l)
    }

    /// Per-vertex error variances.
    pub fn omega_vector(&self, g: &ColouredDag) -> Result<DVector<f64>> {
        let m = g.num_vertices();
        let mut w = DVector::zeros(m);
        for i in 0..m {
            w[i] = self.omega_of(g.vertex_colour(i))?;
        }
        Ok(w)
    }
}

/// A maximum likelihood estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct MleFit {
    pub lambda: BTreeMap<String, f64>,
    pub omega: BTreeMap<String, f64>,
    /// Squared projection residual ζ_s per vertex colour.
    pub residuals: BTreeMap<String, f64>,
    pub unique: bool,
    pub log_likelihood: f64,
}

impl MleFit {
    pub fn parameters(&self) -> RdagParameters {
        RdagParameters {
            lambda: self.lambda.clone(),
            omega: self.omega.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MleVerdict {
    UnboundedLikelihood,
    ExistsNonUnique,
    ExistsUnique,
}

impl MleVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            MleVerdict::UnboundedLikelihood => "UnboundedLikelihood",
            MleVerdict::ExistsNonUnique => "ExistsNonUnique",
            MleVerdict::ExistsUnique => "ExistsUnique",
        }
    }
}

impl std::fmt::Display for MleVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Linear-independence evidence for one vertex colour.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColourDiagnosis {
    pub colour: String,
    pub alpha: usize,
    pub beta: usize,
    pub in_span: bool,
    pub full_row_rank: bool,
    pub parent_rank: usize,
    pub residual_norm_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MleClassification {
    pub verdict: MleVerdict,
    pub colours: Vec<ColourDiagnosis>,
}

pub(crate) struct ColourAnalysis {
    pub aug: AugmentedMatrix,
    pub span: SpanTest,
}

impl ColourAnalysis {
    fn diagnosis(&self) -> ColourDiagnosis {
        let beta = self.aug.beta();
        ColourDiagnosis {
            colour: self.aug.colour.clone(),
            alpha: self.aug.alpha(),
            beta,
            in_span: self.span.in_span,
            full_row_rank: self.span.full_row_rank(beta),
            parent_rank: self.span.parent_rank,
            residual_norm_sq: self.span.residual_norm_sq,
        }
    }
}

pub(crate) fn analyse(g: &ColouredDag, y: &SampleMatrix, tol: f64) -> Result<Vec<ColourAnalysis>> {
    g.require_compatible()?;
    if y.nrows() != g.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: g.num_vertices(),
            found: y.nrows(),
        });
    }
    g.vertex_colours()
        .map(|s| {
            let aug = build_augmented(g, y, s)?;
            let span = row_in_span(&aug, tol);
            Ok(ColourAnalysis { aug, span })
        })
        .collect()
}

pub(crate) fn verdict_of(diag: &[ColourDiagnosis]) -> MleVerdict {
    if diag.iter().any(|d| d.in_span) {
        MleVerdict::UnboundedLikelihood
    } else if diag.iter().all(|d| d.full_row_rank) {
        MleVerdict::ExistsUnique
    } else {
        MleVerdict::ExistsNonUnique
    }
}

/// Decide whether the MLE exists, and whether it is unique.
pub fn classify(g: &ColouredDag, y: &SampleMatrix, tol: f64) -> Result<MleClassification> {
    let colours: Vec<ColourDiagnosis> = analyse(g, y, tol)?.iter().map(|a| a.diagnosis()).collect();
    Ok(MleClassification {
        verdict: verdict_of(&colours),
        colours,
    })
}

fn fit_from(analysis: &[ColourAnalysis], samples: usize) -> Result<MleFit> {
    let mut lambda = BTreeMap::new();
    let mut omega = BTreeMap::new();
    let mut residuals = BTreeMap::new();
    let mut unique = true;
    let mut log_likelihood = 0.0;
    for a in analysis {
        if a.span.in_span {
            return Err(Error::NoMle {
                colour: a.aug.colour.clone(),
            });
        }
        let beta = a.aug.beta();
        unique &= a.span.full_row_rank(beta);
        for (t, label) in a.aug.row_labels[1..].iter().enumerate() {
            lambda.insert(label.clone(), a.span.coefficients[t]);
        }
        let alpha = a.aug.alpha() as f64;
        let zeta = a.span.residual_norm_sq;
        let w = zeta / (alpha * samples as f64);
        omega.insert(a.aug.colour.clone(), w);
        residuals.insert(a.aug.colour.clone(), zeta);
        log_likelihood -= alpha * (w.ln() + 1.0);
    }
    Ok(MleFit {
        lambda,
        omega,
        residuals,
        unique,
        log_likelihood,
    })
}

/// Compute the MLE by projecting each top row onto its parent rows.
/// Non-unique fits return the minimal-norm coefficients.
pub fn fit(g: &ColouredDag, y: &SampleMatrix, tol: f64) -> Result<MleFit> {
    fit_from(&analyse(g, y, tol)?, y.ncols())
}

/// Ψ = (I − Λ)ᵀ Ω⁻¹ (I − Λ).
pub fn concentration(g: &ColouredDag, params: &RdagParameters) -> Result<DMatrix<f64>> {
    let m = g.num_vertices();
    let b = DMatrix::identity(m, m) - params.lambda_matrix(g)?;
    let w = params.omega_vector(g)?;
    if w.iter().any(|&x| x.is_nan() || x <= 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let mut scaled = b.clone();
    for i in 0..m {
        scaled.row_mut(i).scale_mut(1.0 / w[i]);
    }
    let psi = b.transpose() * scaled;
    Ok((&psi + psi.transpose()) * 0.5)
}

/// ℓ_Y(Ψ) = log det Ψ − tr(Ψ S_Y) with S_Y = (1/n) Y Yᵀ.
pub fn log_likelihood(psi: &DMatrix<f64>, y: &SampleMatrix) -> Result<f64> {
    let m = y.nrows();
    if psi.shape() != (m, m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: psi.nrows(),
        });
    }
    let chol = psi.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let log_det = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let trace = psi.component_mul(&y.covariance()).sum();
    Ok(log_det - trace)
}

/// Squared residual ζ_s(λ) of each vertex colour for the given coefficients.
pub fn colour_residuals(
    g: &ColouredDag,
    y: &SampleMatrix,
    lambda: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, f64>> {
    let params = RdagParameters {
        lambda: lambda.clone(),
        omega: BTreeMap::new(),
    };
    let l = params.lambda_matrix(g)?;
    let m = g.num_vertices();
    let r = (DMatrix::identity(m, m) - l) * y.as_matrix();
    let mut out: BTreeMap<String, f64> = g.vertex_colours().map(|s| (s.to_string(), 0.0)).collect();
    for i in 0..m {
        *out.get_mut(g.vertex_colour(i)).expect("declared colour") += r.row(i).norm_squared();
    }
    Ok(out)
}

/// −ℓ_Y written colour by colour: Σ_s α_s log ω_s + ζ_s(λ) / (n ω_s).
pub fn neg_log_likelihood_by_colour(
    g: &ColouredDag,
    y: &SampleMatrix,
    params: &RdagParameters,
) -> Result<f64> {
    let zeta = colour_residuals(g, y, &params.lambda)?;
    let n = y.ncols() as f64;
    let mut total = 0.0;
    for (s, z) in &zeta {
        let w = params.omega_of(s)?;
        total += g.alpha(s) as f64 * w.ln() + z / (n * w);
    }
    Ok(total)
}

/// Basis of coefficient directions κ with Σ_t κ_t M^{(t)} = 0 for one colour.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelBasis {
    pub colour: String,
    /// Edge colours indexing the entries of each vector.
    pub edge_colours: Vec<String>,
    pub vectors: Vec<Vec<f64>>,
}

/// All maximum likelihood estimates: a base fit plus kernel directions along
/// which λ may move without changing Ω or the likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct MleSetDescription {
    pub fit: MleFit,
    pub kernels: Vec<KernelBasis>,
}

impl MleSetDescription {
    pub fn dimension(&self) -> usize {
        self.kernels.iter().map(|k| k.vectors.len()).sum()
    }

    /// λ = base + Σ c_k κ_k, with one coefficient per kernel vector in
    /// the order of `kernels`.
    pub fn lambda_at(&self, coefficients: &[f64]) -> Result<BTreeMap<String, f64>> {
        if coefficients.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: coefficients.len(),
            });
        }
        let mut lambda = self.fit.lambda.clone();
        let mut c = coefficients.iter();
        for k in &self.kernels {
            for v in &k.vectors {
                let ck = c.next().expect("length checked");
                for (t, x) in k.edge_colours.iter().zip(v) {
                    *lambda.get_mut(t).expect("kernel colour has a coefficient") += ck * x;
                }
            }
        }
        Ok(lambda)
    }
}

pub(crate) fn kernel_bases(analysis: &[ColourAnalysis], tol: f64) -> Vec<KernelBasis> {
    analysis
        .iter()
        .map(|a| {
            let basis = linalg::left_kernel(&a.aug.parent_rows(), tol);
            KernelBasis {
                colour: a.aug.colour.clone(),
                edge_colours: a.aug.row_labels[1..].to_vec(),
                vectors: basis
                    .column_iter()
                    .map(|c| c.iter().copied().collect())
                    .collect(),
            }
        })
        .collect()
}

pub fn mle_set(g: &ColouredDag, y: &SampleMatrix, tol: f64) -> Result<MleSetDescription> {
    let analysis = analyse(g, y, tol)?;
    let fit = fit_from(&analysis, y.ncols())?;
    Ok(MleSetDescription {
        fit,
        kernels: kernel_bases(&analysis, tol),
    })
}
