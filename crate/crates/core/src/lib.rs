//! Gaussian graphical models on vertex- and edge-coloured DAGs (RDAG models).
//!
//! The crate covers graph validation and colour statistics, structural
//! criteria (RCON equality, the group criterion), closed-form maximum
//! likelihood estimation with existence and uniqueness diagnosis, maximum
//! likelihood thresholds, stability classification and a simulation harness.
//!
//! ```
//! use rdag::{fit, fixtures, SampleMatrix, DEFAULT_TOL};
//!
//! let g = fixtures::mother_daughters();
//! let y = SampleMatrix::from_rows(&[vec![-4.08], vec![-2.27], vec![-8.51]]).unwrap();
//! let mle = fit(&g, &y, DEFAULT_TOL).unwrap();
//! assert!((mle.lambda["red"] - 0.373).abs() < 1e-3);
//! ```

pub mod augmented;
pub mod error;
pub mod estimator;
mod field;
pub mod fixtures;
pub mod graph;
pub mod io;
mod linalg;
pub mod simulation;
pub mod stability;
pub mod structure;
pub mod thresholds;

pub use nalgebra;

pub use augmented::{
    build_augmented, generic_rank, numeric_rank, row_in_span, AugmentedMatrix, SampleMatrix,
    SpanTest,
};
pub use error::{Error, Result};
pub use estimator::{
    classify, colour_residuals, concentration, fit, log_likelihood, mle_set,
    neg_log_likelihood_by_colour, ColourDiagnosis, KernelBasis, MleClassification, MleFit,
    MleSetDescription, MleVerdict, RdagParameters, DEFAULT_TOL,
};
pub use graph::{
    ColourStats, ColouredDag, CompatibilityReport, Edge, EdgeSpec, GraphDocument, VertexColouring,
    VertexId, VertexSpec, Violation,
};
pub use io::{load_graph, parse_samples, read_samples, FitDocument};
pub use simulation::{
    generate_random_rdag, run_comparison, sample_from_model, RandomModel, SimConfig, SimRecord,
};
pub use stability::{
    classify_stability, destabilising_element, stabiliser_basis, StabilityClass, StabilityReport,
};
pub use structure::{
    find_unshielded_colliders, has_monochrome_edge, is_group, is_transitive, rcon_equivalent,
    GroupDecision, RconDecision,
};
pub use thresholds::{
    compute_thresholds, threshold_bounds, Bounds, ThresholdReport, DEFAULT_TRIALS,
};
