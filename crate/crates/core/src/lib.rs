//! Semi-supervised binary node classification on mixed graphs: a similar
//! graph whose edges join nodes likely to share a label and a dissimilar
//! graph whose edges join nodes likely to differ.
//!
//! Two propagation methods are provided, [`ir_mg`] (information
//! regularization) and [`wvrn_mg`] (weighted-vote relational neighbor), along
//! with the assortativity-based choice of the trade-off γ, graph
//! construction and the evaluation protocol.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`.

pub mod assortativity;
pub mod baseline;
pub mod construction;
pub mod divergence;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod ir_mg;
pub mod propagation;
pub mod scalar;
pub mod wvrn_mg;

pub use assortativity::{assortativity_matrix, gamma_from_nac, graph_nac, nac, AssortativityMatrix};
pub use construction::{
    extract_mixed, gen_two_gaussians, knn_gaussian_graph, mean_separation, seeded_rng, ExtractionModel, ExtractionSpec,
    FeatureMatrix, Sigma,
};
pub use divergence::{js, kl, objective_eq2, swap, Distribution2, LabeledPriors, ObjectiveParams};
pub use error::{Error, Result};
pub use evaluation::{
    auc, cv_gamma, grid_search_oracle, resolve_gamma, run_experiment, stratified_sample, CvConfig, Dataset,
    ExperimentSpec, ExperimentSummary, GammaPolicy, RealizationResult,
};
pub use graph::{
    build_graph, row_normalize, Class, EdgeKind, EdgeSpec, LabelAssignment, MixedGraph, MixedView, NodeId,
    SparseUndirectedGraph,
};
pub use ir_mg::{ir_run, PropagationConfig};
pub use propagation::{Method, Propagation, PropagationSettings, PropagationState};
pub use scalar::Scalar;
pub use wvrn_mg::{wvrn_run, AnnealConfig};

pub type Distribution = Distribution2<f64>;
pub type Graph = SparseUndirectedGraph<f64>;
pub type Mixed = MixedGraph<f64>;
pub type Priors = LabeledPriors<f64>;
pub type Features = FeatureMatrix<f64>;
