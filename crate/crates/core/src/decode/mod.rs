//! Inference and evaluation.

mod beam;
pub mod eval;
pub mod metrics;

pub use beam::{beam_search, greedy, BeamHypothesis, Constraint, Decoded};
pub use eval::{evaluate, EvalRecord, EvalReport, Predictor};
pub use metrics::{
    area_coverage, hull_accuracy, triangulation_metrics, tsp_metrics, Coverage, TourScore, TriangleScore,
};
