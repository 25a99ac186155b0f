//! Pointer networks for planar combinatorial problems.
//!
//! The crate bundles everything needed to learn convex hulls, Delaunay
//! triangulations and small travelling-salesman tours with attention-based
//! sequence models:
//!
//! - [`tensor`]: 64-bit tensors with a reverse-mode tape,
//! - [`geometry`] and [`tsp`]: exact solvers that label the training data,
//! - [`dataset`]: deterministic generation and the line-oriented file format,
//! - [`nn`]: LSTM encoder/decoder models (pointer network and two baselines),
//!   training and checkpoints,
//! - [`decode`]: greedy and beam decoding plus the evaluation metrics,
//! - [`plot`]: SVG rendering of examples and predictions.

pub mod dataset;
pub mod decode;
pub mod error;
pub mod geometry;
pub mod nn;
pub mod parallel;
pub mod plot;
pub mod tensor;
pub mod tsp;

pub use error::{Error, Result};
pub use geometry::Point;
