//! Sequence models over point sets and their training loop.

mod attention;
pub mod checkpoint;
mod lstm;
mod model;
mod params;
pub mod train;

pub use attention::{Attention, Memory};
pub use checkpoint::Checkpoint;
pub use lstm::{LstmCell, LstmState};
pub use model::{Arch, DecoderState, Encoded, Model};
pub use params::{ParamStore, Parameter};
pub use train::{train, HyperParams, TrainOptions, TrainRecord};
