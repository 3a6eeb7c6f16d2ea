//! Reverse-mode autodiff, layer primitives, and the Adam optimizer.

pub mod adam;
pub mod gradcheck;
pub mod init;
mod kernels;
pub mod layers;
pub mod lstm;
pub mod params;
pub mod tape;
pub mod tensor;

pub use adam::{Adam, AdamConfig};
pub use gradcheck::gradient_check;
pub use layers::{activation, Activation, BatchNorm1d, Conv1d, ConvTranspose1d, Dense, Mode};
pub use lstm::{Lstm, LstmOutput};
pub use params::{BoundParams, GradientMap, ParamSet, StateMap};
pub use tape::{BatchStats, NodeId, Tape};
pub use tensor::Tensor;
