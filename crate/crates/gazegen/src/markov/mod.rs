//! Markov-family baselines: Gaussian-emission HMMs fit by Baum–Welch and
//! k-th order KDE Markov models with Silverman bandwidths.

pub mod hmm;
pub mod kde;

pub use hmm::{
    gaussian_pdf, hmm_baum_welch, hmm_forward_backward, hmm_sample, hmm_state_selection,
    FitTrace, ForwardBackwardResult, HmmFit, HmmFitOptions, HmmModel, InitSpec, ReseedEvent,
    StateSelection, StateSelectionRow, VAR_FLOOR,
};
pub use kde::{
    kde_markov_sample, silverman_bandwidth, KdeMarkovModel, KdeSample, SUPPORT_FLOOR,
};
