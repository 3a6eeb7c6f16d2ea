//! Modeling eye-gaze velocity time series.
//!
//! The crate trains spectrally regularized GANs (LSTM or CNN generators and
//! discriminators) on fixed-length velocity sequences, fits Markov-family
//! baselines (Gaussian-emission hidden Markov models, k-th order kernel
//! density Markov models), simulates correlated-random-walk data, and scores
//! synthetic output against real data with Jensen–Shannon divergence,
//! spectral distance, autocorrelation curves, and moment statistics.
//!
//! Modules:
//! - [`neural`]: tape-based reverse-mode autodiff, layer primitives, Adam.
//! - [`spectral`]: discrete Fourier transform and the spectral loss.
//! - [`gan`]: architectures, adversarial losses, training, sweeps.
//! - [`markov`]: Baum–Welch HMMs and KDE Markov models.
//! - [`metrics`]: histograms, divergences, ACF, moments, reports.
//! - [`data`]: recordings, velocity derivation, normalization, CRW simulator.
//! - [`commands`]: file-based orchestration behind the `gazegen` binary.

pub mod commands;
pub mod data;
pub mod error;
pub mod gan;
pub mod markov;
pub mod metrics;
pub mod neural;
pub mod plot;
pub mod spectral;

pub use error::{Error, Result};
