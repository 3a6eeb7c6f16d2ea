//! Distributional and temporal fidelity measures.

pub mod acf;
pub mod histogram;
pub mod moments;
pub mod report;

pub use acf::{acf, acf_mean_over_sequences};
pub use histogram::{
    histogram, js_divergence, js_from_samples, kl_divergence, HistogramDistribution,
    DEFAULT_BINS, DEFAULT_HIST_EPS,
};
pub use moments::{moments, Moments};
pub use report::{evaluation_report, AcfCurves, EvaluationReport, MomentPair, ReportSettings};
