//! Decision support for putting a fast ML screener in front of a slow patch
//! validator.
//!
//! - [`metrics`]: confusion-matrix algebra and detector-to-screener inversion.
//! - [`bounds`]: closed-form throughput/time model and the two convenience bounds.
//! - [`simulate`]: seeded Monte Carlo oracle for the closed forms.
//! - [`catalog`]: built-in published detector data and the JSON catalog format.
//!
//! The metric and bound algebra is generic over [`Scalar`]; the aliases below
//! fix it to `f64` (the default everywhere) or to exact rationals.

pub mod bounds;
pub mod catalog;
pub mod error;
pub mod metrics;
pub mod scalar;
pub mod simulate;

pub use error::{ModelError, Result};
pub use scalar::Scalar;

/// Exact rational scalar, used by oracles and property tests.
pub type Exact = num_rational::Ratio<i128>;

pub type ConfusionCounts = metrics::ConfusionCounts<f64>;
pub type ClassifierSpec = metrics::ClassifierSpec<f64>;
pub type RateTriple = metrics::RateTriple<f64>;
pub type ScreenerMetrics = metrics::ScreenerMetrics<f64>;
pub type PipelineConfig = bounds::PipelineConfig<f64>;
pub type BoundsReport = bounds::BoundsReport<f64>;

pub type ExactCounts = metrics::ConfusionCounts<Exact>;
pub type ExactClassifierSpec = metrics::ClassifierSpec<Exact>;
pub type ExactPipelineConfig = bounds::PipelineConfig<Exact>;
