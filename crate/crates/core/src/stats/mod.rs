//! Statistical tests behind the significance protocol.
//!
//! Everything here is implemented directly (no external stats crate): the
//! Lilliefors-corrected Kolmogorov-Smirnov normality test with Monte Carlo
//! p-values, the two-sided rank-sum test with an exact small-sample path,
//! Levene's variance test, and Welch/Student t-tests. Distribution CDFs live
//! in [`dist`] and are cross-checked against quadrature in the test suite.

pub mod dist;
pub mod lilliefors;
pub mod protocol;
pub mod ttests;
pub mod wilcoxon;

pub use lilliefors::{lilliefors_statistic, lilliefors_test, LillieforsNull};
pub use protocol::{significance_protocol, ProtocolConfig, StatTestReport, TestBranch};
pub use ttests::{levene_test, student_t, welch_t};
pub use wilcoxon::{wilcoxon_exact, wilcoxon_normal_approx, wilcoxon_rank_sum};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("sample too small: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("sample is empty")]
    EmptySample,
    #[error("sample has zero variance")]
    ZeroVariance,
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("{stage}: {source}")]
    Protocol {
        stage: &'static str,
        #[source]
        source: Box<StatsError>,
    },
}

impl StatsError {
    pub(crate) fn at(self, stage: &'static str) -> StatsError {
        StatsError::Protocol {
            stage,
            source: Box::new(self),
        }
    }
}

pub(crate) fn check_finite(sample: &[f64]) -> Result<(), StatsError> {
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

pub(crate) fn mean(sample: &[f64]) -> f64 {
    sample.iter().sum::<f64>() / sample.len() as f64
}

/// Unbiased sample variance (n - 1 denominator); 0 for fewer than 2 points.
pub(crate) fn sample_variance(sample: &[f64]) -> f64 {
    if sample.len() < 2 {
        return 0.0;
    }
    let m = mean(sample);
    sample.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (sample.len() - 1) as f64
}
