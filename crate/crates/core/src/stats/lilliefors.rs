//! Kolmogorov-Smirnov normality test with the Lilliefors correction.
//!
//! The KS distance is measured against a normal whose mean and standard
//! deviation are estimated from the sample itself, which invalidates the
//! standard KS null distribution. The p-value therefore comes from Monte
//! Carlo simulation: draw standard-normal samples of the same size, compute
//! each one's statistic the same way (re-estimating the parameters), and
//! read the observed statistic's tail rank off the simulated distribution.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::dist::norm_cdf;
use super::{check_finite, StatsError};
use crate::seeding::mix;

/// Minimum sample size accepted by the test.
pub const MIN_SAMPLE: usize = 4;

/// The KS distance of a sample from a normal with estimated parameters.
pub fn lilliefors_statistic(sample: &[f64]) -> Result<f64, StatsError> {
    if sample.len() < MIN_SAMPLE {
        return Err(StatsError::TooFewSamples {
            needed: MIN_SAMPLE,
            got: sample.len(),
        });
    }
    check_finite(sample)?;
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = sample.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if var <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let sd = var.sqrt();

    let mut sorted = sample.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));

    let mut d = 0.0f64;
    for (i, x) in sorted.iter().enumerate() {
        let cdf = norm_cdf((x - mean) / sd);
        let upper = (i + 1) as f64 / n - cdf; // D+
        let lower = cdf - i as f64 / n; // D-
        d = d.max(upper).max(lower);
    }
    Ok(d)
}

/// A simulated null distribution of the Lilliefors statistic for samples of
/// size `n`. Building one is the expensive part of the test; it can be
/// reused across any number of observed samples of the same size.
#[derive(Debug, Clone)]
pub struct LillieforsNull {
    n: usize,
    iterations: usize,
    /// Simulated statistics, sorted ascending.
    sorted: Vec<f64>,
}

impl LillieforsNull {
    /// Simulates `iterations` draws of the null statistic. Each iteration
    /// seeds its own generator from `(seed, iteration)`, so the table is
    /// identical no matter how or in what order it is produced.
    pub fn simulate(n: usize, iterations: usize, seed: u64) -> Result<Self, StatsError> {
        if n < MIN_SAMPLE {
            return Err(StatsError::TooFewSamples {
                needed: MIN_SAMPLE,
                got: n,
            });
        }
        let mut sorted = Vec::with_capacity(iterations);
        let mut draw = vec![0.0f64; n];
        for i in 0..iterations {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, i as u64));
            for slot in draw.iter_mut() {
                *slot = StandardNormal.sample(&mut rng);
            }
            // A degenerate draw has probability zero; treat it as distance 1.
            let stat = lilliefors_statistic(&draw).unwrap_or(1.0);
            sorted.push(stat);
        }
        sorted.sort_unstable_by(|a, b| a.total_cmp(b));
        Ok(Self {
            n,
            iterations,
            sorted,
        })
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    /// Monte Carlo p-value with the add-one correction:
    /// `(1 + #{simulated >= d}) / (iterations + 1)`.
    pub fn p_value(&self, d: f64) -> f64 {
        let below = self.sorted.partition_point(|s| *s < d);
        let ge = self.iterations - below;
        (1 + ge) as f64 / (self.iterations + 1) as f64
    }
}

/// Statistic plus Monte Carlo p-value in one call.
///
/// When testing many same-sized samples, build one [`LillieforsNull`] and
/// reuse it instead.
pub fn lilliefors_test(
    sample: &[f64],
    mc_iterations: usize,
    seed: u64,
) -> Result<(f64, f64), StatsError> {
    let d = lilliefors_statistic(sample)?;
    let null = LillieforsNull::simulate(sample.len(), mc_iterations, seed)?;
    Ok((d, null.p_value(d)))
}
