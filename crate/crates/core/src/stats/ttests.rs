//! Levene's variance test and the Student / Welch t-tests (all two-sided).

use super::dist::{f_sf, t_two_sided_p};
use super::{check_finite, mean, sample_variance, StatsError};

fn check_pair(a: &[f64], b: &[f64]) -> Result<(), StatsError> {
    for sample in [a, b] {
        if sample.len() < 2 {
            return Err(StatsError::TooFewSamples {
                needed: 2,
                got: sample.len(),
            });
        }
        check_finite(sample)?;
    }
    Ok(())
}

/// Levene's test for equality of variances, using mean-centered absolute
/// deviations. Returns `(W, p)` with `p` from F(1, n + m - 2).
pub fn levene_test(a: &[f64], b: &[f64]) -> Result<(f64, f64), StatsError> {
    check_pair(a, b)?;
    let dev = |sample: &[f64]| -> Vec<f64> {
        let m = mean(sample);
        sample.iter().map(|v| (v - m).abs()).collect()
    };
    let za = dev(a);
    let zb = dev(b);
    let n = za.len() as f64;
    let m = zb.len() as f64;
    let big_n = n + m;
    let mean_za = mean(&za);
    let mean_zb = mean(&zb);
    let grand = (n * mean_za + m * mean_zb) / big_n;

    let numerator = (big_n - 2.0) * (n * (mean_za - grand).powi(2) + m * (mean_zb - grand).powi(2));
    let denominator: f64 = za.iter().map(|z| (z - mean_za).powi(2)).sum::<f64>()
        + zb.iter().map(|z| (z - mean_zb).powi(2)).sum::<f64>();

    if numerator == 0.0 {
        // Group deviations agree exactly; no evidence against equal variances.
        return Ok((0.0, 1.0));
    }
    if denominator == 0.0 {
        // Deviations are constant within groups but differ between them.
        return Ok((f64::INFINITY, 0.0));
    }
    let w = numerator / denominator;
    Ok((w, f_sf(w, 1.0, big_n - 2.0)))
}

/// Classic two-sample t-test with pooled variance; df = n + m - 2.
pub fn student_t(a: &[f64], b: &[f64]) -> Result<(f64, f64), StatsError> {
    check_pair(a, b)?;
    let n = a.len() as f64;
    let m = b.len() as f64;
    let va = sample_variance(a);
    let vb = sample_variance(b);
    let pooled = ((n - 1.0) * va + (m - 1.0) * vb) / (n + m - 2.0);
    if pooled <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let se = (pooled * (1.0 / n + 1.0 / m)).sqrt();
    let t = (mean(a) - mean(b)) / se;
    let df = n + m - 2.0;
    Ok((t, t_two_sided_p(t, df)))
}

/// Welch's t-test for unequal variances, with Welch-Satterthwaite df.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<(f64, f64), StatsError> {
    check_pair(a, b)?;
    let n = a.len() as f64;
    let m = b.len() as f64;
    let va = sample_variance(a) / n;
    let vb = sample_variance(b) / m;
    let se2 = va + vb;
    if se2 <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let t = (mean(a) - mean(b)) / se2.sqrt();
    let df = se2 * se2 / (va * va / (n - 1.0) + vb * vb / (m - 1.0));
    Ok((t, t_two_sided_p(t, df)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_levene_statistic_is_zero() {
        let s = [1.0, 4.0, 2.0, 8.0, 5.0];
        let (w, p) = levene_test(&s, &s).unwrap();
        assert_eq!(w, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn equal_means_unequal_sizes_student_t_is_zero() {
        // Both samples have mean 5 and nonzero variance.
        let a = [4.0, 6.0, 5.0];
        let b = [3.0, 7.0, 4.0, 6.0, 5.0, 5.0];
        let (t, p) = student_t(&a, &b).unwrap();
        assert!(t.abs() < 1e-12);
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_in_both_samples_errors() {
        let a = [2.0, 2.0, 2.0];
        let b = [7.0, 7.0];
        assert!(matches!(student_t(&a, &b), Err(StatsError::ZeroVariance)));
        assert!(matches!(welch_t(&a, &b), Err(StatsError::ZeroVariance)));
    }

    #[test]
    fn tiny_samples_error() {
        assert!(matches!(
            student_t(&[1.0], &[1.0, 2.0]),
            Err(StatsError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn obvious_mean_shift_is_significant() {
        let a: Vec<f64> = (0..30).map(|i| (i as f64 * 0.71).sin()).collect();
        let b: Vec<f64> = a.iter().map(|v| v + 10.0).collect();
        let (_, p_student) = student_t(&a, &b).unwrap();
        let (_, p_welch) = welch_t(&a, &b).unwrap();
        assert!(p_student < 1e-6);
        assert!(p_welch < 1e-6);
    }

    #[test]
    fn blatant_variance_gap_detected_by_levene() {
        let a: Vec<f64> = (0..40).map(|i| (i as f64 * 0.71).sin() * 0.1).collect();
        let b: Vec<f64> = (0..40).map(|i| (i as f64 * 0.43).cos() * 25.0).collect();
        let (w, p) = levene_test(&a, &b).unwrap();
        assert!(w > 10.0);
        assert!(p < 0.001);
    }

    #[test]
    fn welch_and_student_agree_when_variances_match() {
        let a: Vec<f64> = (0..25)
            .map(|i| (i as f64 * 0.77).sin() * 2.0 + 1.0)
            .collect();
        let b: Vec<f64> = (0..25)
            .map(|i| (i as f64 * 0.77).cos() * 2.0 + 1.2)
            .collect();
        let (ta, pa) = student_t(&a, &b).unwrap();
        let (tb, pb) = welch_t(&a, &b).unwrap();
        assert!((ta - tb).abs() < 0.05);
        assert!((pa - pb).abs() < 0.05);
    }
}
