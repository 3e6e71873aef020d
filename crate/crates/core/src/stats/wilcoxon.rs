//! Two-sided Wilcoxon rank-sum (Mann-Whitney) test for independent samples.
//!
//! Small problems (`n * m <= 400`) get an exact p-value from the permutation
//! distribution of the rank sum, computed by dynamic programming over the
//! pooled midranks, which remains exact under ties. Larger problems use the
//! normal approximation with tie correction and continuity correction.

use super::dist::norm_cdf;
use super::StatsError;

/// Exact enumeration is used when `n * m` is at or below this bound.
pub const EXACT_LIMIT: usize = 400;

/// Midranks of the pooled samples, returned in the pooled order (a then b),
/// plus the tie-group sizes.
fn midranks(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut pooled: Vec<(f64, usize)> = a
        .iter()
        .chain(b.iter())
        .copied()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let midrank = (i + j + 1) as f64 / 2.0; // average of ranks i+1..=j
        for k in i..j {
            ranks[pooled[k].1] = midrank;
        }
        ties.push(j - i);
        i = j;
    }
    (ranks, ties)
}

/// Statistic `U` of the first sample and the exact two-sided p-value.
///
/// The null distribution is the rank sum of a uniformly random size-`n`
/// subset of the pooled midranks (the permutation distribution conditional
/// on the observed tie pattern). Doubling the midranks makes every value an
/// integer, so subset counts can be tabulated exactly.
pub fn wilcoxon_exact(a: &[f64], b: &[f64]) -> Result<(f64, f64), StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let (ranks, _) = midranks(a, b);
    let w_a: f64 = ranks[..a.len()].iter().sum();

    // DP over the smaller side keeps the table narrow.
    let (small_len, small_is_a) = if a.len() <= b.len() {
        (a.len(), true)
    } else {
        (b.len(), false)
    };
    let doubled: Vec<u64> = ranks.iter().map(|r| (r * 2.0).round() as u64).collect();
    let total: u64 = doubled.iter().sum(); // equals N(N+1) exactly

    // counts[j][s] = number of size-j subsets of the doubled midranks with sum s
    let max_sum = total as usize;
    let mut counts = vec![vec![0.0f64; max_sum + 1]; small_len + 1];
    counts[0][0] = 1.0;
    for &v in &doubled {
        let v = v as usize;
        for j in (0..small_len).rev() {
            for s in (0..=max_sum - v).rev() {
                if counts[j][s] > 0.0 {
                    counts[j + 1][s + v] += counts[j][s];
                }
            }
        }
    }

    let w_small = if small_is_a {
        w_a
    } else {
        ranks[a.len()..].iter().sum::<f64>()
    };
    let w2 = (w_small * 2.0).round() as usize;
    let table = &counts[small_len];
    let total_subsets: f64 = table.iter().sum();
    let cum_le: f64 = table[..=w2.min(max_sum)].iter().sum();
    let cum_ge: f64 = table[w2.min(max_sum)..].iter().sum();
    let p = (2.0 * (cum_le.min(cum_ge) / total_subsets)).min(1.0);

    let n = a.len() as f64;
    let u_a = w_a - n * (n + 1.0) / 2.0;
    Ok((u_a, p))
}

/// Statistic `U` of the first sample and the two-sided p-value from the
/// normal approximation with tie correction and continuity correction.
pub fn wilcoxon_normal_approx(a: &[f64], b: &[f64]) -> Result<(f64, f64), StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let (ranks, ties) = midranks(a, b);
    let n = a.len() as f64;
    let m = b.len() as f64;
    let big_n = n + m;
    let w_a: f64 = ranks[..a.len()].iter().sum();
    let u_a = w_a - n * (n + 1.0) / 2.0;

    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
    let variance = n * m / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    if variance <= 0.0 {
        // Every pooled value identical: no evidence either way.
        return Ok((u_a, 1.0));
    }
    let mean = n * m / 2.0;
    let diff = u_a - mean;
    // Continuity correction shrinks |diff| by one half.
    let corrected = (diff.abs() - 0.5).max(0.0);
    let z = corrected / variance.sqrt();
    let p = (2.0 * (1.0 - norm_cdf(z))).min(1.0);
    Ok((u_a, p))
}

/// Two-sided rank-sum test, choosing the exact path when `n * m` is small.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<(f64, f64), StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    super::check_finite(a)?;
    super::check_finite(b)?;
    if a.len() * b.len() <= EXACT_LIMIT {
        wilcoxon_exact(a, b)
    } else {
        wilcoxon_normal_approx(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fully_separated_small_samples() {
        // Ranks of a are {1,2,3}: the single most extreme split of 20,
        // so the two-sided exact p is 2 * 1/20 = 0.1.
        let (u, p) = wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(u, 0.0);
        assert!((p - 0.1).abs() < 1e-12);
    }

    #[test]
    fn identical_samples_give_p_one() {
        let sample = [3.0, 1.0, 2.0];
        let (_, p) = wilcoxon_rank_sum(&sample, &sample).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn empty_sample_errors() {
        assert!(matches!(
            wilcoxon_rank_sum(&[], &[1.0]),
            Err(StatsError::EmptySample)
        ));
    }

    #[test]
    fn exact_handles_unbalanced_sizes() {
        let a = [5.0];
        let b: Vec<f64> = (0..300).map(|i| i as f64).collect();
        let (_, p) = wilcoxon_exact(&a, &b).unwrap();
        assert!(p > 0.0 && p <= 1.0);
    }

    #[test]
    fn exact_matches_direct_enumeration_on_tiny_input() {
        // Independent check: enumerate all C(5,2) = 10 subsets by hand.
        let a = [10.0, 30.0];
        let b = [20.0, 40.0, 50.0];
        let (ranks, _) = midranks(&a, &b);
        let w_a: f64 = ranks[..2].iter().sum();
        let all: Vec<f64> = ranks.clone();
        let mut le = 0;
        let mut ge = 0;
        let mut total = 0;
        for i in 0..5 {
            for j in (i + 1)..5 {
                let w = all[i] + all[j];
                total += 1;
                if w <= w_a {
                    le += 1;
                }
                if w >= w_a {
                    ge += 1;
                }
            }
        }
        let expected = (2.0 * (le.min(ge) as f64 / total as f64)).min(1.0);
        let (_, p) = wilcoxon_exact(&a, &b).unwrap();
        assert!((p - expected).abs() < 1e-12);
    }

    #[test]
    fn approx_agrees_with_exact_without_ties() {
        // Sizes 15-20 sit inside the exact limit, so both paths are callable.
        for (n, m, phase) in [(15usize, 15usize, 0.3f64), (18, 16, 0.7), (20, 20, 1.1)] {
            let a: Vec<f64> = (0..n)
                .map(|i| ((i as f64) * 1.618 + phase).sin() * 10.0)
                .collect();
            let b: Vec<f64> = (0..m)
                .map(|i| ((i as f64) * 2.414 - phase).cos() * 9.0 + 1.0)
                .collect();
            let (_, exact) = wilcoxon_exact(&a, &b).unwrap();
            let (_, approx) = wilcoxon_normal_approx(&a, &b).unwrap();
            assert!(
                (exact - approx).abs() <= 0.02,
                "exact {exact} vs approx {approx} for sizes {n}/{m}"
            );
        }
    }

    #[test]
    fn all_tied_large_samples() {
        let a = vec![1.0; 30];
        let b = vec![1.0; 30];
        let (_, p) = wilcoxon_normal_approx(&a, &b).unwrap();
        assert_eq!(p, 1.0);
    }
}
