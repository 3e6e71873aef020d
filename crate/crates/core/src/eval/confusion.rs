//! Per-child confusion matrices over a train/test split, and the four
//! standard performance metrics computed from their sums.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::catalog::AppId;

/// Counts over one child's eligible universe: recommended-and-played (tp),
/// recommended-only (fp), played-only (fn), neither (tn).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.true_positives + self.false_positives + self.false_negatives + self.true_negatives
    }

    /// Element-wise sum; arm-level matrices are sums of child matrices.
    pub fn add(&mut self, other: &ConfusionMatrix) {
        self.true_positives += other.true_positives;
        self.false_positives += other.false_positives;
        self.false_negatives += other.false_negatives;
        self.true_negatives += other.true_negatives;
    }
}

/// One child's confusion matrix from the apps recommended during training,
/// the apps played during testing, and the child's eligible universe.
///
/// Recommendation and play sets are restricted to the universe first, which
/// keeps `tp + fp + fn + tn == |universe|` even when logs mention apps the
/// child could never have been shown.
pub fn confusion_for_child(
    train_recs: &BTreeSet<AppId>,
    test_plays: &BTreeSet<AppId>,
    universe: &BTreeSet<AppId>,
) -> ConfusionMatrix {
    let mut matrix = ConfusionMatrix::default();
    for app in universe {
        let recommended = train_recs.contains(app);
        let played = test_plays.contains(app);
        match (recommended, played) {
            (true, true) => matrix.true_positives += 1,
            (true, false) => matrix.false_positives += 1,
            (false, true) => matrix.false_negatives += 1,
            (false, false) => matrix.true_negatives += 1,
        }
    }
    matrix
}

/// Accuracy, precision, recall and F1 over a summed confusion matrix.
/// A ratio with a zero denominator is `None`, never silently zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceReport {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

/// F1 as the harmonic mean of precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn performance_metrics(matrix: &ConfusionMatrix) -> PerformanceReport {
    let tp = matrix.true_positives as f64;
    let accuracy = match matrix.total() {
        0 => None,
        total => Some((matrix.true_positives + matrix.true_negatives) as f64 / total as f64),
    };
    let precision = match matrix.true_positives + matrix.false_positives {
        0 => None,
        denom => Some(tp / denom as f64),
    };
    let recall = match matrix.true_positives + matrix.false_negatives {
        0 => None,
        denom => Some(tp / denom as f64),
    };
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) => Some(f1_score(p, r)),
        _ => None,
    };
    PerformanceReport {
        accuracy,
        precision,
        recall,
        f1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[&str]) -> BTreeSet<AppId> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn one_of_each_quadrant() {
        let m = confusion_for_child(
            &set(&["a", "b"]),
            &set(&["b", "c"]),
            &set(&["a", "b", "c", "d"]),
        );
        assert_eq!(m.true_positives, 1);
        assert_eq!(m.false_positives, 1);
        assert_eq!(m.false_negatives, 1);
        assert_eq!(m.true_negatives, 1);
        assert_eq!(m.total(), 4);
    }

    #[test]
    fn saturated_case() {
        let u = set(&["a", "b", "c"]);
        let m = confusion_for_child(&u, &u, &u);
        assert_eq!(m.true_positives, 3);
        assert_eq!(m.false_positives + m.false_negatives + m.true_negatives, 0);
    }

    #[test]
    fn empty_sets_are_all_true_negatives() {
        let m = confusion_for_child(&set(&[]), &set(&[]), &set(&["a", "b"]));
        assert_eq!(m.true_negatives, 2);
        assert_eq!(m.total(), 2);
    }

    #[test]
    fn out_of_universe_ids_are_ignored() {
        let m = confusion_for_child(&set(&["x", "a"]), &set(&["y", "a"]), &set(&["a", "b"]));
        assert_eq!(m.true_positives, 1);
        assert_eq!(m.true_negatives, 1);
        assert_eq!(m.total(), 2);
    }

    #[test]
    fn symmetric_matrix_scores_half_everywhere() {
        let m = ConfusionMatrix {
            true_positives: 1,
            false_positives: 1,
            false_negatives: 1,
            true_negatives: 1,
        };
        let r = performance_metrics(&m);
        assert_eq!(r.accuracy, Some(0.5));
        assert_eq!(r.precision, Some(0.5));
        assert_eq!(r.recall, Some(0.5));
        assert_eq!(r.f1, Some(0.5));
    }

    #[test]
    fn undefined_ratios_are_none() {
        let m = ConfusionMatrix {
            true_positives: 0,
            false_positives: 0,
            false_negatives: 3,
            true_negatives: 5,
        };
        let r = performance_metrics(&m);
        assert_eq!(r.precision, None);
        assert_eq!(r.recall, Some(0.0));
        assert_eq!(r.f1, None);
        let empty = performance_metrics(&ConfusionMatrix::default());
        assert_eq!(empty.accuracy, None);
    }

    #[test]
    fn f1_zero_iff_no_true_positives() {
        let m = ConfusionMatrix {
            true_positives: 0,
            false_positives: 2,
            false_negatives: 3,
            true_negatives: 5,
        };
        let r = performance_metrics(&m);
        assert_eq!(r.f1, Some(0.0));
    }

    #[test]
    fn published_precision_recall_pairs_reproduce_f1() {
        // Ratios quoted as percentages elsewhere; raw ratios here.
        let f1 = f1_score(0.0740, 0.0128) * 100.0;
        assert!((f1 - 2.18).abs() < 0.02, "got {f1}");
        let f1 = f1_score(0.1293, 0.0330) * 100.0;
        assert!((f1 - 5.26).abs() < 0.02, "got {f1}");
        let f1 = f1_score(0.0664, 0.0357) * 100.0;
        assert!((f1 - 4.64).abs() < 0.02, "got {f1}");
    }
}
