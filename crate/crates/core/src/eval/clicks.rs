//! Click-through analysis by ribbon position.
//!
//! Positions 1 through 5 are visible on a typical screen; 6 and 7 sit behind
//! a scroll. The analysis reports raw counts, visible/hidden group means and
//! a rank per position.

use serde::{Deserialize, Serialize};

/// Number of ribbon positions.
pub const POSITIONS: usize = 7;
/// Positions visible without scrolling.
pub const VISIBLE: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickPositionReport {
    /// Clicks per position, index 0 = position 1.
    pub clicks: [u64; POSITIONS],
    /// Arithmetic mean of positions 1-5.
    pub mean_visible: f64,
    /// Arithmetic mean of positions 6-7.
    pub mean_hidden: f64,
    /// `rank[i]` is the rank (1 = most clicked) of position `i + 1`;
    /// ties broken by the earlier position.
    pub rank: [u8; POSITIONS],
}

/// Outcome of checking computed means against externally published ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCheck {
    pub visible_consistent: bool,
    pub hidden_consistent: bool,
    pub notes: Vec<String>,
}

pub fn click_position_analysis(clicks: [u64; POSITIONS]) -> ClickPositionReport {
    let mean = |slice: &[u64]| slice.iter().sum::<u64>() as f64 / slice.len() as f64;
    let mean_visible = mean(&clicks[..VISIBLE]);
    let mean_hidden = mean(&clicks[VISIBLE..]);

    let mut order: Vec<usize> = (0..POSITIONS).collect();
    order.sort_by(|&a, &b| clicks[b].cmp(&clicks[a]).then(a.cmp(&b)));
    let mut rank = [0u8; POSITIONS];
    for (r, &position) in order.iter().enumerate() {
        rank[position] = r as u8 + 1;
    }

    ClickPositionReport {
        clicks,
        mean_visible,
        mean_hidden,
        rank,
    }
}

impl ClickPositionReport {
    /// Compares the computed group means against reference (published)
    /// values, treating a mean as consistent when it rounds to the
    /// reference. Inconsistencies are spelled out in `notes`.
    pub fn reference_check(&self, reference_visible: f64, reference_hidden: f64) -> ReferenceCheck {
        let mut notes = Vec::new();
        let visible_consistent = self.mean_visible.round() == reference_visible;
        let hidden_consistent = self.mean_hidden.round() == reference_hidden;
        if !visible_consistent {
            notes.push(format!(
                "visible mean computed from counts is {:.1}, which does not round to the reference value {reference_visible}",
                self.mean_visible
            ));
        }
        if !hidden_consistent {
            notes.push(format!(
                "hidden mean computed from counts is {:.1}, which does not round to the reference value {reference_hidden}",
                self.mean_hidden
            ));
        }
        ReferenceCheck {
            visible_consistent,
            hidden_consistent,
            notes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const OBSERVED: [u64; 7] = [6329, 5834, 4516, 2639, 3960, 3150, 2937];

    #[test]
    fn observed_counts_rank_and_hidden_mean() {
        let report = click_position_analysis(OBSERVED);
        assert_eq!(report.rank, [1, 2, 3, 7, 4, 5, 6]);
        assert!((report.mean_hidden - 3043.5).abs() < 1e-9);
        assert_eq!(report.mean_hidden.round(), 3044.0);
    }

    #[test]
    fn observed_counts_visible_mean_comes_from_the_counts() {
        let report = click_position_analysis(OBSERVED);
        assert!((report.mean_visible - 4655.6).abs() < 1e-9);
    }

    #[test]
    fn reference_check_flags_only_the_inconsistent_mean() {
        let report = click_position_analysis(OBSERVED);
        let check = report.reference_check(4830.0, 3044.0);
        assert!(!check.visible_consistent);
        assert!(check.hidden_consistent);
        assert_eq!(check.notes.len(), 1);
        assert!(check.notes[0].contains("4655.6"));
    }

    #[test]
    fn equal_counts_rank_by_position() {
        let report = click_position_analysis([10; 7]);
        assert_eq!(report.rank, [1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(report.mean_visible, 10.0);
        assert_eq!(report.mean_hidden, 10.0);
    }

    #[test]
    fn ranks_are_click_consistent() {
        let report = click_position_analysis([5, 100, 3, 77, 77, 0, 1]);
        // Walk ranks from 1 to 7: click counts must be non-increasing.
        let mut by_rank = [0u64; 7];
        for (pos, &r) in report.rank.iter().enumerate() {
            by_rank[r as usize - 1] = report.clicks[pos];
        }
        for pair in by_rank.windows(2) {
            assert!(pair[0] >= pair[1]);
        }
    }
}
