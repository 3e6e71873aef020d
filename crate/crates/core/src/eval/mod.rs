//! Evaluation metrics and the significance protocol inputs.

pub mod clicks;
pub mod confusion;
pub mod engagement;
pub mod ledger;

pub use clicks::{click_position_analysis, ClickPositionReport, ReferenceCheck};
pub use confusion::{
    confusion_for_child, f1_score, performance_metrics, ConfusionMatrix, PerformanceReport,
};
pub use engagement::{engagement_metrics, Attribution, EngagementReport, UserEngagement};
pub use ledger::{ExposureInterval, ExposureLedger};

use chrono::NaiveDate;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("train window {train_start}..={train_end} must precede the test window {test_start}..={test_end}")]
    WindowOrder {
        train_start: NaiveDate,
        train_end: NaiveDate,
        test_start: NaiveDate,
        test_end: NaiveDate,
    },
    #[error("window start {start} is after its end {end}")]
    WindowInverted { start: NaiveDate, end: NaiveDate },
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    BadAlpha(f64),
    #[error("no recommendation records fall inside the training window")]
    NoRecommendations,
}

/// Calendar windows and knobs for one evaluation run. Window dates are
/// inclusive; the test window must start after the train window ends.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalParams {
    pub train_start: NaiveDate,
    pub train_end: NaiveDate,
    pub test_start: NaiveDate,
    pub test_end: NaiveDate,
    pub alpha: f64,
    pub seed: u64,
    pub mc_iterations: usize,
    pub attribution: Attribution,
    pub engagement_policy: crate::events::QualificationPolicy,
}

impl EvalParams {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.train_start > self.train_end {
            return Err(EvalError::WindowInverted {
                start: self.train_start,
                end: self.train_end,
            });
        }
        if self.test_start > self.test_end {
            return Err(EvalError::WindowInverted {
                start: self.test_start,
                end: self.test_end,
            });
        }
        if self.test_start <= self.train_end {
            return Err(EvalError::WindowOrder {
                train_start: self.train_start,
                train_end: self.train_end,
                test_start: self.test_start,
                test_end: self.test_end,
            });
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(EvalError::BadAlpha(self.alpha));
        }
        Ok(())
    }

    /// Default windows in the 30 + 15 day proportions, derived from a log
    /// span `[first_day, last_day]` (inclusive). A span too short to split
    /// yields degenerate windows that `validate` rejects with a clear error.
    pub fn default_windows(
        first_day: NaiveDate,
        last_day: NaiveDate,
    ) -> (NaiveDate, NaiveDate, NaiveDate, NaiveDate) {
        let span_days = (last_day - first_day).num_days() + 1;
        if span_days < 2 {
            return (first_day, last_day, first_day, last_day);
        }
        let train_days = ((span_days * 2 + 1) / 3).clamp(1, span_days - 1);
        let train_end = first_day + chrono::Duration::days(train_days - 1);
        let test_start = train_end + chrono::Duration::days(1);
        (first_day, train_end, test_start, last_day)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::QualificationPolicy;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn params() -> EvalParams {
        EvalParams {
            train_start: d(2018, 10, 15),
            train_end: d(2018, 11, 13),
            test_start: d(2018, 11, 14),
            test_end: d(2018, 11, 28),
            alpha: 0.05,
            seed: 0,
            mc_iterations: 100,
            attribution: Attribution::SlotSource,
            engagement_policy: QualificationPolicy::engagement_default(),
        }
    }

    #[test]
    fn valid_params_pass() {
        assert!(params().validate().is_ok());
    }

    #[test]
    fn test_before_train_rejected() {
        let mut p = params();
        p.test_start = d(2018, 10, 1);
        p.test_end = d(2018, 10, 10);
        assert!(matches!(p.validate(), Err(EvalError::WindowOrder { .. })));
    }

    #[test]
    fn inverted_window_rejected() {
        let mut p = params();
        p.train_end = d(2018, 10, 1);
        assert!(matches!(
            p.validate(),
            Err(EvalError::WindowInverted { .. })
        ));
    }

    #[test]
    fn single_day_span_yields_windows_that_fail_validation() {
        let day = d(2018, 10, 15);
        let (ts, te, vs, ve) = EvalParams::default_windows(day, day);
        let mut p = params();
        p.train_start = ts;
        p.train_end = te;
        p.test_start = vs;
        p.test_end = ve;
        assert!(p.validate().is_err());
    }

    #[test]
    fn default_windows_keep_two_to_one_proportion() {
        let (ts, te, vs, ve) = EvalParams::default_windows(d(2018, 10, 15), d(2018, 11, 28));
        // 45-day span: 30 train days, 15 test days.
        assert_eq!(ts, d(2018, 10, 15));
        assert_eq!(te, d(2018, 11, 13));
        assert_eq!(vs, d(2018, 11, 14));
        assert_eq!(ve, d(2018, 11, 28));
        assert_eq!((te - ts).num_days() + 1, 30);
        assert_eq!((ve - vs).num_days() + 1, 15);
    }
}
