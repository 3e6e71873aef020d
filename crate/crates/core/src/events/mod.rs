//! Game/click/recommendation telemetry and the qualified views derived from it.

mod ingest;
mod store;

pub use ingest::{IngestReport, LineError};
pub use store::{EventStore, EventStoreBuilder, GamesView, PairStats};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{AppId, ChildId};

/// Ribbon capacity; positions run 1..=7.
pub const RIBBON_CAPACITY: u8 = 7;

#[derive(Debug, Error)]
pub enum EventError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{rejected} of {total} lines malformed (more than 10%); first error: {first}")]
    TooManyMalformed {
        rejected: usize,
        total: usize,
        first: String,
    },
    #[error("invalid qualification policy: {0}")]
    InvalidPolicy(String),
    #[error("csv header missing column {0:?}")]
    CsvMissingColumn(&'static str),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// One play of an app by a child.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameEvent {
    pub child_id: ChildId,
    pub app_id: AppId,
    pub start_time: DateTime<Utc>,
    pub duration_s: f64,
}

impl GameEvent {
    fn validate(&self) -> Result<(), String> {
        if !self.duration_s.is_finite() || self.duration_s < 0.0 {
            return Err(format!(
                "duration_s must be a nonnegative number, got {}",
                self.duration_s
            ));
        }
        Ok(())
    }
}

/// One tap on a ribbon slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickEvent {
    pub child_id: ChildId,
    pub app_id: AppId,
    pub position: u8,
    pub timestamp: DateTime<Utc>,
}

impl ClickEvent {
    fn validate(&self) -> Result<(), String> {
        if self.position < 1 || self.position > RIBBON_CAPACITY {
            return Err(format!(
                "position must be within 1..={RIBBON_CAPACITY}, got {}",
                self.position
            ));
        }
        Ok(())
    }
}

/// Which strategy produced a given ribbon slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategySource {
    Popular,
    Cf,
    Random,
}

impl StrategySource {
    pub const ALL: [StrategySource; 3] = [
        StrategySource::Popular,
        StrategySource::Cf,
        StrategySource::Random,
    ];

    pub fn label(self) -> &'static str {
        match self {
            StrategySource::Popular => "popular",
            StrategySource::Cf => "cf",
            StrategySource::Random => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RibbonSlot {
    pub position: u8,
    pub app_id: AppId,
    pub source: StrategySource,
}

/// A logged ribbon: which apps were recommended to a child, in which slots,
/// and which strategy supplied each slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationRecord {
    pub child_id: ChildId,
    pub generated_at: DateTime<Utc>,
    pub slots: Vec<RibbonSlot>,
}

impl RecommendationRecord {
    fn validate(&self) -> Result<(), String> {
        if self.slots.len() > RIBBON_CAPACITY as usize {
            return Err(format!(
                "a ribbon holds at most {RIBBON_CAPACITY} slots, got {}",
                self.slots.len()
            ));
        }
        let mut prev = 0u8;
        for (i, slot) in self.slots.iter().enumerate() {
            if slot.position < 1 || slot.position > RIBBON_CAPACITY {
                return Err(format!(
                    "slot {i}: position {} outside 1..={RIBBON_CAPACITY}",
                    slot.position
                ));
            }
            if i == 0 && slot.position != 1 {
                return Err(format!(
                    "first slot must sit at position 1, got {}",
                    slot.position
                ));
            }
            if i > 0 && slot.position <= prev {
                return Err(format!(
                    "positions must be strictly increasing, got {} after {prev}",
                    slot.position
                ));
            }
            prev = slot.position;
        }
        for (i, a) in self.slots.iter().enumerate() {
            for b in self.slots.iter().skip(i + 1) {
                if a.app_id == b.app_id {
                    return Err(format!("duplicate app_id {:?} within one ribbon", a.app_id));
                }
            }
        }
        Ok(())
    }
}

/// Duration and repetition thresholds that decide which plays count.
///
/// Two minima coexist in the product: 5 s for popularity counting and 10 s
/// for engagement metrics, so the floor is a parameter, never a constant.
/// Bounds are inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualificationPolicy {
    pub min_duration_s: f64,
    pub max_duration_s: f64,
    pub max_plays_per_pair: u32,
}

impl QualificationPolicy {
    pub fn new(
        min_duration_s: f64,
        max_duration_s: f64,
        max_plays_per_pair: u32,
    ) -> Result<Self, EventError> {
        if min_duration_s.is_nan() || min_duration_s < 0.0 {
            return Err(EventError::InvalidPolicy(format!(
                "min_duration_s must be >= 0, got {min_duration_s}"
            )));
        }
        if max_duration_s.is_nan() || min_duration_s >= max_duration_s {
            return Err(EventError::InvalidPolicy(format!(
                "min_duration_s ({min_duration_s}) must be below max_duration_s ({max_duration_s})"
            )));
        }
        if max_plays_per_pair < 1 {
            return Err(EventError::InvalidPolicy(
                "max_plays_per_pair must be >= 1".into(),
            ));
        }
        Ok(Self {
            min_duration_s,
            max_duration_s,
            max_plays_per_pair,
        })
    }

    /// Plays feeding the recommenders: 5 s floor, no outlier filters.
    pub fn recommender_default() -> Self {
        Self {
            min_duration_s: 5.0,
            max_duration_s: f64::INFINITY,
            max_plays_per_pair: u32::MAX,
        }
    }

    /// Plays feeding the recommenders with the outlier filters switched on.
    pub fn recommender_with_outlier_filters() -> Self {
        Self {
            min_duration_s: 5.0,
            max_duration_s: 3000.0,
            max_plays_per_pair: 60,
        }
    }

    /// Plays counted by the engagement and performance metrics:
    /// 10 s floor, 3000 s cap, at most 60 plays per (child, app) pair.
    pub fn engagement_default() -> Self {
        Self {
            min_duration_s: 10.0,
            max_duration_s: 3000.0,
            max_plays_per_pair: 60,
        }
    }

    pub fn retains(&self, duration_s: f64) -> bool {
        duration_s >= self.min_duration_s && duration_s <= self.max_duration_s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn ts(s: &str) -> DateTime<Utc> {
        s.parse().unwrap()
    }

    #[test]
    fn game_event_rejects_negative_duration() {
        let e = GameEvent {
            child_id: "c".into(),
            app_id: "a".into(),
            start_time: Utc.with_ymd_and_hms(2018, 10, 15, 9, 0, 0).unwrap(),
            duration_s: -1.0,
        };
        assert!(e.validate().is_err());
    }

    #[test]
    fn click_position_bounds() {
        let mut e = ClickEvent {
            child_id: "c".into(),
            app_id: "a".into(),
            position: 7,
            timestamp: ts("2018-10-15T09:00:00Z"),
        };
        assert!(e.validate().is_ok());
        e.position = 8;
        assert!(e.validate().is_err());
        e.position = 0;
        assert!(e.validate().is_err());
    }

    #[test]
    fn record_positions_must_increase_from_one() {
        let slot = |p: u8, id: &str| RibbonSlot {
            position: p,
            app_id: id.into(),
            source: StrategySource::Random,
        };
        let mut rec = RecommendationRecord {
            child_id: "c".into(),
            generated_at: ts("2018-10-15T09:00:00Z"),
            slots: vec![slot(1, "a"), slot(2, "b")],
        };
        assert!(rec.validate().is_ok());
        rec.slots = vec![slot(2, "a")];
        assert!(rec.validate().is_err());
        rec.slots = vec![slot(1, "a"), slot(1, "b")];
        assert!(rec.validate().is_err());
        rec.slots = vec![slot(1, "a"), slot(2, "a")];
        assert!(rec.validate().is_err());
    }

    #[test]
    fn policy_invariants() {
        assert!(QualificationPolicy::new(5.0, 3000.0, 60).is_ok());
        assert!(QualificationPolicy::new(10.0, 10.0, 60).is_err());
        assert!(QualificationPolicy::new(-1.0, 10.0, 60).is_err());
        assert!(QualificationPolicy::new(0.0, 10.0, 0).is_err());
    }

    #[test]
    fn policy_bounds_are_inclusive() {
        let p = QualificationPolicy::engagement_default();
        assert!(p.retains(10.0));
        assert!(p.retains(3000.0));
        assert!(!p.retains(9.999));
        assert!(!p.retains(3000.001));
    }
}
