//! Exposure intervals: which ribbon was live for each child, and when.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};

use crate::catalog::{AppId, ChildId};
use crate::events::{RecommendationRecord, StrategySource};

/// One ribbon's live span for a child. An app is "exposed" from the ribbon's
/// generation until the child's next ribbon (or the end of the period).
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureInterval {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    /// App -> slot source for every slot in the live ribbon.
    pub slots: BTreeMap<AppId, StrategySource>,
}

/// Per-child, time-ordered exposure intervals.
///
/// Intervals are half-open `[start, end)`, non-overlapping and ordered by
/// construction: each ribbon's interval ends where the next one starts.
#[derive(Debug, Clone, Default)]
pub struct ExposureLedger {
    intervals: BTreeMap<ChildId, Vec<ExposureInterval>>,
}

impl ExposureLedger {
    /// Builds the ledger from recommendation records. Records after
    /// `period_end` are dropped; the final interval of each child closes at
    /// `period_end`.
    pub fn build(records: &[RecommendationRecord], period_end: DateTime<Utc>) -> Self {
        let mut by_child: BTreeMap<ChildId, Vec<&RecommendationRecord>> = BTreeMap::new();
        for record in records {
            if record.generated_at < period_end {
                by_child
                    .entry(record.child_id.clone())
                    .or_default()
                    .push(record);
            }
        }

        let mut intervals = BTreeMap::new();
        for (child_id, mut recs) in by_child {
            recs.sort_by_key(|r| r.generated_at);
            let mut spans = Vec::with_capacity(recs.len());
            for (i, rec) in recs.iter().enumerate() {
                let end = recs
                    .get(i + 1)
                    .map(|next| next.generated_at)
                    .unwrap_or(period_end);
                let slots = rec
                    .slots
                    .iter()
                    .map(|slot| (slot.app_id.clone(), slot.source))
                    .collect();
                spans.push(ExposureInterval {
                    start: rec.generated_at,
                    end,
                    slots,
                });
            }
            intervals.insert(child_id, spans);
        }
        Self { intervals }
    }

    pub fn intervals(&self, child_id: &str) -> &[ExposureInterval] {
        self.intervals
            .get(child_id)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn children(&self) -> impl Iterator<Item = &ChildId> {
        self.intervals.keys()
    }

    /// The slot source under which `app_id` was exposed to the child at
    /// instant `at`, if any.
    pub fn exposure_at(
        &self,
        child_id: &str,
        app_id: &str,
        at: DateTime<Utc>,
    ) -> Option<StrategySource> {
        let spans = self.intervals.get(child_id)?;
        // Last interval starting at or before `at`.
        let idx = spans.partition_point(|span| span.start <= at);
        if idx == 0 {
            return None;
        }
        let span = &spans[idx - 1];
        if at < span.end {
            span.slots.get(app_id).copied()
        } else {
            None
        }
    }
}
