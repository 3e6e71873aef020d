//! The three ribbon strategies and ribbon assembly with random fallback.

pub mod cf;
pub mod neighborhood;
pub mod popularity;
pub mod random;
pub mod similarity;

pub use cf::{cf_ranking, InterestScore};
pub use neighborhood::{build_neighborhood, neighborhood_for, Neighborhood};
pub use popularity::{popularity_ranking, PopularityScore};
pub use random::random_ranking;
pub use similarity::{
    age_similarity, child_similarity, intensive_sets, IntensiveAppSet, SimilarityScore,
};

use chrono::{DateTime, Utc};
use thiserror::Error;

use crate::catalog::{Catalog, ChildId, ChildProfile};
use crate::events::{
    EventStore, GamesView, QualificationPolicy, RecommendationRecord, RibbonSlot, StrategySource,
};
use crate::seeding::mix;

#[derive(Debug, Error)]
pub enum RecError {
    #[error("invalid recommender config: {0}")]
    InvalidConfig(String),
}

/// Tuning knobs for all three strategies and for ribbon assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct RecommenderConfig {
    /// Slots filled by the arm's strategy before random fill takes over.
    pub strategy_slots: usize,
    /// Total ribbon capacity.
    pub ribbon_size: usize,
    pub neighborhood_cap: usize,
    /// Inclusive lower bound for neighborhood membership.
    pub min_similarity: f64,
    pub age_weight: f64,
    pub jaccard_weight: f64,
    pub intensive_min_plays: u32,
    pub intensive_min_duration_s: f64,
    /// Duration floor for plays feeding popularity counts and CF ratings.
    pub popularity_min_duration_s: f64,
    /// Apply the 3000 s / 60-plays outlier filters to recommender inputs
    /// too (they always apply to evaluation metrics).
    pub apply_outlier_filters: bool,
    pub seed: u64,
}

impl Default for RecommenderConfig {
    fn default() -> Self {
        Self {
            strategy_slots: 3,
            ribbon_size: 7,
            neighborhood_cap: 100,
            min_similarity: 0.5,
            age_weight: 0.4,
            jaccard_weight: 0.6,
            intensive_min_plays: 10,
            intensive_min_duration_s: 60.0,
            popularity_min_duration_s: 5.0,
            apply_outlier_filters: false,
            seed: 0,
        }
    }
}

impl RecommenderConfig {
    pub fn validate(&self) -> Result<(), RecError> {
        if self.strategy_slots > self.ribbon_size {
            return Err(RecError::InvalidConfig(format!(
                "strategy_slots ({}) exceeds ribbon_size ({})",
                self.strategy_slots, self.ribbon_size
            )));
        }
        if (self.age_weight + self.jaccard_weight - 1.0).abs() > 1e-9 {
            return Err(RecError::InvalidConfig(format!(
                "similarity weights must sum to 1, got {} + {}",
                self.age_weight, self.jaccard_weight
            )));
        }
        if self.ribbon_size > crate::events::RIBBON_CAPACITY as usize {
            return Err(RecError::InvalidConfig(format!(
                "ribbon_size ({}) exceeds the ribbon capacity of {}",
                self.ribbon_size,
                crate::events::RIBBON_CAPACITY
            )));
        }
        Ok(())
    }

    /// The qualification policy for recommender inputs under this config.
    pub fn input_policy(&self) -> QualificationPolicy {
        if self.apply_outlier_filters {
            QualificationPolicy {
                min_duration_s: self.popularity_min_duration_s,
                max_duration_s: 3000.0,
                max_plays_per_pair: 60,
            }
        } else {
            QualificationPolicy {
                min_duration_s: self.popularity_min_duration_s,
                max_duration_s: f64::INFINITY,
                max_plays_per_pair: u32::MAX,
            }
        }
    }
}

/// An assembled ribbon for one child: at most seven slots, each tagged with
/// the strategy that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Ribbon {
    pub child_id: ChildId,
    pub generated_at: DateTime<Utc>,
    pub slots: Vec<RibbonSlot>,
}

impl Ribbon {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// The wire form logged to `recs.jsonl`.
    pub fn to_record(&self) -> RecommendationRecord {
        RecommendationRecord {
            child_id: self.child_id.clone(),
            generated_at: self.generated_at,
            slots: self.slots.clone(),
        }
    }
}

/// Assembles a ribbon for one child.
///
/// The arm's strategy fills the first `strategy_slots` positions from its
/// eligibility-filtered ranking; every remaining position is filled by a
/// seeded random draw over the still-unused eligible apps and tagged
/// `random`. When the strategy yields fewer survivors than slots (a cold CF
/// neighborhood, say) the shortfall is filled randomly too, so the ribbon
/// only comes up short when eligible apps run out. An empty eligible set
/// produces an empty ribbon.
#[allow(clippy::too_many_arguments)]
pub fn assemble_ribbon(
    child: &ChildProfile,
    strategy: StrategySource,
    catalog: &Catalog,
    store: &EventStore,
    view: &GamesView,
    config: &RecommenderConfig,
    generated_at: DateTime<Utc>,
    seed: u64,
) -> Ribbon {
    let eligible = catalog.eligible_apps(child);
    let mut ribbon = Ribbon {
        child_id: child.child_id.clone(),
        generated_at,
        slots: Vec::new(),
    };
    if eligible.is_empty() {
        return ribbon;
    }

    let strategy_ranking: Vec<String> = match strategy {
        StrategySource::Popular => popularity_ranking(view, catalog, generated_at.date_naive())
            .into_iter()
            .map(|s| s.app_id)
            .collect(),
        StrategySource::Cf => {
            let hood = neighborhood_for(&child.child_id, catalog, store, view, config);
            cf_ranking(&child.child_id, &hood, view)
                .into_iter()
                .map(|s| s.app_id)
                .collect()
        }
        StrategySource::Random => random_ranking(&eligible, mix(seed, 1)),
    };

    let mut used: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();
    for app_id in strategy_ranking {
        if ribbon.slots.len() >= config.strategy_slots {
            break;
        }
        if eligible.contains(&app_id) && used.insert(app_id.clone()) {
            ribbon.slots.push(RibbonSlot {
                position: ribbon.slots.len() as u8 + 1,
                app_id,
                source: strategy,
            });
        }
    }

    let remaining: std::collections::BTreeSet<String> = eligible
        .iter()
        .filter(|a| !used.contains(*a))
        .cloned()
        .collect();
    for app_id in random_ranking(&remaining, mix(seed, 2)) {
        if ribbon.slots.len() >= config.ribbon_size {
            break;
        }
        ribbon.slots.push(RibbonSlot {
            position: ribbon.slots.len() as u8 + 1,
            app_id,
            source: StrategySource::Random,
        });
    }

    ribbon
}
