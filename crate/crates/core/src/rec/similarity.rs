//! Child-to-child similarity: weighted blend of age closeness and the
//! Jaccard overlap of intensively played app sets.

use std::collections::{BTreeMap, BTreeSet};

use crate::catalog::{AppId, ChildId};
use crate::events::GamesView;
use crate::rec::RecommenderConfig;

/// Age closeness on a three-step scale: same age 1, one year apart 0.5,
/// anything wider 0. A gap of more than one year is already very large at
/// ages 2 through 10.
pub fn age_similarity(age1: u8, age2: u8) -> f64 {
    if age1 == age2 {
        1.0
    } else if age1.abs_diff(age2) == 1 {
        0.5
    } else {
        0.0
    }
}

/// Apps a child plays intensively: at least `intensive_min_plays` qualifying
/// games and at least `intensive_min_duration_s` cumulative seconds in the
/// pair. This keeps apps that were merely poked at while exploring the
/// library out of the similarity signal.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntensiveAppSet {
    pub child_id: ChildId,
    pub apps: BTreeSet<AppId>,
}

/// Computes every child's intensive set in one pass over the view's pairs.
pub fn intensive_sets(
    view: &GamesView,
    config: &RecommenderConfig,
) -> BTreeMap<ChildId, IntensiveAppSet> {
    let mut sets: BTreeMap<ChildId, IntensiveAppSet> = BTreeMap::new();
    for ((child_id, app_id), stats) in view.pairs() {
        if stats.count >= u64::from(config.intensive_min_plays)
            && stats.total_duration_s >= config.intensive_min_duration_s
        {
            let entry = sets
                .entry(child_id.clone())
                .or_insert_with(|| IntensiveAppSet {
                    child_id: child_id.clone(),
                    apps: BTreeSet::new(),
                });
            entry.apps.insert(app_id.clone());
        }
    }
    sets
}

/// The pieces of one pairwise similarity: the age term, the Jaccard term and
/// their weighted blend. Symmetric in its two children and always in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityScore {
    pub pair: (ChildId, ChildId),
    pub sim_age: f64,
    pub jaccard: f64,
    pub sim: f64,
}

static EMPTY_APPS: BTreeSet<AppId> = BTreeSet::new();

/// Jaccard overlap of two app sets; 0 when both are empty.
pub fn jaccard(a: &BTreeSet<AppId>, b: &BTreeSet<AppId>) -> f64 {
    let intersection = a.intersection(b).count();
    let union = a.len() + b.len() - intersection;
    if union == 0 {
        0.0
    } else {
        intersection as f64 / union as f64
    }
}

/// Weighted similarity between two children from their ages and intensive
/// app sets: `age_weight * sim_age + jaccard_weight * jaccard`.
pub fn child_similarity(
    c1: (&str, u8),
    c2: (&str, u8),
    sets: &BTreeMap<ChildId, IntensiveAppSet>,
    config: &RecommenderConfig,
) -> SimilarityScore {
    let apps1 = sets.get(c1.0).map(|s| &s.apps).unwrap_or(&EMPTY_APPS);
    let apps2 = sets.get(c2.0).map(|s| &s.apps).unwrap_or(&EMPTY_APPS);
    let sim_age = age_similarity(c1.1, c2.1);
    let jac = jaccard(apps1, apps2);
    SimilarityScore {
        pair: (c1.0.to_string(), c2.0.to_string()),
        sim_age,
        jaccard: jac,
        sim: config.age_weight * sim_age + config.jaccard_weight * jac,
    }
}
