//! Neighborhood formation for the collaborative-filtering strategy.

use std::collections::BTreeMap;

use crate::catalog::{Catalog, ChildId};
use crate::events::{EventStore, GamesView};
use crate::rec::similarity::{child_similarity, IntensiveAppSet};
use crate::rec::RecommenderConfig;

/// The up-to-100 most similar children to a target, each with similarity at
/// or above the configured minimum (0.5, boundary inclusive), restricted to
/// children who share at least one played app with the target.
///
/// An empty neighborhood is a valid result; ribbon assembly falls back to
/// random recommendations when it sees one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Neighborhood {
    pub target: ChildId,
    /// Sorted by similarity descending, ties broken by ascending child id.
    pub members: Vec<(ChildId, f64)>,
}

impl Neighborhood {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }
}

/// Builds the target's neighborhood.
///
/// Candidacy ("shares at least one game of the same application") is decided
/// on raw played-app sets from the store, with no duration floor; the
/// similarity itself uses the intensive sets derived from the qualified view.
pub fn build_neighborhood(
    target_id: &str,
    catalog: &Catalog,
    store: &EventStore,
    sets: &BTreeMap<ChildId, IntensiveAppSet>,
    config: &RecommenderConfig,
) -> Neighborhood {
    let mut neighborhood = Neighborhood {
        target: target_id.to_string(),
        members: Vec::new(),
    };
    let Some(target_profile) = catalog.child(target_id) else {
        return neighborhood;
    };
    let Some(target_played) = store.raw_played_apps(target_id) else {
        return neighborhood; // a child with no plays has no neighborhood
    };
    if target_played.is_empty() {
        return neighborhood;
    }

    for candidate in catalog.children() {
        if candidate.child_id == target_id {
            continue;
        }
        let shares_app = store
            .raw_played_apps(&candidate.child_id)
            .map(|apps| apps.intersection(target_played).next().is_some())
            .unwrap_or(false);
        if !shares_app {
            continue;
        }
        let score = child_similarity(
            (target_id, target_profile.age),
            (&candidate.child_id, candidate.age),
            sets,
            config,
        );
        if score.sim >= config.min_similarity {
            neighborhood
                .members
                .push((candidate.child_id.clone(), score.sim));
        }
    }

    neighborhood
        .members
        .sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    neighborhood.members.truncate(config.neighborhood_cap);
    neighborhood
}

/// Convenience wrapper: derives the intensive sets, then builds.
pub fn neighborhood_for(
    target_id: &str,
    catalog: &Catalog,
    store: &EventStore,
    view: &GamesView,
    config: &RecommenderConfig,
) -> Neighborhood {
    let sets = crate::rec::similarity::intensive_sets(view, config);
    build_neighborhood(target_id, catalog, store, &sets, config)
}
