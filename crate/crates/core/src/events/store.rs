//! Immutable event store and the qualified game views derived from it.

use std::collections::{BTreeMap, BTreeSet};

use super::{ClickEvent, GameEvent, QualificationPolicy, RecommendationRecord};
use crate::catalog::{AppId, ChildId};

/// Frozen telemetry snapshot. Built once by [`EventStoreBuilder`]; every
/// accessor is read-only, so queries can run concurrently.
#[derive(Debug, Clone, Default)]
pub struct EventStore {
    games: Vec<GameEvent>,
    clicks: Vec<ClickEvent>,
    recs: Vec<RecommendationRecord>,
    played_by_child: BTreeMap<ChildId, BTreeSet<AppId>>,
    players_by_app: BTreeMap<AppId, BTreeSet<ChildId>>,
}

impl EventStore {
    pub fn games(&self) -> &[GameEvent] {
        &self.games
    }

    pub fn clicks(&self) -> &[ClickEvent] {
        &self.clicks
    }

    pub fn recommendations(&self) -> &[RecommendationRecord] {
        &self.recs
    }

    /// Apps a child has played at least once, with no duration floor.
    pub fn raw_played_apps(&self, child_id: &str) -> Option<&BTreeSet<AppId>> {
        self.played_by_child.get(child_id)
    }

    /// Children who have played a given app at least once.
    pub fn raw_players(&self, app_id: &str) -> Option<&BTreeSet<ChildId>> {
        self.players_by_app.get(app_id)
    }

    /// Children appearing anywhere in the game log.
    pub fn children_with_games(&self) -> impl Iterator<Item = &ChildId> {
        self.played_by_child.keys()
    }
}

/// Single-writer builder; `freeze` produces the immutable store in a
/// canonical order so identical inputs yield identical stores.
#[derive(Debug, Default)]
pub struct EventStoreBuilder {
    games: Vec<GameEvent>,
    clicks: Vec<ClickEvent>,
    recs: Vec<RecommendationRecord>,
}

impl EventStoreBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_game(&mut self, event: GameEvent) {
        self.games.push(event);
    }

    pub fn add_click(&mut self, event: ClickEvent) {
        self.clicks.push(event);
    }

    pub fn add_recommendation(&mut self, record: RecommendationRecord) {
        self.recs.push(record);
    }

    pub fn freeze(mut self) -> EventStore {
        self.games.sort_by(|a, b| {
            (&a.child_id, a.start_time, &a.app_id)
                .cmp(&(&b.child_id, b.start_time, &b.app_id))
                .then(a.duration_s.total_cmp(&b.duration_s))
        });
        self.clicks.sort_by(|a, b| {
            (&a.child_id, a.timestamp, &a.app_id, a.position).cmp(&(
                &b.child_id,
                b.timestamp,
                &b.app_id,
                b.position,
            ))
        });
        self.recs
            .sort_by(|a, b| (&a.child_id, a.generated_at).cmp(&(&b.child_id, b.generated_at)));

        let mut played_by_child: BTreeMap<ChildId, BTreeSet<AppId>> = BTreeMap::new();
        let mut players_by_app: BTreeMap<AppId, BTreeSet<ChildId>> = BTreeMap::new();
        for g in &self.games {
            played_by_child
                .entry(g.child_id.clone())
                .or_default()
                .insert(g.app_id.clone());
            players_by_app
                .entry(g.app_id.clone())
                .or_default()
                .insert(g.child_id.clone());
        }

        EventStore {
            games: self.games,
            clicks: self.clicks,
            recs: self.recs,
            played_by_child,
            players_by_app,
        }
    }
}

/// Aggregates for one (child, app) pair inside a qualified view.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairStats {
    pub count: u64,
    pub total_duration_s: f64,
}

/// The multiset of game events that survive a [`QualificationPolicy`],
/// with per-app and per-pair aggregates.
///
/// Filtering happens in two steps: the duration window keeps events with
/// `min <= duration <= max`, then every (child, app) pair whose retained
/// play count exceeds `max_plays_per_pair` is dropped entirely.
#[derive(Debug, Clone)]
pub struct GamesView {
    events: Vec<GameEvent>,
    policy: QualificationPolicy,
    pair: BTreeMap<(ChildId, AppId), PairStats>,
    app_counts: BTreeMap<AppId, u64>,
    child_apps: BTreeMap<ChildId, BTreeSet<AppId>>,
}

/// Applies the policy to an event slice, preserving input order of survivors.
pub(crate) fn qualify_events(events: &[GameEvent], policy: &QualificationPolicy) -> Vec<GameEvent> {
    let mut pair_counts: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    for e in events {
        if policy.retains(e.duration_s) {
            *pair_counts
                .entry((e.child_id.as_str(), e.app_id.as_str()))
                .or_default() += 1;
        }
    }
    events
        .iter()
        .filter(|e| {
            policy.retains(e.duration_s)
                && pair_counts[&(e.child_id.as_str(), e.app_id.as_str())]
                    <= u64::from(policy.max_plays_per_pair)
        })
        .cloned()
        .collect()
}

impl GamesView {
    /// Builds the qualified view over a frozen store.
    pub fn qualify(store: &EventStore, policy: QualificationPolicy) -> Self {
        Self::from_events(qualify_events(store.games(), &policy), policy)
    }

    fn from_events(events: Vec<GameEvent>, policy: QualificationPolicy) -> Self {
        let mut pair: BTreeMap<(ChildId, AppId), PairStats> = BTreeMap::new();
        let mut app_counts: BTreeMap<AppId, u64> = BTreeMap::new();
        let mut child_apps: BTreeMap<ChildId, BTreeSet<AppId>> = BTreeMap::new();
        for e in &events {
            let stats = pair
                .entry((e.child_id.clone(), e.app_id.clone()))
                .or_default();
            stats.count += 1;
            stats.total_duration_s += e.duration_s;
            *app_counts.entry(e.app_id.clone()).or_default() += 1;
            child_apps
                .entry(e.child_id.clone())
                .or_default()
                .insert(e.app_id.clone());
        }
        Self {
            events,
            policy,
            pair,
            app_counts,
            child_apps,
        }
    }

    pub fn policy(&self) -> &QualificationPolicy {
        &self.policy
    }

    pub fn events(&self) -> &[GameEvent] {
        &self.events
    }

    /// Number of qualifying plays of an app across all children.
    pub fn games_count(&self, app_id: &str) -> u64 {
        self.app_counts.get(app_id).copied().unwrap_or(0)
    }

    /// Qualifying play count and total play seconds for one (child, app) pair.
    pub fn pair_stats(&self, child_id: &str, app_id: &str) -> PairStats {
        self.pair
            .get(&(child_id.to_string(), app_id.to_string()))
            .copied()
            .unwrap_or_default()
    }

    /// Apps a child has at least one qualifying play in.
    pub fn played_apps(&self, child_id: &str) -> Option<&BTreeSet<AppId>> {
        self.child_apps.get(child_id)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&(ChildId, AppId), &PairStats)> {
        self.pair.iter()
    }

    pub fn total_events(&self) -> usize {
        self.events.len()
    }
}
