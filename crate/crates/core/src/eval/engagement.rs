//! Engagement metrics: average number of games (ANG) and average game time
//! (AGT) per acting user, attributed to the strategy that recommended the app.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, ChildId};
use crate::eval::ledger::ExposureLedger;
use crate::events::{GamesView, StrategySource};
use crate::stats::sample_variance;

/// How a qualifying game is credited to a strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribution {
    /// Credit follows the slot that exposed the app (default): a random-fill
    /// slot inside arm A's ribbon credits the random strategy.
    SlotSource,
    /// Credit follows the child's assigned arm: any exposed play by an
    /// arm-A child credits the popular strategy.
    ArmAssignment,
}

/// One acting user's contribution to a strategy's engagement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserEngagement {
    pub child_id: ChildId,
    pub games: u64,
    pub game_time_s: f64,
}

/// Engagement of one strategy over the evaluation period.
///
/// `ang = total games / num_users` and `agt = total seconds / num_users`,
/// where `num_users` counts only users with at least one qualifying game on
/// an exposed, strategy-credited app ("acted on it"). A strategy nobody
/// acted on is flagged `empty` instead of dividing by zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngagementReport {
    pub strategy: StrategySource,
    pub num_users: usize,
    pub total_games: u64,
    pub total_game_time_s: f64,
    pub ang: f64,
    pub agt: f64,
    pub median_games: f64,
    pub median_game_time_s: f64,
    pub variance_games: f64,
    pub variance_game_time_s: f64,
    pub empty: bool,
    /// Per acting user, sorted by child id.
    pub per_user: Vec<UserEngagement>,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Computes engagement for one strategy from the exposure ledger and a
/// qualified games view (the 10 s / 3000 s / 60-plays policy).
///
/// A game counts when its start time falls inside one of its child's
/// exposure intervals whose live ribbon contains the app, and the credit
/// rule of `attribution` maps that exposure to `strategy`. The catalog is
/// consulted only under [`Attribution::ArmAssignment`], to resolve arms.
pub fn engagement_metrics(
    ledger: &ExposureLedger,
    view: &GamesView,
    strategy: StrategySource,
    attribution: Attribution,
    catalog: &Catalog,
) -> EngagementReport {
    let mut per_child: BTreeMap<ChildId, (u64, f64)> = BTreeMap::new();

    for game in view.events() {
        let exposed = ledger.exposure_at(&game.child_id, &game.app_id, game.start_time);
        let Some(slot_source) = exposed else { continue };
        let credited = match attribution {
            Attribution::SlotSource => slot_source == strategy,
            Attribution::ArmAssignment => catalog
                .child(&game.child_id)
                .and_then(|c| c.group)
                .map(|g| g.strategy() == strategy)
                .unwrap_or(false),
        };
        if credited {
            let entry = per_child.entry(game.child_id.clone()).or_insert((0, 0.0));
            entry.0 += 1;
            entry.1 += game.duration_s;
        }
    }

    let per_user: Vec<UserEngagement> = per_child
        .into_iter()
        .map(|(child_id, (games, game_time_s))| UserEngagement {
            child_id,
            games,
            game_time_s,
        })
        .collect();

    let num_users = per_user.len();
    if num_users == 0 {
        return EngagementReport {
            strategy,
            num_users: 0,
            total_games: 0,
            total_game_time_s: 0.0,
            ang: 0.0,
            agt: 0.0,
            median_games: 0.0,
            median_game_time_s: 0.0,
            variance_games: 0.0,
            variance_game_time_s: 0.0,
            empty: true,
            per_user,
        };
    }

    let total_games: u64 = per_user.iter().map(|u| u.games).sum();
    let total_game_time_s: f64 = per_user.iter().map(|u| u.game_time_s).sum();
    let mut games_sorted: Vec<f64> = per_user.iter().map(|u| u.games as f64).collect();
    games_sorted.sort_by(|a, b| a.total_cmp(b));
    let mut time_sorted: Vec<f64> = per_user.iter().map(|u| u.game_time_s).collect();
    time_sorted.sort_by(|a, b| a.total_cmp(b));

    EngagementReport {
        strategy,
        num_users,
        total_games,
        total_game_time_s,
        ang: total_games as f64 / num_users as f64,
        agt: total_game_time_s / num_users as f64,
        median_games: median(&games_sorted),
        median_game_time_s: median(&time_sorted),
        variance_games: sample_variance(&games_sorted),
        variance_game_time_s: sample_variance(&time_sorted),
        empty: false,
        per_user,
    }
}
