//! Interest prediction over a neighborhood (collaborative filtering).

use std::collections::BTreeSet;

use crate::catalog::AppId;
use crate::events::GamesView;
use crate::rec::neighborhood::Neighborhood;

/// Predicted interest of the target child in one candidate app:
/// the similarity-weighted sum of neighbors' play counts, divided by the
/// full neighborhood size.
#[derive(Debug, Clone, PartialEq)]
pub struct InterestScore {
    pub app_id: AppId,
    pub interest: f64,
}

/// Scores every candidate app for the target.
///
/// Candidates are apps some neighbor has a qualifying play in, minus every
/// app the target has any qualifying play in, since recommendations must
/// be new to the child. The implicit rating `r(n, a)` is the neighbor's qualifying
/// play count for the app. Returns scores sorted descending, ties broken by
/// ascending `app_id`; an empty neighborhood yields an empty list and the
/// caller falls back to random recommendations.
pub fn cf_ranking(
    target_id: &str,
    neighborhood: &Neighborhood,
    view: &GamesView,
) -> Vec<InterestScore> {
    if neighborhood.is_empty() {
        return Vec::new();
    }

    static NO_APPS: BTreeSet<AppId> = BTreeSet::new();
    let target_played = view.played_apps(target_id).unwrap_or(&NO_APPS);

    let mut candidates: BTreeSet<AppId> = BTreeSet::new();
    for (neighbor_id, _) in &neighborhood.members {
        if let Some(apps) = view.played_apps(neighbor_id) {
            for app in apps {
                if !target_played.contains(app) {
                    candidates.insert(app.clone());
                }
            }
        }
    }

    let denominator = neighborhood.len() as f64;
    let mut scores: Vec<InterestScore> = candidates
        .into_iter()
        .map(|app_id| {
            let weighted: f64 = neighborhood
                .members
                .iter()
                .map(|(neighbor_id, sim)| sim * view.pair_stats(neighbor_id, &app_id).count as f64)
                .sum();
            InterestScore {
                app_id,
                interest: weighted / denominator,
            }
        })
        .collect();
    scores.sort_by(|a, b| {
        b.interest
            .total_cmp(&a.interest)
            .then_with(|| a.app_id.cmp(&b.app_id))
    });
    scores
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::{EventStoreBuilder, GameEvent, QualificationPolicy};
    use chrono::{TimeZone, Utc};

    fn view_of(plays: &[(&str, &str, u32)]) -> GamesView {
        let mut builder = EventStoreBuilder::new();
        let t0 = Utc.with_ymd_and_hms(2018, 10, 20, 10, 0, 0).unwrap();
        let mut i = 0;
        for (child, app, count) in plays {
            for _ in 0..*count {
                i += 1;
                builder.add_game(GameEvent {
                    child_id: (*child).to_string(),
                    app_id: (*app).to_string(),
                    start_time: t0 + chrono::Duration::minutes(i),
                    duration_s: 30.0,
                });
            }
        }
        GamesView::qualify(
            &builder.freeze(),
            QualificationPolicy::recommender_default(),
        )
    }

    fn hood(target: &str, members: &[(&str, f64)]) -> Neighborhood {
        Neighborhood {
            target: target.into(),
            members: members
                .iter()
                .map(|(id, sim)| (id.to_string(), *sim))
                .collect(),
        }
    }

    #[test]
    fn single_neighbor_score() {
        let view = view_of(&[("n1", "a", 5)]);
        let n = hood("t", &[("n1", 0.8)]);
        let ranking = cf_ranking("t", &n, &view);
        assert_eq!(ranking.len(), 1);
        assert_eq!(ranking[0].app_id, "a");
        assert!((ranking[0].interest - 4.0).abs() < 1e-12);
    }

    #[test]
    fn target_played_apps_never_recommended() {
        let view = view_of(&[("n1", "a", 5), ("n1", "b", 3), ("t", "a", 1)]);
        let n = hood("t", &[("n1", 0.8)]);
        let ranking = cf_ranking("t", &n, &view);
        assert_eq!(ranking.len(), 1);
        assert_eq!(ranking[0].app_id, "b");
    }

    #[test]
    fn denominator_is_full_neighborhood_size() {
        // Two neighbors with sims .6/.5 and counts 2/0: (1.2 + 0)/2 = 0.6.
        let view = view_of(&[("n1", "a", 2), ("n2", "b", 1)]);
        let n = hood("t", &[("n1", 0.6), ("n2", 0.5)]);
        let ranking = cf_ranking("t", &n, &view);
        let a = ranking.iter().find(|s| s.app_id == "a").unwrap();
        assert!((a.interest - 0.6).abs() < 1e-12);
    }

    #[test]
    fn empty_neighborhood_gives_empty_ranking() {
        let view = view_of(&[("n1", "a", 5)]);
        let n = hood("t", &[]);
        assert!(cf_ranking("t", &n, &view).is_empty());
    }

    #[test]
    fn ties_break_by_app_id() {
        let view = view_of(&[("n1", "b", 2), ("n1", "a", 2)]);
        let n = hood("t", &[("n1", 1.0)]);
        let ranking = cf_ranking("t", &n, &view);
        assert_eq!(ranking[0].app_id, "a");
        assert_eq!(ranking[1].app_id, "b");
    }
}
