//! Popularity strategy: plays per day since publication.

use chrono::NaiveDate;

use crate::catalog::{AppId, Catalog};
use crate::events::GamesView;

/// Per-app popularity: qualifying play count divided by the app's age in days.
///
/// Normalizing by age gives recently published apps a fair chance against
/// long-lived ones. Play duration is deliberately ignored so that apps with
/// naturally long sessions do not dominate.
#[derive(Debug, Clone, PartialEq)]
pub struct PopularityScore {
    pub app_id: AppId,
    /// Qualifying plays (the view's duration floor applies; 5 s by default).
    pub games: u64,
    /// Days since `published_date`, floored at 1 to cover publish-day queries.
    pub age_days: i64,
    pub score: f64,
}

/// Scores every catalog app and sorts by score descending, ties broken by
/// ascending `app_id`. `as_of` must not precede any `published_date`.
pub fn popularity_ranking(
    view: &GamesView,
    catalog: &Catalog,
    as_of: NaiveDate,
) -> Vec<PopularityScore> {
    let mut scores: Vec<PopularityScore> = catalog
        .apps()
        .map(|app| {
            let games = view.games_count(&app.app_id);
            let age_days = (as_of - app.published_date).num_days().max(1);
            PopularityScore {
                app_id: app.app_id.clone(),
                games,
                age_days,
                score: games as f64 / age_days as f64,
            }
        })
        .collect();
    scores.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.app_id.cmp(&b.app_id))
    });
    scores
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::AppRecord;
    use crate::events::{EventStoreBuilder, GameEvent, GamesView, QualificationPolicy};
    use chrono::{TimeZone, Utc};

    fn catalog_with(apps: &[(&str, NaiveDate)]) -> Catalog {
        let mut catalog = Catalog::new();
        for (id, published) in apps {
            catalog
                .register_app(AppRecord {
                    app_id: (*id).to_string(),
                    title: (*id).to_string(),
                    category_tag: "logic".into(),
                    min_age: 2,
                    max_age: 10,
                    published_date: *published,
                    min_app_version: 1,
                    blacklisted: false,
                })
                .unwrap();
        }
        catalog
    }

    fn view_with_plays(plays: &[(&str, u32)]) -> GamesView {
        let mut builder = EventStoreBuilder::new();
        for (app, count) in plays {
            for i in 0..*count {
                builder.add_game(GameEvent {
                    child_id: format!("c{}", i % 50),
                    app_id: (*app).to_string(),
                    start_time: Utc.with_ymd_and_hms(2018, 10, 15, 9, 0, 0).unwrap()
                        + chrono::Duration::seconds(i64::from(i) * 30),
                    duration_s: 20.0,
                });
            }
        }
        GamesView::qualify(
            &builder.freeze(),
            QualificationPolicy::recommender_default(),
        )
    }

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn score_is_plays_over_age() {
        let as_of = d(2018, 11, 1);
        let catalog = catalog_with(&[("a", as_of - chrono::Duration::days(50))]);
        let view = view_with_plays(&[("a", 100)]);
        let ranking = popularity_ranking(&view, &catalog, as_of);
        assert_eq!(ranking[0].games, 100);
        assert_eq!(ranking[0].age_days, 50);
        assert!((ranking[0].score - 2.0).abs() < 1e-12);
    }

    #[test]
    fn publish_day_age_floors_at_one() {
        let as_of = d(2018, 11, 1);
        let catalog = catalog_with(&[("a", as_of)]);
        let view = view_with_plays(&[("a", 3)]);
        let ranking = popularity_ranking(&view, &catalog, as_of);
        assert_eq!(ranking[0].age_days, 1);
        assert!((ranking[0].score - 3.0).abs() < 1e-12);
    }

    #[test]
    fn equal_scores_tie_break_lexicographically() {
        let as_of = d(2018, 11, 1);
        let catalog = catalog_with(&[
            ("y", as_of - chrono::Duration::days(2)),
            ("x", as_of - chrono::Duration::days(5)),
        ]);
        // x: 10 plays / 5 days = 2.0; y: 4 plays / 2 days = 2.0.
        let view = view_with_plays(&[("x", 10), ("y", 4)]);
        let ranking = popularity_ranking(&view, &catalog, as_of);
        assert_eq!(ranking[0].app_id, "x");
        assert_eq!(ranking[1].app_id, "y");
    }

    #[test]
    fn unplayed_apps_still_ranked() {
        let as_of = d(2018, 11, 1);
        let catalog = catalog_with(&[
            ("a", as_of - chrono::Duration::days(10)),
            ("b", as_of - chrono::Duration::days(10)),
        ]);
        let view = view_with_plays(&[("a", 5)]);
        let ranking = popularity_ranking(&view, &catalog, as_of);
        assert_eq!(ranking.len(), 2);
        assert_eq!(ranking[1].app_id, "b");
        assert_eq!(ranking[1].score, 0.0);
    }
}
