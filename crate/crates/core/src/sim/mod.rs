//! Deterministic synthetic worlds: catalogs, children and 45-day logs that
//! exercise the full pipeline at desk scale.
//!
//! The behavior model is intentionally simple (latent app appeal, scaled by
//! an age-cluster affinity and a position bias): it exists to drive the
//! pipeline end to end, not to claim fidelity to real children.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use chrono::{DateTime, Duration, NaiveDate, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{assign_group, AppRecord, Catalog, ChildProfile, Gender};
use crate::error::CoreError;
use crate::events::{ClickEvent, EventStoreBuilder, GameEvent, GamesView, RecommendationRecord};
use crate::rec::{assemble_ribbon, RecommenderConfig};
use crate::seeding::stable_hash64;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulator config: {0}")]
    InvalidConfig(String),
}

/// Simulation knobs. Every distribution is parameterized here; a fixed seed
/// reproduces the output byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub num_children: u32,
    pub num_apps: u32,
    pub day_count: u32,
    pub start_date: NaiveDate,
    /// Relative weights for ages 2..=10.
    pub age_weights: Vec<f64>,
    /// Power-law exponent for latent app appeal; larger skews harder.
    pub popularity_skew: f64,
    /// Blend in [0, 1] between flat taste (0) and fully age-clustered taste (1).
    pub age_affinity_strength: f64,
    /// Click probability per ribbon position before appeal scaling.
    pub position_bias: [f64; 7],
    /// Poisson mean of sessions per child per day (for a child of average
    /// activity).
    pub sessions_per_day: f64,
    /// Log-sd of the per-child activity multiplier (mean 1). Zero makes all
    /// children equally active; larger values produce the realistic mix of
    /// occasional visitors and heavy users.
    pub activity_log_sd: f64,
    /// Log-normal parameters of game duration in seconds.
    pub duration_log_mean: f64,
    pub duration_log_sd: f64,
    /// Chance per session of one unprompted (non-ribbon) play.
    pub organic_play_rate: f64,
    /// Chance per session of replaying the child's most-played app so far.
    /// Replays concentrate plays on favorites, which is what makes pairs
    /// cross the intensive-play thresholds.
    pub replay_rate: f64,
    /// Fraction of generated apps that are blacklisted.
    pub blacklist_rate: f64,
    /// Fraction of children who replay a favorite app every session.
    pub obsession_rate: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            num_children: 140,
            num_apps: 40,
            day_count: 45,
            start_date: NaiveDate::from_ymd_opt(2018, 10, 15).expect("valid date"),
            age_weights: vec![0.6, 0.9, 1.2, 1.4, 1.4, 1.2, 1.0, 0.8, 0.5],
            popularity_skew: 0.8,
            age_affinity_strength: 0.6,
            position_bias: [0.30, 0.26, 0.22, 0.15, 0.12, 0.08, 0.06],
            sessions_per_day: 1.2,
            activity_log_sd: 1.2,
            duration_log_mean: 4.8,
            duration_log_sd: 1.3,
            organic_play_rate: 0.35,
            replay_rate: 0.55,
            blacklist_rate: 0.06,
            obsession_rate: 0.05,
            seed: 42,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.num_children < 1 || self.num_apps < 1 || self.day_count < 1 {
            return Err(SimError::InvalidConfig(
                "counts must all be at least 1".into(),
            ));
        }
        if self.age_weights.len() != 9 {
            return Err(SimError::InvalidConfig(format!(
                "age_weights needs 9 entries for ages 2..=10, got {}",
                self.age_weights.len()
            )));
        }
        if self.age_weights.iter().any(|w| *w < 0.0) || self.age_weights.iter().sum::<f64>() <= 0.0
        {
            return Err(SimError::InvalidConfig(
                "age_weights must be nonnegative and not all zero".into(),
            ));
        }
        if self.position_bias.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(SimError::InvalidConfig(
                "position_bias weights must lie in [0, 1]".into(),
            ));
        }
        for (name, v) in [
            ("organic_play_rate", self.organic_play_rate),
            ("replay_rate", self.replay_rate),
            ("blacklist_rate", self.blacklist_rate),
            ("obsession_rate", self.obsession_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(SimError::InvalidConfig(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        if self.sessions_per_day <= 0.0 || self.duration_log_sd <= 0.0 {
            return Err(SimError::InvalidConfig(
                "sessions_per_day and duration_log_sd must be positive".into(),
            ));
        }
        if self.activity_log_sd < 0.0 {
            return Err(SimError::InvalidConfig(
                "activity_log_sd must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    pub fn period_end(&self) -> NaiveDate {
        self.start_date + Duration::days(i64::from(self.day_count))
    }
}

/// Everything one simulation run produces.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub catalog: Catalog,
    pub games: Vec<GameEvent>,
    pub clicks: Vec<ClickEvent>,
    pub recs: Vec<RecommendationRecord>,
}

impl SimOutput {
    /// Writes the five log files into `dir` (created if missing).
    pub fn write_to_dir(&self, dir: &Path) -> Result<(), CoreError> {
        fs::create_dir_all(dir)?;
        let mut apps = Vec::new();
        self.catalog
            .write_apps_jsonl(&mut apps)
            .map_err(CoreError::Catalog)?;
        fs::write(dir.join("catalog.jsonl"), apps)?;
        let mut children = Vec::new();
        self.catalog
            .write_children_jsonl(&mut children)
            .map_err(CoreError::Catalog)?;
        fs::write(dir.join("children.jsonl"), children)?;

        write_jsonl(&dir.join("games.jsonl"), &self.games)?;
        write_jsonl(&dir.join("clicks.jsonl"), &self.clicks)?;
        write_jsonl(&dir.join("recs.jsonl"), &self.recs)?;
        Ok(())
    }
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), CoreError> {
    let mut buf = Vec::new();
    for item in items {
        serde_json::to_writer(&mut buf, item).expect("serializable");
        buf.push(b'\n');
    }
    let mut file = fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

const WORLDS: [&str; 8] = [
    "science",
    "spatial",
    "multiplayer",
    "logic",
    "literacy",
    "emotions",
    "arts",
    "village",
];

const TITLE_HEADS: [&str; 10] = [
    "Space", "Jungle", "Number", "Story", "Music", "Puzzle", "Ocean", "Dino", "Robot", "Garden",
];
const TITLE_TAILS: [&str; 8] = [
    "Quest", "Lab", "Safari", "Workshop", "Journey", "Party", "Builder", "Trails",
];

struct SimWorld {
    catalog: Catalog,
    /// Latent appeal per app index, max-normalized to 1.
    appeal: Vec<f64>,
    /// Target age per app index (midpoint of its age range).
    target_age: Vec<f64>,
    app_ids: Vec<String>,
    child_ids: Vec<String>,
    favorite: Vec<Option<String>>,
    obsessed: Vec<bool>,
    /// Per-child session-rate multiplier, mean 1.
    activity: Vec<f64>,
}

fn build_world(config: &SimConfig, rng: &mut ChaCha8Rng) -> Result<SimWorld, CoreError> {
    let mut catalog = Catalog::new();
    let n_apps = config.num_apps as usize;

    // Latent appeal follows a shuffled power law so appeal is independent of
    // the id ordering.
    let mut appeal_ranks: Vec<usize> = (0..n_apps).collect();
    for i in (1..n_apps).rev() {
        let j = rng.gen_range(0..=i);
        appeal_ranks.swap(i, j);
    }

    let mut appeal = vec![0.0; n_apps];
    let mut target_age = vec![0.0; n_apps];
    let mut app_ids = Vec::with_capacity(n_apps);
    for i in 0..n_apps {
        let app_id = format!("app-{i:03}");
        let min_age = rng.gen_range(2..=8u8);
        let span = rng.gen_range(1..=4u8);
        let max_age = (min_age + span).min(10);
        let published_offset = rng.gen_range(0..=540i64);
        let record = AppRecord {
            app_id: app_id.clone(),
            title: format!(
                "{} {}",
                TITLE_HEADS[rng.gen_range(0..TITLE_HEADS.len())],
                TITLE_TAILS[rng.gen_range(0..TITLE_TAILS.len())]
            ),
            category_tag: WORLDS[rng.gen_range(0..WORLDS.len())].to_string(),
            min_age,
            max_age,
            published_date: config.start_date - Duration::days(published_offset),
            min_app_version: if rng.gen_bool(0.2) {
                rng.gen_range(2..=3)
            } else {
                1
            },
            blacklisted: rng.gen_bool(config.blacklist_rate),
        };
        catalog.register_app(record).map_err(CoreError::Catalog)?;
        appeal[i] = 1.0 / ((appeal_ranks[i] + 1) as f64).powf(config.popularity_skew);
        target_age[i] = f64::from(min_age + max_age) / 2.0;
        app_ids.push(app_id);
    }

    let total_weight: f64 = config.age_weights.iter().sum();
    let mut child_ids = Vec::with_capacity(config.num_children as usize);
    for i in 0..config.num_children {
        let child_id = format!("child-{i:04}");
        let mut pick = rng.gen::<f64>() * total_weight;
        let mut age = 10u8;
        for (offset, w) in config.age_weights.iter().enumerate() {
            pick -= w;
            if pick <= 0.0 {
                age = offset as u8 + 2;
                break;
            }
        }
        let gender = match rng.gen_range(0..10) {
            0 => None,
            n if n % 2 == 0 => Some(Gender::Female),
            _ => Some(Gender::Male),
        };
        let app_version = match rng.gen_range(0..10) {
            0 => 1,
            1 | 2 => 2,
            _ => 3,
        };
        let group = assign_group(&child_id, config.seed);
        catalog
            .register_child(ChildProfile {
                child_id: child_id.clone(),
                age,
                gender,
                app_version,
                group: Some(group),
            })
            .map_err(CoreError::Catalog)?;
        child_ids.push(child_id);
    }

    // Favorites and obsession traits drive the occasional >60-plays pair;
    // the activity multiplier mixes occasional visitors with heavy users.
    let mut favorite = Vec::with_capacity(child_ids.len());
    let mut obsessed = Vec::with_capacity(child_ids.len());
    let mut activity = Vec::with_capacity(child_ids.len());
    let activity_dist = LogNormal::new(
        -config.activity_log_sd * config.activity_log_sd / 2.0,
        config.activity_log_sd.max(1e-12),
    )
    .expect("validated sd");
    for child_id in &child_ids {
        let child = catalog.child(child_id).expect("registered").clone();
        let eligible = catalog.eligible_apps(&child);
        let best = app_ids
            .iter()
            .enumerate()
            .filter(|(_, id)| eligible.contains(*id))
            .max_by(|(i, _), (j, _)| {
                let score_i = appeal[*i] * affinity(config, child.age, target_age[*i]);
                let score_j = appeal[*j] * affinity(config, child.age, target_age[*j]);
                score_i.total_cmp(&score_j)
            })
            .map(|(_, id)| id.clone());
        favorite.push(best);
        obsessed.push(rng.gen_bool(config.obsession_rate));
        activity.push(if config.activity_log_sd == 0.0 {
            1.0
        } else {
            activity_dist.sample(rng)
        });
    }

    Ok(SimWorld {
        catalog,
        appeal,
        target_age,
        app_ids,
        child_ids,
        favorite,
        obsessed,
        activity,
    })
}

fn affinity(config: &SimConfig, child_age: u8, target: f64) -> f64 {
    let closeness = (-((f64::from(child_age) - target) / 2.5).powi(2)).exp();
    (1.0 - config.age_affinity_strength) + config.age_affinity_strength * closeness
}

fn poisson(rng: &mut ChaCha8Rng, lambda: f64) -> u32 {
    // Inversion by sequential search; fine for small lambda.
    let limit = (-lambda).exp();
    let mut product = rng.gen::<f64>();
    let mut count = 0u32;
    while product > limit && count < 50 {
        count += 1;
        product *= rng.gen::<f64>();
    }
    count
}

/// Runs the simulation. Children are assigned groups deterministically, each
/// session draws a ribbon through the production assembly path, clicks follow
/// the position-bias weights scaled by app appeal, and every click produces
/// one play with a log-normal duration.
pub fn simulate(config: &SimConfig) -> Result<SimOutput, CoreError> {
    config.validate().map_err(CoreError::Sim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(stable_hash64(config.seed, "sim-world"));
    let world = build_world(config, &mut rng)?;
    let rec_config = RecommenderConfig {
        seed: config.seed,
        ..RecommenderConfig::default()
    };
    let duration_dist = LogNormal::new(config.duration_log_mean, config.duration_log_sd)
        .map_err(|e| CoreError::Sim(SimError::InvalidConfig(e.to_string())))?;

    let mut games: Vec<GameEvent> = Vec::new();
    let mut clicks: Vec<ClickEvent> = Vec::new();
    let mut recs: Vec<RecommendationRecord> = Vec::new();
    // Running play counts per child, driving the replay behavior.
    let mut play_counts: Vec<std::collections::BTreeMap<String, u32>> =
        vec![std::collections::BTreeMap::new(); world.child_ids.len()];

    fn push_game(
        games: &mut Vec<GameEvent>,
        counts: &mut std::collections::BTreeMap<String, u32>,
        event: GameEvent,
    ) {
        *counts.entry(event.app_id.clone()).or_default() += 1;
        games.push(event);
    }

    let appeal_of = |app_id: &str, world: &SimWorld| -> (f64, f64) {
        // app ids are dense ("app-NNN"), so an index lookup is safe.
        let idx = world
            .app_ids
            .iter()
            .position(|id| id == app_id)
            .expect("known app");
        (world.appeal[idx], world.target_age[idx])
    };

    for day in 0..config.day_count {
        // Recommenders see the world as of the start of the day.
        let mut builder = EventStoreBuilder::new();
        for g in &games {
            builder.add_game(g.clone());
        }
        let store = builder.freeze();
        let view = GamesView::qualify(&store, rec_config.input_policy());
        let day_start: DateTime<Utc> = (config.start_date + Duration::days(i64::from(day)))
            .and_hms_opt(0, 0, 0)
            .expect("midnight")
            .and_utc();

        for (child_idx, child_id) in world.child_ids.iter().enumerate() {
            let child = world.catalog.child(child_id).expect("registered").clone();
            let strategy = child.group.expect("assigned").strategy();
            let n_sessions = poisson(
                &mut rng,
                config.sessions_per_day * world.activity[child_idx],
            );

            let mut offsets: Vec<i64> = (0..n_sessions)
                .map(|_| rng.gen_range(8 * 3600..20 * 3600))
                .collect();
            offsets.sort_unstable();
            offsets.dedup();

            for (session, offset) in offsets.iter().enumerate() {
                let at = day_start + Duration::seconds(*offset);
                let ribbon_seed =
                    stable_hash64(config.seed, &format!("ribbon/{child_id}/{day}/{session}"));
                let ribbon = assemble_ribbon(
                    &child,
                    strategy,
                    &world.catalog,
                    &store,
                    &view,
                    &rec_config,
                    at,
                    ribbon_seed,
                );
                recs.push(ribbon.to_record());

                for slot in &ribbon.slots {
                    let (appeal, target) = appeal_of(&slot.app_id, &world);
                    let p = (config.position_bias[usize::from(slot.position) - 1]
                        * appeal
                        * affinity(config, child.age, target))
                    .clamp(0.0, 0.95);
                    if rng.gen_bool(p) {
                        let click_at = at + Duration::seconds(i64::from(slot.position));
                        clicks.push(ClickEvent {
                            child_id: child_id.clone(),
                            app_id: slot.app_id.clone(),
                            position: slot.position,
                            timestamp: click_at,
                        });
                        push_game(
                            &mut games,
                            &mut play_counts[child_idx],
                            GameEvent {
                                child_id: child_id.clone(),
                                app_id: slot.app_id.clone(),
                                start_time: click_at + Duration::seconds(1),
                                duration_s: sample_duration(&mut rng, &duration_dist),
                            },
                        );
                    }
                }

                // Unprompted play: children also find games on their own.
                if rng.gen_bool(config.organic_play_rate) {
                    if let Some(app_id) = pick_organic_app(config, &world, &child, &mut rng) {
                        push_game(
                            &mut games,
                            &mut play_counts[child_idx],
                            GameEvent {
                                child_id: child_id.clone(),
                                app_id,
                                start_time: at + Duration::seconds(1800),
                                duration_s: sample_duration(&mut rng, &duration_dist),
                            },
                        );
                    }
                }

                // Children come back to what they already like.
                if rng.gen_bool(config.replay_rate) {
                    let top = play_counts[child_idx]
                        .iter()
                        .max_by(|(id_a, n_a), (id_b, n_b)| n_a.cmp(n_b).then(id_b.cmp(id_a)))
                        .map(|(id, _)| id.clone());
                    if let Some(app_id) = top {
                        push_game(
                            &mut games,
                            &mut play_counts[child_idx],
                            GameEvent {
                                child_id: child_id.clone(),
                                app_id,
                                start_time: at + Duration::seconds(2100),
                                duration_s: sample_duration(&mut rng, &duration_dist),
                            },
                        );
                    }
                }

                // Obsessed children replay their favorite every session.
                if world.obsessed[child_idx] {
                    if let Some(favorite) = &world.favorite[child_idx] {
                        for rep in 0..2 {
                            push_game(
                                &mut games,
                                &mut play_counts[child_idx],
                                GameEvent {
                                    child_id: child_id.clone(),
                                    app_id: favorite.clone(),
                                    start_time: at + Duration::seconds(2400 + rep * 300),
                                    duration_s: sample_duration(&mut rng, &duration_dist),
                                },
                            );
                        }
                    }
                }
            }
        }
    }

    Ok(SimOutput {
        catalog: world.catalog,
        games,
        clicks,
        recs,
    })
}

fn sample_duration(rng: &mut ChaCha8Rng, dist: &LogNormal<f64>) -> f64 {
    // Clamp to one second and one hour; the raw tail exceeds the 3000 s
    // outlier bound now and then, which is exactly what the filters are for.
    let raw: f64 = dist.sample(rng);
    (raw.round()).clamp(1.0, 3600.0)
}

fn pick_organic_app(
    config: &SimConfig,
    world: &SimWorld,
    child: &ChildProfile,
    rng: &mut ChaCha8Rng,
) -> Option<String> {
    let eligible: BTreeSet<String> = world.catalog.eligible_apps(child);
    if eligible.is_empty() {
        return None;
    }
    let weights: Vec<(usize, f64)> = world
        .app_ids
        .iter()
        .enumerate()
        .filter(|(_, id)| eligible.contains(*id))
        .map(|(i, _)| {
            (
                i,
                world.appeal[i] * affinity(config, child.age, world.target_age[i]),
            )
        })
        .collect();
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    let mut pick = rng.gen::<f64>() * total;
    for (i, w) in &weights {
        pick -= w;
        if pick <= 0.0 {
            return Some(world.app_ids[*i].clone());
        }
    }
    weights.last().map(|(i, _)| world.app_ids[*i].clone())
}
