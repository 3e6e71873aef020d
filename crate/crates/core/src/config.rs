//! Flat key-value config files: `key = value`, `#` comments, blank lines.
//!
//! One file can carry recommender, qualification, evaluation and simulator
//! settings; unknown keys are rejected so typos surface instead of being
//! silently ignored.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::eval::Attribution;
use crate::events::QualificationPolicy;
use crate::rec::RecommenderConfig;
use crate::sim::SimConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {content:?}")]
    Malformed { line: usize, content: String },
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    #[error("key {key:?}: {message}")]
    BadValue { key: String, message: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("{0}")]
    Invalid(String),
}

/// Parsed but untyped key-value pairs.
#[derive(Debug, Clone, Default)]
pub struct KvConfig {
    values: BTreeMap<String, String>,
}

impl KvConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Malformed {
                    line: idx + 1,
                    content: raw.to_string(),
                });
            };
            let key = key.trim().to_string();
            // Values never contain '#', so the rest of the line is comment.
            let value = value.split('#').next().unwrap_or("").trim().to_string();
            if values.insert(key.clone(), value).is_some() {
                return Err(ConfigError::DuplicateKey { line: idx + 1, key });
            }
        }
        Ok(Self { values })
    }

    fn take<T: std::str::FromStr>(
        &self,
        key: &str,
        into: &mut T,
        seen: &mut Vec<String>,
    ) -> Result<(), ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        seen.push(key.to_string());
        if let Some(raw) = self.values.get(key) {
            *into = raw.parse::<T>().map_err(|e| ConfigError::BadValue {
                key: key.to_string(),
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    fn take_list(
        &self,
        key: &str,
        into: &mut Vec<f64>,
        seen: &mut Vec<String>,
    ) -> Result<(), ConfigError> {
        seen.push(key.to_string());
        if let Some(raw) = self.values.get(key) {
            let parsed: Result<Vec<f64>, _> =
                raw.split(',').map(|v| v.trim().parse::<f64>()).collect();
            *into = parsed.map_err(|e| ConfigError::BadValue {
                key: key.to_string(),
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// Extracts every supported setting, starting from defaults. Fails on
    /// keys that belong to no section.
    pub fn into_settings(self) -> Result<Settings, ConfigError> {
        let mut settings = Settings::default();
        let mut seen: Vec<String> = Vec::new();

        let rec = &mut settings.recommender;
        self.take("strategy_slots", &mut rec.strategy_slots, &mut seen)?;
        self.take("ribbon_size", &mut rec.ribbon_size, &mut seen)?;
        self.take("neighborhood_cap", &mut rec.neighborhood_cap, &mut seen)?;
        self.take("min_similarity", &mut rec.min_similarity, &mut seen)?;
        self.take("age_weight", &mut rec.age_weight, &mut seen)?;
        self.take("jaccard_weight", &mut rec.jaccard_weight, &mut seen)?;
        self.take(
            "intensive_min_plays",
            &mut rec.intensive_min_plays,
            &mut seen,
        )?;
        self.take(
            "intensive_min_duration_s",
            &mut rec.intensive_min_duration_s,
            &mut seen,
        )?;
        self.take(
            "popularity_min_duration_s",
            &mut rec.popularity_min_duration_s,
            &mut seen,
        )?;
        self.take(
            "apply_outlier_filters_to_recommenders",
            &mut rec.apply_outlier_filters,
            &mut seen,
        )?;

        let policy = &mut settings.engagement_policy;
        self.take(
            "engagement_min_duration_s",
            &mut policy.min_duration_s,
            &mut seen,
        )?;
        self.take(
            "engagement_max_duration_s",
            &mut policy.max_duration_s,
            &mut seen,
        )?;
        self.take(
            "engagement_max_plays_per_pair",
            &mut policy.max_plays_per_pair,
            &mut seen,
        )?;

        seen.push("attribution".to_string());
        if let Some(raw) = self.values.get("attribution") {
            settings.attribution = match raw.as_str() {
                "slot_source" => Attribution::SlotSource,
                "arm" | "arm_assignment" => Attribution::ArmAssignment,
                other => {
                    return Err(ConfigError::BadValue {
                        key: "attribution".into(),
                        message: format!("expected slot_source or arm, got {other:?}"),
                    })
                }
            };
        }

        self.take("alpha", &mut settings.alpha, &mut seen)?;
        self.take("mc_iterations", &mut settings.mc_iterations, &mut seen)?;

        let sim = &mut settings.sim;
        self.take("num_children", &mut sim.num_children, &mut seen)?;
        self.take("num_apps", &mut sim.num_apps, &mut seen)?;
        self.take("day_count", &mut sim.day_count, &mut seen)?;
        self.take("start_date", &mut sim.start_date, &mut seen)?;
        self.take_list("age_weights", &mut sim.age_weights, &mut seen)?;
        self.take("popularity_skew", &mut sim.popularity_skew, &mut seen)?;
        self.take(
            "age_affinity_strength",
            &mut sim.age_affinity_strength,
            &mut seen,
        )?;
        seen.push("position_bias".to_string());
        if let Some(raw) = self.values.get("position_bias") {
            let parsed: Result<Vec<f64>, _> =
                raw.split(',').map(|v| v.trim().parse::<f64>()).collect();
            let list = parsed.map_err(|e| ConfigError::BadValue {
                key: "position_bias".into(),
                message: e.to_string(),
            })?;
            if list.len() != 7 {
                return Err(ConfigError::BadValue {
                    key: "position_bias".into(),
                    message: format!("expected 7 comma-separated weights, got {}", list.len()),
                });
            }
            sim.position_bias.copy_from_slice(&list);
        }
        self.take("sessions_per_day", &mut sim.sessions_per_day, &mut seen)?;
        self.take("activity_log_sd", &mut sim.activity_log_sd, &mut seen)?;
        self.take("duration_log_mean", &mut sim.duration_log_mean, &mut seen)?;
        self.take("duration_log_sd", &mut sim.duration_log_sd, &mut seen)?;
        self.take("organic_play_rate", &mut sim.organic_play_rate, &mut seen)?;
        self.take("replay_rate", &mut sim.replay_rate, &mut seen)?;
        self.take("blacklist_rate", &mut sim.blacklist_rate, &mut seen)?;
        self.take("obsession_rate", &mut sim.obsession_rate, &mut seen)?;

        seen.push("seed".to_string());
        if let Some(raw) = self.values.get("seed") {
            let seed: u64 =
                raw.parse()
                    .map_err(|e: std::num::ParseIntError| ConfigError::BadValue {
                        key: "seed".into(),
                        message: e.to_string(),
                    })?;
            settings.seed = Some(seed);
            settings.sim.seed = seed;
        }

        for key in self.values.keys() {
            if !seen.iter().any(|s| s == key) {
                return Err(ConfigError::UnknownKey(key.clone()));
            }
        }

        rec_validate(&settings.recommender)?;
        QualificationPolicy::new(
            settings.engagement_policy.min_duration_s,
            settings.engagement_policy.max_duration_s,
            settings.engagement_policy.max_plays_per_pair,
        )
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        settings
            .sim
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(settings)
    }
}

fn rec_validate(config: &RecommenderConfig) -> Result<(), ConfigError> {
    config
        .validate()
        .map_err(|e| ConfigError::Invalid(e.to_string()))
}

/// Typed settings assembled from a config file, all defaulted.
#[derive(Debug, Clone)]
pub struct Settings {
    pub recommender: RecommenderConfig,
    pub engagement_policy: QualificationPolicy,
    pub attribution: Attribution,
    pub alpha: f64,
    pub mc_iterations: usize,
    pub sim: SimConfig,
    /// Seed from the file, if present; command-line seeds override it.
    pub seed: Option<u64>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            recommender: RecommenderConfig::default(),
            engagement_policy: QualificationPolicy::engagement_default(),
            attribution: Attribution::SlotSource,
            alpha: 0.05,
            mc_iterations: 10_000,
            sim: SimConfig::default(),
            seed: None,
        }
    }
}

impl Settings {
    pub fn from_file(path: &std::path::Path) -> Result<Self, crate::error::CoreError> {
        let text = std::fs::read_to_string(path)?;
        Ok(KvConfig::parse(&text)?.into_settings()?)
    }

    /// Example configText with every supported key at its default.
    pub fn example() -> String {
        let d = Settings::default();
        let rec = &d.recommender;
        let sim = &d.sim;
        format!(
            "# recommender\n\
             strategy_slots = {}\n\
             ribbon_size = {}\n\
             neighborhood_cap = {}\n\
             min_similarity = {}\n\
             age_weight = {}\n\
             jaccard_weight = {}\n\
             intensive_min_plays = {}\n\
             intensive_min_duration_s = {}\n\
             popularity_min_duration_s = {}\n\
             apply_outlier_filters_to_recommenders = {}\n\
             \n# evaluation\n\
             engagement_min_duration_s = {}\n\
             engagement_max_duration_s = {}\n\
             engagement_max_plays_per_pair = {}\n\
             attribution = slot_source\n\
             alpha = {}\n\
             mc_iterations = {}\n\
             \n# simulator\n\
             num_children = {}\n\
             num_apps = {}\n\
             day_count = {}\n\
             start_date = {}\n\
             age_weights = {}\n\
             popularity_skew = {}\n\
             age_affinity_strength = {}\n\
             position_bias = {}\n\
             sessions_per_day = {}\n\
             activity_log_sd = {}\n\
             duration_log_mean = {}\n\
             duration_log_sd = {}\n\
             organic_play_rate = {}\n\
             replay_rate = {}\n\
             blacklist_rate = {}\n\
             obsession_rate = {}\n\
             seed = {}\n",
            rec.strategy_slots,
            rec.ribbon_size,
            rec.neighborhood_cap,
            rec.min_similarity,
            rec.age_weight,
            rec.jaccard_weight,
            rec.intensive_min_plays,
            rec.intensive_min_duration_s,
            rec.popularity_min_duration_s,
            rec.apply_outlier_filters,
            d.engagement_policy.min_duration_s,
            d.engagement_policy.max_duration_s,
            d.engagement_policy.max_plays_per_pair,
            d.alpha,
            d.mc_iterations,
            sim.num_children,
            sim.num_apps,
            sim.day_count,
            sim.start_date,
            sim.age_weights
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
            sim.popularity_skew,
            sim.age_affinity_strength,
            sim.position_bias
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
            sim.sessions_per_day,
            sim.activity_log_sd,
            sim.duration_log_mean,
            sim.duration_log_sd,
            sim.organic_play_rate,
            sim.replay_rate,
            sim.blacklist_rate,
            sim.obsession_rate,
            sim.seed,
        )
    }
}
