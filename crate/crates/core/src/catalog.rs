//! App and child registries, eligibility filtering and A/B/C group assignment.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seeding::stable_hash64;

pub type AppId = String;
pub type ChildId = String;

/// Youngest and oldest supported ages, in whole years.
pub const MIN_SUPPORTED_AGE: u8 = 2;
pub const MAX_SUPPORTED_AGE: u8 = 10;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("duplicate app_id {0:?}")]
    DuplicateApp(AppId),
    #[error("duplicate child_id {0:?}")]
    DuplicateChild(ChildId),
    #[error("app {app_id:?}: invalid age range {min_age}..{max_age} (must be within {lo}..{hi} and ordered)",
            lo = MIN_SUPPORTED_AGE, hi = MAX_SUPPORTED_AGE)]
    InvalidAgeRange {
        app_id: AppId,
        min_age: u8,
        max_age: u8,
    },
    #[error("child {child_id:?}: age {age} outside {lo}..{hi}",
            lo = MIN_SUPPORTED_AGE, hi = MAX_SUPPORTED_AGE)]
    InvalidChildAge { child_id: ChildId, age: u8 },
    #[error("child {child_id:?}: group already assigned to {current:?}, refusing to change it")]
    GroupAlreadyAssigned {
        child_id: ChildId,
        current: ExperimentGroup,
    },
    #[error("unknown child_id {0:?}")]
    UnknownChild(ChildId),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// One app in the library catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppRecord {
    pub app_id: AppId,
    pub title: String,
    /// World/intelligence label; carried as metadata, never used for ranking.
    pub category_tag: String,
    pub min_age: u8,
    pub max_age: u8,
    pub published_date: NaiveDate,
    pub min_app_version: u32,
    pub blacklisted: bool,
}

impl AppRecord {
    fn validate(&self) -> Result<(), CatalogError> {
        let ordered = self.min_age <= self.max_age;
        let in_range = self.min_age >= MIN_SUPPORTED_AGE && self.max_age <= MAX_SUPPORTED_AGE;
        if !ordered || !in_range {
            return Err(CatalogError::InvalidAgeRange {
                app_id: self.app_id.clone(),
                min_age: self.min_age,
                max_age: self.max_age,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Female,
    Male,
    Other,
}

/// One registered child.
///
/// `gender` is recorded for completeness but is deliberately kept out of
/// every similarity and recommendation computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChildProfile {
    pub child_id: ChildId,
    pub age: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<Gender>,
    pub app_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<ExperimentGroup>,
}

impl ChildProfile {
    fn validate(&self) -> Result<(), CatalogError> {
        if self.age < MIN_SUPPORTED_AGE || self.age > MAX_SUPPORTED_AGE {
            return Err(CatalogError::InvalidChildAge {
                child_id: self.child_id.clone(),
                age: self.age,
            });
        }
        Ok(())
    }
}

/// The three experiment arms. The arm-to-strategy mapping is fixed:
/// A = popular, B = collaborative filtering, C = random.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExperimentGroup {
    A,
    B,
    C,
}

impl ExperimentGroup {
    pub const ALL: [ExperimentGroup; 3] =
        [ExperimentGroup::A, ExperimentGroup::B, ExperimentGroup::C];

    pub fn strategy(self) -> crate::events::StrategySource {
        use crate::events::StrategySource;
        match self {
            ExperimentGroup::A => StrategySource::Popular,
            ExperimentGroup::B => StrategySource::Cf,
            ExperimentGroup::C => StrategySource::Random,
        }
    }
}

impl std::fmt::Display for ExperimentGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExperimentGroup::A => write!(f, "A"),
            ExperimentGroup::B => write!(f, "B"),
            ExperimentGroup::C => write!(f, "C"),
        }
    }
}

impl std::str::FromStr for ExperimentGroup {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(ExperimentGroup::A),
            "B" | "b" => Ok(ExperimentGroup::B),
            "C" | "c" => Ok(ExperimentGroup::C),
            other => Err(format!(
                "unknown experiment group {other:?} (expected A, B or C)"
            )),
        }
    }
}

/// Deterministic uniform assignment of a child to one of the three arms.
///
/// A pure function of `(child_id, seed)`, so replaying the same logs with the
/// same seed reproduces every arm exactly.
pub fn assign_group(child_id: &str, seed: u64) -> ExperimentGroup {
    match stable_hash64(seed, child_id) % 3 {
        0 => ExperimentGroup::A,
        1 => ExperimentGroup::B,
        _ => ExperimentGroup::C,
    }
}

/// App and child registries. Built single-writer, then treated as frozen;
/// all query methods take `&self` and are safe to call from many threads.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    apps: BTreeMap<AppId, AppRecord>,
    children: BTreeMap<ChildId, ChildProfile>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_app(&mut self, record: AppRecord) -> Result<(), CatalogError> {
        record.validate()?;
        if self.apps.contains_key(&record.app_id) {
            return Err(CatalogError::DuplicateApp(record.app_id));
        }
        self.apps.insert(record.app_id.clone(), record);
        Ok(())
    }

    pub fn register_child(&mut self, profile: ChildProfile) -> Result<(), CatalogError> {
        profile.validate()?;
        if self.children.contains_key(&profile.child_id) {
            return Err(CatalogError::DuplicateChild(profile.child_id));
        }
        self.children.insert(profile.child_id.clone(), profile);
        Ok(())
    }

    pub fn app(&self, app_id: &str) -> Option<&AppRecord> {
        self.apps.get(app_id)
    }

    pub fn child(&self, child_id: &str) -> Option<&ChildProfile> {
        self.children.get(child_id)
    }

    pub fn apps(&self) -> impl Iterator<Item = &AppRecord> {
        self.apps.values()
    }

    pub fn children(&self) -> impl Iterator<Item = &ChildProfile> {
        self.children.values()
    }

    pub fn num_apps(&self) -> usize {
        self.apps.len()
    }

    pub fn num_children(&self) -> usize {
        self.children.len()
    }

    /// Apps the child may be shown: not blacklisted, available in the
    /// child's app version, and aimed at the child's age. The same filter
    /// chain applies to every strategy, including random.
    pub fn eligible_apps(&self, child: &ChildProfile) -> BTreeSet<AppId> {
        self.apps
            .values()
            .filter(|app| {
                !app.blacklisted
                    && app.min_app_version <= child.app_version
                    && app.min_age <= child.age
                    && child.age <= app.max_age
            })
            .map(|app| app.app_id.clone())
            .collect()
    }

    /// Returns the stored group for a child, assigning one deterministically
    /// from `(child_id, seed)` if none is recorded yet. A stored group is
    /// immutable for the experiment's whole duration.
    pub fn ensure_group(
        &mut self,
        child_id: &str,
        seed: u64,
    ) -> Result<ExperimentGroup, CatalogError> {
        let profile = self
            .children
            .get_mut(child_id)
            .ok_or_else(|| CatalogError::UnknownChild(child_id.to_string()))?;
        match profile.group {
            Some(group) => Ok(group),
            None => {
                let group = assign_group(child_id, seed);
                profile.group = Some(group);
                Ok(group)
            }
        }
    }

    /// Explicitly sets a group; fails if a different one is already stored.
    pub fn set_group(
        &mut self,
        child_id: &str,
        group: ExperimentGroup,
    ) -> Result<(), CatalogError> {
        let profile = self
            .children
            .get_mut(child_id)
            .ok_or_else(|| CatalogError::UnknownChild(child_id.to_string()))?;
        match profile.group {
            Some(current) if current != group => Err(CatalogError::GroupAlreadyAssigned {
                child_id: child_id.to_string(),
                current,
            }),
            _ => {
                profile.group = Some(group);
                Ok(())
            }
        }
    }

    /// Loads apps from JSON Lines, one record per line. Unknown fields are
    /// ignored; a missing required field fails that line with its number.
    pub fn load_apps_jsonl<R: BufRead>(&mut self, reader: R) -> Result<usize, CatalogError> {
        let mut n = 0;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: AppRecord =
                serde_json::from_str(&line).map_err(|e| CatalogError::Line {
                    line: idx + 1,
                    message: e.to_string(),
                })?;
            self.register_app(record).map_err(|e| CatalogError::Line {
                line: idx + 1,
                message: e.to_string(),
            })?;
            n += 1;
        }
        Ok(n)
    }

    pub fn load_children_jsonl<R: BufRead>(&mut self, reader: R) -> Result<usize, CatalogError> {
        let mut n = 0;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let profile: ChildProfile =
                serde_json::from_str(&line).map_err(|e| CatalogError::Line {
                    line: idx + 1,
                    message: e.to_string(),
                })?;
            self.register_child(profile)
                .map_err(|e| CatalogError::Line {
                    line: idx + 1,
                    message: e.to_string(),
                })?;
            n += 1;
        }
        Ok(n)
    }

    pub fn write_apps_jsonl<W: Write>(&self, mut writer: W) -> Result<(), CatalogError> {
        for app in self.apps.values() {
            serde_json::to_writer(&mut writer, app).map_err(|e| CatalogError::Line {
                line: 0,
                message: e.to_string(),
            })?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn write_children_jsonl<W: Write>(&self, mut writer: W) -> Result<(), CatalogError> {
        for child in self.children.values() {
            serde_json::to_writer(&mut writer, child).map_err(|e| CatalogError::Line {
                line: 0,
                message: e.to_string(),
            })?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }
}
