//! Recommendation strategies and an offline A/B/C experiment harness for a
//! children's game library.
//!
//! The library is organized around a batch pipeline:
//!
//! 1. [`catalog`] owns the app and child registries, eligibility filtering
//!    and deterministic experiment-group assignment.
//! 2. [`events`] ingests game/click/recommendation logs (JSON Lines) and
//!    produces qualified, outlier-filtered views of play activity.
//! 3. [`rec`] implements the three ribbon strategies (popularity,
//!    implicit-feedback collaborative filtering, random) and assembles
//!    seven-slot ribbons with random fallback.
//! 4. [`eval`] computes engagement metrics, confusion-matrix performance
//!    metrics, click-position analysis and the significance protocol built
//!    from the tests in [`stats`].
//! 5. [`sim`] generates deterministic synthetic catalogs and logs so the
//!    whole pipeline can run at desk scale.

pub mod catalog;
pub mod config;
pub mod error;
pub mod eval;
pub mod events;
pub mod rec;
pub mod report;
pub mod seeding;
pub mod sim;
pub mod stats;

pub use catalog::{AppRecord, Catalog, ChildProfile, ExperimentGroup};
pub use error::CoreError;
pub use events::{
    ClickEvent, EventStore, EventStoreBuilder, GameEvent, GamesView, QualificationPolicy,
    RecommendationRecord, RibbonSlot, StrategySource,
};
pub use rec::{assemble_ribbon, RecommenderConfig, Ribbon};
