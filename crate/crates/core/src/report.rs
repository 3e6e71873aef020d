//! The full evaluation pipeline and its JSON/text report.
//!
//! `evaluate` runs the train/test split, engagement and performance metrics,
//! click analysis and the significance protocol over a frozen store, and
//! returns a single report that serializes to deterministic JSON (same
//! inputs, same bytes). `render_text` mirrors the tabular layout used in
//! experiment write-ups; percentages appear only there, the JSON keeps raw
//! ratios.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::catalog::{assign_group, AppId, Catalog, ChildId};
use crate::error::CoreError;
use crate::eval::{
    click_position_analysis, confusion_for_child, engagement_metrics, performance_metrics,
    Attribution, ClickPositionReport, ConfusionMatrix, EngagementReport, EvalError, EvalParams,
    ExposureLedger,
};
use crate::events::{EventStore, GamesView, StrategySource};
use crate::seeding::mix;
use crate::stats::{significance_protocol, ProtocolConfig, StatTestReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub train_start: NaiveDate,
    pub train_end: NaiveDate,
    pub test_start: NaiveDate,
    pub test_end: NaiveDate,
    pub alpha: f64,
    pub seed: u64,
    pub mc_iterations: usize,
    pub attribution: Attribution,
}

/// Engagement row for one strategy (per-user detail omitted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngagementSummary {
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
}

impl From<&EngagementReport> for EngagementSummary {
    fn from(r: &EngagementReport) -> Self {
        Self {
            num_users: r.num_users,
            total_games: r.total_games,
            total_game_time_s: r.total_game_time_s,
            ang: r.ang,
            agt: r.agt,
            median_games: r.median_games,
            median_game_time_s: r.median_game_time_s,
            variance_games: r.variance_games,
            variance_game_time_s: r.variance_game_time_s,
            empty: r.empty,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyPerformance {
    pub children: usize,
    pub confusion: ConfusionMatrix,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

/// A significance comparison either ran to completion or failed a
/// precondition (tiny sample, zero variance); failures are recorded, not
/// swallowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SignificanceOutcome {
    Report(StatTestReport),
    Error { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub meta: ReportMeta,
    pub engagement: BTreeMap<String, EngagementSummary>,
    pub performance: BTreeMap<String, StrategyPerformance>,
    pub clicks: ClickPositionReport,
    pub significance: BTreeMap<String, BTreeMap<String, SignificanceOutcome>>,
}

impl EvaluationReport {
    /// Deterministic pretty JSON (struct fields and BTreeMap keys only).
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

fn day_start(date: NaiveDate) -> DateTime<Utc> {
    date.and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
}

fn day_after(date: NaiveDate) -> DateTime<Utc> {
    day_start(date) + chrono::Duration::days(1)
}

/// The strategy pairs compared by the significance section.
const COMPARISONS: [(StrategySource, StrategySource, &str); 3] = [
    (
        StrategySource::Popular,
        StrategySource::Random,
        "popular_vs_random",
    ),
    (StrategySource::Cf, StrategySource::Random, "cf_vs_random"),
    (StrategySource::Popular, StrategySource::Cf, "popular_vs_cf"),
];

/// Runs the whole evaluation over a frozen store.
pub fn evaluate(
    catalog: &Catalog,
    store: &EventStore,
    params: &EvalParams,
) -> Result<EvaluationReport, CoreError> {
    params.validate().map_err(CoreError::Eval)?;
    let period_start = day_start(params.train_start);
    let period_end = day_after(params.test_end);

    // Exposure and engagement run over the whole period.
    let ledger = ExposureLedger::build(store.recommendations(), period_end);
    let view = GamesView::qualify(store, params.engagement_policy);

    let mut engagement_reports: BTreeMap<StrategySource, EngagementReport> = BTreeMap::new();
    let mut engagement = BTreeMap::new();
    for strategy in StrategySource::ALL {
        let report = engagement_metrics(&ledger, &view, strategy, params.attribution, catalog);
        engagement.insert(
            strategy.label().to_string(),
            EngagementSummary::from(&report),
        );
        engagement_reports.insert(strategy, report);
    }

    // Performance: per-child confusion matrices over the train/test split,
    // summed per arm strategy.
    let performance = performance_section(catalog, store, &view, params)?;

    // Clicks within the period.
    let mut counts = [0u64; 7];
    for click in store.clicks() {
        if click.timestamp >= period_start && click.timestamp < period_end {
            counts[usize::from(click.position) - 1] += 1;
        }
    }
    let clicks = click_position_analysis(counts);

    // Significance over the per-user engagement samples.
    let mut significance = BTreeMap::new();
    for (metric_idx, metric) in ["games", "time"].iter().enumerate() {
        let mut per_pair = BTreeMap::new();
        for (pair_idx, (left, right, name)) in COMPARISONS.iter().enumerate() {
            let sample = |s: StrategySource| -> Vec<f64> {
                engagement_reports[&s]
                    .per_user
                    .iter()
                    .map(|u| {
                        if metric_idx == 0 {
                            u.games as f64
                        } else {
                            u.game_time_s
                        }
                    })
                    .collect()
            };
            let a = sample(*left);
            let b = sample(*right);
            let config = ProtocolConfig {
                alpha: params.alpha,
                mc_iterations: params.mc_iterations,
                seed: mix(
                    params.seed,
                    (metric_idx * COMPARISONS.len() + pair_idx) as u64,
                ),
            };
            let outcome = match significance_protocol(&a, &b, &config) {
                Ok(report) => SignificanceOutcome::Report(report),
                Err(e) => SignificanceOutcome::Error {
                    error: e.to_string(),
                },
            };
            per_pair.insert((*name).to_string(), outcome);
        }
        significance.insert((*metric).to_string(), per_pair);
    }

    Ok(EvaluationReport {
        meta: ReportMeta {
            train_start: params.train_start,
            train_end: params.train_end,
            test_start: params.test_start,
            test_end: params.test_end,
            alpha: params.alpha,
            seed: params.seed,
            mc_iterations: params.mc_iterations,
            attribution: params.attribution,
        },
        engagement,
        performance,
        clicks,
        significance,
    })
}

/// Children grouped by arm strategy; each child with at least one
/// train-window ribbon contributes one confusion matrix to its arm.
fn performance_section(
    catalog: &Catalog,
    store: &EventStore,
    view: &GamesView,
    params: &EvalParams,
) -> Result<BTreeMap<String, StrategyPerformance>, CoreError> {
    let train_start = day_start(params.train_start);
    let train_end = day_after(params.train_end);
    let test_start = day_start(params.test_start);
    let test_end = day_after(params.test_end);

    // Apps recommended to each child during training, any slot.
    let mut train_recs: BTreeMap<ChildId, BTreeSet<AppId>> = BTreeMap::new();
    for record in store.recommendations() {
        if record.generated_at >= train_start && record.generated_at < train_end {
            let entry = train_recs.entry(record.child_id.clone()).or_default();
            for slot in &record.slots {
                entry.insert(slot.app_id.clone());
            }
        }
    }
    if train_recs.is_empty() {
        return Err(CoreError::Eval(EvalError::NoRecommendations));
    }

    // Qualifying plays per child during testing.
    let mut test_plays: BTreeMap<ChildId, BTreeSet<AppId>> = BTreeMap::new();
    for game in view.events() {
        if game.start_time >= test_start && game.start_time < test_end {
            test_plays
                .entry(game.child_id.clone())
                .or_default()
                .insert(game.app_id.clone());
        }
    }

    let empty = BTreeSet::new();
    let mut sums: BTreeMap<StrategySource, (usize, ConfusionMatrix)> = BTreeMap::new();
    for (child_id, recs) in &train_recs {
        let Some(child) = catalog.child(child_id) else {
            continue;
        };
        let arm = child
            .group
            .unwrap_or_else(|| assign_group(child_id, params.seed));
        let universe = catalog.eligible_apps(child);
        let plays = test_plays.get(child_id).unwrap_or(&empty);
        let matrix = confusion_for_child(recs, plays, &universe);
        let entry = sums
            .entry(arm.strategy())
            .or_insert((0, ConfusionMatrix::default()));
        entry.0 += 1;
        entry.1.add(&matrix);
    }

    let mut section = BTreeMap::new();
    for strategy in StrategySource::ALL {
        let (children, confusion) = sums.get(&strategy).copied().unwrap_or_default();
        let metrics = performance_metrics(&confusion);
        section.insert(
            strategy.label().to_string(),
            StrategyPerformance {
                children,
                confusion,
                accuracy: metrics.accuracy,
                precision: metrics.precision,
                recall: metrics.recall,
                f1: metrics.f1,
            },
        );
    }
    Ok(section)
}

fn pct(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{:.2}", v * 100.0),
        None => "n/a".to_string(),
    }
}

/// Plain-text tables mirroring the click, engagement and performance
/// layouts, plus the significance traces.
pub fn render_text(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let meta = &report.meta;
    out.push_str(&format!(
        "Evaluation report\n  train: {} .. {}\n  test:  {} .. {}\n  alpha: {}  seed: {}  attribution: {}\n\n",
        meta.train_start,
        meta.train_end,
        meta.test_start,
        meta.test_end,
        meta.alpha,
        meta.seed,
        match meta.attribution {
            Attribution::SlotSource => "slot_source",
            Attribution::ArmAssignment => "arm_assignment",
        }
    ));

    out.push_str("Click-through by ribbon position (1-5 visible, 6-7 hidden)\n");
    out.push_str("  Position ");
    for p in 1..=7 {
        out.push_str(&format!("{p:>8}"));
    }
    out.push_str("\n  Clicks   ");
    for c in report.clicks.clicks {
        out.push_str(&format!("{c:>8}"));
    }
    out.push_str("\n  Rank     ");
    for r in report.clicks.rank {
        out.push_str(&format!("{r:>8}"));
    }
    out.push_str(&format!(
        "\n  Mean visible: {:.1}   Mean hidden: {:.1}\n\n",
        report.clicks.mean_visible, report.clicks.mean_hidden
    ));

    out.push_str("Engagement by strategy\n");
    out.push_str(&format!(
        "  {:<10} {:>7} {:>10} {:>10} {:>12} {:>12} {:>12} {:>14}\n",
        "strategy", "users", "ANG", "med games", "var games", "AGT (s)", "med time", "var time"
    ));
    for (name, row) in &report.engagement {
        if row.empty {
            out.push_str(&format!("  {name:<10} (no acting users)\n"));
            continue;
        }
        out.push_str(&format!(
            "  {:<10} {:>7} {:>10.2} {:>10.1} {:>12.2} {:>12.2} {:>12.2} {:>14.2}\n",
            name,
            row.num_users,
            row.ang,
            row.median_games,
            row.variance_games,
            row.agt,
            row.median_game_time_s,
            row.variance_game_time_s
        ));
    }
    out.push('\n');

    out.push_str("Performance by strategy (train -> test, percentages)\n");
    out.push_str(&format!(
        "  {:<10} {:>9} {:>11} {:>8} {:>8}\n",
        "strategy", "accuracy", "precision", "recall", "F1"
    ));
    for (name, row) in &report.performance {
        out.push_str(&format!(
            "  {:<10} {:>9} {:>11} {:>8} {:>8}\n",
            name,
            pct(row.accuracy),
            pct(row.precision),
            pct(row.recall),
            pct(row.f1)
        ));
    }
    out.push('\n');

    out.push_str("Significance protocol\n");
    for (metric, pairs) in &report.significance {
        for (pair, outcome) in pairs {
            match outcome {
                SignificanceOutcome::Report(r) => {
                    out.push_str(&format!(
                        "  {metric}/{pair}: {} p = {:.4} (reject at 1%: {}, at 5%: {})\n",
                        r.branch.label(),
                        r.p_value,
                        r.reject_at_1pct,
                        r.reject_at_5pct
                    ));
                    for line in &r.trace {
                        out.push_str(&format!("      {line}\n"));
                    }
                }
                SignificanceOutcome::Error { error } => {
                    out.push_str(&format!("  {metric}/{pair}: not run ({error})\n"));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_keys_are_stable() {
        let names: Vec<&str> = COMPARISONS.iter().map(|(_, _, n)| *n).collect();
        assert_eq!(
            names,
            vec!["popular_vs_random", "cf_vs_random", "popular_vs_cf"]
        );
    }

    #[test]
    fn text_renderer_handles_empty_strategies() {
        let meta = ReportMeta {
            train_start: NaiveDate::from_ymd_opt(2018, 10, 15).unwrap(),
            train_end: NaiveDate::from_ymd_opt(2018, 11, 13).unwrap(),
            test_start: NaiveDate::from_ymd_opt(2018, 11, 14).unwrap(),
            test_end: NaiveDate::from_ymd_opt(2018, 11, 28).unwrap(),
            alpha: 0.05,
            seed: 1,
            mc_iterations: 100,
            attribution: Attribution::SlotSource,
        };
        let mut engagement = BTreeMap::new();
        engagement.insert(
            "cf".to_string(),
            EngagementSummary {
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
            },
        );
        let mut performance = BTreeMap::new();
        performance.insert(
            "cf".to_string(),
            StrategyPerformance {
                children: 0,
                confusion: ConfusionMatrix::default(),
                accuracy: None,
                precision: None,
                recall: None,
                f1: None,
            },
        );
        let mut significance = BTreeMap::new();
        let mut pairs = BTreeMap::new();
        pairs.insert(
            "cf_vs_random".to_string(),
            SignificanceOutcome::Error {
                error: "sample too small".to_string(),
            },
        );
        significance.insert("games".to_string(), pairs);
        let report = EvaluationReport {
            meta,
            engagement,
            performance,
            clicks: click_position_analysis([0; 7]),
            significance,
        };
        let text = render_text(&report);
        assert!(text.contains("(no acting users)"));
        assert!(text.contains("n/a"));
        assert!(text.contains("not run (sample too small)"));
        // The JSON stays valid and round-trips through the same type.
        let parsed: EvaluationReport = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(parsed, report);
    }
}
