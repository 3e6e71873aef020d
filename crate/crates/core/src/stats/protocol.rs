//! The significance protocol: normality gate, then either the rank-sum test
//! or a variance-gated t-test.
//!
//! Both samples are first checked for normality (Lilliefors-corrected KS).
//! If either fails, Wilcoxon's rank-sum test decides; otherwise Levene's
//! test picks between Welch's t-test (unequal variances) and the classic
//! Student t-test. Every intermediate statistic, p-value and branch choice
//! is recorded in the report's trace.

use serde::{Deserialize, Serialize};

use super::lilliefors::LillieforsNull;
use super::ttests::{levene_test, student_t, welch_t};
use super::wilcoxon::wilcoxon_rank_sum;
use super::{lilliefors_statistic, StatsError};
use crate::seeding::mix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestBranch {
    Wilcoxon,
    Welch,
    Student,
}

impl TestBranch {
    pub fn label(self) -> &'static str {
        match self {
            TestBranch::Wilcoxon => "wilcoxon",
            TestBranch::Welch => "welch",
            TestBranch::Student => "student",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    /// Significance level for the gates (normality, homoskedasticity) and
    /// for the headline rejection decision.
    pub alpha: f64,
    /// Monte Carlo iterations for each Lilliefors p-value.
    pub mc_iterations: usize,
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            mc_iterations: 10_000,
            seed: 0,
        }
    }
}

/// Outcome and full decision trace of one protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatTestReport {
    pub normality_a: TestResult,
    pub normality_b: TestResult,
    pub normality_rejected: bool,
    /// Present only when the normality gate passed.
    pub levene: Option<TestResult>,
    pub branch: TestBranch,
    pub statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject_at_alpha: bool,
    /// Rejection calls at the two conventional levels.
    pub reject_at_1pct: bool,
    pub reject_at_5pct: bool,
    pub trace: Vec<String>,
}

/// Runs the decision tree on two independent samples.
pub fn significance_protocol(
    a: &[f64],
    b: &[f64],
    config: &ProtocolConfig,
) -> Result<StatTestReport, StatsError> {
    let mut trace = Vec::new();

    let d_a = lilliefors_statistic(a).map_err(|e| e.at("normality of sample A"))?;
    let d_b = lilliefors_statistic(b).map_err(|e| e.at("normality of sample B"))?;
    // One simulated null table serves both samples when sizes match.
    let null_a = LillieforsNull::simulate(a.len(), config.mc_iterations, mix(config.seed, 1))
        .map_err(|e| e.at("normality of sample A"))?;
    let p_a = null_a.p_value(d_a);
    let p_b = if b.len() == a.len() {
        null_a.p_value(d_b)
    } else {
        LillieforsNull::simulate(b.len(), config.mc_iterations, mix(config.seed, 2))
            .map_err(|e| e.at("normality of sample B"))?
            .p_value(d_b)
    };
    let normality_a = TestResult {
        statistic: d_a,
        p_value: p_a,
    };
    let normality_b = TestResult {
        statistic: d_b,
        p_value: p_b,
    };
    trace.push(format!(
        "lilliefors(A): D = {d_a:.6}, p = {p_a:.6} ({})",
        gate_word(p_a < config.alpha)
    ));
    trace.push(format!(
        "lilliefors(B): D = {d_b:.6}, p = {p_b:.6} ({})",
        gate_word(p_b < config.alpha)
    ));

    let normality_rejected = p_a < config.alpha || p_b < config.alpha;
    let (branch, levene, statistic, p_value) = if normality_rejected {
        trace.push("normality rejected for at least one sample -> wilcoxon rank-sum".to_string());
        let (u, p) = wilcoxon_rank_sum(a, b).map_err(|e| e.at("wilcoxon rank-sum"))?;
        trace.push(format!("wilcoxon: U = {u:.3}, p = {p:.6}"));
        (TestBranch::Wilcoxon, None, u, p)
    } else {
        trace.push("normality not rejected -> levene variance gate".to_string());
        let (w, p_lev) = levene_test(a, b).map_err(|e| e.at("levene"))?;
        let levene = TestResult {
            statistic: w,
            p_value: p_lev,
        };
        if p_lev < config.alpha {
            trace.push(format!(
                "levene: W = {w:.4}, p = {p_lev:.6} (unequal variances) -> welch"
            ));
            let (t, p) = welch_t(a, b).map_err(|e| e.at("welch t"))?;
            trace.push(format!("welch: t = {t:.4}, p = {p:.6}"));
            (TestBranch::Welch, Some(levene), t, p)
        } else {
            trace.push(format!(
                "levene: W = {w:.4}, p = {p_lev:.6} (homoskedastic) -> student t"
            ));
            let (t, p) = student_t(a, b).map_err(|e| e.at("student t"))?;
            trace.push(format!("student: t = {t:.4}, p = {p:.6}"));
            (TestBranch::Student, Some(levene), t, p)
        }
    };

    Ok(StatTestReport {
        normality_a,
        normality_b,
        normality_rejected,
        levene,
        branch,
        statistic,
        p_value,
        alpha: config.alpha,
        reject_at_alpha: p_value < config.alpha,
        reject_at_1pct: p_value < 0.01,
        reject_at_5pct: p_value < 0.05,
        trace,
    })
}

fn gate_word(rejected: bool) -> &'static str {
    if rejected {
        "rejected"
    } else {
        "not rejected"
    }
}
