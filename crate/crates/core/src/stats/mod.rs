//! Statistical kernels used by the density comparison.

mod dist;
mod hotelling;
mod interpret;
mod rank;
mod shapiro;
mod spearman;
mod ttest;

pub use dist::{
    beta_reg, gamma_q, ln_gamma, normal_cdf, normal_quantile, normal_sf, student_t_cdf,
    student_t_sf,
};
pub use hotelling::{hotelling_t, CorrelationTriple};
pub use interpret::{interpret, Strength};
pub use rank::{rank, RankVector};
pub use shapiro::{shapiro_wilk, ShapiroWilk};
pub use spearman::{spearman, PValueMethod, Spearman};
pub use ttest::paired_t_test;

use serde::Serialize;

/// Conventional significance level.
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tails {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Significant,
    Insignificant,
}

impl Verdict {
    pub fn from_p(p_value: f64, alpha: f64) -> Self {
        if p_value < alpha {
            Verdict::Significant
        } else {
            Verdict::Insignificant
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Significant => "Significant",
            Verdict::Insignificant => "Insignificant",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Outcome of a hypothesis test. `verdict` is significant iff `p_value < alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df: f64,
    pub p_value: f64,
    pub tails: Tails,
    pub alpha: f64,
    pub verdict: Verdict,
}

impl TestResult {
    pub(crate) fn new(statistic: f64, df: f64, p_value: f64, tails: Tails, alpha: f64) -> Self {
        TestResult {
            statistic,
            df,
            p_value,
            tails,
            alpha,
            verdict: Verdict::from_p(p_value, alpha),
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> crate::Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(crate::Error::Argument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Pearson correlation; `None` when either side has zero variance.
pub(crate) fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let mx = mean(xs);
    let my = mean(ys);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
