//! Hotelling's t for two dependent correlations that share one variable.
//!
//! `j` is the shared variable (case rate), `k` the old-model density and `h`
//! the new-model density. The one-tailed alternative is `r_jk < r_jh`.

use serde::Serialize;

use super::dist::student_t_sf;
use super::{check_alpha, Tails, TestResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationTriple {
    pub n: usize,
    pub r_jk: f64,
    pub r_jh: f64,
    pub r_kh: f64,
}

impl CorrelationTriple {
    pub fn new(n: usize, r_jk: f64, r_jh: f64, r_kh: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::InsufficientSample {
                required: 4,
                actual: n,
            });
        }
        for (name, r) in [("r_jk", r_jk), ("r_jh", r_jh), ("r_kh", r_kh)] {
            if !(-1.0..=1.0).contains(&r) {
                return Err(Error::Validation(format!(
                    "{name} = {r} is not a correlation"
                )));
            }
        }
        Ok(CorrelationTriple {
            n,
            r_jk,
            r_jh,
            r_kh,
        })
    }

    /// Determinant of the 3x3 correlation matrix.
    pub fn determinant(&self) -> f64 {
        let (a, b, c) = (self.r_jk, self.r_jh, self.r_kh);
        1.0 - a * a - b * b - c * c + 2.0 * a * b * c
    }
}

/// `t = (r_jh - r_jk) √((n-3)(1+r_kh) / (2|R|))` on `n - 3` df.
pub fn hotelling_t(triple: &CorrelationTriple, alpha: f64, tails: Tails) -> Result<TestResult> {
    check_alpha(alpha)?;
    let det = triple.determinant();
    if det.is_nan() || det <= 0.0 {
        return Err(Error::InconsistentCorrelations(det));
    }
    let df = (triple.n - 3) as f64;
    let t = (triple.r_jh - triple.r_jk) * (df * (1.0 + triple.r_kh) / (2.0 * det)).sqrt();
    let p = match tails {
        Tails::One => student_t_sf(t, df),
        Tails::Two => (2.0 * student_t_sf(t.abs(), df)).min(1.0),
    };
    Ok(TestResult::new(t, df, p, tails, alpha))
}
