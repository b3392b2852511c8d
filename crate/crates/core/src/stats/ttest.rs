use super::dist::student_t_sf;
use super::{check_alpha, mean, Tails, TestResult};
use crate::error::{Error, Result};

/// Two-tailed paired two-sample t-test of `mean(a - b) = 0`.
pub fn paired_t_test(a: &[f64], b: &[f64], alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    if a.len() != b.len() {
        return Err(Error::Validation(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::InsufficientSample {
            required: 2,
            actual: n,
        });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let m = mean(&diffs);
    let var = diffs.iter().map(|d| (d - m) * (d - m)).sum::<f64>() / (n - 1) as f64;
    if var.is_nan() || var <= 0.0 {
        return Err(Error::DegenerateSample(
            "paired differences have zero variance".into(),
        ));
    }
    let t = m / (var / n as f64).sqrt();
    let df = (n - 1) as f64;
    let p = (2.0 * student_t_sf(t.abs(), df)).min(1.0);
    Ok(TestResult::new(t, df, p, Tails::Two, alpha))
}
