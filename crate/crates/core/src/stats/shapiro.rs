//! Shapiro-Wilk W test using Royston's AS R94 coefficients and p-value
//! approximation, valid for 3 <= n <= 5000.

use serde::Serialize;

use super::dist::{normal_quantile, normal_sf};
use crate::error::{Error, Result};

pub const MIN_N: usize = 3;
pub const MAX_N: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapiroWilk {
    pub w: f64,
    /// Probability of a W this small under the normality null.
    pub p_value: f64,
    pub n: usize,
}

impl ShapiroWilk {
    /// The null of normality is retained at `alpha`.
    pub fn is_normal(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

const SMALL: f64 = 1e-19;

const G: [f64; 2] = [-2.273, 0.459];
const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];

// c[0] + c[1] x + c[2] x² + ...
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

pub fn shapiro_wilk(values: &[f64]) -> Result<ShapiroWilk> {
    let n = values.len();
    if !(MIN_N..=MAX_N).contains(&n) {
        return Err(Error::UnsupportedSize {
            n,
            min: MIN_N,
            max: MAX_N,
        });
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Validation(format!(
            "Shapiro-Wilk sample contains non-finite value {v}"
        )));
    }
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if range < SMALL {
        return Err(Error::DegenerateSample(
            "Shapiro-Wilk sample has zero variance".into(),
        ));
    }

    let half = coefficients(n);
    // full antisymmetric coefficient vector, ascending order
    let coef = |i: usize| -> f64 {
        let j = n - 1 - i;
        match i.cmp(&j) {
            std::cmp::Ordering::Less => -half[i],
            std::cmp::Ordering::Greater => half[j],
            std::cmp::Ordering::Equal => 0.0,
        }
    };

    let nf = n as f64;
    let sa = (0..n).map(coef).sum::<f64>() / nf;
    let sx = x.iter().map(|v| v / range).sum::<f64>() / nf;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (i, &xi) in x.iter().enumerate() {
        let asa = coef(i) - sa;
        let xsx = xi / range - sx;
        ssa += asa * asa;
        ssx += xsx * xsx;
        sax += asa * xsx;
    }
    // 1 - W, formed to limit rounding error for W near 1
    let root = (ssa * ssx).sqrt();
    let w1 = ((root - sax) * (root + sax) / (ssa * ssx)).max(0.0);
    let w = 1.0 - w1;

    Ok(ShapiroWilk {
        w,
        p_value: p_value(w, w1, n),
        n,
    })
}

// Upper-half coefficients a[0..n/2], a[0] pairing the extremes.
fn coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let nf = n as f64;
    let an25 = nf + 0.25;
    // lower-half normal scores are negative; m[i] pairs with x[i]
    let mut m: Vec<f64> = (1..=half)
        .map(|i| normal_quantile((i as f64 - 0.375) / an25))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / nf.sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let (first_scaled, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        m[1] = a2;
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    m[0] = a1;
    for v in &mut m[first_scaled..] {
        *v /= -fac;
    }
    m
}

fn p_value(w: f64, w1: f64, n: usize) -> f64 {
    if n == 3 {
        const SIX_OVER_PI: f64 = 6.0 / std::f64::consts::PI;
        const ASIN_SQRT_THREE_QUARTERS: f64 = std::f64::consts::FRAC_PI_3;
        return (SIX_OVER_PI * (w.sqrt().asin() - ASIN_SQRT_THREE_QUARTERS)).clamp(0.0, 1.0);
    }
    if w1 <= 0.0 {
        return 1.0;
    }
    let nf = n as f64;
    let mut y = w1.ln();
    let (mean, sd) = if n <= 11 {
        let gamma = poly(&G, nf);
        if y >= gamma {
            return 1e-99;
        }
        y = -(gamma - y).ln();
        (poly(&C3, nf), poly(&C4, nf).exp())
    } else {
        let ln_n = nf.ln();
        (poly(&C5, ln_n), poly(&C6, ln_n).exp())
    };
    normal_sf((y - mean) / sd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_evaluates_low_order_first() {
        assert_eq!(poly(&[1.0, 2.0, 3.0], 2.0), 17.0);
    }

    #[test]
    fn evenly_spaced_reference_values() {
        // scipy.stats.shapiro(range(1, n + 1))
        let cases = [
            (3, 1.0, 1.0),
            (5, 0.986_762_155_211_559, 0.967_173_934_972_858),
            (10, 0.970_164_611_085_606, 0.892_367_306_190_298),
            (20, 0.960_375_183_242_988, 0.551_371_745_791_677),
        ];
        for (n, w, p) in cases {
            let data: Vec<f64> = (1..=n).map(f64::from).collect();
            let r = shapiro_wilk(&data).unwrap();
            assert!((r.w - w).abs() < 1e-5, "n={n}: W={}", r.w);
            assert!((r.p_value - p).abs() < 1e-4, "n={n}: p={}", r.p_value);
        }
    }

    #[test]
    fn size_and_variance_errors() {
        assert!(matches!(
            shapiro_wilk(&[1.0, 2.0]),
            Err(Error::UnsupportedSize { n: 2, .. })
        ));
        let big = vec![0.0; MAX_N + 1];
        assert!(matches!(
            shapiro_wilk(&big),
            Err(Error::UnsupportedSize { .. })
        ));
        assert!(matches!(
            shapiro_wilk(&[4.0; 10]),
            Err(Error::DegenerateSample(_))
        ));
    }

    #[test]
    fn w_is_in_unit_interval() {
        let skewed: Vec<f64> = (1..=40).map(|i| (i as f64 / 4.0).exp()).collect();
        let r = shapiro_wilk(&skewed).unwrap();
        assert!(r.w > 0.0 && r.w <= 1.0);
        assert!(!r.is_normal(0.05));
    }
}
