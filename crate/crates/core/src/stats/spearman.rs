use std::sync::OnceLock;

use serde::Serialize;

use super::dist::student_t_sf;
use super::pearson;
use super::rank::rank;
use crate::error::{Error, Result};

/// Largest tie-free sample size that gets an exact permutation p-value.
pub const EXACT_MAX_N: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    ExactPermutation,
    TDistribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spearman {
    pub rho: f64,
    /// Two-tailed.
    pub p_value: f64,
    pub n: usize,
    pub method: PValueMethod,
}

/// Spearman's rank correlation with a two-tailed p-value.
///
/// Tie-free samples use `1 - 6 Σd² / (n³ - n)`; samples with ties fall back to
/// the Pearson correlation of the average ranks. The p-value is exact for
/// tie-free `n <= 9` and otherwise uses `t = ρ √((n-2)/(1-ρ²))` on `n - 2` df.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<Spearman> {
    if xs.len() != ys.len() {
        return Err(Error::Validation(format!(
            "paired samples differ in length: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 4 {
        return Err(Error::InsufficientSample {
            required: 4,
            actual: n,
        });
    }
    let r = rank(xs)?;
    let s = rank(ys)?;
    let tie_free = !r.has_ties() && !s.has_ties();

    let rho = if tie_free {
        let d2: f64 = r
            .ranks()
            .iter()
            .zip(s.ranks())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let nf = n as f64;
        1.0 - 6.0 * d2 / (nf * nf * nf - nf)
    } else {
        pearson(r.ranks(), s.ranks())
            .ok_or_else(|| Error::UndefinedCorrelation("one of the samples is constant".into()))?
    };

    if tie_free && n <= EXACT_MAX_N {
        let d2 = r
            .ranks()
            .iter()
            .zip(s.ranks())
            .map(|(a, b)| {
                let d = (a - b) as i64;
                d * d
            })
            .sum::<i64>();
        return Ok(Spearman {
            rho,
            p_value: exact_p_value(n, d2),
            n,
            method: PValueMethod::ExactPermutation,
        });
    }

    let p_value = if rho.abs() >= 1.0 {
        0.0
    } else {
        let df = (n - 2) as f64;
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        (2.0 * student_t_sf(t.abs(), df)).min(1.0)
    };
    Ok(Spearman {
        rho,
        p_value,
        n,
        method: PValueMethod::TDistribution,
    })
}

// Two-tailed: share of rank permutations whose Σd² lies at least as far from
// its null mean (n³ - n) / 6 as the observed one.
fn exact_p_value(n: usize, d2: i64) -> f64 {
    let counts = &d2_distributions()[n];
    let n = n as i64;
    let twice_mid = (n * n * n - n) / 3;
    let observed = (2 * d2 - twice_mid).abs();
    let total: u64 = counts.iter().sum();
    let extreme: u64 = counts
        .iter()
        .enumerate()
        .filter(|&(d, _)| (2 * d as i64 - twice_mid).abs() >= observed)
        .map(|(_, &c)| c)
        .sum();
    extreme as f64 / total as f64
}

// counts[n][d] = number of permutations of 1..=n with Σ(i - π(i))² = d
fn d2_distributions() -> &'static Vec<Vec<u64>> {
    static TABLE: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    TABLE.get_or_init(|| (0..=EXACT_MAX_N).map(d2_distribution).collect())
}

fn d2_distribution(n: usize) -> Vec<u64> {
    let max = (n * n * n).saturating_sub(n) / 3;
    let mut counts = vec![0u64; max + 1];
    if n == 0 {
        counts[0] = 1;
        return counts;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let d2 = |p: &[usize]| -> usize {
        p.iter()
            .enumerate()
            .map(|(i, &v)| (i as isize - v as isize).pow(2) as usize)
            .sum()
    };
    counts[d2(&perm)] += 1;
    // Heap's algorithm, iterative form
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            counts[d2(&perm)] += 1;
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_and_reversal() {
        let xs: Vec<f64> = (0..12).map(|i| (i * i) as f64).collect();
        let rev: Vec<f64> = xs.iter().rev().copied().collect();
        assert_eq!(spearman(&xs, &xs).unwrap().rho, 1.0);
        assert_eq!(spearman(&xs, &xs).unwrap().p_value, 0.0);
        assert_eq!(spearman(&xs, &rev).unwrap().rho, -1.0);
    }

    #[test]
    fn hand_evaluated_four_pairs() {
        // d = (0, 0, -1, 1): 1 - 6*2/60
        let s = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 4.0, 3.0]).unwrap();
        assert!((s.rho - 0.8).abs() < 1e-15);
        assert_eq!(s.method, PValueMethod::ExactPermutation);
        // |ρ| >= 0.8 for 8 of 24 permutations
        assert!((s.p_value - 8.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn permutation_table_totals() {
        let mut fact = 1u64;
        for n in 1..=EXACT_MAX_N {
            fact *= n as u64;
            assert_eq!(d2_distributions()[n].iter().sum::<u64>(), fact);
        }
    }

    #[test]
    fn ties_use_rank_pearson() {
        let s = spearman(&[1.0, 2.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0, 5.0]).unwrap();
        assert_eq!(s.method, PValueMethod::TDistribution);
        let expected = pearson(&[1.0, 2.5, 2.5, 4.0, 5.0], &[1.0, 3.0, 2.0, 4.0, 5.0]).unwrap();
        assert!((s.rho - expected).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            spearman(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]),
            Err(Error::InsufficientSample { .. })
        ));
        assert!(matches!(
            spearman(&[1.0; 5], &[1.0, 2.0, 3.0, 4.0, 5.0]),
            Err(Error::UndefinedCorrelation(_))
        ));
        assert!(spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn large_sample_uses_t_approximation() {
        let xs: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let ys: Vec<f64> = (0..30).map(|i| ((i * 7) % 30) as f64).collect();
        let s = spearman(&xs, &ys).unwrap();
        assert_eq!(s.method, PValueMethod::TDistribution);
        let t = s.rho * (28.0 / (1.0 - s.rho * s.rho)).sqrt();
        assert!((s.p_value - 2.0 * student_t_sf(t.abs(), 28.0)).abs() < 1e-15);
    }

    fn distinct(v: Vec<i32>) -> Vec<f64> {
        // break ties deterministically so the fast path applies
        v.into_iter()
            .enumerate()
            .map(|(i, x)| x as f64 + i as f64 * 1e-3)
            .collect()
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(
            pairs in prop::collection::vec((-20i32..20, -20i32..20), 4..60)
        ) {
            let (xs, ys): (Vec<f64>, Vec<f64>) =
                pairs.into_iter().map(|(a, b)| (a as f64, b as f64)).unzip();
            if let (Ok(a), Ok(b)) = (spearman(&xs, &ys), spearman(&ys, &xs)) {
                prop_assert!((a.rho - b.rho).abs() < 1e-12);
                prop_assert!((-1.0..=1.0).contains(&a.rho));
                prop_assert!((0.0..=1.0).contains(&a.p_value));
            }
        }

        #[test]
        fn invariant_under_monotone_maps(
            xs in prop::collection::vec(-30i32..30, 4..40),
            ys in prop::collection::vec(-30i32..30, 4..40),
        ) {
            let n = xs.len().min(ys.len());
            let xs = distinct(xs[..n].to_vec());
            let ys = distinct(ys[..n].to_vec());
            let base = spearman(&xs, &ys).unwrap().rho;
            let exp_x: Vec<f64> = xs.iter().map(|v| (v / 10.0).exp()).collect();
            let affine_y: Vec<f64> = ys.iter().map(|v| 3.0 * v - 7.0).collect();
            prop_assert!((spearman(&exp_x, &affine_y).unwrap().rho - base).abs() < 1e-12);
        }

        #[test]
        fn fast_path_matches_rank_pearson(
            xs in prop::collection::vec(-1000i32..1000, 4..80),
            ys in prop::collection::vec(-1000i32..1000, 4..80),
        ) {
            let n = xs.len().min(ys.len());
            let xs = distinct(xs[..n].to_vec());
            let ys = distinct(ys[..n].to_vec());
            let r = rank(&xs).unwrap();
            let s = rank(&ys).unwrap();
            let via_pearson = pearson(r.ranks(), s.ranks()).unwrap();
            prop_assert!((spearman(&xs, &ys).unwrap().rho - via_pearson).abs() < 1e-12);
        }
    }
}
