use crate::error::{Error, Result};

/// 1-based ascending ranks; tied values share the mean of their positions.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    ranks: Vec<f64>,
    has_ties: bool,
}

impl RankVector {
    pub fn ranks(&self) -> &[f64] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn has_ties(&self) -> bool {
        self.has_ties
    }
}

pub fn rank(values: &[f64]) -> Result<RankVector> {
    if values.is_empty() {
        return Err(Error::InsufficientSample {
            required: 1,
            actual: 0,
        });
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Validation(format!(
            "cannot rank non-finite value {} at index {i}",
            values[i]
        )));
    }

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut ranks = vec![0.0; values.len()];
    let mut has_ties = false;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        if end - start > 1 {
            has_ties = true;
        }
        // positions start+1 ..= end averaged
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    Ok(RankVector { ranks, has_ties })
}
