use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsAtK {
    pub k: usize,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

/// `2pr / (p + r)`, or 0 when both are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Number of the first `min(k, |recs|)` recommendations found in `gold`.
pub fn hits_at_k<S: AsRef<str>>(recs: &[S], gold: &BTreeSet<String>, k: usize) -> usize {
    recs.iter()
        .take(k)
        .filter(|r| gold.contains(r.as_ref()))
        .count()
}

/// Precision over the returned prefix `min(k, |recs|)`, recall over all of
/// `gold`.
pub fn precision_recall_f_at_k<S: AsRef<str>>(
    recs: &[S],
    gold: &BTreeSet<String>,
    k: usize,
) -> MetricsAtK {
    let shown = k.min(recs.len());
    let hits = hits_at_k(recs, gold, k) as f64;
    let precision = if shown == 0 { 0.0 } else { hits / shown as f64 };
    let recall = if gold.is_empty() {
        0.0
    } else {
        hits / gold.len() as f64
    };
    MetricsAtK {
        k,
        precision,
        recall,
        f_measure: f_measure(precision, recall),
    }
}

/// Rank positions (1-based) by descending value; tied values share the mean
/// of the positions they occupy.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let mean = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mean;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation of two rank vectors. A constant side yields 0.
pub fn spearman_rho(ranks_a: &[f64], ranks_b: &[f64]) -> Result<f64> {
    if ranks_a.len() != ranks_b.len() {
        return Err(Error::Shape {
            expected: ranks_a.len(),
            actual: ranks_b.len(),
        });
    }
    let n = ranks_a.len();
    if n < 2 {
        return Err(Error::Shape {
            expected: 2,
            actual: n,
        });
    }
    let mean_a = ranks_a.iter().sum::<f64>() / n as f64;
    let mean_b = ranks_b.iter().sum::<f64>() / n as f64;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (a, b) in ranks_a.iter().zip(ranks_b) {
        let (da, db) = (a - mean_a, b - mean_b);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Ok(0.0);
    }
    Ok((sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0))
}
