//! Chi-square ranking of Step I features against the relevance label.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Label, LabeledExample, Step1Feature};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub feature: Step1Feature,
    pub score: f64,
}

/// Bin of `value` among `bins` equal-width bins over `[0, 1]`.
fn bin_of(value: f64, bins: usize) -> usize {
    let v = value.clamp(0.0, 1.0);
    ((v * bins as f64) as usize).min(bins - 1)
}

/// χ² statistic of the `bins × 2` contingency table of `values` (binned over
/// `[0, 1]`) against `labels`. Cells with zero expected count are skipped.
pub fn chi_square_statistic(values: &[f64], labels: &[Label], bins: usize) -> f64 {
    let bins = bins.max(1);
    let n = values.len().min(labels.len());
    if n == 0 {
        return 0.0;
    }
    let mut table = vec![[0usize; 2]; bins];
    let mut class_totals = [0usize; 2];
    for (&v, &l) in values.iter().zip(labels) {
        table[bin_of(v, bins)][l.index()] += 1;
        class_totals[l.index()] += 1;
    }
    let total = n as f64;
    let mut chi2 = 0.0;
    for row in &table {
        let row_total = (row[0] + row[1]) as f64;
        for (observed, class_total) in row.iter().zip(class_totals) {
            let expected = row_total * class_total as f64 / total;
            if expected > 0.0 {
                let diff = *observed as f64 - expected;
                chi2 += diff * diff / expected;
            }
        }
    }
    chi2
}

/// Scores all eight features and sorts them by descending χ² (ties keep
/// feature order).
pub fn chi_square_rank(examples: &[LabeledExample], bins: usize) -> Vec<FeatureScore> {
    let labels: Vec<Label> = examples.iter().map(|e| e.label).collect();
    let mut scores: Vec<FeatureScore> = Step1Feature::ALL
        .iter()
        .map(|&feature| {
            let values: Vec<f64> = examples.iter().map(|e| e.features.get(feature)).collect();
            FeatureScore {
                feature,
                score: chi_square_statistic(&values, &labels, bins),
            }
        })
        .collect();
    scores.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.feature.cmp(&b.feature)));
    scores
}
