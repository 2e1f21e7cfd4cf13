//! Repeated edited nearest neighbours undersampling.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Label, LabeledExample};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnnParams {
    pub k_neighbors: usize,
    pub max_rounds: usize,
}

impl Default for EnnParams {
    fn default() -> Self {
        EnnParams {
            k_neighbors: 3,
            max_rounds: 25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnnOutcome {
    /// Indices of the retained rows, ascending.
    pub kept: Vec<usize>,
    /// Rounds that removed at least one row.
    pub rounds: usize,
    pub minority: Label,
}

/// Repeatedly drops majority-class rows whose `k` nearest neighbours
/// (Euclidean, ties broken by row index) vote for the other class, until a
/// round removes nothing or `max_rounds` is reached. All removals of a round
/// are decided against the same snapshot. Minority rows are never removed;
/// the minority is the smaller class, `Relevant` on a tie.
pub fn enn_keep_indices<P: AsRef<[f64]>>(
    points: &[P],
    labels: &[Label],
    params: EnnParams,
) -> Result<EnnOutcome> {
    if points.len() != labels.len() {
        return Err(Error::Shape {
            expected: points.len(),
            actual: labels.len(),
        });
    }
    if params.k_neighbors == 0 {
        return Err(Error::Configuration("k_neighbors must be at least 1".into()));
    }
    let relevant = labels.iter().filter(|&&l| l == Label::Relevant).count();
    let irrelevant = labels.len() - relevant;
    if relevant == 0 || irrelevant == 0 {
        return Err(Error::Resampling(format!(
            "need both classes, got {relevant} relevant and {irrelevant} irrelevant"
        )));
    }
    let minority = if relevant <= irrelevant {
        Label::Relevant
    } else {
        Label::Irrelevant
    };

    let mut active: Vec<usize> = (0..points.len()).collect();
    let mut rounds = 0;
    let mut neighbours: Vec<(f64, usize)> = Vec::with_capacity(points.len());
    for _ in 0..params.max_rounds {
        let k = params.k_neighbors.min(active.len().saturating_sub(1));
        if k == 0 {
            break;
        }
        let mut removed = Vec::new();
        for &i in &active {
            if labels[i] == minority {
                continue;
            }
            neighbours.clear();
            neighbours.extend(
                active
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| (squared_distance(points[i].as_ref(), points[j].as_ref()), j)),
            );
            neighbours.select_nth_unstable_by(k - 1, |a, b| {
                a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
            });
            let agree = neighbours[..k]
                .iter()
                .filter(|&&(_, j)| labels[j] == labels[i])
                .count();
            if 2 * (k - agree) > k {
                removed.push(i);
            }
        }
        if removed.is_empty() {
            break;
        }
        rounds += 1;
        active.retain(|i| removed.binary_search(i).is_err());
    }
    Ok(EnnOutcome {
        kept: active,
        rounds,
        minority,
    })
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// [`enn_keep_indices`] over labeled examples, returning the retained ones.
pub fn enn_undersample(
    examples: &[LabeledExample],
    params: EnnParams,
) -> Result<Vec<LabeledExample>> {
    let points: Vec<_> = examples.iter().map(|e| e.features.to_array()).collect();
    let labels: Vec<_> = examples.iter().map(|e| e.label).collect();
    let outcome = enn_keep_indices(&points, &labels, params)?;
    Ok(outcome.kept.iter().map(|&i| examples[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn separated_clusters_are_a_fixed_point() {
        let points = vec![[0.0, 0.0], [0.1, 0.0], [0.0, 0.1], [0.1, 0.1], [5.0, 5.0], [5.1, 5.0], [5.0, 5.1]];
        let labels = vec![
            Label::Irrelevant,
            Label::Irrelevant,
            Label::Irrelevant,
            Label::Irrelevant,
            Label::Relevant,
            Label::Relevant,
            Label::Relevant,
        ];
        let out = enn_keep_indices(&points, &labels, EnnParams::default()).unwrap();
        assert_eq!(out.kept, (0..7).collect::<Vec<_>>());
        assert_eq!(out.rounds, 0);
        assert_eq!(out.minority, Label::Relevant);
    }

    #[test]
    fn majority_point_inside_minority_cluster_is_removed() {
        let points = vec![[0.0], [0.1], [0.2], [5.0], [5.1], [5.2], [5.05], [9.0]];
        let mut labels = vec![Label::Irrelevant; 8];
        labels[3] = Label::Relevant;
        labels[4] = Label::Relevant;
        labels[5] = Label::Relevant;
        let out = enn_keep_indices(&points, &labels, EnnParams::default()).unwrap();
        // 5.05 sits among relevant points; 9.0's neighbours are 5.2, 5.1, 5.05 (relevant majority)
        assert!(!out.kept.contains(&6));
        assert!(out.kept.contains(&3) && out.kept.contains(&4) && out.kept.contains(&5));
    }

    #[test]
    fn single_class_is_an_error() {
        let points = vec![[0.0], [1.0]];
        let labels = vec![Label::Relevant; 2];
        assert!(matches!(
            enn_keep_indices(&points, &labels, EnnParams::default()),
            Err(Error::Resampling(_))
        ));
    }
}
