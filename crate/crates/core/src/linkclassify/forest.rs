//! Random forest over the Step I feature space: bootstrap samples, Gini
//! splits, a random feature subset at every node.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Label, LabeledExample, Step1Feature, Step1FeatureVector, STEP1_DIM};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features tried at each split; `None` means `⌊√|features|⌋`.
    pub features_per_split: Option<usize>,
    /// Features the trees may split on.
    pub features: Vec<Step1Feature>,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: 12,
            min_leaf: 2,
            features_per_split: None,
            features: Step1Feature::ALL.to_vec(),
        }
    }
}

impl ForestParams {
    pub fn split_width(&self) -> usize {
        let available = self.features.len();
        self.features_per_split
            .unwrap_or_else(|| libm::floor(libm::sqrt(available as f64)) as usize)
            .clamp(1, available.max(1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::Configuration("forest needs at least one tree".into()));
        }
        if self.features.is_empty() {
            return Err(Error::Configuration("forest needs at least one feature".into()));
        }
        if self.min_leaf == 0 {
            return Err(Error::Configuration("min_leaf must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: u32,
        right: u32,
    },
    /// Class probabilities indexed by [`Label::index`].
    Leaf { probabilities: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    /// Probability of [`Label::Relevant`] at the leaf reached by `x`.
    pub fn relevant_probability(&self, x: &[f64; STEP1_DIM]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { probabilities } => return probabilities[Label::Relevant.index()],
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + walk(nodes, *left as usize).max(walk(nodes, *right as usize))
                }
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            walk(&self.nodes, 0)
        }
    }

    /// Features used by any split.
    pub fn split_features(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split { feature, .. } => Some(*feature),
            Node::Leaf { .. } => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub params: ForestParams,
    pub seed: u64,
    pub trees: Vec<DecisionTree>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: Label,
    /// Mean leaf probability of the relevant class.
    pub score: f64,
}

impl ForestModel {
    /// Trains on raw feature rows. Tree `i` draws from a ChaCha8 stream `i`
    /// keyed by `seed`, so results do not depend on training order.
    pub fn fit(
        rows: &[[f64; STEP1_DIM]],
        labels: &[Label],
        params: &ForestParams,
        seed: u64,
    ) -> Result<Self> {
        params.validate()?;
        if rows.len() != labels.len() {
            return Err(Error::Shape {
                expected: rows.len(),
                actual: labels.len(),
            });
        }
        let relevant = labels.iter().filter(|&&l| l == Label::Relevant).count();
        if relevant == 0 || relevant == labels.len() {
            return Err(Error::Training(format!(
                "forest needs both classes ({relevant} of {} rows relevant)",
                labels.len()
            )));
        }
        let allowed: Vec<usize> = params.features.iter().map(|f| f.index()).collect();
        let trees = (0..params.n_trees)
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let mut sample: Vec<usize> =
                    (0..rows.len()).map(|_| rng.gen_range(0..rows.len())).collect();
                let mut builder = TreeBuilder {
                    rows,
                    labels,
                    params,
                    allowed: &allowed,
                    nodes: Vec::new(),
                    rng,
                };
                builder.build(&mut sample, 0);
                DecisionTree {
                    nodes: builder.nodes,
                }
            })
            .collect();
        Ok(ForestModel {
            params: params.clone(),
            seed,
            trees,
        })
    }

    /// Mean relevant-class probability over trees. Leaf values are summed in
    /// sorted order so the result does not depend on tree order.
    pub fn score_row(&self, x: &[f64; STEP1_DIM]) -> f64 {
        if self.trees.is_empty() {
            return 0.0;
        }
        let mut probs: Vec<f64> = self.trees.iter().map(|t| t.relevant_probability(x)).collect();
        probs.sort_by(f64::total_cmp);
        probs.iter().sum::<f64>() / probs.len() as f64
    }

    pub fn classify(&self, features: &Step1FeatureVector) -> Classification {
        let score = self.score_row(&features.to_array());
        Classification {
            label: if score >= 0.5 {
                Label::Relevant
            } else {
                Label::Irrelevant
            },
            score,
        }
    }

    /// Checks structural invariants of a deserialized model.
    pub fn validate(&self) -> Result<()> {
        for (t, tree) in self.trees.iter().enumerate() {
            if tree.nodes.is_empty() {
                return Err(Error::Configuration(format!("tree {t} has no nodes")));
            }
            for node in &tree.nodes {
                match node {
                    Node::Split {
                        feature,
                        left,
                        right,
                        ..
                    } => {
                        let n = tree.nodes.len() as u32;
                        if *feature >= STEP1_DIM || *left >= n || *right >= n {
                            return Err(Error::Configuration(format!(
                                "tree {t} has an invalid split"
                            )));
                        }
                    }
                    Node::Leaf { probabilities } => {
                        let sum = probabilities[0] + probabilities[1];
                        if (sum - 1.0).abs() > 1e-9 || probabilities.iter().any(|p| *p < 0.0) {
                            return Err(Error::Configuration(format!(
                                "tree {t} has a leaf whose probabilities do not sum to 1"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Trains a forest on labeled examples.
pub fn train_forest(
    examples: &[LabeledExample],
    params: &ForestParams,
    seed: u64,
) -> Result<ForestModel> {
    let rows: Vec<_> = examples.iter().map(|e| e.features.to_array()).collect();
    let labels: Vec<_> = examples.iter().map(|e| e.label).collect();
    ForestModel::fit(&rows, &labels, params, seed)
}

/// Relevance decision for one feature vector; a score of exactly 0.5 counts
/// as relevant.
pub fn classify(model: &ForestModel, features: &Step1FeatureVector) -> Classification {
    model.classify(features)
}

struct TreeBuilder<'a> {
    rows: &'a [[f64; STEP1_DIM]],
    labels: &'a [Label],
    params: &'a ForestParams,
    allowed: &'a [usize],
    nodes: Vec<Node>,
    rng: ChaCha8Rng,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / n;
    let p1 = counts[1] as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

impl TreeBuilder<'_> {
    fn counts(&self, sample: &[usize]) -> [usize; 2] {
        let mut c = [0usize; 2];
        for &i in sample {
            c[self.labels[i].index()] += 1;
        }
        c
    }

    fn leaf(&mut self, counts: [usize; 2]) -> u32 {
        let n = (counts[0] + counts[1]) as f64;
        let probabilities = [counts[0] as f64 / n, counts[1] as f64 / n];
        self.nodes.push(Node::Leaf { probabilities });
        (self.nodes.len() - 1) as u32
    }

    fn build(&mut self, sample: &mut [usize], depth: usize) -> u32 {
        let counts = self.counts(sample);
        let n = sample.len();
        if depth >= self.params.max_depth
            || counts[0] == 0
            || counts[1] == 0
            || n < 2 * self.params.min_leaf
        {
            return self.leaf(counts);
        }
        let parent = gini(counts);
        let Some(best) = self.best_split(sample) else {
            return self.leaf(counts);
        };
        if best.impurity >= parent - 1e-12 {
            return self.leaf(counts);
        }

        let at = self.nodes.len();
        self.nodes.push(Node::Leaf {
            probabilities: [0.0, 0.0],
        });
        let mut split = 0;
        for i in 0..n {
            if self.rows[sample[i]][best.feature] <= best.threshold {
                sample.swap(i, split);
                split += 1;
            }
        }
        let (left_rows, right_rows) = sample.split_at_mut(split);
        let left = self.build(left_rows, depth + 1);
        let right = self.build(right_rows, depth + 1);
        self.nodes[at] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        at as u32
    }

    fn best_split(&mut self, sample: &[usize]) -> Option<BestSplit> {
        let width = self.params.split_width();
        let mut candidates = self.allowed.to_vec();
        for i in 0..width.min(candidates.len()) {
            let j = self.rng.gen_range(i..candidates.len());
            candidates.swap(i, j);
        }
        candidates.truncate(width);

        let n = sample.len();
        let totals = self.counts(sample);
        let min_leaf = self.params.min_leaf;
        let mut best: Option<BestSplit> = None;
        let mut column: Vec<(f64, Label)> = Vec::with_capacity(n);
        for feature in candidates {
            column.clear();
            column.extend(sample.iter().map(|&i| (self.rows[i][feature], self.labels[i])));
            column.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = [0usize; 2];
            for i in 0..n - 1 {
                left[column[i].1.index()] += 1;
                let (lo, hi) = (column[i].0, column[i + 1].0);
                if lo == hi {
                    continue;
                }
                let n_left = i + 1;
                let n_right = n - n_left;
                if n_left < min_leaf || n_right < min_leaf {
                    continue;
                }
                let right = [totals[0] - left[0], totals[1] - left[1]];
                let impurity =
                    (n_left as f64 * gini(left) + n_right as f64 * gini(right)) / n as f64;
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    let mid = lo + (hi - lo) / 2.0;
                    best = Some(BestSplit {
                        feature,
                        threshold: if mid < hi { mid } else { lo },
                        impurity,
                    });
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn leaf(p: f64) -> DecisionTree {
        DecisionTree {
            nodes: vec![Node::Leaf {
                probabilities: [1.0 - p, p],
            }],
        }
    }

    fn model(trees: Vec<DecisionTree>) -> ForestModel {
        ForestModel {
            params: ForestParams::default(),
            seed: 0,
            trees,
        }
    }

    #[test]
    fn unanimous_leaves() {
        let m = model(vec![leaf(1.0), leaf(1.0), leaf(1.0)]);
        let c = m.classify(&Step1FeatureVector::default());
        assert_eq!(c.score, 1.0);
        assert_eq!(c.label, Label::Relevant);
    }

    #[test]
    fn half_score_is_relevant() {
        let m = model(vec![leaf(1.0), leaf(0.0)]);
        let c = m.classify(&Step1FeatureVector::default());
        assert_eq!(c.score, 0.5);
        assert_eq!(c.label, Label::Relevant);
    }

    #[test]
    fn hand_traced_three_tree_model() {
        // tree 1: tis <= 0.5 ? 0.2 : 0.9
        // tree 2: os <= 0.3 ? (vs <= 0.4 ? 0.0 : 0.6) : 1.0
        // tree 3: constant 0.25
        let t1 = DecisionTree {
            nodes: vec![
                Node::Split { feature: 0, threshold: 0.5, left: 1, right: 2 },
                Node::Leaf { probabilities: [0.8, 0.2] },
                Node::Leaf { probabilities: [0.1, 0.9] },
            ],
        };
        let t2 = DecisionTree {
            nodes: vec![
                Node::Split { feature: 1, threshold: 0.3, left: 1, right: 4 },
                Node::Split { feature: 5, threshold: 0.4, left: 2, right: 3 },
                Node::Leaf { probabilities: [1.0, 0.0] },
                Node::Leaf { probabilities: [0.4, 0.6] },
                Node::Leaf { probabilities: [0.0, 1.0] },
            ],
        };
        let m = model(vec![t1, t2, leaf(0.25)]);
        m.validate().unwrap();
        // t1 -> 0.9; t2 takes the vs branch -> 0.6
        let mut f = Step1FeatureVector {
            tis: 0.7,
            os: 0.1,
            vs: 0.45,
            ..Step1FeatureVector::default()
        };
        let c = m.classify(&f);
        // (0.9 + 0.6 + 0.25) / 3
        assert!((c.score - 1.75 / 3.0).abs() < 1e-12);
        assert_eq!(c.label, Label::Relevant);
        f.tis = 0.5; // boundary goes left -> 0.2
        f.vs = 0.4; // -> 0.0
        let c = m.classify(&f);
        assert!((c.score - 0.45 / 3.0).abs() < 1e-12);
        assert_eq!(c.label, Label::Irrelevant);
    }

    #[test]
    fn single_class_rejected() {
        let rows = [[0.0; 8]; 3];
        let labels = [Label::Relevant; 3];
        assert!(matches!(
            ForestModel::fit(&rows, &labels, &ForestParams::default(), 1),
            Err(Error::Training(_))
        ));
    }

    #[test]
    fn subset_restricts_splits() {
        let rows: Vec<[f64; 8]> = (0..40)
            .map(|i| {
                let x = i as f64 / 40.0;
                [x, 1.0 - x, x, x, x, x, x, x]
            })
            .collect();
        let labels: Vec<Label> = (0..40)
            .map(|i| if i >= 20 { Label::Relevant } else { Label::Irrelevant })
            .collect();
        let params = ForestParams {
            n_trees: 10,
            features: vec![Step1Feature::Tis],
            ..ForestParams::default()
        };
        let m = ForestModel::fit(&rows, &labels, &params, 3).unwrap();
        assert!(m.trees.iter().flat_map(|t| t.split_features()).all(|f| f == 0));
        assert!(m.trees.iter().any(|t| t.depth() > 0));
    }

    #[test]
    fn default_split_width() {
        assert_eq!(ForestParams::default().split_width(), 2);
    }
}
