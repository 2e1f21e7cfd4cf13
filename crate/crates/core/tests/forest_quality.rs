use wikiref_core::linkclassify::{ForestModel, ForestParams, Label};
use wikiref_core::synth::disjoint_blobs;

fn accuracy(model: &ForestModel, rows: &[[f64; 8]], labels: &[Label]) -> f64 {
    let correct = rows
        .iter()
        .zip(labels)
        .filter(|(x, &l)| (model.score_row(x) >= 0.5) == (l == Label::Relevant))
        .count();
    correct as f64 / rows.len() as f64
}

#[test]
fn held_out_accuracy_on_disjoint_blobs_and_bit_identical_reruns() {
    let train = disjoint_blobs(11, 1000, 0.1);
    let test = disjoint_blobs(12, 1000, 0.1);
    let params = ForestParams::default();
    let a = ForestModel::fit(&train.rows, &train.labels, &params, 99).unwrap();
    let acc = accuracy(&a, &test.rows, &test.labels);
    assert!(acc >= 0.9, "accuracy {acc}");

    let b = ForestModel::fit(&train.rows, &train.labels, &params, 99).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    a.validate().unwrap();
}

#[test]
fn a_different_seed_gives_a_different_forest() {
    let train = disjoint_blobs(3, 300, 0.2);
    let params = ForestParams {
        n_trees: 10,
        ..ForestParams::default()
    };
    let a = ForestModel::fit(&train.rows, &train.labels, &params, 1).unwrap();
    let b = ForestModel::fit(&train.rows, &train.labels, &params, 2).unwrap();
    assert_ne!(a.trees, b.trees);
}

#[test]
fn restricted_forest_only_splits_on_allowed_features() {
    use wikiref_core::linkclassify::Step1Feature;
    let train = disjoint_blobs(5, 400, 0.2);
    let params = ForestParams {
        n_trees: 20,
        features: vec![Step1Feature::Iss, Step1Feature::Vs],
        ..ForestParams::default()
    };
    let model = ForestModel::fit(&train.rows, &train.labels, &params, 7).unwrap();
    for tree in &model.trees {
        for f in tree.split_features() {
            assert!(f == Step1Feature::Iss.index() || f == Step1Feature::Vs.index());
        }
    }
}
