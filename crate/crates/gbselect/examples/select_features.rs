//! Feature ranking on a synthetically labeled dataset: the correlation
//! filter, the classifier-in-the-loop wrapper, and the prefix accuracy
//! curve for the filter's ordering.
//!
//! Run with `cargo run --release --example select_features`.

use gbselect::dataset::{
    attach_labels_with, featurize_records, generate_dataset, tnoi_oracle, FeatureSet,
    GenerationProfile,
};
use gbselect::feature_selection::{accuracy_curve, filter_select, wrapper_select};
use gbselect::features::feature_descriptions;
use gbselect::model_selection::{Grid, GridPoint};

fn main() {
    let profile = GenerationProfile::default();
    let mut records = generate_dataset(90, &profile, 3).expect("90 splits across 3 classes");
    attach_labels_with(&mut records, &profile.order, tnoi_oracle).expect("labeling succeeds");
    let table = featurize_records(&records, FeatureSet::All, &profile.order)
        .expect("featurization succeeds");
    let (x, y) = table.labeled().expect("all rows labeled");
    let descriptions = feature_descriptions(&profile.order);

    // The filter scores subsets by discretized correlation alone; with
    // labels derived from the TNoI drop, the TNoI log difference is a
    // perfect predictor and comes out first.
    let filter = filter_select(&x, &y, &descriptions).expect("filter succeeds");
    println!("filter selection:");
    for step in &filter.steps {
        println!(
            "  step {}: f{} ({}) score {}",
            step.step, step.feature_index, step.description, step.score
        );
    }

    // The wrapper greedily grows the subset that maximizes cross-validated
    // accuracy of the classifier itself, for each grid cell.
    let wrapper = wrapper_select(&x, &y, &Grid::reduced(), 5, 3, &descriptions)
        .expect("wrapper succeeds");
    println!(
        "wrapper winner: c={} gamma={} cv accuracy {}",
        wrapper.c, wrapper.gamma, wrapper.cv_accuracy
    );
    for step in &wrapper.selection.steps {
        println!(
            "  step {}: f{} ({}) score {}",
            step.step, step.feature_index, step.description, step.score
        );
    }

    // Accuracy as the model sees longer and longer prefixes of the
    // filter's ordering.
    let point = GridPoint {
        c: wrapper.c,
        gamma: wrapper.gamma,
    };
    let curve = accuracy_curve(&x, &y, &filter.selected_indices(), point, 5, 0.8, 3)
        .expect("curve succeeds");
    println!("accuracy curve for the filter ordering:");
    for p in &curve {
        println!(
            "  first {} feature(s): cv {}, held-out {}",
            p.prefix, p.cv_accuracy, p.test_accuracy
        );
    }
}
