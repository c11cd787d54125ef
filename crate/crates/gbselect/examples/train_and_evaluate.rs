//! The full training protocol on synthetically labeled problems: stratified
//! 80/20 split, grid search with stratified 5-fold cross-validation, final
//! fit on the training part, held-out scoring.
//!
//! Run with `cargo run --release --example train_and_evaluate`.

use gbselect::dataset::{
    attach_labels_with, featurize_records, generate_dataset, tnoi_oracle, FeatureSet,
    GenerationProfile,
};
use gbselect::model_selection::{
    evaluate, fit_standardized, grid_search, stratified_kfold, stratified_split, Grid,
};
use gbselect::svm::{accuracy, mcc, SvmParams};
use gbselect::{FOLDS_STREAM, SPLIT_STREAM};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let seed = 5;
    let profile = GenerationProfile::default();
    let mut records = generate_dataset(150, &profile, 11).expect("150 splits across 3 classes");
    attach_labels_with(&mut records, &profile.order, tnoi_oracle).expect("labeling succeeds");
    let table = featurize_records(&records, FeatureSet::All, &profile.order)
        .expect("featurization succeeds");
    let (x, y) = table.labeled().expect("all rows labeled");
    println!("dataset: {} rows, {} features", x.len(), table.width());

    // One seed drives the whole run through named sub-streams, so the split
    // and the folds are reproducible independently.
    let mut split_rng = ChaCha8Rng::seed_from_u64(seed);
    split_rng.set_stream(SPLIT_STREAM);
    let (train_idx, test_idx) = stratified_split(&y, 0.8, &mut split_rng).expect("two classes");
    let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<i8>) {
        (
            idx.iter().map(|&i| x[i].clone()).collect(),
            idx.iter().map(|&i| y[i]).collect(),
        )
    };
    let (train_x, train_y) = pick(&train_idx);
    let (test_x, test_y) = pick(&test_idx);
    println!("split: {} train rows, {} test rows", train_x.len(), test_x.len());

    let mut fold_rng = ChaCha8Rng::seed_from_u64(seed);
    fold_rng.set_stream(FOLDS_STREAM);
    let folds = stratified_kfold(&train_y, 5, &mut fold_rng).expect("folds exist");

    let grid = Grid::reduced();
    let outcome = grid_search(&train_x, &train_y, &grid, &folds).expect("search succeeds");
    let best = outcome.best();
    println!(
        "grid search over {} cells: best c={} gamma={} (cv accuracy {}, cv mcc {})",
        grid.len(),
        best.c,
        best.gamma,
        best.mean_accuracy(),
        best.mean_mcc()
    );

    let params = SvmParams::new(best.c, best.gamma);
    let model = fit_standardized(&train_x, &train_y, &params).expect("fit succeeds");
    let counts = evaluate(&model, &test_x, &test_y).expect("evaluation succeeds");
    println!(
        "held-out accuracy {} mcc {} ({counts:?})",
        accuracy(&counts).expect("non-empty"),
        mcc(&counts)
    );
}
