//! Dataset workflow: generate random problems, store them as a
//! line-oriented file, label them with the synthetic oracle, and export a
//! feature matrix.
//!
//! Run with `cargo run --example generate_problems`.

use gbselect::dataset::{
    attach_labels_with, export_features, generate_dataset, read_problems, tnoi_oracle,
    write_problems, FeatureSet, GenerationProfile,
};

fn main() {
    // Three-variable problems, at most two terms per polynomial, integer
    // coefficients in [-20, 20], ten problems in each degree class 2..4.
    let profile = GenerationProfile::default();
    let mut records = generate_dataset(30, &profile, 7).expect("30 splits across 3 classes");
    println!(
        "generated {} problems, {} per degree class",
        records.len(),
        records.len() / profile.degrees.len()
    );
    println!("first problem: E = {:?}", records[0].equalities);

    let dir = std::env::temp_dir().join("gbselect_generate_problems");
    std::fs::create_dir_all(&dir).expect("temp dir");

    // Problem files round-trip losslessly.
    let problems_path = dir.join("problems.jsonl");
    write_problems(&records, &problems_path).expect("write problems");
    let read_back = read_problems(&problems_path).expect("read problems");
    assert_eq!(read_back, records);

    // Real labels come from externally measured cell counts; the synthetic
    // oracle is a deterministic stand-in for demonstrations and tests.
    attach_labels_with(&mut records, &profile.order, tnoi_oracle).expect("labeling succeeds");
    let positive = records.iter().filter(|r| r.label == Some(1)).count();
    println!(
        "synthetic labels: {positive} positive, {} negative",
        records.len() - positive
    );

    let csv_path = dir.join("all.csv");
    export_features(&records, FeatureSet::All, &profile.order, &csv_path, true)
        .expect("export features");
    println!(
        "wrote {} and {}",
        problems_path.display(),
        csv_path.display()
    );
}
