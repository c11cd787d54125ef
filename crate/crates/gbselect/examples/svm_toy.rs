//! The soft-margin kernel classifier on a small set a linear rule cannot
//! split: two concentric rings. Shows training, the optimality measures,
//! and the evaluation metrics.
//!
//! Run with `cargo run --example svm_toy`.

use gbselect::svm::{
    accuracy, dual_objective, max_kkt_violation, mcc, train, ConfusionCounts, SvmParams,
};

fn main() {
    // Inner ring labeled +1, outer ring labeled -1.
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..40 {
        let angle = std::f64::consts::TAU * (i as f64) / 40.0;
        let (radius, label) = if i % 2 == 0 { (1.0, 1) } else { (3.0, -1) };
        x.push(vec![radius * angle.cos(), radius * angle.sin()]);
        y.push(label);
    }

    let params = SvmParams::new(10.0, 0.5);
    let model = train(&x, &y, &params).expect("training succeeds");
    println!(
        "trained with c={} gamma={}: {} of {} rows are support vectors, bias {}",
        params.c,
        params.gamma,
        model.support_vector_count(),
        x.len(),
        model.bias()
    );

    // The solver stops when no multiplier pair can improve the dual; the
    // violation measure certifies how close the result is to optimal.
    println!("dual objective: {}", dual_objective(&model, &x, &y));
    println!(
        "max KKT violation: {:e} (tolerance {:e})",
        max_kkt_violation(&model, &x, &y).expect("rows match"),
        params.kkt_tolerance
    );

    let mut counts = ConfusionCounts::default();
    for (row, &label) in x.iter().zip(&y) {
        counts.record(label, model.predict(row).expect("dimensions match"));
    }
    println!(
        "training accuracy {} mcc {} ({counts:?})",
        accuracy(&counts).expect("non-empty"),
        mcc(&counts)
    );
}
