//! End-to-end walkthrough on one small three-variable problem: parse the
//! two polynomial sets, compute the reduced basis of the equational part,
//! extract the full feature vector, and make the baseline decision.
//!
//! Run with `cargo run --example worked_example`.

use gbselect::features::{feature_descriptions, full_features, tnoi, tnoi_decision, Problem};
use gbselect::groebner::buchberger;
use gbselect::polynomial::{Polynomial, VariableOrder};

fn main() {
    let order = VariableOrder::xyz();
    let parse = |texts: &[&str]| -> Vec<Polynomial> {
        texts
            .iter()
            .map(|t| Polynomial::parse(t, &order).expect("example polynomials parse"))
            .collect()
    };

    // The equational set E and the constraint set F.
    let equalities = parse(&["-12*y*z - 3*z", "17*x^2 - 6", "-2*y*z + 5*x"]);
    let constraints = parse(&["-2*y*z - 9*y", "-15*x^2 - 19*y", "6*x*z + 3"]);

    println!("E (equations):");
    for p in &equalities {
        println!("  {p} = 0");
    }
    println!("F (constraints):");
    for p in &constraints {
        println!("  {p}");
    }

    // Replacing E by its reduced basis G preserves the solution set but can
    // change the size of the decomposition the solver builds later.
    let basis = buchberger(&equalities).expect("basis exists");
    println!("G (reduced basis of E):");
    for p in basis.iter() {
        println!("  {p}");
    }

    let problem = Problem::new(equalities, constraints).expect("valid problem");
    let before = tnoi(problem.equalities().iter().chain(problem.constraints()));
    let after = tnoi(basis.iter().chain(problem.constraints()));
    println!("TNoI before: {before}, after: {after}");
    println!("baseline decision: {}", tnoi_decision(&problem, &basis));

    // The full 28-entry feature vector a classifier trains on.
    let (vector, _) = full_features(&problem, &basis).expect("features exist");
    println!("features:");
    for (i, (description, value)) in feature_descriptions(&order)
        .iter()
        .zip(vector.values())
        .enumerate()
    {
        println!("  f{:<2} {description}: {value}", i + 1);
    }
}
