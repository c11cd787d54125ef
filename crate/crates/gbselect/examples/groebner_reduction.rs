//! Core basis machinery: normalization, normal forms, S-polynomials, and
//! the canonical reduced basis, including its invariance under generator
//! shuffles.
//!
//! Run with `cargo run --example groebner_reduction`.

use gbselect::groebner::{buchberger, is_groebner_basis, normalize, reduce, s_polynomial};
use gbselect::polynomial::{Polynomial, VariableOrder};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let order = VariableOrder::xyz();
    let p = |text: &str| Polynomial::parse(text, &order).expect("example polynomials parse");

    // Normalization clears rational content and fixes a positive leading
    // coefficient, so equal ideals print identically.
    println!("normalize(8*y + 2)            = {}", normalize(&p("8*y + 2")));

    // The normal form of a polynomial modulo a basis.
    println!(
        "reduce(y + 3, {{4*y + 1}})      = {}",
        reduce(&p("y + 3"), &[p("4*y + 1")])
    );

    // The S-polynomial cancels the leading terms of both inputs; reducing
    // every S-polynomial to zero is the basis test.
    println!(
        "spoly(x^2 - 1, x*y - 1)       = {}",
        s_polynomial(&p("x^2 - 1"), &p("x*y - 1"))
    );

    // The reduced basis is canonical for the ideal: shuffling or rescaling
    // the generators cannot change it.
    let system = vec![p("x*z - y"), p("y*z - x"), p("x^2 - z")];
    let reference = buchberger(&system).expect("basis exists");
    println!("reduced basis of {{x*z - y, y*z - x, x^2 - z}}:");
    for g in reference.iter() {
        println!("  {g}");
    }
    assert!(is_groebner_basis(reference.generators()));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let mut shuffled = system.clone();
        shuffled.shuffle(&mut rng);
        let basis = buchberger(&shuffled).expect("basis exists");
        assert_eq!(basis.generators(), reference.generators());
    }
    println!("10 shuffled inputs produced the identical basis");
}
