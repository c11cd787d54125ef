//! Reduced Groebner bases by Buchberger's algorithm.
//!
//! All computations use the pure lexicographic order described in
//! [`crate::polynomial`]. Basis elements are kept content-free with integer
//! coefficients and a positive leading coefficient, and the final basis is
//! reduced (no monomial of any generator is divisible by the leading monomial
//! of another) and sorted by ascending leading monomial, so the output is a
//! canonical function of the input ideal: permuting or rescaling the input
//! polynomials cannot change it.

use crate::polynomial::{Monomial, Polynomial};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use thiserror::Error;

/// Errors raised by basis computation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    /// The input contains no non-zero polynomial.
    #[error("cannot compute a basis for an empty or all-zero input")]
    EmptyInput,
    /// The configured step limit was reached before completion.
    #[error("basis computation exceeded the step limit after {steps} reductions")]
    ResourceExhausted {
        /// Number of S-polynomial reductions performed before giving up.
        steps: usize,
    },
}

/// Which matching divisor [`reduce_with`] picks when several basis elements
/// could rewrite the same monomial. Normal forms modulo a Groebner basis do
/// not depend on this choice; modulo an arbitrary basis they may.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisorRule {
    /// Use the first matching element in basis order.
    First,
    /// Use the last matching element in basis order.
    Last,
}

/// A reduced Groebner basis in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    generators: Vec<Polynomial>,
}

impl GroebnerBasis {
    /// The generators, sorted by ascending leading monomial.
    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    /// Consumes the basis and returns its generators.
    pub fn into_generators(self) -> Vec<Polynomial> {
        self.generators
    }

    /// Number of generators.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    /// A basis is never empty.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Iterates over the generators.
    pub fn iter(&self) -> impl Iterator<Item = &Polynomial> {
        self.generators.iter()
    }
}

/// Scales a polynomial to content-free integer coefficients with a positive
/// leading coefficient. The result is `p` times a positive rational, so it
/// generates the same ideal. Zero is returned unchanged.
pub fn normalize(p: &Polynomial) -> Polynomial {
    if p.is_zero() {
        return p.clone();
    }
    let denom_lcm = p
        .terms()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let integral = p.scale(&BigRational::from_integer(denom_lcm));
    let content = integral
        .terms()
        .fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()));
    let primitive = integral.scale(&BigRational::new(BigInt::one(), content));
    if primitive
        .leading_coefficient()
        .expect("non-zero polynomial has a leading term")
        .is_negative()
    {
        -&primitive
    } else {
        primitive
    }
}

/// Full normal form of `p` modulo `basis`: repeatedly rewrites the greatest
/// reducible monomial until every monomial of the result is irreducible by
/// every leading monomial of the basis. Divisors are chosen by
/// [`DivisorRule::First`]; zero basis members are ignored.
pub fn reduce(p: &Polynomial, basis: &[Polynomial]) -> Polynomial {
    reduce_with(p, basis, DivisorRule::First)
}

/// [`reduce`] with an explicit divisor-selection rule.
pub fn reduce_with(p: &Polynomial, basis: &[Polynomial], rule: DivisorRule) -> Polynomial {
    let order = p.order();
    let mut remainder: Vec<(Monomial, BigRational)> = Vec::new();
    let mut h = p.clone();
    while let Some((lm, lc)) = h.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
        let matches = |g: &&Polynomial| {
            g.leading_monomial()
                .is_some_and(|gm| gm.divides(&lm))
        };
        let divisor = match rule {
            DivisorRule::First => basis.iter().find(matches),
            DivisorRule::Last => basis.iter().rev().find(matches),
        };
        match divisor {
            Some(g) => {
                let (gm, gc) = g.leading_term().expect("divisor is non-zero");
                let shift = lm.div(gm).expect("leading monomial divides");
                h = &h - &g.mul_term(&(&lc / gc), &shift);
            }
            None => {
                h = &h - &Polynomial::from_terms(order, [(lm.clone(), lc.clone())]);
                remainder.push((lm, lc));
            }
        }
    }
    Polynomial::from_terms(order, remainder)
}

/// The S-polynomial of two non-zero polynomials: both are scaled so their
/// leading terms equal the least common multiple of their leading monomials,
/// and the difference is returned.
///
/// # Panics
///
/// Panics if either argument is zero.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let (fm, fc) = f.leading_term().expect("s-polynomial of zero polynomial");
    let (gm, gc) = g.leading_term().expect("s-polynomial of zero polynomial");
    let lcm = fm.lcm(gm);
    let lhs = f.mul_term(
        &(BigRational::one() / fc),
        &lcm.div(fm).expect("lcm is divisible by both"),
    );
    let rhs = g.mul_term(
        &(BigRational::one() / gc),
        &lcm.div(gm).expect("lcm is divisible by both"),
    );
    &lhs - &rhs
}

/// Buchberger's criterion: true when every pairwise S-polynomial reduces to
/// zero modulo the generators themselves.
///
/// # Panics
///
/// Panics if `gens` is empty or contains a zero polynomial.
pub fn is_groebner_basis(gens: &[Polynomial]) -> bool {
    assert!(!gens.is_empty(), "empty generator list");
    assert!(
        gens.iter().all(|g| !g.is_zero()),
        "zero polynomial in generator list"
    );
    for i in 0..gens.len() {
        for j in (i + 1)..gens.len() {
            if !reduce(&s_polynomial(&gens[i], &gens[j]), gens).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Computes the reduced Groebner basis of the ideal generated by `input`.
///
/// Zero polynomials are discarded; an input without any non-zero polynomial
/// is rejected. The returned basis is canonical: independent of the order
/// and scaling of the input generators.
pub fn buchberger(input: &[Polynomial]) -> Result<GroebnerBasis, GroebnerError> {
    buchberger_limited(input, usize::MAX)
}

/// [`buchberger`] with an upper bound on the number of S-polynomial
/// reductions, for callers that need to abort pathological inputs.
pub fn buchberger_limited(
    input: &[Polynomial],
    max_steps: usize,
) -> Result<GroebnerBasis, GroebnerError> {
    let mut basis: Vec<Polynomial> = input
        .iter()
        .filter(|p| !p.is_zero())
        .map(normalize)
        .collect();
    if basis.is_empty() {
        return Err(GroebnerError::EmptyInput);
    }

    // Pairs are processed in the normal selection order: smallest total
    // degree of the leading-monomial lcm first, ties by the lcm itself.
    let mut queue: BinaryHeap<Reverse<(u32, Monomial, usize, usize)>> = BinaryHeap::new();
    let push_pairs = |queue: &mut BinaryHeap<_>, basis: &[Polynomial], j: usize| {
        let lm_j = basis[j].leading_monomial().expect("basis members non-zero");
        for (i, g) in basis.iter().enumerate().take(j) {
            let lm_i = g.leading_monomial().expect("basis members non-zero");
            let lcm = lm_i.lcm(lm_j);
            queue.push(Reverse((lcm.total_degree(), lcm, i, j)));
        }
    };
    for j in 0..basis.len() {
        push_pairs(&mut queue, &basis, j);
    }

    let mut steps = 0usize;
    while let Some(Reverse((_, lcm, i, j))) = queue.pop() {
        let lm_i = basis[i].leading_monomial().expect("basis members non-zero");
        let lm_j = basis[j].leading_monomial().expect("basis members non-zero");
        if lm_i.mul(lm_j) == lcm {
            // Coprime leading monomials: the S-polynomial always reduces to
            // zero, so the pair can be skipped.
            continue;
        }
        if steps == max_steps {
            return Err(GroebnerError::ResourceExhausted { steps });
        }
        steps += 1;
        let s = reduce(&s_polynomial(&basis[i], &basis[j]), &basis);
        if !s.is_zero() {
            basis.push(normalize(&s));
            push_pairs(&mut queue, &basis, basis.len() - 1);
        }
    }

    Ok(reduce_basis(basis))
}

/// Minimalizes and tail-reduces a completed basis into canonical form.
fn reduce_basis(mut basis: Vec<Polynomial>) -> GroebnerBasis {
    basis.sort_by(|a, b| {
        a.leading_monomial()
            .expect("basis members non-zero")
            .cmp(b.leading_monomial().expect("basis members non-zero"))
    });
    let mut minimal: Vec<Polynomial> = Vec::new();
    for g in basis {
        let lm = g.leading_monomial().expect("basis members non-zero");
        let redundant = minimal
            .iter()
            .any(|h| h.leading_monomial().expect("kept members non-zero").divides(lm));
        if !redundant {
            minimal.push(g);
        }
    }
    for i in 0..minimal.len() {
        let mut others = minimal.clone();
        let g = others.remove(i);
        minimal[i] = normalize(&reduce(&g, &others));
    }
    GroebnerBasis {
        generators: minimal,
    }
}
