//! Structural features of a decomposition problem before and after
//! Groebner-basis preconditioning, plus the classic TNoI baseline heuristic.
//!
//! A problem consists of equational constraints `E` (at least two) and other
//! constraints `F`. The "before" picture is the polynomial set `E ∪ F`; the
//! "after" picture replaces `E` by its Groebner basis `G`, giving `G ∪ F`.
//! For the default three-variable order the full feature vector has 28
//! entries:
//!
//! * 1..=12: TNoI, sum of total degrees, maximum total degree, then per
//!   variable the maximum degree, the proportion of polynomials containing
//!   the variable, and the proportion of monomials containing it, all before
//!   preconditioning;
//! * 13..=25: the number of polynomials after preconditioning followed by the
//!   same block measured on `G ∪ F`;
//! * 26..=28: base-2 log differences (before minus after) of TNoI, sum of
//!   total degrees, and maximum total degree.
//!
//! Proportions of monomials count occurrences: a monomial appearing in two
//! polynomials counts twice, in both numerator and denominator.

use crate::groebner::GroebnerBasis;
use crate::polynomial::{Polynomial, VariableOrder};
use std::fmt;
use thiserror::Error;

/// Errors raised while assembling problems or feature vectors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    /// A problem needs at least two equalities for preconditioning to apply.
    #[error("a problem needs at least two equalities")]
    TooFewEqualities,
    /// Zero polynomials carry no structure and are rejected.
    #[error("zero polynomial in input")]
    ZeroPolynomial,
    /// Feature blocks are undefined for an empty polynomial set.
    #[error("empty polynomial set")]
    EmptySet,
    /// All polynomials of a problem must share one variable order.
    #[error("variable order mismatch within problem")]
    OrderMismatch,
    /// Class labels are +1 (preconditioning helps) or -1 (it does not).
    #[error("label must be +1 or -1, got {0}")]
    InvalidLabel(i8),
    /// A stored label must agree with stored cell counts.
    #[error("label {label} contradicts cell counts {plain} -> {gb}")]
    InconsistentLabel {
        /// The contradicting label.
        label: i8,
        /// Cell count of the unpreconditioned problem.
        plain: u64,
        /// Cell count of the preconditioned problem.
        gb: u64,
    },
    /// Decompositions have at least one cell.
    #[error("cell counts must be positive")]
    NonPositiveCellCount,
    /// A subset index points outside the feature vector.
    #[error("feature index {0} is out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    /// Subset indices must be distinct.
    #[error("duplicate feature index {0}")]
    DuplicateIndex(usize),
    /// A feature subset cannot be empty.
    #[error("empty feature subset")]
    EmptySubset,
}

/// A decomposition input problem: equalities, other constraints, and
/// optionally the externally measured cell counts and the class label.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    equalities: Vec<Polynomial>,
    constraints: Vec<Polynomial>,
    order: VariableOrder,
    cells_plain: Option<u64>,
    cells_gb: Option<u64>,
    label: Option<i8>,
}

impl Problem {
    /// Builds a problem from at least two non-zero equalities and any number
    /// of non-zero constraints, all over the same variable order.
    pub fn new(
        equalities: Vec<Polynomial>,
        constraints: Vec<Polynomial>,
    ) -> Result<Self, FeatureError> {
        if equalities.len() < 2 {
            return Err(FeatureError::TooFewEqualities);
        }
        let order = equalities[0].order().clone();
        for p in equalities.iter().chain(&constraints) {
            if p.is_zero() {
                return Err(FeatureError::ZeroPolynomial);
            }
            if p.order() != &order {
                return Err(FeatureError::OrderMismatch);
            }
        }
        Ok(Self {
            equalities,
            constraints,
            order,
            cells_plain: None,
            cells_gb: None,
            label: None,
        })
    }

    /// Stores externally measured cell counts and derives the label:
    /// `+1` exactly when the preconditioned count is strictly smaller.
    pub fn with_cell_counts(mut self, plain: u64, gb: u64) -> Result<Self, FeatureError> {
        if plain == 0 || gb == 0 {
            return Err(FeatureError::NonPositiveCellCount);
        }
        self.cells_plain = Some(plain);
        self.cells_gb = Some(gb);
        self.label = Some(if gb < plain { 1 } else { -1 });
        Ok(self)
    }

    /// Stores a label, which must be `+1` or `-1` and must agree with any
    /// stored cell counts.
    pub fn with_label(mut self, label: i8) -> Result<Self, FeatureError> {
        if label != 1 && label != -1 {
            return Err(FeatureError::InvalidLabel(label));
        }
        if let (Some(plain), Some(gb)) = (self.cells_plain, self.cells_gb) {
            let derived = if gb < plain { 1 } else { -1 };
            if derived != label {
                return Err(FeatureError::InconsistentLabel { label, plain, gb });
            }
        }
        self.label = Some(label);
        Ok(self)
    }

    /// The equational constraints.
    pub fn equalities(&self) -> &[Polynomial] {
        &self.equalities
    }

    /// The non-equational constraints.
    pub fn constraints(&self) -> &[Polynomial] {
        &self.constraints
    }

    /// The shared variable order.
    pub fn order(&self) -> &VariableOrder {
        &self.order
    }

    /// Cell count of the unpreconditioned problem, when measured.
    pub fn cells_plain(&self) -> Option<u64> {
        self.cells_plain
    }

    /// Cell count of the preconditioned problem, when measured.
    pub fn cells_gb(&self) -> Option<u64> {
        self.cells_gb
    }

    /// The class label, when known.
    pub fn label(&self) -> Option<i8> {
        self.label
    }
}

/// A numeric feature vector with an optional class label.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    label: Option<i8>,
}

impl FeatureVector {
    /// Wraps raw values and an optional label.
    pub fn new(values: Vec<f64>, label: Option<i8>) -> Self {
        Self { values, label }
    }

    /// The feature values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The label, when known.
    pub fn label(&self) -> Option<i8> {
        self.label
    }

    /// Number of features.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when the vector has no entries.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Whether to precondition, as decided by a heuristic or a trained model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// Replace the equalities by their Groebner basis first.
    Precondition,
    /// Run the decomposition on the raw problem.
    DoNot,
}

impl Decision {
    /// Maps class label `+1` to [`Decision::Precondition`], everything else
    /// to [`Decision::DoNot`].
    pub fn from_label(label: i8) -> Self {
        if label == 1 {
            Decision::Precondition
        } else {
            Decision::DoNot
        }
    }

    /// The class label this decision corresponds to.
    pub fn label(self) -> i8 {
        match self {
            Decision::Precondition => 1,
            Decision::DoNot => -1,
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Precondition => f.write_str("PRECONDITION"),
            Decision::DoNot => f.write_str("DO_NOT"),
        }
    }
}

/// Total number of indeterminates: the sum over the set of the number of
/// distinct variables in each polynomial.
pub fn tnoi<'a, I>(polys: I) -> u64
where
    I: IntoIterator<Item = &'a Polynomial>,
{
    polys.into_iter().map(|p| p.noi() as u64).sum()
}

/// Sum of total degrees over the set; `None` when the set is empty or
/// contains a zero polynomial.
pub fn stds<'a, I>(polys: I) -> Option<u64>
where
    I: IntoIterator<Item = &'a Polynomial>,
{
    let mut sum = 0u64;
    let mut any = false;
    for p in polys {
        sum += u64::from(p.total_degree()?);
        any = true;
    }
    any.then_some(sum)
}

/// Maximum total degree over the set; `None` when the set is empty or
/// contains a zero polynomial.
pub fn tds<'a, I>(polys: I) -> Option<u32>
where
    I: IntoIterator<Item = &'a Polynomial>,
{
    let mut max: Option<u32> = None;
    for p in polys {
        let d = p.total_degree()?;
        max = Some(max.map_or(d, |m| m.max(d)));
    }
    max
}

/// Feature block of a polynomial set: TNoI, sum of total degrees, maximum
/// total degree, then per variable the maximum degree, the proportion of
/// polynomials containing the variable, and the proportion of monomial
/// occurrences containing it. Length `3 + 3v` for `v` variables.
pub fn set_features(
    polys: &[&Polynomial],
    order: &VariableOrder,
) -> Result<Vec<f64>, FeatureError> {
    if polys.is_empty() {
        return Err(FeatureError::EmptySet);
    }
    for p in polys {
        if p.is_zero() {
            return Err(FeatureError::ZeroPolynomial);
        }
        if p.order() != order {
            return Err(FeatureError::OrderMismatch);
        }
    }
    let v = order.len();
    let n = polys.len() as f64;
    let mut values = Vec::with_capacity(3 + 3 * v);
    values.push(tnoi(polys.iter().copied()) as f64);
    values.push(stds(polys.iter().copied()).expect("members are non-zero") as f64);
    values.push(f64::from(tds(polys.iter().copied()).expect("members are non-zero")));
    for var in 0..v {
        let max = polys.iter().map(|p| p.max_degree_in(var)).max().unwrap_or(0);
        values.push(f64::from(max));
    }
    for var in 0..v {
        let with = polys.iter().filter(|p| p.contains_variable(var)).count();
        values.push(with as f64 / n);
    }
    let total_monomials: usize = polys.iter().map(|p| p.monomial_count()).sum();
    for var in 0..v {
        let with: usize = polys
            .iter()
            .map(|p| p.terms().filter(|(m, _)| m.exponent(var) > 0).count())
            .sum();
        values.push(with as f64 / total_monomials as f64);
    }
    Ok(values)
}

/// Features of the raw problem, measured on `E ∪ F`.
pub fn before_features(problem: &Problem) -> Result<Vec<f64>, FeatureError> {
    let polys: Vec<&Polynomial> = problem
        .equalities
        .iter()
        .chain(&problem.constraints)
        .collect();
    set_features(&polys, &problem.order)
}

/// Features of the preconditioned problem: the size of `G ∪ F` followed by
/// the feature block of `G ∪ F`.
pub fn after_features(
    problem: &Problem,
    gb: &GroebnerBasis,
) -> Result<Vec<f64>, FeatureError> {
    let polys: Vec<&Polynomial> = gb.iter().chain(&problem.constraints).collect();
    let mut values = Vec::with_capacity(4 + 3 * problem.order.len());
    values.push(polys.len() as f64);
    values.extend(set_features(&polys, &problem.order)?);
    Ok(values)
}

/// The full feature vector: before block, after block, then base-2 log
/// differences of TNoI, sum of total degrees, and maximum total degree.
///
/// When one of the six quantities entering a log difference is zero that
/// difference is undefined; the feature is set to 0 and the returned flag is
/// raised.
pub fn full_features(
    problem: &Problem,
    gb: &GroebnerBasis,
) -> Result<(FeatureVector, bool), FeatureError> {
    let before = before_features(problem)?;
    let after = after_features(problem, gb)?;
    let mut values = Vec::with_capacity(before.len() + after.len() + 3);
    let mut degenerate = false;
    let mut log_diff = |b: f64, a: f64| {
        if b > 0.0 && a > 0.0 {
            b.log2() - a.log2()
        } else {
            degenerate = true;
            0.0
        }
    };
    let pairs = [
        (before[0], after[1]),
        (before[1], after[2]),
        (before[2], after[3]),
    ];
    let logs: Vec<f64> = pairs.iter().map(|&(b, a)| log_diff(b, a)).collect();
    values.extend(before);
    values.extend(after);
    values.extend(logs);
    Ok((FeatureVector::new(values, problem.label), degenerate))
}

/// The baseline heuristic: precondition exactly when TNoI strictly
/// decreases.
pub fn tnoi_decision(problem: &Problem, gb: &GroebnerBasis) -> Decision {
    let before = tnoi(problem.equalities.iter().chain(&problem.constraints));
    let after = tnoi(gb.iter().chain(&problem.constraints));
    if after < before {
        Decision::Precondition
    } else {
        Decision::DoNot
    }
}

/// Projects a feature vector onto the given 1-based indices, preserving the
/// index order and the label.
pub fn subset_features(
    vector: &FeatureVector,
    indices: &[usize],
) -> Result<FeatureVector, FeatureError> {
    if indices.is_empty() {
        return Err(FeatureError::EmptySubset);
    }
    let mut seen = vec![false; vector.len()];
    let mut values = Vec::with_capacity(indices.len());
    for &index in indices {
        if index == 0 || index > vector.len() {
            return Err(FeatureError::IndexOutOfRange(index, vector.len()));
        }
        if seen[index - 1] {
            return Err(FeatureError::DuplicateIndex(index));
        }
        seen[index - 1] = true;
        values.push(vector.values[index - 1]);
    }
    Ok(FeatureVector::new(values, vector.label))
}

/// Number of features in the before block for `order`.
pub fn before_width(order: &VariableOrder) -> usize {
    3 + 3 * order.len()
}

/// Number of features in the after block for `order`.
pub fn after_width(order: &VariableOrder) -> usize {
    4 + 3 * order.len()
}

/// Total number of features for `order`.
pub fn full_width(order: &VariableOrder) -> usize {
    before_width(order) + after_width(order) + 3
}

/// Human-readable name of each feature, in table order.
pub fn feature_descriptions(order: &VariableOrder) -> Vec<String> {
    let mut out = Vec::with_capacity(full_width(order));
    out.push("TNoI before GB".to_string());
    out.push("Sum of total degrees before GB".to_string());
    out.push("Maximum total degree before GB".to_string());
    for name in order.iter() {
        out.push(format!("Maximum degree of {name} before GB"));
    }
    for name in order.iter() {
        out.push(format!("Proportion of polynomials with {name} before GB"));
    }
    for name in order.iter() {
        out.push(format!("Proportion of monomials with {name} before GB"));
    }
    out.push("Number of polynomials after GB".to_string());
    out.push("TNoI after GB".to_string());
    out.push("Sum of total degrees after GB".to_string());
    out.push("Maximum total degree after GB".to_string());
    for name in order.iter() {
        out.push(format!("Maximum degree of {name} after GB"));
    }
    for name in order.iter() {
        out.push(format!("Proportion of polynomials with {name} after GB"));
    }
    for name in order.iter() {
        out.push(format!("Proportion of monomials with {name} after GB"));
    }
    out.push("Log difference in TNoI".to_string());
    out.push("Log difference in sum of total degrees".to_string());
    out.push("Log difference in maximum total degree".to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::buchberger;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn order() -> VariableOrder {
        VariableOrder::xyz()
    }

    fn parse_all(texts: &[&str]) -> Vec<Polynomial> {
        texts
            .iter()
            .map(|t| Polynomial::parse(t, &order()).unwrap())
            .collect()
    }

    fn worked_problem() -> Problem {
        let e = parse_all(&["-12*y*z - 3*z", "17*x^2 - 6", "-2*y*z + 5*x"]);
        let f = parse_all(&["-2*y*z - 9*y", "-15*x^2 - 19*y", "6*x*z + 3"]);
        Problem::new(e, f).unwrap()
    }

    #[test]
    fn worked_problem_has_expected_feature_vector() {
        let problem = worked_problem();
        let gb = buchberger(problem.equalities()).unwrap();
        let (vector, degenerate) = full_features(&problem, &gb).unwrap();
        assert!(!degenerate);
        let log_ratio = 12f64.log2() - 10f64.log2();
        let expected = [
            12.0,
            12.0,
            2.0,
            2.0,
            1.0,
            1.0,
            2.0 / 3.0,
            2.0 / 3.0,
            2.0 / 3.0,
            1.0 / 3.0,
            5.0 / 12.0,
            5.0 / 12.0,
            6.0,
            10.0,
            10.0,
            2.0,
            2.0,
            1.0,
            1.0,
            2.0 / 3.0,
            1.0 / 2.0,
            1.0 / 2.0,
            1.0 / 3.0,
            1.0 / 3.0,
            1.0 / 4.0,
            log_ratio,
            log_ratio,
            0.0,
        ];
        assert_eq!(vector.len(), 28);
        for (i, (got, want)) in vector.values().iter().zip(&expected).enumerate() {
            assert_relative_eq!(got, want, epsilon = 1e-12);
            assert!(!got.is_nan(), "feature {} is NaN", i + 1);
        }
        assert_relative_eq!(vector.values()[25], 0.263, epsilon = 1e-3);
        assert_relative_eq!(vector.values()[26], 0.263, epsilon = 1e-3);
    }

    #[test]
    fn single_polynomial_set_features() {
        let p = Polynomial::parse("17*x^2 - 6", &order()).unwrap();
        let values = set_features(&[&p], &order()).unwrap();
        let expected = [1.0, 2.0, 2.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.5, 0.0, 0.0];
        assert_eq!(values, expected);
    }

    #[test]
    fn trivial_basis_after_features_are_mostly_zero() {
        let e = parse_all(&["x", "x + 1"]);
        let problem = Problem::new(e, Vec::new()).unwrap();
        let gb = buchberger(problem.equalities()).unwrap();
        let after = after_features(&problem, &gb).unwrap();
        let mut expected = vec![0.0; 13];
        expected[0] = 1.0;
        assert_eq!(after, expected);
        let (vector, degenerate) = full_features(&problem, &gb).unwrap();
        assert!(degenerate);
        assert_eq!(vector.values()[25], 0.0);
        assert_eq!(vector.values()[26], 0.0);
        assert_eq!(vector.values()[27], 0.0);
    }

    #[test]
    fn tnoi_counts_distinct_variables_per_polynomial() {
        let problem = worked_problem();
        let gb = buchberger(problem.equalities()).unwrap();
        let before: Vec<&Polynomial> = problem
            .equalities()
            .iter()
            .chain(problem.constraints())
            .collect();
        let after: Vec<&Polynomial> = gb.iter().chain(problem.constraints()).collect();
        assert_eq!(tnoi(before.into_iter()), 12);
        assert_eq!(tnoi(after.into_iter()), 10);
        assert_eq!(tnoi_decision(&problem, &gb), Decision::Precondition);
    }

    #[test]
    fn equal_tnoi_means_do_not_precondition() {
        let e = parse_all(&["x^2 - 2", "y - 3"]);
        let problem = Problem::new(e, Vec::new()).unwrap();
        let gb = buchberger(problem.equalities()).unwrap();
        assert_eq!(gb.generators(), problem.equalities());
        assert_eq!(tnoi_decision(&problem, &gb), Decision::DoNot);
    }

    #[test]
    fn stds_and_tds_handle_edge_cases() {
        let polys = parse_all(&["x^2*y", "z - 1"]);
        assert_eq!(stds(&polys), Some(4));
        assert_eq!(tds(&polys), Some(3));
        assert_eq!(stds(&Vec::<Polynomial>::new()), None);
        let with_zero = vec![Polynomial::zero(&order())];
        assert_eq!(tds(&with_zero), None);
    }

    #[test]
    fn subset_projection_preserves_index_order() {
        let problem = worked_problem();
        let gb = buchberger(problem.equalities()).unwrap();
        let (vector, _) = full_features(&problem, &gb).unwrap();
        let wrapper = subset_features(&vector, &[14, 9, 22, 4, 12]).unwrap();
        let expected = [10.0, 2.0 / 3.0, 0.5, 2.0, 5.0 / 12.0];
        for (got, want) in wrapper.values().iter().zip(&expected) {
            assert_relative_eq!(got, want, epsilon = 1e-12);
        }
        let filter = subset_features(&vector, &[14, 13, 2, 26, 21, 15, 23, 19, 25, 27]).unwrap();
        assert_eq!(filter.len(), 10);
        assert_relative_eq!(filter.values()[0], 10.0, epsilon = 1e-12);
        assert_relative_eq!(filter.values()[3], 12f64.log2() - 10f64.log2(), epsilon = 1e-12);
    }

    #[test]
    fn subset_validation_rejects_bad_indices() {
        let vector = FeatureVector::new(vec![1.0, 2.0, 3.0], None);
        assert_eq!(
            subset_features(&vector, &[]),
            Err(FeatureError::EmptySubset)
        );
        assert_eq!(
            subset_features(&vector, &[0]),
            Err(FeatureError::IndexOutOfRange(0, 3))
        );
        assert_eq!(
            subset_features(&vector, &[4]),
            Err(FeatureError::IndexOutOfRange(4, 3))
        );
        assert_eq!(
            subset_features(&vector, &[2, 2]),
            Err(FeatureError::DuplicateIndex(2))
        );
    }

    #[test]
    fn problem_validation() {
        let one = parse_all(&["x"]);
        assert_eq!(
            Problem::new(one, Vec::new()),
            Err(FeatureError::TooFewEqualities)
        );
        let with_zero = vec![
            Polynomial::parse("x", &order()).unwrap(),
            Polynomial::zero(&order()),
        ];
        assert_eq!(
            Problem::new(with_zero, Vec::new()),
            Err(FeatureError::ZeroPolynomial)
        );
        let ab = VariableOrder::new(["a", "b"]).unwrap();
        let mixed = vec![
            Polynomial::parse("x", &order()).unwrap(),
            Polynomial::parse("a", &ab).unwrap(),
        ];
        assert_eq!(
            Problem::new(mixed, Vec::new()),
            Err(FeatureError::OrderMismatch)
        );
    }

    #[test]
    fn labels_follow_cell_counts() {
        let problem = worked_problem();
        let labeled = problem.clone().with_cell_counts(10, 9).unwrap();
        assert_eq!(labeled.label(), Some(1));
        let tied = problem.clone().with_cell_counts(10, 10).unwrap();
        assert_eq!(tied.label(), Some(-1));
        assert_eq!(
            problem.clone().with_cell_counts(0, 5),
            Err(FeatureError::NonPositiveCellCount)
        );
        assert_eq!(
            problem.clone().with_label(2),
            Err(FeatureError::InvalidLabel(2))
        );
        assert_eq!(
            tied.with_label(1),
            Err(FeatureError::InconsistentLabel {
                label: 1,
                plain: 10,
                gb: 10
            })
        );
        let ok = problem.with_label(-1).unwrap();
        assert_eq!(ok.label(), Some(-1));
    }

    #[test]
    fn renaming_variables_preserves_features() {
        let problem = worked_problem();
        let gb = buchberger(problem.equalities()).unwrap();
        let (vector, _) = full_features(&problem, &gb).unwrap();

        let abc = VariableOrder::new(["a", "b", "c"]).unwrap();
        let rename = |texts: &[&str]| -> Vec<Polynomial> {
            texts
                .iter()
                .map(|t| {
                    let renamed = t.replace('x', "a").replace('y', "b").replace('z', "c");
                    Polynomial::parse(&renamed, &abc).unwrap()
                })
                .collect()
        };
        let e = rename(&["-12*y*z - 3*z", "17*x^2 - 6", "-2*y*z + 5*x"]);
        let f = rename(&["-2*y*z - 9*y", "-15*x^2 - 19*y", "6*x*z + 3"]);
        let renamed = Problem::new(e, f).unwrap();
        let gb2 = buchberger(renamed.equalities()).unwrap();
        let (vector2, _) = full_features(&renamed, &gb2).unwrap();
        assert_eq!(vector.values(), vector2.values());
    }

    #[test]
    fn descriptions_match_layout() {
        let descriptions = feature_descriptions(&order());
        assert_eq!(descriptions.len(), 28);
        assert_eq!(descriptions[0], "TNoI before GB");
        assert_eq!(descriptions[12], "Number of polynomials after GB");
        assert_eq!(descriptions[13], "TNoI after GB");
        assert_eq!(descriptions[22], "Proportion of monomials with x after GB");
        assert_eq!(descriptions[25], "Log difference in TNoI");
        assert_eq!(before_width(&order()), 12);
        assert_eq!(after_width(&order()), 13);
        assert_eq!(full_width(&order()), 28);
    }

    fn arb_problem() -> impl Strategy<Value = Problem> {
        let coeff = (-9i64..=9).prop_filter("non-zero", |c| *c != 0);
        let monomial = proptest::collection::vec(0u32..=2, 3).prop_map(crate::polynomial::Monomial::new);
        let term = (monomial, coeff).prop_map(|(m, c)| {
            (
                m,
                num_rational::BigRational::from_integer(num_bigint::BigInt::from(c)),
            )
        });
        let poly = proptest::collection::vec(term, 1..=2)
            .prop_map(|terms| Polynomial::from_terms(&VariableOrder::xyz(), terms))
            .prop_filter("non-zero", |p| !p.is_zero());
        (
            proptest::collection::vec(poly.clone(), 2..=3),
            proptest::collection::vec(poly, 0..=3),
        )
            .prop_map(|(e, f)| Problem::new(e, f).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn proportions_stay_in_unit_interval(problem in arb_problem()) {
            let gb = buchberger(problem.equalities()).unwrap();
            let (vector, _) = full_features(&problem, &gb).unwrap();
            let v = vector.values();
            for &i in &[7, 8, 9, 10, 11, 12, 20, 21, 22, 23, 24, 25] {
                prop_assert!((0.0..=1.0).contains(&v[i - 1]), "feature {} = {}", i, v[i - 1]);
            }
        }

        #[test]
        fn log_feature_sign_tracks_tnoi_change(problem in arb_problem()) {
            let gb = buchberger(problem.equalities()).unwrap();
            let (vector, degenerate) = full_features(&problem, &gb).unwrap();
            if !degenerate {
                let decreased = tnoi_decision(&problem, &gb) == Decision::Precondition;
                prop_assert_eq!(vector.values()[25] > 0.0, decreased);
            }
        }
    }
}
