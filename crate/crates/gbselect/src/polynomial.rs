//! Exact sparse multivariate polynomials over the rationals.
//!
//! Polynomials are stored as maps from exponent vectors to arbitrary-precision
//! rational coefficients, so all arithmetic is exact. Every polynomial carries
//! a [`VariableOrder`], the variable list of the surrounding decomposition
//! problem. The monomial ordering used throughout the crate is pure
//! lexicographic with variable precedence *reversed* from that list: for the
//! order `[x, y, z]`, comparisons weigh `z` first, then `y`, then `x`. This is
//! the order under which eliminating trailing variables first matches the
//! projection order of the decomposition.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Error raised when building a [`VariableOrder`] from unusable names.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    /// A name is empty or not of the form letter followed by letters/digits.
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    /// The same name appears twice.
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
}

/// Errors raised while parsing polynomial text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// The input violates the grammar; `pos` is a 1-based character offset.
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    /// A variable name is not part of the variable order.
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { pos: usize, name: String },
    /// An exponent does not fit in 32 bits.
    #[error("exponent at position {pos} is too large")]
    ExponentOverflow { pos: usize },
}

/// An ordered list of variable names shared by a family of polynomials.
///
/// The list order is the order in which a decomposition would project the
/// variables; the induced monomial ordering (see [`Monomial`]) gives the
/// *last* variable the highest precedence. Cloning is cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableOrder {
    names: Arc<Vec<String>>,
}

impl VariableOrder {
    /// Builds an order from distinct identifier-like names.
    pub fn new<I, S>(names: I) -> Result<Self, OrderError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for name in &names {
            let mut chars = name.chars();
            let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
            if !head_ok || !chars.all(|c| c.is_ascii_alphanumeric()) {
                return Err(OrderError::InvalidName(name.clone()));
            }
        }
        if let Some(dup) = names
            .iter()
            .enumerate()
            .find(|(i, n)| names[..*i].contains(n))
        {
            return Err(OrderError::DuplicateName(dup.1.clone()));
        }
        Ok(Self {
            names: Arc::new(names),
        })
    }

    /// The standard three-variable order `[x, y, z]`.
    pub fn xyz() -> Self {
        Self::new(["x", "y", "z"]).expect("static names are valid")
    }

    /// Number of variables.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// True when the order has no variables.
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Name of the variable at `index`.
    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    /// Position of `name` in the order, if present.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Iterates over the names in list order.
    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

/// A power product of variables, stored as one exponent per variable.
///
/// `Ord` implements the pure lexicographic order induced by the variable
/// order: exponents are compared starting from the *last* variable, so for
/// `[x, y, z]` we have `z > y > x` and for example `y*z > z > x^2 > x > 1`.
/// Only monomials over the same variable order may be compared.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exponents: Vec<u32>,
}

impl Monomial {
    /// Builds a monomial from one exponent per variable.
    pub fn new(exponents: Vec<u32>) -> Self {
        Self { exponents }
    }

    /// The constant monomial `1` over `nvars` variables.
    pub fn one(nvars: usize) -> Self {
        Self {
            exponents: vec![0; nvars],
        }
    }

    /// The monomial consisting of the single variable at `index`.
    pub fn variable(nvars: usize, index: usize) -> Self {
        let mut exponents = vec![0; nvars];
        exponents[index] = 1;
        Self { exponents }
    }

    /// The exponent vector, one entry per variable in list order.
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Exponent of the variable at `index`.
    pub fn exponent(&self, index: usize) -> u32 {
        self.exponents[index]
    }

    /// Sum of all exponents.
    pub fn total_degree(&self) -> u32 {
        self.exponents
            .iter()
            .try_fold(0u32, |acc, &e| acc.checked_add(e))
            .expect("total degree overflows u32")
    }

    /// True for the constant monomial.
    pub fn is_one(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// True when `self` divides `other` componentwise.
    pub fn divides(&self, other: &Self) -> bool {
        debug_assert_eq!(self.exponents.len(), other.exponents.len());
        self.exponents
            .iter()
            .zip(&other.exponents)
            .all(|(a, b)| a <= b)
    }

    /// Componentwise product.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.exponents.len(), other.exponents.len());
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| a.checked_add(*b).expect("exponent overflows u32"))
            .collect();
        Self { exponents }
    }

    /// Componentwise quotient, or `None` when `other` does not divide `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        debug_assert_eq!(self.exponents.len(), other.exponents.len());
        let mut out = Vec::with_capacity(self.exponents.len());
        for (a, b) in self.exponents.iter().zip(&other.exponents) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Self { exponents: out })
    }

    /// Componentwise maximum (least common multiple).
    pub fn lcm(&self, other: &Self) -> Self {
        debug_assert_eq!(self.exponents.len(), other.exponents.len());
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| *a.max(b))
            .collect();
        Self { exponents }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.exponents.len(), other.exponents.len());
        for (a, b) in self.exponents.iter().zip(&other.exponents).rev() {
            match a.cmp(b) {
                Ordering::Equal => continue,
                unequal => return unequal,
            }
        }
        Ordering::Equal
    }
}

/// A sparse polynomial with exact rational coefficients.
///
/// Terms are kept in a map ordered by [`Monomial`]'s lexicographic order, so
/// iteration is canonical and the leading term is the last entry. The zero
/// polynomial has no terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    order: VariableOrder,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    /// The zero polynomial.
    pub fn zero(order: &VariableOrder) -> Self {
        Self {
            order: order.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// The constant polynomial `value`.
    pub fn constant(order: &VariableOrder, value: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(Monomial::one(order.len()), value);
        }
        Self {
            order: order.clone(),
            terms,
        }
    }

    /// The polynomial consisting of the single variable at `index`.
    pub fn variable(order: &VariableOrder, index: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(
            Monomial::variable(order.len(), index),
            BigRational::one(),
        );
        Self {
            order: order.clone(),
            terms,
        }
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs.
    ///
    /// Coefficients of equal monomials are added; zero coefficients are
    /// dropped. Panics if an exponent vector has the wrong length.
    pub fn from_terms<I>(order: &VariableOrder, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut map: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (monomial, coeff) in terms {
            assert_eq!(
                monomial.exponents().len(),
                order.len(),
                "exponent vector length does not match variable order"
            );
            if coeff.is_zero() {
                continue;
            }
            match map.entry(monomial) {
                std::collections::btree_map::Entry::Vacant(slot) => {
                    slot.insert(coeff);
                }
                std::collections::btree_map::Entry::Occupied(mut slot) => {
                    *slot.get_mut() += coeff;
                    if slot.get().is_zero() {
                        slot.remove();
                    }
                }
            }
        }
        Self {
            order: order.clone(),
            terms: map,
        }
    }

    /// The variable order this polynomial is expressed in.
    pub fn order(&self) -> &VariableOrder {
        &self.order
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for a non-zero constant.
    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one()
    }

    /// Number of terms.
    pub fn monomial_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterates over `(monomial, coefficient)` pairs in ascending order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Iterates over terms in descending order, leading term first.
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter().rev()
    }

    /// The greatest term under the monomial order, or `None` for zero.
    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.last_key_value()
    }

    /// The greatest monomial, or `None` for zero.
    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.leading_term().map(|(m, _)| m)
    }

    /// The coefficient of the greatest monomial, or `None` for zero.
    pub fn leading_coefficient(&self) -> Option<&BigRational> {
        self.leading_term().map(|(_, c)| c)
    }

    /// Coefficient of `monomial`, zero when absent.
    pub fn coefficient(&self, monomial: &Monomial) -> BigRational {
        self.terms
            .get(monomial)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Maximum total degree over all terms; `None` for the zero polynomial,
    /// where the degree is undefined.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// Number of distinct variables that occur in some term.
    pub fn noi(&self) -> usize {
        (0..self.order.len())
            .filter(|&v| self.contains_variable(v))
            .count()
    }

    /// True when the variable at `index` occurs in some term.
    pub fn contains_variable(&self, index: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(index) > 0)
    }

    /// Largest exponent of the variable at `index` across all terms, zero
    /// when the variable is absent.
    pub fn max_degree_in(&self, index: usize) -> u32 {
        self.terms
            .keys()
            .map(|m| m.exponent(index))
            .max()
            .unwrap_or(0)
    }

    /// Multiplies by a rational constant.
    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero(&self.order);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c * factor))
            .collect();
        Self {
            order: self.order.clone(),
            terms,
        }
    }

    /// Multiplies by the single term `coeff * monomial`.
    pub fn mul_term(&self, coeff: &BigRational, monomial: &Monomial) -> Self {
        if coeff.is_zero() {
            return Self::zero(&self.order);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.mul(monomial), c * coeff))
            .collect();
        Self {
            order: self.order.clone(),
            terms,
        }
    }

    /// Parses polynomial text over the given variable order.
    ///
    /// The grammar is plain ASCII with insignificant whitespace:
    ///
    /// ```text
    /// poly    := ['-'] term { ('+'|'-') term }
    /// term    := coeff [ '*' factors ] | factors
    /// factors := varpow { '*' varpow }
    /// varpow  := var [ '^' nat ]
    /// coeff   := nat [ '/' nat ]
    /// var     := letter { letter | digit }
    /// ```
    ///
    /// Coefficients are arbitrary-precision; exponents must fit in `u32`.
    pub fn parse(text: &str, order: &VariableOrder) -> Result<Self, ParseError> {
        Parser::new(text, order).parse()
    }

    fn assert_same_order(&self, other: &Self) {
        assert_eq!(
            self.order, other.order,
            "variable order mismatch between operands"
        );
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (monomial, coeff)) in self.terms_desc().enumerate() {
            if i == 0 {
                if coeff.is_negative() {
                    f.write_str("-")?;
                }
            } else if coeff.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let magnitude = coeff.abs();
            if monomial.is_one() {
                write!(f, "{magnitude}")?;
            } else {
                if !magnitude.is_one() {
                    write!(f, "{magnitude}*")?;
                }
                let mut first = true;
                for (v, &e) in monomial.exponents().iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    if !first {
                        f.write_str("*")?;
                    }
                    first = false;
                    f.write_str(self.order.name(v))?;
                    if e > 1 {
                        write!(f, "^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        Polynomial {
            order: self.order.clone(),
            terms,
        }
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_order(rhs);
        let mut terms = self.terms.clone();
        for (monomial, coeff) in &rhs.terms {
            match terms.entry(monomial.clone()) {
                std::collections::btree_map::Entry::Vacant(slot) => {
                    slot.insert(coeff.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut slot) => {
                    *slot.get_mut() += coeff;
                    if slot.get().is_zero() {
                        slot.remove();
                    }
                }
            }
        }
        Polynomial {
            order: self.order.clone(),
            terms,
        }
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_order(rhs);
        let mut terms: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match terms.entry(m) {
                    std::collections::btree_map::Entry::Vacant(slot) => {
                        slot.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut slot) => {
                        *slot.get_mut() += c;
                        if slot.get().is_zero() {
                            slot.remove();
                        }
                    }
                }
            }
        }
        Polynomial {
            order: self.order.clone(),
            terms,
        }
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    order: &'a VariableOrder,
}

impl<'a> Parser<'a> {
    fn new(text: &str, order: &'a VariableOrder) -> Self {
        Self {
            chars: text.chars().collect(),
            pos: 0,
            order,
        }
    }

    fn parse(mut self) -> Result<Polynomial, ParseError> {
        let mut terms: Vec<(Monomial, BigRational)> = Vec::new();
        self.skip_ws();
        let mut negate = self.eat('-');
        loop {
            let (monomial, coeff) = self.term()?;
            terms.push((monomial, if negate { -coeff } else { coeff }));
            self.skip_ws();
            match self.peek() {
                None => break,
                Some('+') => {
                    self.pos += 1;
                    negate = false;
                }
                Some('-') => {
                    self.pos += 1;
                    negate = true;
                }
                Some(c) => {
                    return Err(self.syntax(format!("expected `+` or `-`, found `{c}`")));
                }
            }
        }
        Ok(Polynomial::from_terms(self.order, terms))
    }

    fn term(&mut self) -> Result<(Monomial, BigRational), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let coeff = self.coefficient()?;
                self.skip_ws();
                if self.eat('*') {
                    let monomial = self.factors()?;
                    Ok((monomial, coeff))
                } else {
                    Ok((Monomial::one(self.order.len()), coeff))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let monomial = self.factors()?;
                Ok((monomial, BigRational::one()))
            }
            Some(c) => Err(self.syntax(format!("expected a term, found `{c}`"))),
            None => Err(self.syntax("expected a term, found end of input".to_string())),
        }
    }

    fn factors(&mut self) -> Result<Monomial, ParseError> {
        let mut exponents = vec![0u32; self.order.len()];
        loop {
            let (index, exp) = self.varpow()?;
            exponents[index] = exponents[index]
                .checked_add(exp)
                .ok_or(ParseError::ExponentOverflow { pos: self.pos })?;
            self.skip_ws();
            if !self.eat('*') {
                break;
            }
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_alphabetic() => {}
                Some(c) => {
                    return Err(self.syntax(format!("expected a variable, found `{c}`")));
                }
                None => {
                    return Err(
                        self.syntax("expected a variable, found end of input".to_string())
                    );
                }
            }
        }
        Ok(Monomial::new(exponents))
    }

    fn varpow(&mut self) -> Result<(usize, u32), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut name = String::new();
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {
                name.push(c);
                self.pos += 1;
            }
            Some(c) => return Err(self.syntax(format!("expected a variable, found `{c}`"))),
            None => {
                return Err(self.syntax("expected a variable, found end of input".to_string()))
            }
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() {
                name.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        let index = self
            .order
            .index_of(&name)
            .ok_or_else(|| ParseError::UnknownVariable {
                pos: start + 1,
                name: name.clone(),
            })?;
        self.skip_ws();
        if self.eat('^') {
            self.skip_ws();
            let exp = self.small_nat()?;
            Ok((index, exp))
        } else {
            Ok((index, 1))
        }
    }

    fn coefficient(&mut self) -> Result<BigRational, ParseError> {
        let numerator = self.big_nat()?;
        self.skip_ws();
        let save = self.pos;
        if self.eat('/') {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let denom_pos = self.pos;
                    let denominator = self.big_nat()?;
                    if denominator.is_zero() {
                        return Err(ParseError::Syntax {
                            pos: denom_pos + 1,
                            message: "zero denominator in coefficient".to_string(),
                        });
                    }
                    Ok(BigRational::new(numerator, denominator))
                }
                _ => {
                    return Err(ParseError::Syntax {
                        pos: save + 1,
                        message: "expected a denominator after `/`".to_string(),
                    });
                }
            }
        } else {
            Ok(BigRational::from_integer(numerator))
        }
    }

    fn big_nat(&mut self) -> Result<BigInt, ParseError> {
        let mut digits = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return Err(self.syntax("expected a number".to_string()));
        }
        Ok(digits.parse().expect("digit string parses as BigInt"))
    }

    fn small_nat(&mut self) -> Result<u32, ParseError> {
        let start = self.pos;
        let mut value: u64 = 0;
        let mut any = false;
        while let Some(c) = self.peek() {
            if let Some(d) = c.to_digit(10) {
                any = true;
                value = value.saturating_mul(10).saturating_add(u64::from(d));
                if value > u64::from(u32::MAX) {
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                    return Err(ParseError::ExponentOverflow { pos: start + 1 });
                }
                self.pos += 1;
            } else {
                break;
            }
        }
        if !any {
            return Err(self.syntax("expected an exponent".to_string()));
        }
        Ok(value as u32)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn syntax(&self, message: String) -> ParseError {
        ParseError::Syntax {
            pos: self.pos + 1,
            message,
        }
    }
}
