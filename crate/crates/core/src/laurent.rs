//! Exponent vectors and Laurent polynomials with rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// Integer exponent vector of fixed arity. Entries may be negative.
///
/// The `Ord` instance is graded lexicographic: total degree first, ties broken
/// lexicographically with the first variable largest.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<i64>);

impl ExponentVector {
    pub fn zero(arity: usize) -> Self {
        Self(vec![0; arity])
    }

    pub fn unit(arity: usize, i: usize) -> Self {
        let mut v = vec![0; arity];
        v[i] = 1;
        Self(v)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn scaled(&self, k: i64) -> Self {
        Self(self.0.iter().map(|x| x * k).collect())
    }

    pub fn dot(&self, other: &[i64]) -> i64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, i64> {
        self.0.iter()
    }
}

impl From<Vec<i64>> for ExponentVector {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl Index<usize> for ExponentVector {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl Add for &ExponentVector {
    type Output = ExponentVector;
    fn add(self, rhs: &ExponentVector) -> ExponentVector {
        debug_assert_eq!(self.arity(), rhs.arity());
        ExponentVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ExponentVector {
    type Output = ExponentVector;
    fn sub(self, rhs: &ExponentVector) -> ExponentVector {
        debug_assert_eq!(self.arity(), rhs.arity());
        ExponentVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &ExponentVector {
    type Output = ExponentVector;
    fn neg(self) -> ExponentVector {
        ExponentVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A Laurent polynomial in `arity` variables over the rationals.
///
/// Terms are stored in a `BTreeMap` keyed by exponent, so iteration order is
/// ascending graded-lex; [`LaurentPolynomial::terms_desc`] gives the print order.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPolynomial {
    arity: usize,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl LaurentPolynomial {
    pub fn zero(arity: usize) -> Self {
        Self {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        Self::monomial(c, ExponentVector::zero(arity))
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, Rational::one())
    }

    pub fn monomial(c: Rational, exponent: ExponentVector) -> Self {
        let arity = exponent.arity();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exponent, c);
        }
        Self { arity, terms }
    }

    pub fn variable(arity: usize, i: usize) -> Self {
        Self::monomial(Rational::one(), ExponentVector::unit(arity, i))
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (ExponentVector, Rational)>) -> Self {
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            assert_eq!(e.arity(), arity, "exponent arity mismatch");
            p.add_term(e, c);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &ExponentVector) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    /// Terms in descending graded-lex order (the canonical print order).
    pub fn terms_desc(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn support(&self) -> Vec<ExponentVector> {
        self.terms.keys().cloned().collect()
    }

    pub fn add_term(&mut self, e: ExponentVector, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        Self {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the monomial `x^shift`.
    pub fn shift(&self, shift: &ExponentVector) -> Self {
        Self {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, v)| (e + shift, v.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.arity);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `Some((c, m))` when the polynomial is the single term `c·x^m`.
    pub fn as_monomial(&self) -> Option<(&ExponentVector, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        match self.as_monomial() {
            Some((e, c)) if e.is_zero() => Some(c.clone()),
            _ => None,
        }
    }

    /// Componentwise minimum of the support exponents; zero vector for the zero polynomial.
    pub fn min_exponents(&self) -> ExponentVector {
        let mut mins = vec![i64::MAX; self.arity];
        for e in self.terms.keys() {
            for (m, x) in mins.iter_mut().zip(e.iter()) {
                *m = (*m).min(*x);
            }
        }
        if self.is_zero() {
            mins = vec![0; self.arity];
        }
        ExponentVector(mins)
    }

    /// `x_i · ∂f/∂x_i` (0-based `i`): the term `c·x^m` maps to `c·m_i·x^m`.
    pub fn log_derivative(&self, i: usize) -> Self {
        assert!(i < self.arity, "variable index {i} out of range");
        let mut out = Self::zero(self.arity);
        for (e, c) in &self.terms {
            if e[i] != 0 {
                out.terms.insert(e.clone(), c * Rational::from_integer(e[i].into()));
            }
        }
        out
    }

    /// Keeps only the terms whose exponent satisfies `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&ExponentVector) -> bool) -> Self {
        Self {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies the monomial change of variables `m ↦ A·m` to every exponent.
    pub fn transform_exponents(&self, matrix: &[Vec<i64>]) -> Self {
        let n = self.arity;
        assert_eq!(matrix.len(), n);
        Self::from_terms(
            n,
            self.terms.iter().map(|(e, c)| {
                let image = matrix.iter().map(|row| e.dot(row)).collect::<Vec<_>>();
                (ExponentVector(image), c.clone())
            }),
        )
    }

    /// Renders with the given variable names in canonical (descending graded-lex) order.
    pub fn to_expr(&self, vars: &[&str]) -> String {
        assert_eq!(vars.len(), self.arity, "variable name count mismatch");
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.terms_desc().enumerate() {
            let negative = c.is_negative();
            let magnitude = c.abs();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&render_term(&magnitude, e, vars));
        }
        out
    }
}

fn render_term(c: &Rational, e: &ExponentVector, vars: &[&str]) -> String {
    let factors: Vec<String> = e
        .iter()
        .zip(vars)
        .filter(|(&k, _)| k != 0)
        .map(|(&k, name)| if k == 1 { name.to_string() } else { format!("{name}^{k}") })
        .collect();
    if factors.is_empty() {
        return c.to_string();
    }
    let mono = factors.join("*");
    if c.is_one() {
        mono
    } else {
        format!("{c}*{mono}")
    }
}

/// Default names `x, y, z` for arity ≤ 3, `x1, x2, …` beyond.
pub fn default_variable_names(arity: usize) -> Vec<String> {
    if arity <= 3 {
        ["x", "y", "z"][..arity].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=arity).map(|i| format!("x{i}")).collect()
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_variable_names(self.arity);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.to_expr(&refs))
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        self.scale(&-Rational::one())
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = LaurentPolynomial::zero(self.arity);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}
