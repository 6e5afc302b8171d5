//! Buchberger bases over the rationals, torus saturation of Laurent ideals,
//! and zero-dimensional quotient rings with multiplication matrices.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{ExponentVector, LaurentPolynomial};
use crate::linalg::Matrix;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("resource limit exceeded after {pairs} S-pairs")]
    ResourceLimit { pairs: usize },
    #[error("quotient ring is infinite-dimensional (no pure power of x{variable} among leading terms)")]
    InfiniteQuotient { variable: usize },
    #[error("multiplication by x{variable} is singular on the quotient")]
    SingularMultiplication { variable: usize },
    #[error("generator has a negative exponent; clear it into the polynomial ring first")]
    NegativeExponent,
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
}

/// Monomial orders on `N^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MonomialOrder {
    Lex,
    #[default]
    GrevLex,
    /// Block order: the first `block` variables dominate (compared by degree,
    /// then grevlex); ties are broken by grevlex on the remaining variables.
    Elimination { block: usize },
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&x| x as u64).sum();
    let db: u64 = b.iter().map(|&x| x as u64).sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

impl MonomialOrder {
    pub fn compare(&self, a: &[u32], b: &[u32]) -> Ordering {
        match *self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::GrevLex => grevlex(a, b),
            MonomialOrder::Elimination { block } => {
                grevlex(&a[..block], &b[..block]).then_with(|| grevlex(&a[block..], &b[block..]))
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            MonomialOrder::Lex => "lex".into(),
            MonomialOrder::GrevLex => "grevlex".into(),
            MonomialOrder::Elimination { block } => format!("elim{block}"),
        }
    }
}

impl std::str::FromStr for MonomialOrder {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lex" => Ok(MonomialOrder::Lex),
            "grevlex" => Ok(MonomialOrder::GrevLex),
            other => Err(format!("unknown monomial order {other:?} (expected lex or grevlex)")),
        }
    }
}

/// Work budget for Buchberger's algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_pairs: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_pairs: 200_000 }
    }
}

type Monomial = Vec<u32>;

/// Polynomial in the nonnegative-exponent ring, terms sorted descending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Poly {
    terms: Vec<(Monomial, Rational)>,
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn quotient(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

impl Poly {
    fn from_laurent(p: &LaurentPolynomial, order: MonomialOrder) -> Result<Self, GroebnerError> {
        let mut terms = Vec::with_capacity(p.len());
        for (e, c) in p.terms() {
            if !e.is_nonnegative() {
                return Err(GroebnerError::NegativeExponent);
            }
            terms.push((e.iter().map(|&x| x as u32).collect::<Monomial>(), c.clone()));
        }
        terms.sort_by(|a, b| order.compare(&b.0, &a.0));
        Ok(Self { terms })
    }

    fn to_laurent(&self, arity: usize) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(
            arity,
            self.terms
                .iter()
                .map(|(m, c)| (ExponentVector(m.iter().map(|&x| x as i64).collect()), c.clone())),
        )
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn leading(&self) -> &(Monomial, Rational) {
        &self.terms[0]
    }

    fn make_monic(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        let lc = self.terms[0].1.clone();
        if lc.is_one() {
            return;
        }
        let inv = Rational::one() / lc;
        for (_, c) in self.terms.iter_mut() {
            *c = &*c * &inv;
        }
    }

    /// `self - c · x^shift · q`.
    fn sub_scaled(&self, c: &Rational, shift: &[u32], q: &Poly, order: MonomialOrder) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + q.terms.len());
        let mut i = 0;
        let shifted = q.terms.iter().map(|(m, v)| {
            let m: Monomial = m.iter().zip(shift).map(|(a, b)| a + b).collect();
            (m, v * c)
        });
        let mut shifted = shifted.peekable();
        loop {
            match (self.terms.get(i), shifted.peek()) {
                (None, None) => break,
                (Some(a), None) => {
                    out.push(a.clone());
                    i += 1;
                }
                (None, Some(_)) => {
                    let (m, v) = shifted.next().unwrap();
                    out.push((m, -v));
                }
                (Some(a), Some(b)) => match order.compare(&a.0, &b.0) {
                    Ordering::Greater => {
                        out.push(a.clone());
                        i += 1;
                    }
                    Ordering::Less => {
                        let (m, v) = shifted.next().unwrap();
                        out.push((m, -v));
                    }
                    Ordering::Equal => {
                        let (m, v) = shifted.next().unwrap();
                        let s = &a.1 - v;
                        if !s.is_zero() {
                            out.push((m, s));
                        }
                        i += 1;
                    }
                },
            }
        }
        Poly { terms: out }
    }

    fn mul_monomial(&self, shift: &[u32]) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }
}

/// Fully reduces `p` modulo `basis` (every term, not just the leading one).
fn normal_form(p: &Poly, basis: &[Poly], order: MonomialOrder) -> Poly {
    let mut rest = p.clone();
    let mut remainder: Vec<(Monomial, Rational)> = Vec::new();
    while !rest.is_zero() {
        let (lm, lc) = rest.leading().clone();
        match basis.iter().find(|g| divides(&g.leading().0, &lm)) {
            Some(g) => {
                let shift = quotient(&lm, &g.leading().0);
                let c = &lc / &g.leading().1;
                rest = rest.sub_scaled(&c, &shift, g, order);
            }
            None => {
                remainder.push((lm, lc));
                rest.terms.remove(0);
            }
        }
    }
    Poly { terms: remainder }
}

fn s_polynomial(f: &Poly, g: &Poly, order: MonomialOrder) -> Poly {
    let (fm, fc) = f.leading();
    let (gm, gc) = g.leading();
    let l = lcm(fm, gm);
    let a = f.mul_monomial(&quotient(&l, fm));
    let scale = fc / gc;
    a.sub_scaled(&scale, &quotient(&l, gm), g, order)
}

/// A reduced Gröbner basis: monic, autoreduced, sorted by ascending leading monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    arity: usize,
    order: MonomialOrder,
    elements: Vec<Poly>,
}

impl GroebnerBasis {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> Vec<LaurentPolynomial> {
        self.elements.iter().map(|p| p.to_laurent(self.arity)).collect()
    }

    pub fn leading_monomials(&self) -> Vec<ExponentVector> {
        self.elements
            .iter()
            .map(|p| ExponentVector(p.leading().0.iter().map(|&x| x as i64).collect()))
            .collect()
    }

    /// True when the basis is `{1}`.
    pub fn is_unit(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].leading().0.iter().all(|&x| x == 0)
    }

    /// Normal form of a polynomial (nonnegative exponents).
    pub fn reduce(&self, p: &LaurentPolynomial) -> Result<LaurentPolynomial, GroebnerError> {
        let poly = Poly::from_laurent(p, self.order)?;
        Ok(normal_form(&poly, &self.elements, self.order).to_laurent(self.arity))
    }

    /// Checks Buchberger's criterion: every S-polynomial reduces to zero.
    pub fn s_pairs_reduce_to_zero(&self) -> bool {
        let g = &self.elements;
        (0..g.len()).all(|i| {
            (i + 1..g.len()).all(|j| normal_form(&s_polynomial(&g[i], &g[j], self.order), g, self.order).is_zero())
        })
    }

    /// Text dump, one element per line.
    pub fn dump(&self) -> String {
        self.elements()
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens` (nonnegative exponents).
///
/// Buchberger's algorithm with the normal selection strategy (smallest lcm
/// first), the coprime and chain criteria, and full reduction.
pub fn groebner_basis(
    gens: &[LaurentPolynomial],
    order: MonomialOrder,
    budget: Budget,
) -> Result<GroebnerBasis, GroebnerError> {
    let arity = gens.first().map_or(0, LaurentPolynomial::arity);
    let mut basis: Vec<Poly> = Vec::new();
    for g in gens {
        if g.arity() != arity {
            return Err(GroebnerError::ArityMismatch {
                expected: arity,
                found: g.arity(),
            });
        }
        let mut p = normal_form(&Poly::from_laurent(g, order)?, &basis, order);
        if !p.is_zero() {
            p.make_monic();
            basis.push(p);
        }
    }
    let mut pending: Vec<(usize, usize)> = Vec::new();
    let mut pending_set: HashSet<(usize, usize)> = HashSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pending.push((i, j));
            pending_set.insert((i, j));
        }
    }
    let mut processed = 0usize;
    while !pending.is_empty() {
        if basis.iter().any(|g| g.leading().0.iter().all(|&x| x == 0)) {
            break;
        }
        // normal strategy: smallest lcm of leading monomials
        let (best, _) = pending
            .iter()
            .enumerate()
            .min_by(|(_, &(a, b)), (_, &(c, d))| {
                let l1 = lcm(&basis[a].leading().0, &basis[b].leading().0);
                let l2 = lcm(&basis[c].leading().0, &basis[d].leading().0);
                order.compare(&l1, &l2).then((a, b).cmp(&(c, d)))
            })
            .expect("nonempty");
        let (i, j) = pending.swap_remove(best);
        pending_set.remove(&(i, j));
        processed += 1;
        if processed > budget.max_pairs {
            return Err(GroebnerError::ResourceLimit { pairs: processed - 1 });
        }
        let (li, lj) = (&basis[i].leading().0, &basis[j].leading().0);
        if coprime(li, lj) {
            continue;
        }
        let l = lcm(li, lj);
        let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && divides(&basis[k].leading().0, &l)
                && !pending_set.contains(&key(i, k))
                && !pending_set.contains(&key(j, k))
        });
        if chain {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j], order);
        let mut r = normal_form(&s, &basis, order);
        if r.is_zero() {
            continue;
        }
        r.make_monic();
        let new = basis.len();
        basis.push(r);
        for k in 0..new {
            pending.push((k, new));
            pending_set.insert((k, new));
        }
    }
    Ok(GroebnerBasis {
        arity,
        order,
        elements: reduce_basis(basis, order),
    })
}

fn reduce_basis(basis: Vec<Poly>, order: MonomialOrder) -> Vec<Poly> {
    if let Some(unit) = basis.iter().find(|g| g.leading().0.iter().all(|&x| x == 0)) {
        let mut one = unit.clone();
        one.terms.truncate(1);
        one.make_monic();
        return vec![one];
    }
    // minimal basis: drop elements whose leading monomial is divisible by another's
    let mut minimal: Vec<Poly> = Vec::new();
    for (idx, g) in basis.iter().enumerate() {
        let lm = &g.leading().0;
        let redundant = basis.iter().enumerate().any(|(k, h)| {
            k != idx && divides(&h.leading().0, lm) && (h.leading().0 != *lm || k < idx)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for idx in 0..minimal.len() {
        let others: Vec<Poly> = minimal
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != idx)
            .map(|(_, p)| p.clone())
            .collect();
        let (lm, lc) = minimal[idx].leading().clone();
        let tail = Poly {
            terms: minimal[idx].terms[1..].to_vec(),
        };
        let mut p = normal_form(&tail, &others, order);
        p.terms.insert(0, (lm, lc));
        p.make_monic();
        reduced.push(p);
    }
    reduced.sort_by(|a, b| order.compare(&a.leading().0, &b.leading().0));
    reduced
}

/// An ideal of the Laurent ring, stored by polynomial-ring generators.
///
/// Each input generator is multiplied by the monomial that makes its smallest
/// exponent in every variable equal to zero; that monomial is kept in
/// `clearing`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ideal {
    arity: usize,
    generators: Vec<LaurentPolynomial>,
    clearing: Vec<ExponentVector>,
}

impl Ideal {
    pub fn from_laurent(arity: usize, gens: Vec<LaurentPolynomial>) -> Self {
        let mut generators = Vec::with_capacity(gens.len());
        let mut clearing = Vec::with_capacity(gens.len());
        for g in gens {
            assert_eq!(g.arity(), arity, "generator arity mismatch");
            let shift = -&g.min_exponents();
            generators.push(g.shift(&shift));
            clearing.push(shift);
        }
        Self {
            arity,
            generators,
            clearing,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Cleared generators (nonnegative exponents).
    pub fn generators(&self) -> &[LaurentPolynomial] {
        &self.generators
    }

    pub fn clearing(&self) -> &[ExponentVector] {
        &self.clearing
    }

    pub fn groebner_basis(&self, order: MonomialOrder, budget: Budget) -> Result<GroebnerBasis, GroebnerError> {
        if self.generators.iter().all(LaurentPolynomial::is_zero) {
            return Ok(GroebnerBasis {
                arity: self.arity,
                order,
                elements: Vec::new(),
            });
        }
        groebner_basis(&self.generators, order, budget)
    }
}

/// `I : (x_1⋯x_n)^∞`, computed by eliminating `t` from `I + (t·x_1⋯x_n − 1)`.
pub fn saturate_torus(ideal: &Ideal, budget: Budget) -> Result<Ideal, GroebnerError> {
    let n = ideal.arity();
    let lift = |p: &LaurentPolynomial| {
        LaurentPolynomial::from_terms(
            n + 1,
            p.terms().map(|(e, c)| {
                let mut v = Vec::with_capacity(n + 1);
                v.push(0);
                v.extend(e.iter().copied());
                (ExponentVector(v), c.clone())
            }),
        )
    };
    let mut gens: Vec<LaurentPolynomial> = ideal
        .generators()
        .iter()
        .filter(|g| !g.is_zero())
        .map(lift)
        .collect();
    if gens.is_empty() {
        return Ok(Ideal::from_laurent(n, vec![LaurentPolynomial::zero(n)]));
    }
    let aux = LaurentPolynomial::from_terms(
        n + 1,
        [
            (ExponentVector(vec![1; n + 1]), Rational::one()),
            (ExponentVector::zero(n + 1), -Rational::one()),
        ],
    );
    gens.push(aux);
    let gb = groebner_basis(&gens, MonomialOrder::Elimination { block: 1 }, budget)?;
    let kept: Vec<LaurentPolynomial> = gb
        .elements()
        .into_iter()
        .filter(|p| p.terms().all(|(e, _)| e[0] == 0))
        .map(|p| {
            LaurentPolynomial::from_terms(
                n,
                p.terms().map(|(e, c)| (ExponentVector(e.as_slice()[1..].to_vec()), c.clone())),
            )
        })
        .collect();
    if kept.is_empty() {
        return Ok(Ideal::from_laurent(n, vec![LaurentPolynomial::zero(n)]));
    }
    Ok(Ideal::from_laurent(n, kept))
}

/// `k[x]/I` for a zero-dimensional `I`, with a monomial basis and the matrices
/// of multiplication by each variable.
#[derive(Clone, Debug)]
pub struct QuotientRing {
    basis_gb: GroebnerBasis,
    basis: Vec<ExponentVector>,
    index: HashMap<ExponentVector, usize>,
    mult_matrices: Vec<Matrix>,
    inverses: Vec<Option<Matrix>>,
}

impl QuotientRing {
    pub fn basis(&self) -> &[ExponentVector] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn arity(&self) -> usize {
        self.basis_gb.arity
    }

    pub fn groebner_basis(&self) -> &GroebnerBasis {
        &self.basis_gb
    }

    /// `M_i`: column `c` holds the coordinates of `x_i · basis[c]`.
    pub fn mult_matrices(&self) -> &[Matrix] {
        &self.mult_matrices
    }

    /// `M_i^{-1}` when multiplication by `x_i` is invertible on the quotient.
    pub fn inverse_matrix(&self, i: usize) -> Option<&Matrix> {
        self.inverses[i].as_ref()
    }

    /// Coordinates of the class of a polynomial (nonnegative exponents).
    pub fn coordinates(&self, p: &LaurentPolynomial) -> Result<Vec<Rational>, GroebnerError> {
        let nf = self.basis_gb.reduce(p)?;
        let mut v = vec![Rational::zero(); self.basis.len()];
        for (e, c) in nf.terms() {
            let k = self.index[e];
            v[k] = c.clone();
        }
        Ok(v)
    }

    /// Coordinates of the basis monomial `1`.
    pub fn unit_vector(&self) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.basis.len()];
        if let Some(&k) = self.index.get(&ExponentVector::zero(self.arity())) {
            v[k] = Rational::one();
        }
        v
    }

    /// Class of the Laurent monomial `x^m`: `(∏ M_i^{m_i})·[1]`, using inverses
    /// for negative exponents.
    pub fn laurent_class_vector(&self, m: &ExponentVector) -> Result<Vec<Rational>, GroebnerError> {
        if let Some(i) = self.inverses.iter().position(Option::is_none) {
            return Err(GroebnerError::SingularMultiplication { variable: i });
        }
        let mut v = self.unit_vector();
        for (i, &k) in m.iter().enumerate() {
            let mat = if k >= 0 {
                &self.mult_matrices[i]
            } else {
                self.inverses[i].as_ref().expect("checked")
            };
            for _ in 0..k.unsigned_abs() {
                v = mat.mul_vec(&v);
            }
        }
        Ok(v)
    }
}

/// Builds the quotient ring of a reduced Gröbner basis.
pub fn quotient_ring(gb: &GroebnerBasis) -> Result<QuotientRing, GroebnerError> {
    let n = gb.arity;
    let lms: Vec<Monomial> = gb.elements.iter().map(|p| p.leading().0.clone()).collect();
    let mut bounds = Vec::with_capacity(n);
    for i in 0..n {
        let pure = lms
            .iter()
            .filter(|m| m.iter().enumerate().all(|(k, &x)| k == i || x == 0))
            .map(|m| m[i])
            .min();
        match pure {
            Some(d) => bounds.push(d),
            None => return Err(GroebnerError::InfiniteQuotient { variable: i }),
        }
    }
    let mut basis: Vec<Monomial> = Vec::new();
    let mut current = vec![0u32; n];
    'outer: loop {
        if !lms.iter().any(|l| divides(l, &current)) {
            basis.push(current.clone());
        }
        for i in 0..n {
            current[i] += 1;
            if current[i] < bounds[i] {
                continue 'outer;
            }
            current[i] = 0;
        }
        break;
    }
    if n == 0 {
        basis = if lms.is_empty() { vec![vec![]] } else { vec![] };
    }
    basis.sort_by(|a, b| gb.order.compare(a, b));
    let basis: Vec<ExponentVector> = basis
        .into_iter()
        .map(|m| ExponentVector(m.into_iter().map(i64::from).collect()))
        .collect();
    let index: HashMap<ExponentVector, usize> = basis.iter().cloned().enumerate().map(|(k, e)| (e, k)).collect();
    let mu = basis.len();
    let mut ring = QuotientRing {
        basis_gb: gb.clone(),
        basis,
        index,
        mult_matrices: Vec::new(),
        inverses: Vec::new(),
    };
    for i in 0..n {
        let mut m = Matrix::zeros(mu, mu);
        for (c, b) in ring.basis.iter().enumerate() {
            let shifted = b + &ExponentVector::unit(n, i);
            let col = ring.coordinates(&LaurentPolynomial::monomial(Rational::one(), shifted))?;
            m.set_column(c, &col);
        }
        ring.inverses.push(m.inverse());
        ring.mult_matrices.push(m);
    }
    Ok(ring)
}
