//! Truncated model of `O(*P)[v]·e^{vf}` in a normal-crossing chart with
//! `f = x^{-e}`, and exact checks of the V-filtration identities there.
//!
//! Everything is graded by the weight `w = m + j·e` of `x^m v^j`, which
//! `v∂_v` preserves. Inside one weight a section is a polynomial
//! `S(s) = Σ c_j s^j ↔ Σ c_j x^{w−je} v^j`, multiplication by `v` is `s`
//! (moving to weight `w + e`), and `v∂_v` acts as `T = s·d/ds + s`.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::laurent::{ExponentVector, LaurentPolynomial};
use crate::linalg::{self, RowEchelon};
use crate::rational::{floor_i64, int, rat, Rational};
use crate::unipoly::{OperatorPolynomial, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("truncation overflow: {0}")]
    TruncationOverflow(String),
    #[error("section is not in V_{beta} (first failure at weight {weight:?})")]
    NotRepresentable { beta: String, weight: Vec<i64> },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChartBounds {
    /// Lower bound on every x-exponent.
    pub min_exponent: i64,
    pub max_v_degree: u32,
    pub max_op_degree: u32,
    /// Upper bound on every component of the weight `m + j·e`.
    pub max_weight: i64,
}

impl Default for ChartBounds {
    fn default() -> Self {
        Self {
            min_exponent: -8,
            max_v_degree: 6,
            max_op_degree: 6,
            max_weight: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChartSpec {
    e: Vec<i64>,
    bounds: ChartBounds,
}

impl ChartSpec {
    pub fn new(e: Vec<i64>, bounds: ChartBounds) -> Result<Self, ChartError> {
        if e.is_empty() || e.len() > 3 {
            return Err(ChartError::InvalidChart(format!("need 1 to 3 x-variables, got {}", e.len())));
        }
        if let Some(bad) = e.iter().find(|&&x| x < 1) {
            return Err(ChartError::InvalidChart(format!("pole orders must be positive, got {bad}")));
        }
        if bounds.min_exponent > bounds.max_weight {
            return Err(ChartError::InvalidChart("min exponent exceeds max weight".into()));
        }
        Ok(Self { e, bounds })
    }

    pub fn ell(&self) -> usize {
        self.e.len()
    }

    pub fn e(&self) -> &[i64] {
        &self.e
    }

    pub fn bounds(&self) -> ChartBounds {
        self.bounds
    }

    pub fn lcm_e(&self) -> i64 {
        self.e.iter().fold(1, |acc, x| acc.lcm(x))
    }

    /// Largest v-degree available at weight `w`, or `None` outside the box.
    pub fn degree_cap(&self, w: &[i64]) -> Option<usize> {
        let b = self.bounds;
        if w.iter().any(|&x| x < b.min_exponent || x > b.max_weight) {
            return None;
        }
        let by_exp = w
            .iter()
            .zip(&self.e)
            .map(|(wi, ei)| (wi - b.min_exponent).div_euclid(*ei))
            .min()
            .expect("ell >= 1");
        Some(by_exp.min(b.max_v_degree as i64) as usize)
    }

    /// All weights of the truncated space.
    pub fn weights(&self) -> Vec<ExponentVector> {
        let b = self.bounds;
        let mut out = Vec::new();
        let mut cur = vec![b.min_exponent; self.ell()];
        'outer: loop {
            out.push(ExponentVector(cur.clone()));
            for x in cur.iter_mut() {
                if *x < b.max_weight {
                    *x += 1;
                    continue 'outer;
                }
                *x = b.min_exponent;
            }
            break;
        }
        out
    }

    pub fn fits(&self, m: &ExponentVector, j: u32) -> bool {
        let w = self.weight(m, j);
        j <= self.bounds.max_v_degree
            && m.iter().all(|&x| x >= self.bounds.min_exponent)
            && w.iter().all(|&x| x <= self.bounds.max_weight)
    }

    pub fn weight(&self, m: &ExponentVector, j: u32) -> ExponentVector {
        ExponentVector(m.iter().zip(&self.e).map(|(mi, ei)| mi + j as i64 * ei).collect())
    }

    /// `[βe]`, componentwise floor.
    pub fn floor_scaled(&self, beta: &Rational) -> Vec<i64> {
        self.e.iter().map(|&ei| floor_i64(&(beta * int(ei)))).collect()
    }
}

/// Finite sum `Σ c·x^m v^j · e^{vf}`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ChartSection {
    ell: usize,
    terms: BTreeMap<(ExponentVector, u32), Rational>,
}

impl ChartSection {
    pub fn zero(ell: usize) -> Self {
        Self {
            ell,
            terms: BTreeMap::new(),
        }
    }

    /// `e^{vf}` itself.
    pub fn exp_vf(ell: usize) -> Self {
        Self::monomial(ExponentVector::zero(ell), 0, Rational::one())
    }

    pub fn monomial(m: ExponentVector, j: u32, c: Rational) -> Self {
        let mut s = Self::zero(m.arity());
        s.add_term(m, j, c);
        s
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn add_term(&mut self, m: ExponentVector, j: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key = (m, j);
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, u32, &Rational)> {
        self.terms.iter().map(|((m, j), c)| (m, *j, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, j, c) in other.terms() {
            out.add_term(m.clone(), j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.ell);
        for (m, j, x) in self.terms() {
            out.add_term(m.clone(), j, x * c);
        }
        out
    }

    /// Multiplication by `v^k`.
    pub fn mul_v(&self, k: u32) -> Self {
        let mut out = Self::zero(self.ell);
        for (m, j, c) in self.terms() {
            out.add_term(m.clone(), j + k, c.clone());
        }
        out
    }

    /// `x^w · S(s)`, i.e. `Σ S_k x^{w−ke} v^k`.
    pub fn from_weight_poly(spec: &ChartSpec, w: &ExponentVector, poly: &UniPoly) -> Self {
        let mut out = Self::zero(spec.ell());
        for (k, c) in poly.coeffs().iter().enumerate() {
            let m = ExponentVector(w.iter().zip(spec.e()).map(|(wi, ei)| wi - k as i64 * ei).collect());
            out.add_term(m, k as u32, c.clone());
        }
        out
    }

    /// Splits into weight components.
    pub fn weight_components(&self, spec: &ChartSpec) -> BTreeMap<ExponentVector, UniPoly> {
        let mut parts: BTreeMap<ExponentVector, Vec<Rational>> = BTreeMap::new();
        for (m, j, c) in self.terms() {
            let v = parts.entry(spec.weight(m, j)).or_default();
            if v.len() <= j as usize {
                v.resize(j as usize + 1, Rational::zero());
            }
            v[j as usize] = c.clone();
        }
        parts.into_iter().map(|(w, c)| (w, UniPoly::from_coeffs(c))).collect()
    }

    pub fn check_fits(&self, spec: &ChartSpec) -> Result<(), ChartError> {
        match self.terms().find(|(m, j, _)| !spec.fits(m, *j)) {
            None => Ok(()),
            Some((m, j, _)) => Err(ChartError::TruncationOverflow(format!(
                "term x^{:?} v^{j} outside the truncation",
                m.as_slice()
            ))),
        }
    }
}

fn x_names(ell: usize) -> Vec<String> {
    if ell == 1 {
        vec!["x".into()]
    } else {
        (1..=ell).map(|i| format!("x{i}")).collect()
    }
}

impl fmt::Display for ChartSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = x_names(self.ell);
        let mut ordered: Vec<(&(ExponentVector, u32), &Rational)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| (b.0 .1, &b.0 .0).cmp(&(a.0 .1, &a.0 .0)));
        for (idx, ((m, j), c)) in ordered.into_iter().enumerate() {
            let mut parts: Vec<String> = Vec::new();
            for (i, &k) in m.iter().enumerate() {
                match k {
                    0 => {}
                    1 => parts.push(names[i].clone()),
                    k => parts.push(format!("{}^{k}", names[i])),
                }
            }
            match j {
                0 => {}
                1 => parts.push("v".into()),
                j => parts.push(format!("v^{j}")),
            }
            let mono = parts.join("*");
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            match (mono.is_empty(), a.is_one()) {
                (true, _) => write!(f, "{a}")?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{a}*{mono}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for ChartSection {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `v∂_v(x^m v^j e^{vf}) = j·x^m v^j e^{vf} + x^{m−e} v^{j+1} e^{vf}`.
pub fn vpartial_apply(sec: &ChartSection, spec: &ChartSpec) -> Result<ChartSection, ChartError> {
    let mut out = ChartSection::zero(spec.ell());
    for (m, j, c) in sec.terms() {
        let shifted = ExponentVector(m.iter().zip(spec.e()).map(|(a, b)| a - b).collect());
        if !spec.fits(&shifted, j + 1) {
            return Err(ChartError::TruncationOverflow(format!(
                "v∂_v sends x^{:?} v^{j} to x^{:?} v^{}",
                m.as_slice(),
                shifted.as_slice(),
                j + 1
            )));
        }
        out.add_term(m.clone(), j, c * int(j as i64));
        out.add_term(shifted, j + 1, c.clone());
    }
    Ok(out)
}

/// `P(v∂_v)·sec`.
pub fn apply_operator(p: &UniPoly, sec: &ChartSection, spec: &ChartSpec) -> Result<ChartSection, ChartError> {
    let deg = p.degree().unwrap_or(0);
    if deg > spec.bounds().max_op_degree as usize {
        return Err(ChartError::TruncationOverflow(format!(
            "operator degree {deg} exceeds {}",
            spec.bounds().max_op_degree
        )));
    }
    let mut power = sec.clone();
    let mut out = ChartSection::zero(spec.ell());
    for (k, c) in p.coeffs().iter().enumerate() {
        if k > 0 {
            power = vpartial_apply(&power, spec)?;
        }
        out = out.add(&power.scale(c));
    }
    Ok(out)
}

/// `T(s^k) = k·s^k + s^{k+1}`.
pub fn t_operator(p: &UniPoly) -> UniPoly {
    let mut out = vec![Rational::zero(); p.coeffs().len() + 1];
    for (k, c) in p.coeffs().iter().enumerate() {
        out[k] += c * int(k as i64);
        out[k + 1] += c.clone();
    }
    UniPoly::from_coeffs(out)
}

/// The `Q` with `P(v∂_v)e^{vf} = Q(vf)e^{vf}`, namely `Q = P(T)(1)`.
pub fn pq_convert(p: &UniPoly) -> UniPoly {
    let mut power = UniPoly::one();
    let mut out = UniPoly::zero();
    for (k, c) in p.coeffs().iter().enumerate() {
        if k > 0 {
            power = t_operator(&power);
        }
        out = out.add(&power.scale(c));
    }
    out
}

/// Checks `P(v∂_v)(x^w e^{vf}) = x^w Q(vf) e^{vf}` by expansion in the truncation.
pub fn pq_identity_holds(p: &UniPoly, w: &ExponentVector, spec: &ChartSpec) -> Result<bool, ChartError> {
    let start = ChartSection::monomial(w.clone(), 0, Rational::one());
    start.check_fits(spec)?;
    let lhs = apply_operator(p, &start, spec)?;
    let rhs = ChartSection::from_weight_poly(spec, w, &pq_convert(p));
    Ok(lhs == rhs)
}

/// `P_{a,β}(s) = ∏_i ∏_{k=1}^{a_i} (s + ([βe_i]+k)/e_i)`.
pub fn p_poly(a: &[i64], e: &[i64], beta: &Rational) -> UniPoly {
    let mut out = UniPoly::one();
    for (ai, ei) in a.iter().zip(e) {
        let fl = floor_i64(&(beta * int(*ei)));
        for k in 1..=*ai {
            out = out.mul(&UniPoly::linear(rat(fl + k, *ei)));
        }
    }
    out
}

/// `P_{a,λ,β}(s) = (s+β)^λ P_{a,β}(s)`.
pub fn p_poly_lambda(a: &[i64], lambda: u32, e: &[i64], beta: &Rational) -> UniPoly {
    UniPoly::linear(beta.clone()).pow(lambda).mul(&p_poly(a, e, beta))
}

/// `Q_{a,λ,β}`, the image of `P_{a,λ,β}` under [`pq_convert`].
pub fn q_poly(a: &[i64], lambda: u32, e: &[i64], beta: &Rational) -> UniPoly {
    pq_convert(&p_poly_lambda(a, lambda, e, beta))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HbarVariant {
    /// `∏_{j=1}^{a_i} (s + (j + [αe_i])ħ/e_i)`.
    Alpha,
    /// `∏_{j=0}^{a_i−1} (s + (j + ⌈αe_i⌉)ħ/e_i)`.
    Strict,
}

impl std::str::FromStr for HbarVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "alpha" => Ok(HbarVariant::Alpha),
            "strict" => Ok(HbarVariant::Strict),
            other => Err(format!("unknown variant {other:?}")),
        }
    }
}

pub fn p_poly_hbar(a: &[i64], e: &[i64], alpha: &Rational, variant: HbarVariant) -> OperatorPolynomial {
    let mut out = OperatorPolynomial::one();
    for (ai, ei) in a.iter().zip(e) {
        let scaled = alpha * int(*ei);
        let (range, base) = match variant {
            HbarVariant::Alpha => (1..=*ai, floor_i64(&scaled)),
            HbarVariant::Strict => (0..=*ai - 1, crate::rational::ceil_i64(&scaled)),
        };
        for j in range {
            out = out.mul(&OperatorPolynomial::linear(rat(j + base, *ei)));
        }
    }
    out
}

/// The unique `(a, c)` with `x^c·x^{−[βe]−1−a}` of weight `w` and `c_i·a_i = 0`.
pub fn index_for_weight(w: &[i64], beta: &Rational, e: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let mut a = Vec::with_capacity(w.len());
    let mut c = Vec::with_capacity(w.len());
    for (wi, ei) in w.iter().zip(e) {
        let d = wi + floor_i64(&(beta * int(*ei))) + 1;
        a.push((-d).max(0));
        c.push(d.max(0));
    }
    (a, c)
}

/// Basis of `V_β` at weight `w` among polynomials of degree `≤ cap`; any rational `β`.
pub fn v_basis(spec: &ChartSpec, beta: &Rational, w: &ExponentVector, cap: i64) -> Vec<UniPoly> {
    if beta.is_negative() {
        // V_{β} = v^j V_{β+j}
        let j = crate::rational::ceil_i64(&-beta);
        let lower = ExponentVector(w.iter().zip(spec.e()).map(|(wi, ei)| wi - j * ei).collect());
        return v_basis(spec, &(beta + int(j)), &lower, cap - j)
            .into_iter()
            .map(|q| q.shift_up(j as usize))
            .collect();
    }
    let (a, _) = index_for_weight(w.as_slice(), beta, spec.e());
    let size: i64 = a.iter().sum();
    (0..=cap - size)
        .map(|lambda| q_poly(&a, lambda as u32, spec.e(), beta))
        .collect()
}

/// Coefficients `h_{a,λ,β}` keyed by `(a, λ)`.
pub type VDecomposition = BTreeMap<(ExponentVector, u32), LaurentPolynomial>;

/// Writes `sec` as `Σ h_{a,λ,β}·x^{−[βe]−1−a}·Q_{a,λ,β}(vf)e^{vf}`.
pub fn decompose_vbeta(sec: &ChartSection, beta: &Rational, spec: &ChartSpec) -> Result<VDecomposition, ChartError> {
    if beta.is_negative() {
        return Err(ChartError::InvalidChart("decomposition needs β ≥ 0".into()));
    }
    sec.check_fits(spec)?;
    let ell = spec.ell();
    let mut out: VDecomposition = BTreeMap::new();
    for (w, mut rest) in sec.weight_components(spec) {
        let (a, c) = index_for_weight(w.as_slice(), beta, spec.e());
        let size = a.iter().sum::<i64>() as usize;
        while let Some(d) = rest.degree() {
            if d < size {
                return Err(ChartError::NotRepresentable {
                    beta: beta.to_string(),
                    weight: w.0.clone(),
                });
            }
            let lambda = (d - size) as u32;
            let coef = rest.leading();
            rest = rest.sub(&q_poly(&a, lambda, spec.e(), beta).scale(&coef));
            let h = out
                .entry((ExponentVector(a.clone()), lambda))
                .or_insert_with(|| LaurentPolynomial::zero(ell));
            h.add_term(ExponentVector(c.clone()), coef);
        }
    }
    out.retain(|_, h| !h.is_zero());
    Ok(out)
}

/// Inverse of [`decompose_vbeta`].
pub fn recompose(dec: &VDecomposition, beta: &Rational, spec: &ChartSpec) -> ChartSection {
    let fl = spec.floor_scaled(beta);
    let mut out = ChartSection::zero(spec.ell());
    for ((a, lambda), h) in dec {
        let q = q_poly(a.as_slice(), *lambda, spec.e(), beta);
        for (c, coef) in h.terms() {
            let w = ExponentVector((0..spec.ell()).map(|i| c[i] - fl[i] - 1 - a[i]).collect());
            out = out.add(&ChartSection::from_weight_poly(spec, &w, &q).scale(coef));
        }
    }
    out
}

/// The threshold rule for `V_{<β}` on a decomposition at `β`.
///
/// Each monomial `x^c` of `h_{a,λ,β}` is tested on its own: the indices with
/// `c_i > 0` already push the term below `β`, so only the remaining indices
/// count towards the required power of `s + β`.
pub fn in_v_strictly_less(dec: &VDecomposition, beta: &Rational, e: &[i64]) -> bool {
    dec.iter().all(|((_, lambda), h)| {
        h.terms().all(|(c, _)| *lambda as usize >= lambda_threshold(c.as_slice(), beta, e))
    })
}

fn lambda_threshold(c: &[i64], beta: &Rational, e: &[i64]) -> usize {
    let free = (0..e.len()).filter(|&i| c[i] == 0);
    if beta.is_positive() {
        free.filter(|&i| (beta * int(e[i])).is_integer()).count()
    } else {
        free.count() + 1
    }
}

/// Membership in `V_β` by solving a linear system per weight.
pub fn in_v(sec: &ChartSection, beta: &Rational, spec: &ChartSpec) -> Result<bool, ChartError> {
    sec.check_fits(spec)?;
    for (w, poly) in sec.weight_components(spec) {
        let cap = spec.degree_cap(w.as_slice()).expect("fits") as i64;
        let len = cap as usize + 1;
        let columns: Vec<Vec<Rational>> = v_basis(spec, beta, &w, cap)
            .iter()
            .map(|q| q.to_vector(len))
            .collect();
        if linalg::solve_columns(&columns, &poly.to_vector(len)).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `V_{<β} = V_{β−ε}` with `ε` below the distance from `β` to the next jump
/// point of `(1/lcm(e))·Z` underneath it, decided by [`in_v`].
pub fn in_v_less_linear(sec: &ChartSection, beta: &Rational, spec: &ChartSpec) -> Result<bool, ChartError> {
    let den = i64::try_from(beta.denom().clone()).map_err(|_| ChartError::InvalidChart("denominator too large".into()))?;
    let eps = rat(1, 2 * spec.lcm_e() * den);
    in_v(sec, &(beta - eps), spec)
}

/// `|a|₊ = Σ max(a_i, 0)`.
pub fn plus_norm(a: &[i64]) -> i64 {
    a.iter().map(|&x| x.max(0)).sum()
}

/// `Σ |a_i|`, the variant that also counts negative entries.
pub fn abs_plus_norm(a: &[i64]) -> i64 {
    a.iter().map(|&x| x.abs()).sum()
}

/// `|a − (k−j)e|₊ ≤ j` for every `0 ≤ j ≤ k`.
pub fn precision_lemma_check(a: &[i64], e: &[i64], k: i64) -> bool {
    (0..=k).all(|j| {
        let shifted: Vec<i64> = a.iter().zip(e).map(|(ai, ei)| ai - (k - j) * ei).collect();
        plus_norm(&shifted) <= j
    })
}

/// `Σ_i max(−m_i − [γe_i] − 1, 0)`: the pole order of `x^m` beyond `x^{−[γe]−1}`.
fn pole_excess(m: &[i64], gamma: &Rational, e: &[i64]) -> i64 {
    m.iter()
        .zip(e)
        .map(|(mi, ei)| (-mi - floor_i64(&(gamma * int(*ei))) - 1).max(0))
        .sum()
}

/// `F_{α+p}` at weight `w`: the monomials `s^j` allowed by the pole-order filtration.
pub fn f_basis(spec: &ChartSpec, alpha: &Rational, p: i64, w: &ExponentVector) -> Vec<UniPoly> {
    let Some(cap) = spec.degree_cap(w.as_slice()) else {
        return Vec::new();
    };
    if p < 0 {
        return Vec::new();
    }
    let gamma = alpha + int(p);
    (0..=cap)
        .filter(|&j| {
            let m: Vec<i64> = w.iter().zip(spec.e()).map(|(wi, ei)| wi - j as i64 * ei).collect();
            pole_excess(&m, &gamma, spec.e()) <= p.min(j as i64)
        })
        .map(UniPoly::monomial)
        .collect()
}

/// `G_k ∩ V_β` at weight `w`, by intersecting the two spans.
pub fn g_cap_v(spec: &ChartSpec, k: i64, beta: &Rational, w: &ExponentVector) -> Vec<UniPoly> {
    let Some(cap) = spec.degree_cap(w.as_slice()) else {
        return Vec::new();
    };
    if k < 0 {
        return Vec::new();
    }
    let len = cap + 1;
    let g: Vec<Vec<Rational>> = (0..=(k as usize).min(cap))
        .map(|j| UniPoly::monomial(j).to_vector(len))
        .collect();
    let v: Vec<Vec<Rational>> = v_basis(spec, beta, w, cap as i64)
        .iter()
        .map(|q| q.to_vector(len))
        .collect();
    if v.is_empty() {
        return Vec::new();
    }
    // columns [G | −V]; null vectors (x, y) give Σ x_i G_i ∈ V
    let ncols = g.len() + v.len();
    let rows: Vec<Vec<Rational>> = (0..len)
        .map(|r| {
            g.iter()
                .map(|col| col[r].clone())
                .chain(v.iter().map(|col| -col[r].clone()))
                .collect()
        })
        .collect();
    linalg::nullspace(&rows, ncols)
        .into_iter()
        .map(|null| {
            let mut out = vec![Rational::zero(); len];
            for (x, col) in null.iter().zip(&g) {
                for (o, c) in out.iter_mut().zip(col) {
                    *o += x * c;
                }
            }
            UniPoly::from_coeffs(out)
        })
        .filter(|p| !p.is_zero())
        .collect()
}

/// `G_k ∩ V_β` at weight `w` as the span of basis elements with `|a| + λ ≤ k`.
pub fn g_cap_v_closed_form(spec: &ChartSpec, k: i64, beta: &Rational, w: &ExponentVector) -> Vec<UniPoly> {
    match spec.degree_cap(w.as_slice()) {
        Some(cap) if k >= 0 => v_basis(spec, beta, w, k.min(cap as i64)),
        _ => Vec::new(),
    }
}

/// `F′_{α+p} = Σ_{k+j≤p, k≥0} G_k ∩ V_{α+j}` at weight `w`. Only `j ≥ −k`
/// contributes, and `k` is bounded by the truncated v-degree.
pub fn f_prime_basis(spec: &ChartSpec, alpha: &Rational, p: i64, w: &ExponentVector) -> Vec<UniPoly> {
    let mut out = Vec::new();
    for k in 0..=spec.bounds().max_v_degree as i64 {
        for j in -k..=p - k {
            out.extend(g_cap_v(spec, k, &(alpha + int(j)), w));
        }
    }
    out
}

fn span_rank(polys: &[UniPoly], len: usize) -> usize {
    let rows: Vec<Vec<Rational>> = polys.iter().map(|p| p.to_vector(len)).collect();
    linalg::rank(&rows)
}

fn first_outside(candidates: &[UniPoly], span: &[UniPoly], len: usize) -> Option<UniPoly> {
    let mut ech = RowEchelon::new(len);
    for p in span {
        ech.insert(&p.to_vector(len));
    }
    candidates.iter().find(|p| !ech.contains(&p.to_vector(len))).cloned()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationComparison {
    #[serde(serialize_with = "crate::rational::serde_str::serialize")]
    pub alpha: Rational,
    pub p: i64,
    pub equal: bool,
    pub dim_f: usize,
    pub dim_f_prime: usize,
    pub offending: Option<ChartSection>,
}

/// Compares `F_{α+p}` and `F′_{α+p}` weight by weight on the truncated space.
pub fn filtration_compare(spec: &ChartSpec, alpha: &Rational, p: i64) -> Result<FiltrationComparison, ChartError> {
    if spec.ell() > 2 {
        return Err(ChartError::InvalidChart("filtration comparison supports at most 2 x-variables".into()));
    }
    if alpha.is_negative() || *alpha >= int(1) {
        return Err(ChartError::InvalidChart(format!("α = {alpha} is not in [0, 1)")));
    }
    let mut result = FiltrationComparison {
        alpha: alpha.clone(),
        p,
        equal: true,
        dim_f: 0,
        dim_f_prime: 0,
        offending: None,
    };
    for w in spec.weights() {
        let len = spec.degree_cap(w.as_slice()).expect("weight in range") + 1;
        let f = f_basis(spec, alpha, p, &w);
        let fp = f_prime_basis(spec, alpha, p, &w);
        let rf = span_rank(&f, len);
        let rfp = span_rank(&fp, len);
        let both: Vec<UniPoly> = f.iter().chain(&fp).cloned().collect();
        let rboth = span_rank(&both, len);
        result.dim_f += rf;
        result.dim_f_prime += rfp;
        if (rf != rboth || rfp != rboth) && result.equal {
            result.equal = false;
            let bad = first_outside(&f, &fp, len).or_else(|| first_outside(&fp, &f, len));
            result.offending = bad.map(|q| ChartSection::from_weight_poly(spec, &w, &q));
        }
    }
    Ok(result)
}

/// A random element of `V_β` built from a few basis elements.
pub fn random_v_section<R: Rng>(rng: &mut R, spec: &ChartSpec, beta: &Rational, terms: usize) -> ChartSection {
    let weights = spec.weights();
    let mut out = ChartSection::zero(spec.ell());
    for _ in 0..terms {
        let w = &weights[rng.gen_range(0..weights.len())];
        let cap = spec.degree_cap(w.as_slice()).expect("in range") as i64;
        let basis = v_basis(spec, beta, w, cap);
        if basis.is_empty() {
            continue;
        }
        let q = &basis[rng.gen_range(0..basis.len())];
        let c = rat(rng.gen_range(-5..=5), rng.gen_range(1..=3));
        out = out.add(&ChartSection::from_weight_poly(spec, w, q).scale(&c));
    }
    out
}

/// A random section of the truncated space (not necessarily in any `V_β`).
pub fn random_section<R: Rng>(rng: &mut R, spec: &ChartSpec, terms: usize) -> ChartSection {
    let weights = spec.weights();
    let mut out = ChartSection::zero(spec.ell());
    for _ in 0..terms {
        let w = &weights[rng.gen_range(0..weights.len())];
        let cap = spec.degree_cap(w.as_slice()).expect("in range");
        let j = rng.gen_range(0..=cap);
        let c = rat(rng.gen_range(-5..=5), rng.gen_range(1..=3));
        out = out.add(&ChartSection::from_weight_poly(spec, w, &UniPoly::monomial(j)).scale(&c));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub offending: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub chart: ChartSpec,
    #[serde(serialize_with = "crate::rational::serde_str::vec::serialize")]
    pub alphas: Vec<Rational>,
    pub p_max: i64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

struct Tally {
    name: &'static str,
    cases: usize,
    offending: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            offending: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.offending.is_none() {
            self.offending = Some(describe());
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.into(),
            passed: self.offending.is_none(),
            cases: self.cases,
            offending: self.offending,
        }
    }
}

/// Runs every local identity on one chart. Sections are drawn from a fixed seed.
pub fn verify_chart(spec: &ChartSpec, alphas: &[Rational], p_max: i64) -> Result<VerificationReport, ChartError> {
    let ell = spec.ell();
    let e = spec.e().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checks = Vec::new();
    let small_multi_indices: Vec<Vec<i64>> = {
        let mut out = vec![vec![]];
        for _ in 0..ell {
            out = out
                .into_iter()
                .flat_map(|v| (0..=3).map(move |k| [v.clone(), vec![k]].concat()))
                .collect();
        }
        out
    };

    // generator polynomials
    let mut t = Tally::new("p_poly");
    for alpha in alphas {
        for a in &small_multi_indices {
            let p = p_poly(a, &e, alpha);
            let deg = plus_norm(a) as usize;
            t.record(p.is_monic() && p.degree() == Some(deg), || format!("P_{{{a:?},{alpha}}} = {p}"));
            let h = p_poly_hbar(a, &e, alpha, HbarVariant::Alpha);
            t.record(h.is_homogeneous() && h.at_hbar(&int(1)) == p, || {
                format!("p_{{{a:?},{alpha}}}(s, 1) = {} differs from {p}", h.at_hbar(&int(1)))
            });
        }
    }
    checks.push(t.finish());

    // P ↦ Q at the top weight
    let top = ExponentVector(vec![spec.bounds().max_weight; ell]);
    let op_cap = (spec.bounds().max_op_degree as usize).min(spec.degree_cap(top.as_slice()).unwrap_or(0));
    let mut t = Tally::new("pq_convert");
    for d in 0..=op_cap {
        let mut p = UniPoly::monomial(d);
        for _ in 0..3 {
            let q = pq_convert(&p);
            let ok = q.is_monic() && q.degree() == p.degree() && pq_identity_holds(&p, &top, spec)?;
            t.record(ok, || format!("P = {p}, Q = {q}"));
            p = UniPoly::monomial(d).add(&random_lower(&mut rng, d));
        }
    }
    checks.push(t.finish());

    // v∂_v raises the F-index of the generators x^{−[αe]−1}
    let mut t = Tally::new("f_generation");
    for alpha in alphas {
        let m = ExponentVector(spec.floor_scaled(alpha).iter().map(|x| -x - 1).collect());
        let mut sec = ChartSection::monomial(m, 0, Rational::one());
        for p in 0..=p_max {
            if p > 0 {
                sec = vpartial_apply(&sec, spec)?;
            }
            let ok = sec.terms().all(|(m, j, _)| {
                let w = spec.weight(m, j);
                f_basis(spec, alpha, p, &w).contains(&UniPoly::monomial(j as usize))
            });
            t.record(ok, || format!("(v∂_v)^{p} x^{{-[αe]-1}} = {sec} not in F_{{{alpha}+{p}}}"));
        }
    }
    checks.push(t.finish());

    // unique decomposition, round trip and threshold rule
    let betas: Vec<Rational> = alphas.iter().flat_map(|a| [a.clone(), a + int(1)]).collect();
    let mut round = Tally::new("decompose_roundtrip");
    let mut grv = Tally::new("grV_threshold");
    let mut vmul = Tally::new("v_multiplication");
    for beta in &betas {
        for w in spec.weights() {
            let cap = spec.degree_cap(w.as_slice()).expect("in range");
            let basis = v_basis(spec, beta, &w, cap as i64);
            let rows: Vec<Vec<Rational>> = basis.iter().map(|q| q.to_vector(cap + 1)).collect();
            round.record(linalg::rank(&rows) == basis.len(), || format!("dependent V_{beta} basis at {w:?}"));
        }
        for _ in 0..20 {
            let sec = random_v_section(&mut rng, spec, beta, 3);
            let dec = decompose_vbeta(&sec, beta, spec)?;
            round.record(recompose(&dec, beta, spec) == sec, || sec.to_string());
            let rule = in_v_strictly_less(&dec, beta, &e);
            let linear = in_v_less_linear(&sec, beta, spec)?;
            grv.record(rule == linear, || format!("{sec} at β = {beta}"));
        }
        for w in spec.weights() {
            let cap = spec.degree_cap(w.as_slice()).expect("in range") as i64;
            for q in v_basis(spec, beta, &w, cap) {
                let sec = ChartSection::from_weight_poly(spec, &w, &q);
                let dec = decompose_vbeta(&sec, beta, spec)?;
                grv.record(in_v_strictly_less(&dec, beta, &e) == in_v_less_linear(&sec, beta, spec)?, || {
                    format!("{sec} at β = {beta}")
                });
                let (a, _) = index_for_weight(w.as_slice(), beta, &e);
                for j in 1..=2u32 {
                    let moved = sec.mul_v(j);
                    if moved.check_fits(spec).is_err() {
                        continue;
                    }
                    let expected: Vec<i64> = a.iter().zip(&e).map(|(ai, ei)| (ai - j as i64 * ei).max(0)).collect();
                    let ok = match decompose_vbeta(&moved, beta, spec) {
                        Ok(d) => d.keys().all(|(a2, _)| {
                            a2.as_slice() == expected.as_slice()
                                && (0..ell).all(|i| a[i] != 0 || a2[i] == 0)
                        }),
                        Err(_) => false,
                    };
                    vmul.record(ok, || format!("v^{j}·({sec}) at β = {beta}"));
                }
            }
        }
    }
    checks.push(round.finish());
    checks.push(grv.finish());
    checks.push(vmul.finish());

    let mut t = Tally::new("filtration_F_equals_F_prime");
    if ell <= 2 {
        for alpha in alphas {
            for p in -1..=p_max {
                let cmp = filtration_compare(spec, alpha, p)?;
                t.record(cmp.equal, || {
                    format!(
                        "α = {alpha}, p = {p}: {}",
                        cmp.offending.as_ref().map_or("rank mismatch".into(), |s| s.to_string())
                    )
                });
            }
        }
    }
    checks.push(t.finish());

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerificationReport {
        chart: spec.clone(),
        alphas: alphas.to_vec(),
        p_max,
        checks,
        passed,
    })
}

fn random_lower<R: Rng>(rng: &mut R, d: usize) -> UniPoly {
    UniPoly::from_coeffs((0..d).map(|_| rat(rng.gen_range(-4..=4), rng.gen_range(1..=3))).collect())
}
