//! Dense univariate polynomials over the rationals, and bivariate operator
//! polynomials in `(s, ħ)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{int, Rational};

/// `Σ coeffs[k]·s^k`, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `s^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = Rational::one();
        Self { coeffs }
    }

    /// `s + c`.
    pub fn linear(c: Rational) -> Self {
        Self::from_coeffs(vec![c, Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Multiplication by `s^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// `P(s + c)`.
    pub fn translate(&self, c: &Rational) -> Self {
        let lin = Self::linear(c.clone());
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, a| acc.mul(&lin).add(&Self::constant(a.clone())))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, a| acc * x + a)
    }

    /// Coefficient vector of length `len` (zero padded). Panics if too short.
    pub fn to_vector(&self, len: usize) -> Vec<Rational> {
        assert!(self.coeffs.len() <= len, "polynomial does not fit");
        (0..len).map(|k| self.coeff(k)).collect()
    }
}

fn write_poly<F: Fn(usize) -> String>(
    f: &mut fmt::Formatter<'_>,
    coeffs: &[(usize, Rational)],
    mono: F,
) -> fmt::Result {
    if coeffs.is_empty() {
        return write!(f, "0");
    }
    for (idx, (k, c)) in coeffs.iter().enumerate() {
        let m = mono(*k);
        let neg = c.is_negative();
        let a = c.abs();
        if idx == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { " - " } else { " + " })?;
        }
        if m.is_empty() {
            write!(f, "{a}")?;
        } else if a.is_one() {
            write!(f, "{m}")?;
        } else {
            write!(f, "{a}*{m}")?;
        }
    }
    Ok(())
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(usize, Rational)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.clone()))
            .collect();
        write_poly(f, &terms, |k| match k {
            0 => String::new(),
            1 => "s".into(),
            k => format!("s^{k}"),
        })
    }
}

/// Polynomial in `s` whose coefficients are polynomials in `ħ`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OperatorPolynomial {
    /// `(s-degree, ħ-degree) → coefficient`, nonzero entries only.
    terms: BTreeMap<(usize, usize), Rational>,
}

impl OperatorPolynomial {
    pub fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0, 0), Rational::one());
        Self { terms }
    }

    /// `s + c·ħ`.
    pub fn linear(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((1, 0), Rational::one());
        if !c.is_zero() {
            terms.insert((0, 1), c);
        }
        Self { terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &other.terms {
                *terms.entry((a + c, b + d)).or_insert_with(Rational::zero) += x * y;
            }
        }
        terms.retain(|_, v| !v.is_zero());
        Self { terms }
    }

    pub fn coefficient(&self, s_degree: usize, hbar_degree: usize) -> Rational {
        self.terms
            .get(&(s_degree, hbar_degree))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn s_degree(&self) -> Option<usize> {
        self.terms.keys().map(|(s, _)| *s).max()
    }

    /// Monic in `s` with leading coefficient free of `ħ`.
    pub fn is_monic(&self) -> bool {
        match self.s_degree() {
            None => false,
            Some(d) => {
                self.coefficient(d, 0).is_one() && self.terms.keys().filter(|(s, _)| *s == d).count() == 1
            }
        }
    }

    /// Every term has total degree equal to the `s`-degree.
    pub fn is_homogeneous(&self) -> bool {
        let d = self.s_degree().unwrap_or(0);
        self.terms.keys().all(|(s, h)| s + h == d)
    }

    /// Specializes `ħ` to a value.
    pub fn at_hbar(&self, hbar: &Rational) -> UniPoly {
        let d = self.s_degree().map_or(0, |d| d + 1);
        let mut coeffs = vec![Rational::zero(); d];
        for ((s, h), c) in &self.terms {
            coeffs[*s] += c * pow(hbar, *h);
        }
        UniPoly::from_coeffs(coeffs)
    }
}

fn pow(x: &Rational, k: usize) -> Rational {
    (0..k).fold(int(1), |acc, _| acc * x)
}

impl fmt::Display for OperatorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let keys: Vec<(usize, usize)> = self.terms.keys().rev().copied().collect();
        let terms: Vec<(usize, Rational)> = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (i, self.terms[k].clone()))
            .collect();
        write_poly(f, &terms, |i| {
            let (s, h) = keys[i];
            let mut parts = Vec::new();
            match s {
                0 => {}
                1 => parts.push("s".to_string()),
                s => parts.push(format!("s^{s}")),
            }
            match h {
                0 => {}
                1 => parts.push("hbar".to_string()),
                h => parts.push(format!("hbar^{h}")),
            }
            parts.join("*")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn arithmetic() {
        let p = UniPoly::linear(rat(1, 2));
        assert_eq!(p.mul(&p).to_string(), "s^2 + s + 1/4");
        assert_eq!(p.sub(&p), UniPoly::zero());
        assert_eq!(p.degree(), Some(1));
        assert_eq!(UniPoly::zero().degree(), None);
        assert_eq!(UniPoly::monomial(2).translate(&int(1)).to_string(), "s^2 + 2*s + 1");
        assert_eq!(UniPoly::monomial(2).eval(&int(3)), int(9));
        assert_eq!(UniPoly::linear(int(-1)).to_string(), "s - 1");
    }

    #[test]
    fn operator_polynomials() {
        let p = OperatorPolynomial::linear(rat(1, 2)).mul(&OperatorPolynomial::linear(int(1)));
        assert_eq!(p.to_string(), "s^2 + 3/2*s*hbar + 1/2*hbar^2");
        assert!(p.is_monic());
        assert!(p.is_homogeneous());
        assert_eq!(p.at_hbar(&int(1)).to_string(), "s^2 + 3/2*s + 1/2");
        assert_eq!(OperatorPolynomial::linear(int(0)).to_string(), "s");
    }
}
