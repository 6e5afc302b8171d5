//! Seeded random Laurent polynomials for sweeps and property checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::groebner::Budget;
use crate::laurent::{ExponentVector, LaurentPolynomial};
use crate::newton::{degenerate_face, NewtonPolytope};
use crate::rational::int;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusParams {
    pub max_arity: usize,
    /// Exponents are drawn from `[-max_exponent, max_exponent]`.
    pub max_exponent: i64,
    pub max_support: usize,
    /// Coefficients are drawn from `±1..=max_coefficient`.
    pub max_coefficient: i64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        Self {
            max_arity: 2,
            max_exponent: 2,
            max_support: 6,
            max_coefficient: 3,
        }
    }
}

/// One draw: arity in `1..=max_arity`, distinct nonzero exponents, nonzero
/// integer coefficients. No hypotheses are checked.
pub fn random_laurent<R: Rng>(rng: &mut R, params: &CorpusParams) -> LaurentPolynomial {
    let n = rng.gen_range(1..=params.max_arity);
    let r = params.max_exponent;
    let mut lattice: Vec<ExponentVector> = Vec::new();
    let mut stack = vec![Vec::new()];
    while let Some(v) = stack.pop() {
        if v.len() == n {
            if v.iter().any(|&x| x != 0) {
                lattice.push(ExponentVector(v));
            }
            continue;
        }
        for x in -r..=r {
            let mut w = v.clone();
            w.push(x);
            stack.push(w);
        }
    }
    lattice.sort();
    let size = rng.gen_range(n + 1..=params.max_support.max(n + 1)).min(lattice.len());
    let support: Vec<ExponentVector> = lattice.choose_multiple(rng, size).cloned().collect();
    let c = params.max_coefficient;
    LaurentPolynomial::from_terms(
        n,
        support.into_iter().map(|e| {
            let k = rng.gen_range(1..=c);
            (e, int(if rng.gen_bool(0.5) { k } else { -k }))
        }),
    )
}

/// Whether `f` is convenient and non-degenerate.
pub fn is_tame(f: &LaurentPolynomial, budget: Budget) -> bool {
    match NewtonPolytope::of(f) {
        Ok(p) if p.is_convenient() => matches!(degenerate_face(f, budget), Ok(None)),
        _ => false,
    }
}

/// `count` convenient non-degenerate draws from a fixed seed; other draws are
/// discarded.
pub fn tame_corpus(seed: u64, count: usize, params: &CorpusParams) -> Vec<LaurentPolynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let f = random_laurent(&mut rng, params);
        if is_tame(&f, Budget::default()) {
            out.push(f);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible_and_tame() {
        let p = CorpusParams::default();
        let a = tame_corpus(7, 10, &p);
        assert_eq!(a, tame_corpus(7, 10, &p));
        for f in &a {
            assert!(f.arity() <= 2);
            assert!(f.len() <= 6);
            assert!(f.terms().all(|(e, _)| e.iter().all(|x| x.abs() <= 2)));
            assert!(is_tame(f, Budget::default()));
        }
    }
}
