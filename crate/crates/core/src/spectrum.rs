//! Jacobian ring, Milnor number and the spectrum at infinity read off the
//! Newton filtration of the Jacobian ring.

use std::collections::HashMap;

use num_traits::Signed;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::groebner::{quotient_ring, saturate_torus, Budget, GroebnerError, Ideal, MonomialOrder, QuotientRing};
use crate::laurent::{ExponentVector, LaurentPolynomial};
use crate::linalg::RowEchelon;
use crate::newton::{degenerate_face, GeometryError, NewtonPolytope};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectrumError {
    #[error("polynomial is not convenient")]
    NotConvenient,
    #[error("polynomial is degenerate on the face spanned by {face}")]
    Degenerate { face: String },
    #[error("Newton filtration reached rank {rank} of {mu}")]
    IncompleteFiltration { rank: usize, mu: usize },
    #[error(transparent)]
    Geometry(GeometryError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

impl From<GeometryError> for SpectrumError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::NotConvenient => SpectrumError::NotConvenient,
            GeometryError::Groebner(g) => SpectrumError::Groebner(g),
            other => SpectrumError::Geometry(other),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpectrumEntry {
    #[serde(with = "crate::rational::serde_str")]
    pub gamma: Rational,
    pub delta: u64,
}

/// Sorted multiset of spectral numbers `γ` with multiplicities `δ_γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumTable {
    n: usize,
    entries: Vec<SpectrumEntry>,
}

impl SpectrumTable {
    /// Merges repeated `γ`, drops zero multiplicities and sorts.
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (Rational, u64)>) -> Self {
        let mut merged: std::collections::BTreeMap<Rational, u64> = Default::default();
        for (g, d) in pairs {
            *merged.entry(g).or_default() += d;
        }
        let entries = merged
            .into_iter()
            .filter(|(_, d)| *d > 0)
            .map(|(gamma, delta)| SpectrumEntry { gamma, delta })
            .collect();
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.delta).sum()
    }

    pub fn delta(&self, gamma: &Rational) -> u64 {
        self.entries
            .iter()
            .find(|e| &e.gamma == gamma)
            .map_or(0, |e| e.delta)
    }

    /// Every `γ` repeated `δ_γ` times.
    pub fn values(&self) -> Vec<Rational> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.gamma.clone(), e.delta as usize))
            .collect()
    }

    pub fn in_range(&self) -> bool {
        let n = int(self.n as i64);
        self.entries.iter().all(|e| !e.gamma.is_negative() && e.gamma <= n)
    }
}

impl Serialize for SpectrumTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.entries.len()))?;
        for e in &self.entries {
            seq.serialize_element(e)?;
        }
        seq.end()
    }
}

/// `(x_1∂f/∂x_1, …, x_n∂f/∂x_n)`, cleared into the polynomial ring.
pub fn jacobian_ideal(f: &LaurentPolynomial) -> Ideal {
    let n = f.arity();
    Ideal::from_laurent(n, (0..n).map(|i| f.log_derivative(i)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectrumOptions {
    pub order: MonomialOrder,
    pub budget: Budget,
    /// Skip the convenience and non-degeneracy gates.
    pub force: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            order: MonomialOrder::GrevLex,
            budget: Budget::default(),
            force: false,
        }
    }
}

/// Everything the pipeline produces on the way to the spectrum.
#[derive(Clone, Debug)]
pub struct SpectrumComputation {
    pub polytope: NewtonPolytope,
    pub quotient: QuotientRing,
    pub spectrum: SpectrumTable,
}

impl SpectrumComputation {
    pub fn milnor_number(&self) -> usize {
        self.quotient.dimension()
    }
}

/// Checks the hypotheses: convenient, then non-degenerate.
pub fn check_hypotheses(f: &LaurentPolynomial, budget: Budget) -> Result<NewtonPolytope, SpectrumError> {
    let polytope = NewtonPolytope::of(f)?;
    if !polytope.is_convenient() {
        return Err(SpectrumError::NotConvenient);
    }
    if let Some(face) = degenerate_face(f, budget)? {
        let vars = crate::laurent::default_variable_names(f.arity());
        let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
        let f_sigma = f.restrict(|e| face.points.contains(e));
        return Err(SpectrumError::Degenerate {
            face: f_sigma.to_expr(&vars),
        });
    }
    Ok(polytope)
}

/// `C[x^±]/J(f)` via torus saturation of the Jacobian ideal.
pub fn jacobian_quotient(
    f: &LaurentPolynomial,
    order: MonomialOrder,
    budget: Budget,
) -> Result<QuotientRing, SpectrumError> {
    let sat = saturate_torus(&jacobian_ideal(f), budget)?;
    let gb = sat.groebner_basis(order, budget)?;
    Ok(quotient_ring(&gb)?)
}

pub fn milnor_number(f: &LaurentPolynomial) -> Result<usize, SpectrumError> {
    check_hypotheses(f, Budget::default())?;
    Ok(jacobian_quotient(f, MonomialOrder::GrevLex, Budget::default())?.dimension())
}

pub fn spectrum_at_infinity(f: &LaurentPolynomial) -> Result<SpectrumTable, SpectrumError> {
    Ok(compute_spectrum(f, &SpectrumOptions::default())?.spectrum)
}

/// Full pipeline: hypotheses, quotient ring, Newton filtration ranks.
pub fn compute_spectrum(f: &LaurentPolynomial, opts: &SpectrumOptions) -> Result<SpectrumComputation, SpectrumError> {
    let polytope = if opts.force {
        let p = NewtonPolytope::of(f)?;
        if !p.is_convenient() {
            return Err(SpectrumError::NotConvenient);
        }
        p
    } else {
        check_hypotheses(f, opts.budget)?
    };
    let quotient = jacobian_quotient(f, opts.order, opts.budget)?;
    let spectrum = newton_spectrum(&polytope, &quotient)?;
    Ok(SpectrumComputation {
        polytope,
        quotient,
        spectrum,
    })
}

/// Memoized classes of Laurent monomials in the quotient, one matrix-vector
/// product per new monomial.
pub struct ClassCache<'q> {
    quotient: &'q QuotientRing,
    cache: HashMap<ExponentVector, Vec<Rational>>,
}

impl<'q> ClassCache<'q> {
    pub fn new(quotient: &'q QuotientRing) -> Result<Self, GroebnerError> {
        let n = quotient.arity();
        if let Some(i) = (0..n).find(|&i| quotient.inverse_matrix(i).is_none()) {
            return Err(GroebnerError::SingularMultiplication { variable: i });
        }
        let mut cache = HashMap::new();
        cache.insert(ExponentVector::zero(n), quotient.unit_vector());
        Ok(Self { quotient, cache })
    }

    pub fn class(&mut self, m: &ExponentVector) -> Vec<Rational> {
        if let Some(v) = self.cache.get(m) {
            return v.clone();
        }
        let i = m.iter().position(|&x| x != 0).expect("origin is cached");
        let step = m[i].signum();
        let prev = m - &ExponentVector::unit(m.arity(), i).scaled(step);
        let base = self.class(&prev);
        let mat = if step > 0 {
            &self.quotient.mult_matrices()[i]
        } else {
            self.quotient.inverse_matrix(i).expect("checked invertible")
        };
        let v = mat.mul_vec(&base);
        self.cache.insert(m.clone(), v.clone());
        v
    }
}

/// Rank jumps of `N_γ = span{[x^m] : ν(m) ≤ γ}` over the lattice points of `n·Γ`.
pub fn newton_spectrum(polytope: &NewtonPolytope, quotient: &QuotientRing) -> Result<SpectrumTable, SpectrumError> {
    let n = polytope.arity();
    let mu = quotient.dimension();
    let mut points: Vec<(Rational, ExponentVector)> = polytope
        .lattice_points(n as i64)
        .into_iter()
        .map(|m| (polytope.newton_degree(&m).expect("convenient"), m))
        .collect();
    points.sort();
    let mut cache = ClassCache::new(quotient)?;
    let mut echelon = RowEchelon::new(mu);
    let mut jumps = Vec::new();
    let mut idx = 0;
    while idx < points.len() && echelon.rank() < mu {
        let gamma = points[idx].0.clone();
        let before = echelon.rank();
        while idx < points.len() && points[idx].0 == gamma {
            let v = cache.class(&points[idx].1);
            echelon.insert(&v);
            idx += 1;
        }
        let jump = echelon.rank() - before;
        if jump > 0 {
            jumps.push((gamma, jump as u64));
        }
    }
    if echelon.rank() != mu {
        return Err(SpectrumError::IncompleteFiltration {
            rank: echelon.rank(),
            mu,
        });
    }
    Ok(SpectrumTable::new(n, jumps))
}

/// The multiset `{γ}` equals `{n − γ}`.
pub fn check_spectrum_symmetry(s: &SpectrumTable) -> bool {
    let n = int(s.n() as i64);
    s.entries().iter().all(|e| s.delta(&(&n - &e.gamma)) == e.delta)
}

/// `μ_α^n(p) = δ_{α + n − p}`.
pub fn spectral_multiplicity(s: &SpectrumTable, alpha: &Rational, p: i64) -> u64 {
    s.delta(&(alpha + int(s.n() as i64 - p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_laurent;
    use crate::rational::rat;

    fn poly(text: &str) -> LaurentPolynomial {
        let vars: &[&str] = if text.contains('y') { &["x", "y"] } else { &["x"] };
        parse_laurent(text, vars).unwrap()
    }

    fn table(n: usize, pairs: &[(i64, i64, u64)]) -> SpectrumTable {
        SpectrumTable::new(n, pairs.iter().map(|&(p, q, d)| (rat(p, q), d)))
    }

    #[test]
    fn jacobian_generators() {
        let j = jacobian_ideal(&poly("x + x^-1"));
        assert_eq!(j.generators(), &[poly("x^2 - 1")]);
        let j = jacobian_ideal(&poly("x + y + x^-1*y^-1"));
        assert_eq!(j.generators(), &[poly("x^2*y - 1"), poly("x*y^2 - 1")]);
        let j = jacobian_ideal(&poly("x^2 + x^-1"));
        assert_eq!(j.generators(), &[poly("2*x^3 - 1")]);
    }

    #[test]
    fn constant_has_infinite_quotient() {
        let f = LaurentPolynomial::constant(1, rat(5, 1));
        assert!(matches!(
            jacobian_quotient(&f, MonomialOrder::GrevLex, Budget::default()),
            Err(SpectrumError::Groebner(GroebnerError::InfiniteQuotient { .. }))
        ));
    }

    #[test]
    fn milnor_numbers() {
        assert_eq!(milnor_number(&poly("x + x^-1")).unwrap(), 2);
        assert_eq!(milnor_number(&poly("x + y + x^-1*y^-1")).unwrap(), 3);
        assert_eq!(milnor_number(&poly("x^2 + x^-1")).unwrap(), 3);
        assert!(matches!(milnor_number(&poly("x + y")), Err(SpectrumError::NotConvenient)));
        assert!(matches!(
            milnor_number(&poly("x^2 + 2*x*y + y^2 + x^-1*y^-1")),
            Err(SpectrumError::Degenerate { .. })
        ));
    }

    #[test]
    fn spectra() {
        assert_eq!(spectrum_at_infinity(&poly("x + x^-1")).unwrap(), table(1, &[(0, 1, 1), (1, 1, 1)]));
        assert_eq!(
            spectrum_at_infinity(&poly("x + y + x^-1*y^-1")).unwrap(),
            table(2, &[(0, 1, 1), (1, 1, 1), (2, 1, 1)])
        );
        assert_eq!(
            spectrum_at_infinity(&poly("x^2 + x^-1")).unwrap(),
            table(1, &[(0, 1, 1), (1, 2, 1), (1, 1, 1)])
        );
        assert_eq!(
            spectrum_at_infinity(&poly("x + x^-1 + y + y^-1")).unwrap(),
            table(2, &[(0, 1, 1), (1, 1, 2), (2, 1, 1)])
        );
    }

    #[test]
    fn symmetry_check() {
        assert!(check_spectrum_symmetry(&table(1, &[(0, 1, 1), (1, 1, 1)])));
        assert!(check_spectrum_symmetry(&table(1, &[(0, 1, 1), (1, 2, 1), (1, 1, 1)])));
        assert!(!check_spectrum_symmetry(&table(1, &[(0, 1, 2), (1, 1, 1)])));
    }

    #[test]
    fn multiplicities() {
        let p2 = table(2, &[(0, 1, 1), (1, 1, 1), (2, 1, 1)]);
        assert_eq!(spectral_multiplicity(&p2, &rat(0, 1), 2), 1);
        assert_eq!(spectral_multiplicity(&p2, &rat(0, 1), 3), 0);
        let s = table(1, &[(0, 1, 1), (1, 2, 1), (1, 1, 1)]);
        assert_eq!(spectral_multiplicity(&s, &rat(1, 2), 1), 1);
    }

    #[test]
    fn json_shape() {
        let s = table(1, &[(0, 1, 1), (1, 2, 1), (1, 1, 1)]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(
            text,
            r#"[{"gamma":"0","delta":1},{"gamma":"1/2","delta":1},{"gamma":"1","delta":1}]"#
        );
    }
}
