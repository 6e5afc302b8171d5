//! Irregular Hodge numbers, Kontsevich bundle types, nearby-cycle dimensions,
//! residue classes and the comparison with toric Fano varieties.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::laurent::LaurentPolynomial;
use crate::parse::parse_laurent;
use crate::rational::{ceil_i64, floor_i64, frac, int, Rational};
use crate::spectrum::{compute_spectrum, SpectrumError, SpectrumOptions, SpectrumTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HodgeError {
    #[error("spectral number {gamma} lies outside [0, {n}]")]
    SpectrumOutOfRange { gamma: String, n: usize },
    #[error("unknown catalog entry {0:?}")]
    UnknownCatalogEntry(String),
    #[error(transparent)]
    Pipeline(#[from] SpectrumError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HodgeEntry {
    #[serde(with = "crate::rational::serde_str")]
    pub alpha: Rational,
    pub p: i64,
    pub q: i64,
    pub h: u64,
}

/// Nonzero `h_α^{p,q}`, keyed by `(α, q)` (then `p = n − q`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrregularHodgeTable {
    n: usize,
    entries: BTreeMap<(Rational, i64), u64>,
}

impl IrregularHodgeTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, alpha: &Rational, p: i64, q: i64) -> u64 {
        if p + q != self.n as i64 {
            return 0;
        }
        self.entries.get(&(alpha.clone(), q)).copied().unwrap_or(0)
    }

    /// Entries sorted by `α`, then by increasing `q`.
    pub fn entries(&self) -> Vec<HodgeEntry> {
        self.entries
            .iter()
            .map(|((alpha, q), h)| HodgeEntry {
                alpha: alpha.clone(),
                p: self.n as i64 - q,
                q: *q,
                h: *h,
            })
            .collect()
    }

    /// Distinct `α` carrying at least one nonzero number.
    pub fn alphas(&self) -> Vec<Rational> {
        let set: BTreeSet<Rational> = self.entries.keys().map(|(a, _)| a.clone()).collect();
        set.into_iter().collect()
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }
}

impl Serialize for IrregularHodgeTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.entries())
    }
}

/// `h_α^{n−q,q} = δ_{α+q}` with `α = frac(γ)`, `q = ⌊γ⌋`.
pub fn irregular_hodge_numbers(s: &SpectrumTable) -> Result<IrregularHodgeTable, HodgeError> {
    let n = s.n();
    let mut entries = BTreeMap::new();
    for e in s.entries() {
        if e.gamma.is_negative() || e.gamma > int(n as i64) {
            return Err(HodgeError::SpectrumOutOfRange {
                gamma: e.gamma.to_string(),
                n,
            });
        }
        *entries.entry((frac(&e.gamma), floor_i64(&e.gamma))).or_insert(0) += e.delta;
    }
    Ok(IrregularHodgeTable { n, entries })
}

/// Splitting type `⊕ O(p)^{m_p}` of a bundle on the projective line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleType {
    pub k: i64,
    pub alpha: Rational,
    /// `(slope, multiplicity)`, ascending slope, positive multiplicities.
    pub summands: Vec<(i64, u64)>,
}

impl BundleType {
    pub fn rank(&self) -> u64 {
        self.summands.iter().map(|(_, m)| m).sum()
    }

    pub fn degree(&self) -> i64 {
        self.summands.iter().map(|(p, m)| p * *m as i64).sum()
    }

    /// `(slope, rank of the sum of summands of slope ≥ it)`, from the largest slope down.
    pub fn hn_jumps(&self) -> Vec<(i64, u64)> {
        let mut acc = 0;
        self.summands
            .iter()
            .rev()
            .map(|(p, m)| {
                acc += m;
                (*p, acc)
            })
            .collect()
    }

    /// Text form such as `O(0) + O(1)^2`.
    pub fn describe(&self) -> String {
        if self.summands.is_empty() {
            return "0".into();
        }
        self.summands
            .iter()
            .map(|(p, m)| if *m == 1 { format!("O({p})") } else { format!("O({p})^{m}") })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl Serialize for BundleType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BundleType", 6)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("alpha", &self.alpha.to_string())?;
        st.serialize_field("summands", &self.summands)?;
        st.serialize_field("rank", &self.rank())?;
        st.serialize_field("degree", &self.degree())?;
        st.serialize_field("hn_jumps", &self.hn_jumps())?;
        st.end()
    }
}

/// `K^k(α) ≅ ⊕_p O(p)^{h_α^{p,k−p}}`.
pub fn kontsevich_bundle_type(t: &IrregularHodgeTable, k: i64, alpha: &Rational) -> BundleType {
    let summands = (0..=k.max(0))
        .filter_map(|p| {
            let h = t.get(alpha, p, k - p);
            (h > 0).then_some((p, h))
        })
        .collect();
    BundleType {
        k,
        alpha: alpha.clone(),
        summands,
    }
}

pub fn bundle_degree(b: &BundleType) -> i64 {
    b.degree()
}

pub fn hn_jumps(b: &BundleType) -> Vec<(i64, u64)> {
    b.hn_jumps()
}

/// `Σ_q δ_{α+q}`.
pub fn nearby_cycle_dimension(s: &SpectrumTable, alpha: &Rational) -> u64 {
    s.entries()
        .iter()
        .filter(|e| &frac(&e.gamma) == alpha)
        .map(|e| e.delta)
        .sum()
}

/// Class-level residue prediction on the `V_α` lattice: each spectral class
/// `α′` contributes the representative of `−α′` in `[−α, −α+1)` with
/// multiplicity `nearby_cycle_dimension(α′)`. Sorted by eigenvalue.
pub fn residue_classes(s: &SpectrumTable, alpha: &Rational) -> Vec<(Rational, u64)> {
    let classes: BTreeSet<Rational> = s.entries().iter().map(|e| frac(&e.gamma)).collect();
    let mut out: Vec<(Rational, u64)> = classes
        .into_iter()
        .map(|a| {
            let r = -&a + int(ceil_i64(&(&a - alpha)));
            let m = nearby_cycle_dimension(s, &a);
            (r, m)
        })
        .collect();
    out.sort();
    out
}

/// A complete simplicial fan given by rays and maximal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricFan {
    pub dimension: usize,
    pub rays: Vec<Vec<i64>>,
    pub maximal_cones: Vec<Vec<usize>>,
}

impl ToricFan {
    /// `d_k`: number of `k`-dimensional cones, `k = 0..=n`.
    pub fn cone_counts(&self) -> Vec<u64> {
        let mut cones: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in &self.maximal_cones {
            for mask in 0u32..(1 << c.len()) {
                let sub: Vec<usize> = (0..c.len()).filter(|i| mask & (1 << i) != 0).map(|i| c[i]).collect();
                let mut sub = sub;
                sub.sort();
                cones.insert(sub);
            }
        }
        let mut counts = vec![0u64; self.dimension + 1];
        for c in cones {
            counts[c.len()] += 1;
        }
        counts
    }

    /// `h^{p,p} = Σ_{i≥p} (−1)^{i−p} C(i,p) d_{n−i}`.
    pub fn hodge_numbers(&self) -> Vec<u64> {
        let n = self.dimension;
        let d = self.cone_counts();
        (0..=n)
            .map(|p| {
                let h: i64 = (p..=n)
                    .map(|i| {
                        let sign = if (i - p) % 2 == 0 { 1 } else { -1 };
                        sign * binomial(i, p) * d[n - i] as i64
                    })
                    .sum();
                u64::try_from(h).expect("Hodge numbers of a complete fan are nonnegative")
            })
            .collect()
    }
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub mirror: &'static str,
    pub variables: &'static [&'static str],
    pub fan: ToricFan,
}

impl CatalogEntry {
    pub fn mirror_polynomial(&self) -> LaurentPolynomial {
        parse_laurent(self.mirror, self.variables).expect("catalog expressions parse")
    }
}

/// Projective line, plane and `P¹×P¹`, each with its Landau–Ginzburg mirror.
pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "P1",
            mirror: "x + x^-1",
            variables: &["x"],
            fan: ToricFan {
                dimension: 1,
                rays: vec![vec![1], vec![-1]],
                maximal_cones: vec![vec![0], vec![1]],
            },
        },
        CatalogEntry {
            name: "P2",
            mirror: "x + y + x^-1*y^-1",
            variables: &["x", "y"],
            fan: ToricFan {
                dimension: 2,
                rays: vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
                maximal_cones: vec![vec![0, 1], vec![1, 2], vec![0, 2]],
            },
        },
        CatalogEntry {
            name: "P1xP1",
            mirror: "x + x^-1 + y + y^-1",
            variables: &["x", "y"],
            fan: ToricFan {
                dimension: 2,
                rays: vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
                maximal_cones: vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
            },
        },
    ]
}

pub fn catalog_entry(name: &str) -> Result<CatalogEntry, HodgeError> {
    let key: String = name
        .chars()
        .map(|c| match c {
            '¹' => '1',
            '²' => '2',
            '×' | '*' => 'x',
            c => c,
        })
        .collect();
    catalog()
        .into_iter()
        .find(|e| e.name.eq_ignore_ascii_case(&key))
        .ok_or_else(|| HodgeError::UnknownCatalogEntry(name.to_string()))
}

/// A Fano variety to compare against: a catalog name or explicit `h^{p,p}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FanoTarget {
    Catalog(String),
    Explicit(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MirrorReport {
    pub target: String,
    /// `h^{p,p}(Y)`, `p = 0..=dim Y`.
    pub expected: Vec<u64>,
    /// `h_0^{n−q,q}`, `q = 0..=n`.
    pub observed: Vec<u64>,
    /// Spectral numbers that are not integers.
    pub fractional: Vec<String>,
    pub matched: bool,
}

/// Compares integral spectral multiplicities with a Hodge sequence.
pub fn compare_with_hodge_sequence(s: &SpectrumTable, target: &str, expected: &[u64]) -> MirrorReport {
    let observed: Vec<u64> = (0..=s.n() as i64).map(|q| s.delta(&int(q))).collect();
    let fractional: Vec<String> = s
        .entries()
        .iter()
        .filter(|e| !frac(&e.gamma).is_zero())
        .map(|e| e.gamma.to_string())
        .collect();
    MirrorReport {
        target: target.to_string(),
        matched: fractional.is_empty() && observed == expected,
        expected: expected.to_vec(),
        observed,
        fractional,
    }
}

/// Runs the spectrum pipeline on `f` and compares with the Fano target.
pub fn mirror_check(f: &LaurentPolynomial, target: &FanoTarget) -> Result<MirrorReport, HodgeError> {
    let (name, expected) = match target {
        FanoTarget::Catalog(name) => {
            let entry = catalog_entry(name)?;
            (entry.name.to_string(), entry.fan.hodge_numbers())
        }
        FanoTarget::Explicit(h) => ("explicit".to_string(), h.clone()),
    };
    let s = compute_spectrum(f, &SpectrumOptions::default())?.spectrum;
    Ok(compare_with_hodge_sequence(&s, &name, &expected))
}
