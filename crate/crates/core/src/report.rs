//! Analysis reports: the full pipeline on one polynomial, with every derived
//! quantity recomputed from the spectrum before the report is handed out.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::groebner::{Budget, GroebnerError, MonomialOrder};
use crate::hodge::{
    irregular_hodge_numbers, kontsevich_bundle_type, nearby_cycle_dimension, residue_classes, BundleType, HodgeError,
    IrregularHodgeTable,
};
use crate::laurent::LaurentPolynomial;
use crate::newton::{degenerate_face, NewtonPolytope};
use crate::parse::{parse_laurent, scan_variables, ParseError};
use crate::rational::{ceil_i64, floor_i64, frac, int, rat, Rational};
use crate::spectrum::{check_spectrum_symmetry, compute_spectrum, SpectrumError, SpectrumOptions, SpectrumTable};

pub const SCHEMA_VERSION: u32 = 1;

pub const UNVERIFIED: &str = "unverified hypotheses";

/// Residues are always reported for these `α`, on top of the spectral classes.
pub fn residue_alphas() -> [Rational; 3] {
    [int(0), rat(1, 3), rat(1, 2)]
}

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("expression has no variables")]
    NoVariables,
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    #[error("report failed its consistency check: {0}")]
    Inconsistent(String),
}

impl From<GroebnerError> for AnalyzeError {
    fn from(e: GroebnerError) -> Self {
        AnalyzeError::Spectrum(SpectrumError::Groebner(e))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AnalyzeOptions {
    pub order: MonomialOrder,
    pub budget: Budget,
    pub force: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            order: MonomialOrder::GrevLex,
            budget: Budget::default(),
            force: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputEcho {
    pub expression: String,
    pub variables: Vec<String>,
    pub normalized: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub convenient: bool,
    pub nondegenerate: bool,
    pub forced: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NearbyCycles {
    #[serde(with = "crate::rational::serde_str")]
    pub alpha: Rational,
    pub dimension: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueClass {
    #[serde(with = "crate::rational::serde_str")]
    pub eigenvalue: Rational,
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Residues {
    #[serde(with = "crate::rational::serde_str")]
    pub alpha: Rational,
    pub classes: Vec<ResidueClass>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Checks {
    pub symmetry: bool,
    pub newton_volume: u64,
    pub volume_equals_mu: bool,
    pub spectrum_sum_equals_mu: bool,
    pub hodge_sum_equals_mu: bool,
    pub bundle_degrees_agree: bool,
    pub slopes_nonnegative: bool,
    pub residues_in_interval: bool,
}

impl Checks {
    pub fn all_pass(&self) -> bool {
        self.symmetry
            && self.volume_equals_mu
            && self.spectrum_sum_equals_mu
            && self.hodge_sum_equals_mu
            && self.bundle_degrees_agree
            && self.slopes_nonnegative
            && self.residues_in_interval
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub input: InputEcho,
    pub n: usize,
    pub hypotheses: Hypotheses,
    pub status: String,
    pub order: String,
    pub mu: usize,
    pub spectrum: SpectrumTable,
    pub hodge: IrregularHodgeTable,
    pub bundles: Vec<BundleType>,
    pub nearby_cycles: Vec<NearbyCycles>,
    pub residues: Vec<Residues>,
    pub checks: Checks,
}

/// Parses `text`, with the variables inferred alphabetically unless given.
pub fn parse_input(text: &str, vars: Option<&[String]>) -> Result<(LaurentPolynomial, Vec<String>), AnalyzeError> {
    let names = match vars {
        Some(v) => v.to_vec(),
        None => scan_variables(text)?,
    };
    if names.is_empty() {
        return Err(AnalyzeError::NoVariables);
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok((parse_laurent(text, &refs)?, names))
}

pub fn analyze(text: &str, vars: Option<&[String]>, opts: &AnalyzeOptions) -> Result<AnalysisReport, AnalyzeError> {
    let (f, names) = parse_input(text, vars)?;
    analyze_polynomial(&f, text, &names, opts)
}

pub fn analyze_polynomial(
    f: &LaurentPolynomial,
    text: &str,
    names: &[String],
    opts: &AnalyzeOptions,
) -> Result<AnalysisReport, AnalyzeError> {
    let spec_opts = SpectrumOptions {
        order: opts.order,
        budget: opts.budget,
        force: opts.force,
    };
    let comp = compute_spectrum(f, &spec_opts)?;
    let nondegenerate = if opts.force {
        degenerate_face(f, opts.budget).map_err(SpectrumError::from)?.is_none()
    } else {
        true
    };
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let volume = comp.polytope.normalized_volume().map_err(SpectrumError::from)?;
    let mu = comp.milnor_number();
    let report = assemble(
        InputEcho {
            expression: text.to_string(),
            variables: names.to_vec(),
            normalized: f.to_expr(&refs),
        },
        Hypotheses {
            convenient: comp.polytope.is_convenient(),
            nondegenerate,
            forced: opts.force,
        },
        opts.order,
        mu,
        volume,
        comp.spectrum,
    )?;
    report.recheck(&comp.polytope).map_err(AnalyzeError::Inconsistent)?;
    Ok(report)
}

fn assemble(
    input: InputEcho,
    hypotheses: Hypotheses,
    order: MonomialOrder,
    mu: usize,
    volume: u64,
    spectrum: SpectrumTable,
) -> Result<AnalysisReport, AnalyzeError> {
    let n = spectrum.n();
    let hodge = irregular_hodge_numbers(&spectrum)?;
    let alphas = hodge.alphas();
    let bundles: Vec<BundleType> = alphas.iter().map(|a| kontsevich_bundle_type(&hodge, n as i64, a)).collect();
    let nearby_cycles = alphas
        .iter()
        .map(|a| NearbyCycles {
            alpha: a.clone(),
            dimension: nearby_cycle_dimension(&spectrum, a),
        })
        .collect();
    let residue_set: BTreeSet<Rational> = alphas.iter().cloned().chain(residue_alphas()).collect();
    let residues: Vec<Residues> = residue_set
        .into_iter()
        .map(|a| Residues {
            classes: residue_classes(&spectrum, &a)
                .into_iter()
                .map(|(eigenvalue, multiplicity)| ResidueClass { eigenvalue, multiplicity })
                .collect(),
            alpha: a,
        })
        .collect();
    let checks = Checks {
        symmetry: check_spectrum_symmetry(&spectrum),
        newton_volume: volume,
        volume_equals_mu: volume == mu as u64,
        spectrum_sum_equals_mu: spectrum.total() == mu as u64,
        hodge_sum_equals_mu: hodge.total() == mu as u64,
        bundle_degrees_agree: bundles.iter().all(|b| b.degree() == degree_from_spectrum(&spectrum, &b.alpha)),
        slopes_nonnegative: bundles.iter().all(|b| b.summands.iter().all(|(p, _)| *p >= 0)),
        residues_in_interval: residues.iter().all(|r| {
            r.classes
                .iter()
                .all(|c| c.eigenvalue >= -r.alpha.clone() && c.eigenvalue < -r.alpha.clone() + int(1))
        }),
    };
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        input,
        n,
        status: if hypotheses.forced { UNVERIFIED.into() } else { "verified".into() },
        hypotheses,
        order: order.name().to_string(),
        mu,
        spectrum,
        hodge,
        bundles,
        nearby_cycles,
        residues,
        checks,
    })
}

/// `Σ_γ (n − [γ])·δ_γ` over the `γ` with fractional part `α`.
pub fn degree_from_spectrum(s: &SpectrumTable, alpha: &Rational) -> i64 {
    s.entries()
        .iter()
        .filter(|e| &frac(&e.gamma) == alpha)
        .map(|e| (s.n() as i64 - floor_i64(&e.gamma)) * e.delta as i64)
        .sum()
}

impl AnalysisReport {
    /// Recomputes every derived field from the spectrum and the polytope.
    pub fn recheck(&self, polytope: &NewtonPolytope) -> Result<(), String> {
        let volume = polytope.normalized_volume().map_err(|e| e.to_string())?;
        let fresh = assemble(
            self.input.clone(),
            self.hypotheses.clone(),
            self.order.parse().map_err(|_| format!("unknown order {}", self.order))?,
            self.mu,
            volume,
            self.spectrum.clone(),
        )
        .map_err(|e| e.to_string())?;
        let mismatch = |what: &str| Err(format!("{what} differs from its recomputation"));
        if fresh.hodge != self.hodge {
            return mismatch("hodge table");
        }
        if fresh.bundles != self.bundles {
            return mismatch("bundle types");
        }
        if fresh.nearby_cycles != self.nearby_cycles {
            return mismatch("nearby-cycle dimensions");
        }
        if fresh.residues != self.residues {
            return mismatch("residue classes");
        }
        if fresh.checks != self.checks {
            return mismatch("checks");
        }
        for b in &self.bundles {
            let ranks: u64 = b.summands.iter().map(|(_, m)| m).sum();
            if ranks != nearby_cycle_dimension(&self.spectrum, &b.alpha) {
                return mismatch("bundle rank");
            }
        }
        for r in &self.residues {
            for c in &r.classes {
                let a = frac(&-c.eigenvalue.clone());
                let back = -&a + int(ceil_i64(&(&a - &r.alpha)));
                if back != c.eigenvalue || c.multiplicity != nearby_cycle_dimension(&self.spectrum, &a) {
                    return mismatch("residue class");
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "input      {}", self.input.expression);
        let _ = writeln!(w, "normalized {}", self.input.normalized);
        let _ = writeln!(w, "variables  {}", self.input.variables.join(", "));
        let _ = writeln!(w, "n          {}", self.n);
        let _ = writeln!(
            w,
            "hypotheses convenient={} nondegenerate={} ({})",
            self.hypotheses.convenient, self.hypotheses.nondegenerate, self.status
        );
        let _ = writeln!(w, "order      {}", self.order);
        let _ = writeln!(w, "mu         {}", self.mu);
        let _ = writeln!(w);
        let _ = writeln!(w, "spectrum");
        let _ = writeln!(w, "  {:>8}  {:>5}", "gamma", "delta");
        for e in self.spectrum.entries() {
            let _ = writeln!(w, "  {:>8}  {:>5}", e.gamma.to_string(), e.delta);
        }
        let _ = writeln!(w);
        let _ = writeln!(w, "irregular hodge numbers");
        let _ = writeln!(w, "  {:>8}  {:>3}  {:>3}  {:>5}", "alpha", "p", "q", "h");
        for e in self.hodge.entries() {
            let _ = writeln!(w, "  {:>8}  {:>3}  {:>3}  {:>5}", e.alpha.to_string(), e.p, e.q, e.h);
        }
        let _ = writeln!(w);
        let _ = writeln!(w, "kontsevich bundles");
        for b in &self.bundles {
            let jumps: Vec<String> = b.hn_jumps().iter().map(|(p, r)| format!("{p}:{r}")).collect();
            let _ = writeln!(
                w,
                "  K^{}({}) = {}  degree {}  hn {}",
                b.k,
                b.alpha,
                b.describe(),
                b.degree(),
                jumps.join(" ")
            );
        }
        let _ = writeln!(w);
        let _ = writeln!(w, "nearby cycles");
        for c in &self.nearby_cycles {
            let _ = writeln!(w, "  alpha {:>6}  dim {}", c.alpha.to_string(), c.dimension);
        }
        let _ = writeln!(w);
        let _ = writeln!(w, "residues");
        for r in &self.residues {
            let classes: Vec<String> = r
                .classes
                .iter()
                .map(|c| format!("{}^{}", c.eigenvalue, c.multiplicity))
                .collect();
            let _ = writeln!(w, "  alpha {:>6}  {}", r.alpha.to_string(), classes.join(" "));
        }
        let _ = writeln!(w);
        let c = &self.checks;
        let _ = writeln!(w, "checks");
        let _ = writeln!(w, "  symmetry                {}", c.symmetry);
        let _ = writeln!(w, "  newton volume           {}", c.newton_volume);
        let _ = writeln!(w, "  volume = mu             {}", c.volume_equals_mu);
        let _ = writeln!(w, "  sum delta = mu          {}", c.spectrum_sum_equals_mu);
        let _ = writeln!(w, "  sum h = mu              {}", c.hodge_sum_equals_mu);
        let _ = writeln!(w, "  bundle degrees agree    {}", c.bundle_degrees_agree);
        let _ = writeln!(w, "  slopes nonnegative      {}", c.slopes_nonnegative);
        let _ = writeln!(w, "  residues in interval    {}", c.residues_in_interval);
        out
    }
}

/// Every spectral number is an integer.
pub fn is_integral_spectrum(s: &SpectrumTable) -> bool {
    s.entries().iter().all(|e| frac(&e.gamma).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_mirror_report() {
        let r = analyze("x + y + x^-1*y^-1", None, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.mu, 3);
        assert_eq!(r.n, 2);
        assert_eq!(r.bundles.len(), 1);
        assert_eq!(r.bundles[0].describe(), "O(0) + O(1) + O(2)");
        assert_eq!(r.bundles[0].degree(), 3);
        assert!(r.checks.all_pass());
        assert!(is_integral_spectrum(&r.spectrum));
        assert_eq!(r.status, "verified");
        let json = r.to_json();
        assert!(json.contains("\"schema_version\": 1"));
        assert_eq!(json, analyze("x + y + x^-1*y^-1", None, &AnalyzeOptions::default()).unwrap().to_json());
    }

    #[test]
    fn fractional_spectrum_report() {
        let r = analyze("x^2 + x^-1", None, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.mu, 3);
        assert_eq!(r.nearby_cycles.len(), 2);
        assert!(r.checks.all_pass());
        let half = r.residues.iter().find(|x| x.alpha == rat(1, 2)).unwrap();
        assert!(half.classes.iter().any(|c| c.eigenvalue == rat(-1, 2)));
        assert!(r.to_text().contains("K^1(1/2) = O(1)"));
    }

    #[test]
    fn errors() {
        let o = AnalyzeOptions::default();
        assert!(matches!(analyze("x +", None, &o), Err(AnalyzeError::Parse(_))));
        assert!(matches!(analyze("3", None, &o), Err(AnalyzeError::NoVariables)));
        assert!(matches!(
            analyze("x + y", None, &o),
            Err(AnalyzeError::Spectrum(SpectrumError::NotConvenient))
        ));
        assert!(matches!(
            analyze("x^2 + 2*x*y + y^2 + x^-1*y^-1", None, &o),
            Err(AnalyzeError::Spectrum(SpectrumError::Degenerate { .. }))
        ));
    }
}
