//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Run with `cargo test -p tamehodge-cli --test acceptance -- --nocapture`
//! to see the lines.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use tamehodge_core::chart::*;
use tamehodge_core::corpus::{tame_corpus, CorpusParams};
use tamehodge_core::groebner::MonomialOrder;
use tamehodge_core::hodge::{catalog_entry, residue_classes};
use tamehodge_core::rational::{int, rat, Rational};
use tamehodge_core::report::{analyze_polynomial, AnalyzeOptions};
use tamehodge_core::spectrum::{check_spectrum_symmetry, compute_spectrum, SpectrumOptions};
use tamehodge_core::unipoly::UniPoly;
use tamehodge_core::{ExponentVector, LaurentPolynomial};

const CORPUS_SEED: u64 = 2024;

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Option<Duration>,
    start: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: u32, title: &'static str, limit: Option<Duration>) -> Self {
        Self {
            id,
            title,
            limit,
            start: Instant::now(),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed();
        if let Some(limit) = self.limit {
            if elapsed > limit {
                self.failures.push(format!("took {elapsed:?}, limit {limit:?}"));
            }
        }
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {:>2}: {} ({elapsed:.2?})", self.id, self.title);
        for f in self.failures.iter().take(5) {
            println!("         {f}");
        }
        assert!(self.failures.is_empty(), "criterion {} failed: {:?}", self.id, self.failures);
    }
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tamehodge"))
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn analyze_json(expr: &str) -> (Value, Output) {
    let out = run(&["analyze", expr, "--json"]);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (v, out)
}

fn spectrum_pairs(v: &Value) -> Vec<(String, u64)> {
    v["spectrum"]
        .as_array()
        .map(|a| {
            a.iter()
                .map(|e| (e["gamma"].as_str().unwrap_or("").to_string(), e["delta"].as_u64().unwrap_or(0)))
                .collect()
        })
        .unwrap_or_default()
}

fn pairs(list: &[(&str, u64)]) -> Vec<(String, u64)> {
    list.iter().map(|(g, d)| (g.to_string(), *d)).collect()
}

fn hodge_value(v: &Value, alpha: &str, p: i64, q: i64) -> u64 {
    v["hodge"]
        .as_array()
        .into_iter()
        .flatten()
        .find(|e| e["alpha"] == alpha && e["p"] == p && e["q"] == q)
        .and_then(|e| e["h"].as_u64())
        .unwrap_or(0)
}

fn corpus() -> Vec<LaurentPolynomial> {
    tame_corpus(CORPUS_SEED, 200, &CorpusParams::default())
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

#[test]
fn criterion_01_mirror_p2() {
    let mut c = Criterion::new(1, "mirror P2: mu, spectrum, Hodge numbers, K^2(0), degree", Some(Duration::from_secs(1)));
    let (v, out) = analyze_json("x+y+x^-1*y^-1");
    c.check(out.status.success(), || format!("exit status {:?}", out.status));
    c.check(v["mu"] == 3, || format!("mu = {}", v["mu"]));
    c.check(spectrum_pairs(&v) == pairs(&[("0", 1), ("1", 1), ("2", 1)]), || {
        format!("spectrum {:?}", spectrum_pairs(&v))
    });
    let h: Vec<u64> = (0..=2).map(|q| hodge_value(&v, "0", 2 - q, q)).collect();
    c.check(h == [1, 1, 1], || format!("h_0^(2-q,q) = {h:?}"));
    let bundle = &v["bundles"][0];
    c.check(bundle["k"] == 2 && bundle["alpha"] == "0", || format!("bundle {bundle}"));
    c.check(bundle["summands"] == serde_json::json!([[0, 1], [1, 1], [2, 1]]), || {
        format!("K^2(0) summands {}", bundle["summands"])
    });
    c.check(bundle["degree"] == 3, || format!("degree {}", bundle["degree"]));
    let toric = catalog_entry("P2").unwrap().fan.hodge_numbers();
    c.check(h == toric, || format!("toric oracle {toric:?} vs {h:?}"));
    c.finish();
}

#[test]
fn criterion_02_mirror_p1_and_p1xp1() {
    let mut c = Criterion::new(2, "mirror P1 and P1xP1 spectra, catalog matches", Some(Duration::from_secs(3)));
    for (expr, expected, name) in [
        ("x+x^-1", pairs(&[("0", 1), ("1", 1)]), "P1"),
        ("x+x^-1+y+y^-1", pairs(&[("0", 1), ("1", 2), ("2", 1)]), "P1xP1"),
    ] {
        let t = Instant::now();
        let (v, out) = analyze_json(expr);
        c.check(t.elapsed() < Duration::from_secs(1), || format!("{expr} took {:?}", t.elapsed()));
        c.check(out.status.success(), || format!("{expr}: exit {:?}", out.status));
        c.check(spectrum_pairs(&v) == expected, || format!("{expr}: {:?}", spectrum_pairs(&v)));
        let n = v["n"].as_i64().unwrap_or(0);
        let h: Vec<u64> = (0..=n).map(|q| hodge_value(&v, "0", n - q, q)).collect();
        let toric = catalog_entry(name).unwrap().fan.hodge_numbers();
        c.check(h == toric, || format!("{name}: {h:?} vs toric {toric:?}"));
    }
    let t = Instant::now();
    let out = run(&["catalog", "--text"]);
    c.check(t.elapsed() < Duration::from_secs(1), || format!("catalog took {:?}", t.elapsed()));
    let text = String::from_utf8_lossy(&out.stdout);
    c.check(out.status.success(), || format!("catalog exit {:?}", out.status));
    let lines: Vec<&str> = text.lines().collect();
    c.check(lines.len() == 3 && lines.iter().all(|l| l.contains(" match ")), || text.to_string());
    c.finish();
}

#[test]
fn criterion_03_kouchnirenko() {
    let mut c = Criterion::new(3, "Kouchnirenko: mu equals normalized volume on 200 polynomials", Some(Duration::from_secs(60)));
    let polys = corpus();
    c.check(polys.len() == 200, || format!("corpus has {}", polys.len()));
    for f in &polys {
        let comp = compute_spectrum(f, &SpectrumOptions::default()).unwrap();
        let vol = comp.polytope.normalized_volume().unwrap();
        c.check(comp.milnor_number() as u64 == vol, || format!("{f:?}: mu {} vol {vol}", comp.milnor_number()));
    }
    c.finish();
}

#[test]
fn criterion_04_symmetry() {
    let mut c = Criterion::new(4, "spectrum symmetric about n/2 on the corpus", None);
    for f in &corpus() {
        let s = compute_spectrum(f, &SpectrumOptions::default()).unwrap().spectrum;
        c.check(check_spectrum_symmetry(&s), || format!("{f:?}"));
    }
    c.finish();
}

#[test]
fn criterion_05_sum_rules() {
    let mut c = Criterion::new(5, "sum rules and bundle degrees on the corpus", None);
    for f in &corpus() {
        let names: Vec<String> = ["x", "y"][..f.arity()].iter().map(|s| s.to_string()).collect();
        let r = analyze_polynomial(f, "", &names, &AnalyzeOptions::default()).unwrap();
        let mu = r.mu as u64;
        c.check(r.spectrum.total() == mu, || format!("{f:?}: sum delta {}", r.spectrum.total()));
        let hsum: u64 = r.hodge.entries().iter().map(|e| e.h).sum();
        c.check(hsum == mu, || format!("{f:?}: sum h {hsum}"));
        for b in &r.bundles {
            let from_summands: i64 = b.summands.iter().map(|(p, m)| p * *m as i64).sum();
            let from_hodge: i64 = r
                .hodge
                .entries()
                .iter()
                .filter(|e| e.alpha == b.alpha && e.p + e.q == b.k)
                .map(|e| e.p * e.h as i64)
                .sum();
            c.check(b.degree() == from_summands && from_summands == from_hodge, || {
                format!("{f:?}: degree {} / {from_summands} / {from_hodge}", b.degree())
            });
            c.check(b.summands.iter().all(|(p, _)| *p >= 0), || format!("{f:?}: negative slope"));
        }
    }
    c.finish();
}

#[test]
fn criterion_06_residue_interval() {
    let mut c = Criterion::new(6, "residue classes lie in [-alpha, -alpha+1)", None);
    for f in &corpus() {
        let s = compute_spectrum(f, &SpectrumOptions::default()).unwrap().spectrum;
        for alpha in [int(0), rat(1, 3), rat(1, 2)] {
            for (r, m) in residue_classes(&s, &alpha) {
                let lo = -alpha.clone();
                c.check(r >= lo && r < &lo + int(1) && m > 0, || format!("{f:?}: alpha {alpha} residue {r}"));
            }
        }
    }
    c.finish();
}

fn wide_chart(e: &[i64]) -> ChartSpec {
    ChartSpec::new(
        e.to_vec(),
        ChartBounds {
            min_exponent: -20,
            max_v_degree: 8,
            max_op_degree: 8,
            max_weight: 2,
        },
    )
    .unwrap()
}

fn random_monic<R: Rng>(rng: &mut R) -> UniPoly {
    let d = rng.gen_range(0..=6);
    let mut coeffs: Vec<Rational> = (0..d).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect();
    coeffs.push(int(1));
    UniPoly::from_coeffs(coeffs)
}

#[test]
fn criterion_07_p_to_q() {
    let mut c = Criterion::new(7, "P to Q conversion: monic, same degree, identity holds", Some(Duration::from_secs(10)));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for e in [vec![2], vec![3], vec![1, 2]] {
        let spec = wide_chart(&e);
        let top = ExponentVector(vec![spec.bounds().max_weight; e.len()]);
        for _ in 0..100 {
            let p = random_monic(&mut rng);
            let q = pq_convert(&p);
            c.check(q.is_monic() && q.degree() == p.degree(), || format!("P = {p}, Q = {q}"));
            c.check(pq_identity_holds(&p, &top, &spec).unwrap_or(false), || format!("e={e:?} P = {p}"));
        }
    }
    c.finish();
}

#[test]
fn criterion_08_decomposition_and_grv() {
    let mut c = Criterion::new(8, "unique decomposition round trip, threshold rule agrees with linear algebra", None);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let betas = [int(0), rat(1, 4), rat(1, 3), rat(1, 2), int(1), rat(3, 2)];
    for e in [vec![2], vec![3], vec![1, 2]] {
        let spec = ChartSpec::new(e.clone(), ChartBounds::default()).unwrap();
        for i in 0..100 {
            let beta = &betas[i % betas.len()];
            let sec = random_v_section(&mut rng, &spec, beta, 4);
            match decompose_vbeta(&sec, beta, &spec) {
                Ok(dec) => {
                    c.check(recompose(&dec, beta, &spec) == sec, || format!("round trip {sec} at {beta}"));
                    let rule = in_v_strictly_less(&dec, beta, &e);
                    let linear = in_v_less_linear(&sec, beta, &spec).unwrap();
                    c.check(rule == linear, || format!("{sec} at {beta}: rule {rule} linear {linear}"));
                }
                Err(err) => c.check(false, || format!("{sec} at {beta}: {err}")),
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_09_f_equals_f_prime() {
    let mut c = Criterion::new(9, "F = F' on e=(2) and e=(1,2)", Some(Duration::from_secs(30)));
    for e in [vec![2], vec![1, 2]] {
        let spec = ChartSpec::new(e.clone(), ChartBounds::default()).unwrap();
        for alpha in [int(0), rat(1, 4), rat(1, 2)] {
            for p in 0..=2 {
                let r = filtration_compare(&spec, &alpha, p).unwrap();
                c.check(r.equal, || format!("e={e:?} alpha={alpha} p={p}: {:?}", r.offending.map(|s| s.to_string())));
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_10_precision_lemma() {
    let mut c = Criterion::new(10, "precision lemma on 10^4 draws", None);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10_000 {
        let ell = rng.gen_range(1..=3);
        let a: Vec<i64> = (0..ell).map(|_| rng.gen_range(-5..=5)).collect();
        let e: Vec<i64> = (0..ell).map(|_| rng.gen_range(1..=4)).collect();
        let k = plus_norm(&a) + rng.gen_range(0..=3);
        c.check(precision_lemma_check(&a, &e, k), || format!("a={a:?} e={e:?} k={k}"));
    }
    c.finish();
}

#[test]
fn criterion_11_order_independence() {
    let mut c = Criterion::new(11, "grevlex and lex spectra agree on 50 corpus members", None);
    let lex = SpectrumOptions {
        order: MonomialOrder::Lex,
        ..Default::default()
    };
    for f in corpus().iter().take(50) {
        let a = compute_spectrum(f, &SpectrumOptions::default()).unwrap().spectrum;
        let b = compute_spectrum(f, &lex).unwrap().spectrum;
        c.check(a == b, || format!("{f:?}"));
    }
    c.finish();
}

#[test]
fn criterion_12_golden_determinism() {
    let mut c = Criterion::new(12, "byte-identical JSON goldens for the catalog inputs", None);
    for (name, expr) in [("P1", "x + x^-1"), ("P2", "x + y + x^-1*y^-1"), ("P1xP1", "x + x^-1 + y + y^-1")] {
        let golden = std::fs::read(golden_dir().join(format!("{name}.json"))).expect("golden file");
        for _ in 0..3 {
            let out = run(&["analyze", expr, "--json"]);
            c.check(out.stdout == golden, || format!("{name} differs from its golden file"));
        }
    }
    c.finish();
}
