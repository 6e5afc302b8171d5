use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tamehodge_core::chart::*;
use tamehodge_core::rational::{int, rat, Rational};
use tamehodge_core::unipoly::UniPoly;
use tamehodge_core::ExponentVector;

fn chart(e: &[i64]) -> ChartSpec {
    ChartSpec::new(e.to_vec(), ChartBounds::default()).unwrap()
}

fn wide(e: &[i64]) -> ChartSpec {
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

fn monic(lower: &[i64]) -> UniPoly {
    let mut c: Vec<Rational> = lower.iter().map(|&x| rat(x, 2)).collect();
    c.push(int(1));
    UniPoly::from_coeffs(c)
}

proptest! {
    #[test]
    fn pq_preserves_degree_and_monicity(lower in prop::collection::vec(-6i64..=6, 0..=8)) {
        let p = monic(&lower);
        let q = pq_convert(&p);
        prop_assert!(q.is_monic());
        prop_assert_eq!(q.degree(), p.degree());
    }

    #[test]
    fn pq_identity_in_wide_charts(lower in prop::collection::vec(-6i64..=6, 0..=6), which in 0usize..3) {
        let e: &[i64] = [&[2][..], &[3][..], &[1, 2][..]][which];
        let spec = wide(e);
        let top = ExponentVector(vec![spec.bounds().max_weight; e.len()]);
        prop_assert!(pq_identity_holds(&monic(&lower), &top, &spec).unwrap());
    }

    #[test]
    fn precision_lemma_random(a in prop::collection::vec(-4i64..=4, 1..=3), e_seed in prop::collection::vec(1i64..=4, 3), extra in 0i64..=3) {
        let e = &e_seed[..a.len()];
        let k = plus_norm(&a) + extra;
        prop_assert!(precision_lemma_check(&a, e, k));
    }
}

#[test]
fn precision_lemma_ten_thousand_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    for _ in 0..10_000 {
        let ell = rng.gen_range(1..=3);
        let a: Vec<i64> = (0..ell).map(|_| rng.gen_range(-5..=5)).collect();
        let e: Vec<i64> = (0..ell).map(|_| rng.gen_range(1..=4)).collect();
        let k = plus_norm(&a) + rng.gen_range(0..=4);
        assert!(precision_lemma_check(&a, &e, k), "a={a:?} e={e:?} k={k}");
    }
    assert!(precision_lemma_check(&[2, 0], &[1, 1], 2));
    assert!(precision_lemma_check(&[0], &[3], 0));
}

#[test]
fn generator_polynomials() {
    let half = rat(1, 2);
    assert_eq!(p_poly(&[1], &[2], &half).to_string(), "s + 1");
    assert_eq!(p_poly(&[2], &[2], &half).to_string(), "s^2 + 5/2*s + 3/2");
    assert_eq!(p_poly(&[0, 0], &[1, 2], &half), UniPoly::one());
    let h = p_poly_hbar(&[1, 1], &[1, 2], &int(0), HbarVariant::Alpha);
    assert!(h.is_monic() && h.is_homogeneous());
}

#[test]
fn decomposition_round_trip_and_threshold_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for e in [vec![2], vec![3], vec![1, 2]] {
        let spec = chart(&e);
        for beta in [int(0), rat(1, 4), rat(1, 3), rat(1, 2), int(1), rat(3, 2)] {
            for _ in 0..100 {
                let sec = random_v_section(&mut rng, &spec, &beta, 4);
                let dec = decompose_vbeta(&sec, &beta, &spec).unwrap();
                assert_eq!(recompose(&dec, &beta, &spec), sec);
                assert_eq!(
                    in_v_strictly_less(&dec, &beta, &e),
                    in_v_less_linear(&sec, &beta, &spec).unwrap(),
                    "{sec} at β = {beta}"
                );
            }
        }
    }
}

#[test]
fn generic_sections_are_not_all_in_v() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let spec = chart(&[2]);
    let outside = (0..50)
        .map(|_| random_section(&mut rng, &spec, 3))
        .filter(|s| !in_v(s, &int(0), &spec).unwrap())
        .count();
    assert!(outside > 0);
    let x = ChartSection::monomial(ExponentVector(vec![-3]), 0, int(1));
    assert!(matches!(decompose_vbeta(&x, &rat(1, 2), &spec), Err(ChartError::NotRepresentable { .. })));
}

#[test]
fn f_equals_f_prime() {
    for e in [vec![2], vec![1, 2]] {
        let spec = chart(&e);
        for alpha in [int(0), rat(1, 4), rat(1, 2)] {
            for p in 0..=2 {
                let c = filtration_compare(&spec, &alpha, p).unwrap();
                assert!(c.equal, "e={e:?} α={alpha} p={p}: {:?}", c.offending.map(|s| s.to_string()));
                assert_eq!(c.dim_f, c.dim_f_prime);
            }
        }
    }
    let small = ChartSpec::new(
        vec![2],
        ChartBounds {
            min_exponent: -6,
            max_v_degree: 4,
            max_op_degree: 4,
            max_weight: 2,
        },
    )
    .unwrap();
    assert!(filtration_compare(&small, &int(0), 0).unwrap().equal);
    assert!(filtration_compare(&small, &rat(1, 2), 1).unwrap().equal);
    let empty = filtration_compare(&small, &int(0), -1).unwrap();
    assert!(empty.equal && empty.dim_f == 0 && empty.dim_f_prime == 0);
}

#[test]
fn verification_suites() {
    for e in [vec![2], vec![3], vec![1, 2]] {
        let report = verify_chart(&chart(&e), &[int(0), rat(1, 4), rat(1, 2)], 2).unwrap();
        for c in &report.checks {
            assert!(c.passed, "e={e:?} {}: {:?}", c.name, c.offending);
            assert!(c.cases > 0, "{} ran no cases", c.name);
        }
    }
}

#[test]
fn truncation_overflow_is_reported() {
    let tiny = ChartSpec::new(
        vec![2],
        ChartBounds {
            min_exponent: -2,
            max_v_degree: 1,
            max_op_degree: 1,
            max_weight: 0,
        },
    )
    .unwrap();
    let sec = ChartSection::monomial(ExponentVector(vec![-1]), 0, int(1));
    assert!(matches!(vpartial_apply(&sec, &tiny), Err(ChartError::TruncationOverflow(_))));
    assert!(matches!(verify_chart(&tiny, &[int(0)], 2), Err(ChartError::TruncationOverflow(_))));
}
