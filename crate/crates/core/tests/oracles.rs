//! Exhaustive and statistical cross-checks between independent code paths.

use num_bigint::BigInt;
use num_rational::BigRational;
use qpc_core::analytics::{p_mu, p_mu_direct, success_probability_exact, to_f64};
use qpc_core::bm::sample_bm_with;
use qpc_core::optics::certify_physical_bm;
use qpc_core::*;

fn code(n: u32, m: u32) -> CodeParams {
    CodeParams::new(n, m).unwrap()
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn codes_up_to(photons: u32) -> impl Iterator<Item = CodeParams> {
    (1..=photons).flat_map(move |n| (1..=photons / n).map(move |m| code(n, m)))
}

#[test]
fn p_mu_generating_function_equals_direct_sum_up_to_40_photons() {
    for c in codes_up_to(40) {
        for mu in 0..=c.max_loss() {
            assert_eq!(p_mu(c, mu).unwrap(), p_mu_direct(c, mu).unwrap(), "{c} mu={mu}");
        }
    }
}

#[test]
fn success_probability_is_monotone_on_fine_grid() {
    let codes = [(1, 1), (2, 2), (3, 10), (6, 5), (10, 3), (23, 5), (37, 6), (40, 8), (1, 8), (12, 1)];
    for (n, m) in codes {
        let c = code(n, m);
        let mut prev = 0.0;
        for i in 0..=1000 {
            let p = bm_success_probability(c, i as f64 / 1000.0).unwrap();
            assert!(p + 1e-15 >= prev, "{c} at {i}");
            prev = p;
        }
    }
}

#[test]
fn averaged_enumeration_equals_closed_form_small_codes() {
    for c in codes_up_to(8) {
        for num in 0..=4 {
            let eta = rat(num, 4);
            assert_eq!(
                enumerate_exact_average(c, &eta).unwrap(),
                bm_success_probability_exact(c, &eta).unwrap(),
                "{c} eta={eta}"
            );
        }
    }
}

#[test]
fn enumeration_example_two_by_three() {
    let eta = rat(1, 2);
    let exact = enumerate_exact_average(code(2, 3), &eta).unwrap();
    assert_eq!(exact, bm_success_probability_exact(code(2, 3), &eta).unwrap());
    assert!((to_f64(&exact) - bm_success_probability(code(2, 3), 0.5).unwrap()).abs() < 1e-15);
}

#[test]
fn perfect_formula_matches_perfect_apparatus_enumeration() {
    for c in codes_up_to(8) {
        for idx in BellIndex::ALL {
            let profile = enumerate_profile(c, idx, Apparatus::Perfect).unwrap();
            assert_eq!(profile.misidentified, 0);
            for eta in [rat(0, 1), rat(1, 3), rat(9, 10), rat(1, 1)] {
                assert_eq!(
                    profile.probability(&eta).unwrap(),
                    success_probability_exact(Apparatus::Perfect, c, &eta).unwrap(),
                    "{c} {idx} eta={eta}"
                );
            }
        }
    }
    let at_09 = perfect_bm_success_probability(code(2, 2), 0.9).unwrap();
    let oracle = enumerate_profile(code(2, 2), BellIndex::new(0, 0), Apparatus::Perfect)
        .unwrap()
        .probability(&rat(9, 10))
        .unwrap();
    assert!((at_09 - to_f64(&oracle)).abs() < 1e-15);
    assert_eq!(oracle, rat(9477, 10000));
}

#[test]
fn soundness_audit_small_codes() {
    for c in codes_up_to(12) {
        for idx in BellIndex::ALL {
            let report = audit_soundness(c, idx, Apparatus::LinearOptics).unwrap();
            assert_eq!(report.misidentified, 0, "{c} {idx}");
        }
    }
}

#[test]
fn optics_model_certifies_physical_bm() {
    let table = classify_patterns().unwrap();
    assert!((table.lossless_efficiency - 0.5).abs() < 1e-12);
    certify_physical_bm(&table).unwrap();
}

#[test]
fn monte_carlo_seed_sweep_within_three_sigma() {
    let c = code(3, 3);
    let eta = 0.8;
    let expected = bm_success_probability(c, eta).unwrap();
    let within = (0..100u64)
        .filter(|&seed| {
            let s = sample_bm_average(c, eta, 4000, seed).unwrap();
            (s.estimate - expected).abs() <= 3.0 * s.standard_error
        })
        .count();
    assert!(within >= 99, "{within}/100 runs within 3 sigma");
}

#[test]
fn monte_carlo_fixed_state_matches_its_own_enumeration() {
    let c = code(2, 3);
    for idx in [BellIndex::new(0, 1), BellIndex::new(1, 0)] {
        let exact = to_f64(&enumerate_exact(c, idx, &rat(3, 4)).unwrap());
        let s = sample_bm(c, idx, 0.75, 200_000, 17).unwrap();
        assert!((s.estimate - exact).abs() <= 4.0 * s.standard_error, "{idx}: {} vs {exact}", s.estimate);
        assert_eq!(s.misidentified, 0);
    }
}

#[test]
fn perfect_apparatus_sampling_matches_formula() {
    let c = code(4, 3);
    let expected = perfect_bm_success_probability(c, 0.7).unwrap();
    let s = sample_bm_with(Apparatus::Perfect, c, InputState::Uniform, 0.7, 200_000, 5).unwrap();
    assert!((s.estimate - expected).abs() <= 4.0 * s.standard_error);
}

#[test]
fn sampling_is_independent_of_thread_count() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sample_bm_average(code(6, 5), 0.9, 20_000, 42).unwrap())
    };
    assert_eq!(run(1), run(4));
}
