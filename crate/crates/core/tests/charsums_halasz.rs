use std::sync::OnceLock;

use num_complex::Complex64;

use pretentious::characters::build_character_group;
use pretentious::charsums::{
    d_chi_sum, d_chi_sum_direct, estimate6_ratio, primitive_characters, pv_profile, twisted_sum_profile,
    verify_h_identity,
};
use pretentious::distance::{halasz_m, GridConfig};
use pretentious::halasz::{halasz_report, mean_value, progression_mean};
use pretentious::{DirichletCharacter, MultiplicativeFunction as F, PrimeTable, SieveMode};

fn table() -> &'static PrimeTable {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| PrimeTable::new(1_000_000, SieveMode::SmallestFactor).unwrap())
}

#[test]
fn h_identity_for_small_moduli() {
    let t = table();
    for q in 1..=20u64 {
        for chi in build_character_group(q).unwrap().characters() {
            let r = verify_h_identity(&chi, 3_000, t).unwrap();
            assert!(r.all_hold(), "{r:?}");
        }
    }
}

#[test]
fn hyperbola_sum_against_double_loop() {
    let t = table();
    for q in [1u64, 3, 4, 5, 8, 11] {
        for chi in build_character_group(q).unwrap().characters() {
            for tt in [0.0, 1.0] {
                let a = d_chi_sum(&chi, 30_000, tt, t).unwrap();
                let b = d_chi_sum_direct(&chi, 30_000, tt);
                assert!((a - b).norm() < 1e-8, "{chi} t={tt}");
            }
        }
    }
}

#[test]
fn polya_vinogradov_small_moduli() {
    for q in 3..=200u64 {
        for chi in primitive_characters(q).unwrap() {
            let p = pv_profile(&chi).unwrap();
            assert!(p.ratio < 1.0, "{chi}: {}", p.ratio);
            // the maximum over one period bounds every later partial sum
            let long = twisted_sum_profile(&chi, 0.0, 5 * q).unwrap();
            assert!((long.max_abs - p.max_abs).abs() < 1e-9);
        }
    }
}

#[test]
fn estimate6_and_twisted_diagnostics_are_finite() {
    let t = table();
    for chi in primitive_characters(13).unwrap() {
        let r = estimate6_ratio(&chi, 100_000, t).unwrap();
        assert!(r.is_finite() && r >= 0.0);
        let p = twisted_sum_profile(&chi, 1.0, 100_000).unwrap();
        assert!(p.ratio.is_finite());
    }
}

#[test]
fn mean_value_anchors() {
    let t = table();
    let m = mean_value(&F::archimedean(1.0), 1_000_000, t).unwrap();
    assert!((m.norm() - 0.5f64.sqrt()).abs() < 5e-3, "{m}");
    let l = mean_value(&F::liouville(), 1_000_000, t).unwrap();
    assert!(l.norm() < 0.01);
    let chi: DirichletCharacter = "4:1".parse().unwrap();
    let c = mean_value(&F::character(chi), 1_000_000, t).unwrap();
    assert!(c.norm() <= 3.0 * 4.0 / 1e6);
}

#[test]
fn halasz_m_monotone_in_x_for_liouville() {
    let t = table();
    let grid = GridConfig {
        step: Some(1.0 / 32.0),
        refine_iterations: 0,
    };
    let mut prev = 0.0;
    for x in [1_000u64, 10_000, 100_000, 1_000_000] {
        let m = halasz_m(&F::liouville(), x, 10.0, t, grid).unwrap();
        assert!(m.m >= prev);
        prev = m.m;
    }
    let r = halasz_report(&F::liouville(), 1_000_000, 10.0, t, GridConfig::default()).unwrap();
    assert!(r.mean.norm() < r.halasz_rhs);
}

#[test]
fn progression_mean_of_one_counts_residues() {
    let t = table();
    let x = 100_000u64;
    for (q, a) in [(3u64, 1u64), (7, 5), (10, 9)] {
        let pm = progression_mean(&F::one(), x, q, a, t).unwrap();
        let count = (1..=x).filter(|n| n % q == a % q).count() as f64;
        assert!((pm - Complex64::new(count * q as f64 / x as f64, 0.0)).norm() < 1e-12);
    }
}
