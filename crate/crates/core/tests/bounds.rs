use kmtlab::bounds::{
    block_partition, cumulative_exact, epoch_blocks, epoch_index, kmt_exponential_bound, power_bound, power_nm,
    slower_sequence, sup_tails, variance_diff_bound, TailBound,
};
use kmtlab::dist::DistributionSpec;
use num_bigint::BigUint;
use proptest::prelude::*;

#[test]
fn epoch_spot_values() {
    for (m, n) in [
        (4, 1),
        (5, 2),
        (20, 2),
        (21, 3),
        (276, 3),
        (277, 4),
        (65_812, 4),
        (65_813, 5),
        (1_000_000, 5),
    ] {
        assert_eq!(epoch_index(m).unwrap(), n, "m = {m}");
    }
    assert_eq!(epoch_index(u64::MAX).unwrap(), 6);
    assert!(epoch_index(3).is_err());
    assert_eq!(cumulative_exact(3), BigUint::from(276u32));
}

#[test]
fn epoch_blocks_tile_the_horizon() {
    let b = epoch_blocks(300);
    assert_eq!(
        b.iter().map(|e| (e.start, e.end)).collect::<Vec<_>>(),
        vec![(1, 4), (5, 20), (21, 276), (277, 300)]
    );
    assert!(b.last().unwrap().truncated);
    assert!(!b[2].truncated);
}

/// 2 Σ_{n ≥ n_m} (1 + λσ 2^{2^{n−1}}) 2^{−cλz 2^n}, straight in f64 up to n = 10,
/// past which 2^{2^{n−1}} overflows; the parameters below make those terms negligible.
fn kmt_naive(lambda: f64, sigma: f64, z: f64, m: u64, c: f64) -> f64 {
    let start = epoch_index(m).unwrap();
    (start..=10)
        .map(|n| {
            let e = 2f64.powi(n as i32);
            (1.0 + lambda * sigma * 2f64.powf(e / 2.0)) * 2f64.powf(-c * lambda * z * e)
        })
        .sum::<f64>()
        * 2.0
}

#[test]
fn kmt_matches_naive_sum_in_range() {
    for (lambda, sigma, z, m, c) in [
        (0.5, 1.0, 2.0, 4, 1.0),
        (1.0, 0.3, 0.8, 20, 1.0),
        (0.2, 2.0, 10.0, 300, 0.7),
        (0.567, 1.0, 1.5, 5, 1.0),
    ] {
        let b = kmt_exponential_bound(lambda, sigma, z, m, c).unwrap();
        let want = kmt_naive(lambda, sigma, z, m, c);
        assert!((b.value - want).abs() <= 1e-12 * want, "{b:?} vs {want}");
        assert!(b.truncation_bound <= 1e-15 * b.value.max(1e-300));
        assert!((b.replay() - b.log_value).abs() < 1e-14);
    }
}

#[test]
fn kmt_divergence_threshold() {
    let at = kmt_exponential_bound(1.0, 1.0, 0.5, 10, 1.0).unwrap();
    assert!(at.is_divergent() && at.vacuous);
    let past = kmt_exponential_bound(1.0, 1.0, 0.5 + 1e-9, 10, 1.0).unwrap();
    assert!(past.value.is_finite());
}

proptest! {
    #[test]
    fn kmt_is_monotone(lambda in 0.05f64..2.0, sigma in 0.1f64..5.0, c in 0.5f64..2.0,
                       rate in 0.6f64..4.0, dz in 0.0f64..3.0, m in 4u64..100_000) {
        let z = rate / (c * lambda);
        let a = kmt_exponential_bound(lambda, sigma, z, m, c).unwrap();
        let b = kmt_exponential_bound(lambda, sigma, z + dz, m, c).unwrap();
        let later = kmt_exponential_bound(lambda, sigma, z, m * 300, c).unwrap();
        prop_assert!(b.log_value <= a.log_value + 1e-12);
        prop_assert!(later.log_value <= a.log_value + 1e-12);
    }
}

#[test]
fn geometric_fixture_power_bound() {
    let u: Vec<f64> = (1..=30).map(|n| 0.5f64.powi(n)).collect();
    let p = block_partition(&u, TailBound::Geometric { ratio: 0.5 }).unwrap();
    let a = vec![1.0; 30];
    for m in 1..=30 {
        assert_eq!(power_nm(&p, m).unwrap().n_m, m);
        // (C/ε^q)(T_m + U) with ā = a.
        let v = power_bound(&p, &a, &a, m, 1.0, 1.0, 3.0).unwrap();
        let want = 0.5f64.powi(m as i32 - 1) + 1.0;
        assert!((v.value - want).abs() < 1e-14 * want);
    }
}

#[test]
fn power_bound_rejects_bad_normalizers() {
    let p = block_partition(&[1.0, 1.0, 1.0], TailBound::Zero).unwrap();
    assert!(power_bound(&p, &[1.0, 0.5, 2.0], &[1.0, 0.5, 1.0], 1, 1.0, 1.0, 3.0).is_err());
    assert!(power_bound(&p, &[1.0, 1.0, 1.0], &[1.0, 2.0, 1.0], 1, 1.0, 1.0, 3.0).is_err());
    assert!(power_bound(&p, &[1.0; 3], &[1.0; 3], 1, 1.0, 1.0, 2.0).is_err());
}

#[test]
fn slower_sequence_levels() {
    // One family member with b_k = 1/k², a_k = 1: tail(j) ~ 1/j.
    let h = 5000;
    let a = vec![1.0; h];
    let b = vec![(1..=h).map(|k| 1.0 / (k * k) as f64).collect::<Vec<_>>()];
    let tails = sup_tails(&b, &a, None).unwrap();
    // Constant a never doubles, so only the first level fits.
    let s = slower_sequence(&tails, &a, None).unwrap();
    assert_eq!(s.levels.len(), 1);

    let a: Vec<f64> = (1..=h).map(|k| k as f64).collect();
    let tails = sup_tails(&b, &a, None).unwrap();
    let s = slower_sequence(&tails, &a, None).unwrap();
    assert!(s.levels.len() >= 3);
    for w in s.levels.windows(2) {
        assert!(a[w[1] - 1] >= 2.0 * a[w[0] - 1]);
    }
    for (k, &n) in s.levels.iter().enumerate() {
        assert!(tails[n - 1] <= 1.0 / ((k + 2) as f64).powi(3));
    }
    assert!(s.v.windows(2).all(|w| w[1] >= w[0]));
    for ((u, v), a) in s.ubar_a.iter().zip(&s.v).zip(&a) {
        assert!((u * v - a).abs() <= 1e-12 * a);
    }
}

/// Σ_{k=m}^{n} (σ − √(k^{3/q}/(3h)))² / k^{2/q} for CenteredUniform(h), direct.
fn uniform_variance_sum(h: f64, q: f64, m: usize, n: usize) -> f64 {
    let sigma = h / 3f64.sqrt();
    (m..=n)
        .map(|k| {
            let c = (k as f64).powf(1.0 / q);
            let st = if c >= h { sigma } else { (c.powi(3) / (3.0 * h)).sqrt() };
            (sigma - st).powi(2) / (k as f64).powf(2.0 / q)
        })
        .sum()
}

#[test]
fn variance_diff_against_direct_sum() {
    let spec = DistributionSpec::uniform(2.0).unwrap();
    for m in [1, 10, 100] {
        let r = variance_diff_bound(&spec, 3.0, m, 1.0, 100_000).unwrap();
        let want = uniform_variance_sum(2.0, 3.0, m, 100_000);
        // |X|³ ≤ 8, so nothing survives past k = 8 and the majorant is zero.
        assert_eq!(r.tail_majorant, 0.0);
        assert!((r.lhs - want).abs() <= 1e-8 * want, "m={m}: {} vs {want}", r.lhs);
        assert!(r.holds);
    }
}

#[test]
fn variance_diff_needs_the_moment() {
    let p = DistributionSpec::pareto(2.5, 1.0).unwrap();
    assert!(variance_diff_bound(&p, 3.0, 1, 1.0, 100).is_err());
    assert!(variance_diff_bound(&p, 2.2, 1, 1.0, 1000).unwrap().lhs.is_finite());
}
