use kmtlab::dist::DistributionSpec;
use kmtlab::numeric::ln_gamma;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Composite Simpson on [a, b] with n (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn absolute_moments_match_closed_forms() {
    for q in [1.0, 2.0, 3.0, 4.5, 10.0] {
        let u = DistributionSpec::uniform(2.0).unwrap();
        assert!(
            rel(u.abs_moment(q).unwrap(), 2f64.powf(q) / (q + 1.0)) < 1e-12,
            "uniform q={q}"
        );

        let g = DistributionSpec::gaussian(1.5).unwrap();
        let want =
            (q * 1.5f64.ln() + 0.5 * q * 2f64.ln() + ln_gamma(0.5 * (q + 1.0)) - 0.5 * std::f64::consts::PI.ln()).exp();
        assert!(rel(g.abs_moment(q).unwrap(), want) < 1e-12, "gaussian q={q}");

        let l = DistributionSpec::laplace(0.7).unwrap();
        assert!(rel(l.abs_moment(q).unwrap(), 0.7f64.powf(q) * ln_gamma(q + 1.0).exp()) < 1e-12);

        let r = DistributionSpec::rademacher();
        assert_eq!(r.abs_moment(q).unwrap(), 1.0);
    }
}

#[test]
fn two_point_atoms_are_centred() {
    for (p, v) in [(0.1, 1.0), (0.5, 2.0), (0.9, 0.3)] {
        let s = DistributionSpec::two_point(p, v).unwrap();
        let atoms = s.atoms().unwrap();
        let mean: f64 = atoms.iter().map(|(x, w)| x * w).sum();
        let var: f64 = atoms.iter().map(|(x, w)| x * x * w).sum();
        assert!(mean.abs() < 1e-14);
        assert!(rel(var, v) < 1e-14);
        assert!(rel(s.variance(), v) < 1e-14);
    }
}

#[test]
fn pareto_moments_diverge_at_kappa() {
    let p = DistributionSpec::pareto(3.5, 1.0).unwrap();
    assert!(p.abs_moment(3.0).unwrap().is_finite());
    assert_eq!(p.abs_moment(3.5).unwrap(), f64::INFINITY);
    assert_eq!(p.abs_moment(5.0).unwrap(), f64::INFINITY);
    assert!(!p.has_exponential_moment());
    // E|X|^q = κ s^q / (κ − q)
    assert!(rel(p.abs_moment(2.0).unwrap(), 3.5 / 1.5) < 1e-12);
}

#[test]
fn tilted_third_against_simpson() {
    let lambda = 0.4;
    let u = DistributionSpec::uniform(2.0).unwrap();
    let want = simpson(|x| x.powi(3) * (lambda * x).exp() / 2.0, 0.0, 2.0, 2000);
    assert!(rel(u.tilted_third(lambda).unwrap(), want) < 1e-10);

    let g = DistributionSpec::gaussian(1.0).unwrap();
    let dens = |x: f64| (2.0 / std::f64::consts::PI).sqrt() * (-0.5 * x * x).exp();
    let want = simpson(|x| x.powi(3) * (lambda * x).exp() * dens(x), 0.0, 40.0, 40_000);
    assert!(rel(g.tilted_third(lambda).unwrap(), want) < 1e-9);

    let l = DistributionSpec::laplace(1.0).unwrap();
    // ∫ x³ e^{−(1−λ)x} dx = 6/(1−λ)⁴
    assert!(rel(l.tilted_third(lambda).unwrap(), 6.0 / (1.0 - lambda).powi(4)) < 1e-12);
    assert_eq!(l.tilted_third(1.0).unwrap(), f64::INFINITY);
}

#[test]
fn closed_forms_agree_with_quadrature() {
    let orders = [1.0, 2.5, 3.0, 6.0];
    let tilts = [0.1, 0.3];
    for spec in [
        DistributionSpec::uniform(1.3).unwrap(),
        DistributionSpec::gaussian(0.8).unwrap(),
        DistributionSpec::laplace(1.1).unwrap(),
    ] {
        let a = spec.moment_profile(&orders, &tilts).unwrap();
        let b = spec.moment_profile_by_quadrature(&orders, &tilts).unwrap();
        let pairs = a
            .abs_moments
            .iter()
            .zip(&b.abs_moments)
            .chain(a.exp_moments.iter().zip(&b.exp_moments));
        for ((_, x), (_, y)) in pairs {
            assert!(rel(*x, *y) < 1e-8, "{}: {x} vs {y}", spec.name());
        }
    }
}

#[test]
fn uniform_tail_moment_and_truncated_variance() {
    let h: f64 = 2.0;
    let u = DistributionSpec::uniform(h).unwrap();
    for m in [0.5, 1.0, 4.0, 7.9] {
        let c: f64 = f64::powf(m, 1.0 / 3.0);
        let want = (h.powi(4) - c.powi(4)) / (4.0 * h);
        assert!(rel(u.tail_moment(3.0, m).unwrap(), want) < 1e-12, "m={m}");
    }
    assert_eq!(u.tail_moment(3.0, 8.0).unwrap(), 0.0);
    for k in [0.3, 1.0, 1.9] {
        // X 1{|X| ≤ k} is centred with second moment k³/(3h).
        assert!(rel(u.truncated_variance(k).unwrap(), k.powi(3) / (3.0 * h)) < 1e-12);
    }
    assert!(rel(u.truncated_variance(5.0).unwrap(), h * h / 3.0) < 1e-12);
}

#[test]
fn spec_json_round_trip() {
    let specs = [
        DistributionSpec::rademacher(),
        DistributionSpec::uniform(2.0).unwrap(),
        DistributionSpec::gaussian(0.3).unwrap(),
        DistributionSpec::laplace(4.0).unwrap(),
        DistributionSpec::two_point(0.2, 1.7).unwrap(),
        DistributionSpec::pareto(2.5, 1.0).unwrap(),
    ];
    for s in specs {
        let j = serde_json::to_string(&s).unwrap();
        let back: DistributionSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(s, back, "{j}");
    }
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(DistributionSpec::uniform(0.0).is_err());
    assert!(DistributionSpec::gaussian(-1.0).is_err());
    assert!(DistributionSpec::two_point(1.0, 1.0).is_err());
    assert!(DistributionSpec::pareto(2.0, 1.0).is_err());
    assert!(serde_json::from_str::<DistributionSpec>(r#"{"family":"Cauchy","params":{}}"#).is_err());
    assert!(serde_json::from_str::<DistributionSpec>(r#"{"family":"CenteredUniform","params":{}}"#).is_err());
}

#[test]
fn sampling_is_seeded() {
    let g = DistributionSpec::gaussian(1.0).unwrap();
    assert_eq!(g.sample(100, 7), g.sample(100, 7));
    assert_ne!(g.sample(100, 7), g.sample(100, 8));
    let xs = g.sample(200_000, 1);
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
    assert!(mean.abs() < 0.01);
    assert!((var - 1.0).abs() < 0.015);
}

fn any_spec() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        Just(DistributionSpec::rademacher()),
        (0.1f64..5.0).prop_map(|h| DistributionSpec::uniform(h).unwrap()),
        (0.1f64..5.0).prop_map(|s| DistributionSpec::gaussian(s).unwrap()),
        (0.1f64..5.0).prop_map(|b| DistributionSpec::laplace(b).unwrap()),
        (0.01f64..0.99, 0.1f64..4.0).prop_map(|(p, v)| DistributionSpec::two_point(p, v).unwrap()),
        (2.1f64..6.0, 0.5f64..2.0).prop_map(|(k, s)| DistributionSpec::pareto(k, s).unwrap()),
    ]
}

proptest! {
    #[test]
    fn quantile_inverts_cdf(spec in any_spec(), u in 0.001f64..0.999) {
        let x = spec.quantile(u);
        // Left-continuous inverse: F(x−) ≤ u ≤ F(x).
        prop_assert!(spec.cdf_left(x) <= u + 1e-12);
        prop_assert!(spec.cdf(x) >= u - 1e-12);
    }

    #[test]
    fn cdf_is_monotone(spec in any_spec(), a in -10.0f64..10.0, d in 0.0f64..5.0) {
        prop_assert!(spec.cdf(a) <= spec.cdf(a + d) + 1e-15);
        prop_assert!(spec.cdf_left(a) <= spec.cdf(a));
    }

    #[test]
    fn lyapunov_moment_monotonicity(spec in any_spec(), p in 0.5f64..4.0, d in 0.1f64..2.0) {
        // (E|X|^p)^{1/p} ≤ (E|X|^{p+d})^{1/(p+d)}
        let a = spec.ln_abs_moment(p).unwrap() / p;
        let b = spec.ln_abs_moment(p + d).unwrap() / (p + d);
        prop_assert!(a <= b + 1e-10 * a.abs().max(1.0));
    }
}
