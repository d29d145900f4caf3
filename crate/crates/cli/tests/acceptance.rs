//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::time::Instant;

use dashu_float::FBig;
use kmtlab::bounds::{block_partition, epoch_index, kmt_exponential_bound, power_nm, variance_diff_bound, TailBound};
use kmtlab::coupling::{Coupler, CouplingStrategy, TailConfig, Weight};
use kmtlab::dist::DistributionSpec;
use kmtlab::numeric::normal;
use kmtlab::numeric::seed::{mix, UniformStream};
use kmtlab::oracles::lemma_suite;
use kmtlab::regularity::{bernstein_parameter, relation_check, sakhanenko_parameter, RelationOptions};
use num_bigint::BigUint;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn uniform_in(s: &mut UniformStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * s.next_open01()
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

fn c01_sakhanenko_rademacher() -> Outcome {
    let t = Instant::now();
    let sak = sakhanenko_parameter(&DistributionSpec::rademacher(), 1e-12).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let w = bisect(|x| x * x.exp() - 1.0, 0.0, 1.0);
    let err = (sak.lambda - w).abs();
    outcome(
        err <= 1e-8 && secs < 1.0,
        format!(
            "lambda = {:.12}, W(1) = {w:.12}, |err| = {err:.1e}, {secs:.3} s",
            sak.lambda
        ),
    )
}

fn c02_bernstein_rademacher() -> Outcome {
    let r = DistributionSpec::rademacher();
    let b200 = bernstein_parameter(&r, 200).unwrap();
    let b400 = bernstein_parameter(&r, 400).unwrap();
    // Exact scan: t_q ≤ 1/3 iff 2·3^{q−2} ≤ q!, with equality only at q = 3.
    let mut fact = BigUint::from(6u8);
    let mut pow3 = BigUint::from(3u8);
    let mut exact = true;
    for q in 4..=400u32 {
        fact *= q;
        pow3 *= 3u8;
        exact &= BigUint::from(2u8) * &pow3 < fact;
    }
    let err = (b200.value - 1.0 / 3.0).abs();
    let stable = (b400.value - b200.value).abs() <= 1e-12 && b400.argmax_q == b200.argmax_q;
    outcome(
        exact && err <= 1e-12 && b200.argmax_q == 3 && stable,
        format!(
            "b = {:.15}, |b - 1/3| = {err:.1e}, argmax q = {}, q_max 400 gives {:.15} (argmax {}), exact scan {}",
            b200.value,
            b200.argmax_q,
            b400.value,
            b400.argmax_q,
            if exact { "agrees" } else { "disagrees" }
        ),
    )
}

fn c03_relations() -> Outcome {
    let t = Instant::now();
    let mut s = UniformStream::new(mix(SEED, 3));
    let mut specs = vec![DistributionSpec::rademacher()];
    for _ in 0..6 {
        specs.push(DistributionSpec::uniform(uniform_in(&mut s, 0.1, 5.0)).unwrap());
        specs.push(DistributionSpec::gaussian(uniform_in(&mut s, 0.1, 4.0)).unwrap());
        specs.push(DistributionSpec::laplace(uniform_in(&mut s, 0.1, 4.0)).unwrap());
        specs.push(DistributionSpec::two_point(uniform_in(&mut s, 0.02, 0.98), uniform_in(&mut s, 0.1, 4.0)).unwrap());
    }
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    for spec in &specs {
        let r = relation_check(spec, spec.std_dev(), &RelationOptions::default()).unwrap();
        for name in ["c", "d", "e"] {
            let e = r.edge(name).unwrap();
            worst = worst.min(e.slack);
            if e.slack < -1e-9 {
                failures.push(format!(
                    "{} ({name}) slack {:.2e}",
                    serde_json::to_string(spec).unwrap(),
                    e.slack
                ));
            }
        }
        let b = r.edge("b").unwrap();
        if !b.holds || (r.t - 0.5 * r.lambda_sak).abs() > 0.0 {
            failures.push(format!(
                "{} (b) lhs {} rhs {}",
                serde_json::to_string(spec).unwrap(),
                b.lhs,
                b.rhs
            ));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        failures.is_empty() && secs < 30.0,
        format!(
            "{} specs, min slack over (c),(d),(e) = {worst:.3e}, (b) at t = lambda/2, {secs:.2} s{}",
            specs.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failures: {}", failures.join("; "))
            }
        ),
    )
}

fn c04_epoch_table() -> Outcome {
    let t = Instant::now();
    // D(n) = Σ_{k ≤ n} 2^{2^k}
    let mut d = vec![BigUint::ZERO];
    for k in 1..=6u32 {
        let next = d.last().unwrap() + (BigUint::from(1u8) << (1usize << k));
        d.push(next);
    }
    let mut mismatches = 0u64;
    let mut n = 1usize;
    for m in 4..=1_000_000u64 {
        let mb = BigUint::from(m);
        while d[n] < mb {
            n += 1;
        }
        if epoch_index(m).unwrap() as usize != n {
            mismatches += 1;
        }
    }
    let spots = [(4, 1), (20, 2), (21, 3), (277, 4)];
    let spots_ok = spots.iter().all(|&(m, n)| epoch_index(m).unwrap() == n);
    let secs = t.elapsed().as_secs_f64();
    outcome(
        mismatches == 0 && spots_ok && secs < 5.0,
        format!(
            "999997 values of m, {mismatches} mismatches, spot values {}, {secs:.2} s",
            if spots_ok { "ok" } else { "wrong" }
        ),
    )
}

/// n_m from the block definition: membership by direct search over b, then the first
/// index sharing m's block.
fn nm_by_definition(u: &[f64], remainder: f64) -> Vec<usize> {
    let mut tails = vec![0.0; u.len()];
    let mut acc = remainder;
    for k in (0..u.len()).rev() {
        acc += u[k];
        tails[k] = acc;
    }
    let total = tails[0];
    let block: Vec<i32> = tails
        .iter()
        .map(|&t| (1..).find(|&b| t > total * 2f64.powi(-b)).unwrap())
        .collect();
    let mut first = std::collections::HashMap::new();
    for (i, b) in block.iter().enumerate() {
        first.entry(*b).or_insert(i + 1);
    }
    block.iter().map(|b| first[b]).collect()
}

fn c05_block_partition() -> Outcome {
    let mut s = UniformStream::new(mix(SEED, 5));
    let mut seqs: Vec<(Vec<f64>, TailBound)> = vec![(
        (1..=60).map(|n| 0.5f64.powi(n)).collect(),
        TailBound::Geometric { ratio: 0.5 },
    )];
    for _ in 0..100 {
        let len = 1 + (s.next_open01() * 10_000.0) as usize;
        let scale = uniform_in(&mut s, 0.0, 3.0);
        let u: Vec<f64> = (0..len)
            .map(|k| {
                if k + 1 < len && s.next_open01() < 0.05 {
                    0.0
                } else {
                    (scale * normal::quantile(s.next_open01())).exp()
                }
            })
            .collect();
        let tail = if s.next_open01() < 0.5 {
            TailBound::Zero
        } else {
            TailBound::Geometric {
                ratio: uniform_in(&mut s, 0.0, 0.99),
            }
        };
        seqs.push((u, tail));
    }
    let (mut checked, mut mismatches) = (0usize, 0usize);
    for (i, (u, tail)) in seqs.iter().enumerate() {
        let p = block_partition(u, *tail).unwrap();
        let want = nm_by_definition(u, p.remainder);
        for m in 1..=u.len() {
            checked += 1;
            let ok = match power_nm(&p, m) {
                Ok(nm) => nm.n_m == want[m - 1] && nm.closed_form == want[m - 1] && (i > 0 || nm.n_m == m),
                Err(_) => false,
            };
            mismatches += usize::from(!ok);
        }
        if i == 0 && p.blocks.iter().any(|b| b.start != b.end) {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!(
            "{} sequences (geometric fixture + 100 random), {checked} indices, {mismatches} mismatches",
            seqs.len()
        ),
    )
}

const PREC: usize = 200;

fn big(x: f64) -> FBig {
    FBig::try_from(x).unwrap().with_precision(PREC).value()
}

/// ln of 2 Σ_{n ≥ n_m} (1 + λσ 2^{2^{n−1}}) 2^{−cλz 2^n}, summed term by term at 200 bits.
fn kmt_reference_ln(lambda: f64, sigma: f64, z: f64, m: u64, c: f64) -> f64 {
    let ln2 = big(2.0).ln();
    let ls = big(lambda) * big(sigma);
    let rate = big(c) * big(lambda) * big(z);
    let cutoff = big(2f64.powi(-230));
    let mut sum = big(0.0);
    let mut n = epoch_index(m).unwrap() as i32;
    loop {
        let e = big(2f64.powi(n));
        let half = big(2f64.powi(n - 1));
        let decay = rate.clone() * e;
        let term = (-(decay.clone() * ln2.clone())).exp() + ls.clone() * ((half - decay) * ln2.clone()).exp();
        sum += term.clone();
        if term < sum.clone() * cutoff.clone() {
            break;
        }
        n += 1;
    }
    (big(2.0) * sum).ln().to_f64().value()
}

fn c06_kmt_high_precision() -> Outcome {
    let mut s = UniformStream::new(mix(SEED, 6));
    let mut draw = |lo_rate: f64, hi_rate: f64| {
        let lambda = uniform_in(&mut s, 0.01, 3.0);
        let sigma = uniform_in(&mut s, 0.1, 10.0);
        let c = uniform_in(&mut s, 0.2, 3.0);
        let rate = uniform_in(&mut s, lo_rate, hi_rate);
        let m = (4.0 * 250_000f64.powf(s.next_open01())) as u64;
        (lambda, sigma, rate / (c * lambda), m.max(4), c)
    };
    let mut worst = 0.0f64;
    let mut converging = 0;
    while converging < 100 {
        let (lambda, sigma, z, m, c) = draw(0.6, 6.0);
        if c * lambda * z < 0.6 {
            continue;
        }
        converging += 1;
        let got = kmt_exponential_bound(lambda, sigma, z, m, c).unwrap();
        let want = kmt_reference_ln(lambda, sigma, z, m, c);
        // |ln a − ln b| bounds the relative error |a − b|/b up to second order.
        worst = worst.max((got.log_value - want).abs());
    }
    let mut divergent = 0;
    let mut flagged = 0;
    let mut tuples: Vec<_> = (0..100).map(|_| draw(0.01, 0.5)).collect();
    tuples.push((1.0, 1.0, 0.5, 10, 1.0));
    for (lambda, sigma, z, m, c) in tuples {
        if c * lambda * z > 0.5 {
            continue;
        }
        divergent += 1;
        flagged += usize::from(kmt_exponential_bound(lambda, sigma, z, m, c).unwrap().is_divergent());
    }
    outcome(
        worst <= 1e-10 && flagged == divergent,
        format!("100 tuples with c*lambda*z >= 0.6: max rel err {worst:.2e}; {flagged}/{divergent} tuples with c*lambda*z <= 0.5 flagged divergent"),
    )
}

fn c07_lemma_suites() -> Outcome {
    let t = Instant::now();
    let report = lemma_suite(10_000, SEED);
    let secs = t.elapsed().as_secs_f64();
    let parts: Vec<String> = report
        .tallies
        .iter()
        .map(|t| match t.literal_violations {
            Some(l) => format!("{} {}/{} (literal form: {l})", t.check, t.violations, t.cases),
            None => format!("{} {}/{}", t.check, t.violations, t.cases),
        })
        .collect();
    let full = report.tallies.len() == 5 && report.tallies.iter().all(|t| t.cases == 10_000);
    outcome(
        report.ok() && full && secs < 60.0,
        format!("violations: {}; {secs:.2} s", parts.join(", ")),
    )
}

/// sup_x |F_N(x) − F(x)| for a sample against a law given by F and F(·−).
fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64, cdf_left: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == v {
            j += 1;
        }
        d = d
            .max((i as f64 / n - cdf_left(v)).abs())
            .max((j as f64 / n - cdf(v)).abs());
        i = j;
    }
    d
}

fn c08_marginals() -> Outcome {
    let (k, reps) = (1000, 1000);
    let critical = 1.628 / ((k * reps) as f64).sqrt();
    let specs = [
        DistributionSpec::rademacher(),
        DistributionSpec::uniform(2.0).unwrap(),
        DistributionSpec::gaussian(1.5).unwrap(),
        DistributionSpec::laplace(1.0).unwrap(),
        DistributionSpec::two_point(0.2, 1.0).unwrap(),
        DistributionSpec::pareto(3.0, 1.0).unwrap(),
    ];
    let mut worst = 0.0f64;
    let mut pairs = 0;
    let mut failures = Vec::new();
    for spec in &specs {
        for strategy in CouplingStrategy::ALL {
            if !strategy.supports(&spec.family()) {
                continue;
            }
            pairs += 1;
            let coupler = Coupler::new(spec, strategy, k).unwrap();
            let (mut xs, mut ys) = (Vec::with_capacity(k * reps), Vec::with_capacity(k * reps));
            for r in 0..reps {
                let run = coupler.run(mix(SEED, r as u64));
                xs.extend(run.x_path);
                ys.extend(run.y_path);
            }
            let sigma = spec.std_dev();
            let dx = ks_statistic(xs, |x| spec.cdf(x), |x| spec.cdf_left(x));
            let gauss = |y: f64| normal::cdf(y / sigma);
            let dy = ks_statistic(ys, gauss, gauss);
            worst = worst.max(dx).max(dy);
            if dx >= critical || dy >= critical {
                failures.push(format!("{}/{strategy}: D_x = {dx:.2e}, D_y = {dy:.2e}", spec.name()));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{pairs} (family, strategy) pairs, pooled N = {}, max D = {worst:.3e} vs 1% critical {critical:.3e}{}",
            k * reps,
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
    )
}

fn c09_identity_collapse() -> Outcome {
    let k = 100_000;
    let spec = DistributionSpec::gaussian(1.0).unwrap();
    let run = Coupler::new(&spec, CouplingStrategy::PerVariableQuantile, k)
        .unwrap()
        .run(SEED);
    let sup = run.lambda_path.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    outcome(sup <= 1e-9 * k as f64, format!("K = {k}, max |Lambda_k| = {sup:.3e}"))
}

fn c10_tail_behaviour() -> Outcome {
    let ms = [4, 20, 84];
    let zs = [2.0, 4.0, 6.0, 8.0, 10.0];
    let cfg = |strategy| TailConfig {
        spec: DistributionSpec::rademacher(),
        strategy,
        weight: Weight::Log,
        k: 1024,
        reps: 10_000,
        seed: SEED,
        workers: 0,
    };
    let mut monotone = true;
    let mut sups = Vec::new();
    let mut notes = Vec::new();
    for strategy in CouplingStrategy::ALL {
        let c = cfg(strategy);
        let samples = c.sup_samples(&ms).unwrap();
        let est = c.tail_grid(&ms, &zs).unwrap();
        let p = |i: usize, j: usize| est[i * zs.len() + j].p_hat;
        for i in 0..ms.len() {
            monotone &= (1..zs.len()).all(|j| p(i, j) <= p(i, j - 1));
        }
        for j in 0..zs.len() {
            monotone &= (1..ms.len()).all(|i| p(i, j) <= p(i - 1, j));
        }
        notes.push(format!(
            "{strategy} p(m=4) = {:?}",
            (0..zs.len()).map(|j| p(0, j)).collect::<Vec<_>>()
        ));
        sups.push((strategy, samples.into_iter().next().unwrap()));
    }
    let independent = &sups
        .iter()
        .find(|(s, _)| *s == CouplingStrategy::Independent)
        .unwrap()
        .1;
    let mut ordered = true;
    for (strategy, quant) in sups.iter().filter(|(s, _)| *s != CouplingStrategy::Independent) {
        let d: Vec<f64> = independent.iter().zip(quant).map(|(a, b)| a - b).collect();
        let n = d.len() as f64;
        let mean = d.iter().sum::<f64>() / n;
        let sd = (d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let half = 1.959963984540054 * sd / n.sqrt();
        ordered &= mean - half > 0.0;
        notes.push(format!("independent - {strategy}: {mean:.4} +/- {half:.4}"));
    }
    outcome(
        monotone && ordered,
        format!(
            "p_hat {} in z and m; ordering {}; {}",
            if monotone { "nonincreasing" } else { "NOT monotone" },
            if ordered { "holds" } else { "fails" },
            notes.join("; ")
        ),
    )
}

fn c11_variance_diff() -> Outcome {
    let h: f64 = 2.0;
    let spec = DistributionSpec::uniform(h).unwrap();
    let sigma = h / 3f64.sqrt();
    let mut ok = true;
    let mut notes = Vec::new();
    for m in [1usize, 10, 100] {
        let r = variance_diff_bound(&spec, 3.0, m, 1.0, 100_000).unwrap();
        // σ̃_k² = E[X² 1{|X| ≤ k^{1/3}}] = k/(3h) below the support edge.
        let direct: f64 = (m..=100_000)
            .map(|k| {
                let st = if (k as f64) >= h.powi(3) {
                    sigma
                } else {
                    (k as f64 / (3.0 * h)).sqrt()
                };
                (sigma - st).powi(2) / (k as f64).powf(2.0 / 3.0)
            })
            .sum();
        let agree = (r.lhs - direct).abs() <= 1e-8 * direct;
        ok &= r.holds && r.lhs <= r.rhs && agree;
        notes.push(format!(
            "m = {m}: lhs {:.6e} (direct {direct:.6e}) <= rhs {:.6e}",
            r.lhs, r.rhs
        ));
    }
    outcome(ok, notes.join("; "))
}

fn c12_determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_kmtlab");
    let mut outputs = Vec::new();
    for strategy in ["independent", "per_variable_quantile", "blockwise_sum_quantile"] {
        for workers in ["1", "4", "8"] {
            let out = Command::new(exe)
                .args([
                    "--seed",
                    "7",
                    "--workers",
                    workers,
                    "couple",
                    "--spec",
                    r#"{"family":"Rademacher"}"#,
                ])
                .args([
                    "--strategy",
                    strategy,
                    "-K",
                    "1024",
                    "--reps",
                    "2000",
                    "--m",
                    "4,20,84",
                    "--z",
                    "2,4,6,8",
                ])
                .output()
                .expect("run kmtlab");
            outputs.push((strategy, workers, out.status.success(), out.stdout));
        }
    }
    let all_ok = outputs.iter().all(|o| o.2 && !o.3.is_empty());
    let identical = outputs.chunks(3).all(|c| c[0].3 == c[1].3 && c[0].3 == c[2].3);
    outcome(
        all_ok && identical,
        format!(
            "couple over 3 strategies x workers {{1, 4, 8}}: outputs {}",
            if identical { "byte-identical" } else { "differ" }
        ),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        ("Sakhanenko parameter of Rademacher", c01_sakhanenko_rademacher),
        ("Bernstein parameter of Rademacher", c02_bernstein_rademacher),
        ("regularity relations on random light-tailed laws", c03_relations),
        ("epoch index table", c04_epoch_table),
        ("block partition n_m", c05_block_partition),
        ("exponential bound vs 200-bit summation", c06_kmt_high_precision),
        ("lemma oracle suites", c07_lemma_suites),
        ("coupling marginals", c08_marginals),
        ("Gaussian identity collapse", c09_identity_collapse),
        ("tail estimate behaviour", c10_tail_behaviour),
        ("variance difference bound", c11_variance_diff),
        ("couple determinism across workers", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        failed += usize::from(!o.pass);
        println!(
            "[{}] {:>2} {name}: {} ({:.2} s)",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
