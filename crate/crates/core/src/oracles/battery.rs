//! Randomized oracle batteries shared by the `verify` command and the test suites.

use num_bigint::BigUint;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    epoch_bound_identity_checks, maximal_weighted_check, moment_split_check, poly_from_exp_check, truncation_sum_check,
    CheckResult,
};
use crate::bounds::{block_partition, cumulative_exact, epoch_index, power_nm, TailBound};
use crate::dist::DistributionSpec;
use crate::numeric::normal;
use crate::numeric::seed::mix;

/// Upper end of the exhaustive n_m table in the partition suite.
pub const EPOCH_TABLE_LIMIT: u64 = 1_000_000;
/// Violations kept verbatim per report.
const KEEP: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub witness: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckTally {
    pub check: String,
    pub cases: usize,
    pub violations: usize,
    /// Failures of a literal form that is known to be false; informational.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub literal_violations: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub tallies: Vec<CheckTally>,
    pub failures: Vec<Violation>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        Self {
            suite: suite.into(),
            ..Self::default()
        }
    }

    pub fn ok(&self) -> bool {
        self.tallies.iter().all(|t| t.violations == 0)
    }

    pub fn cases(&self) -> usize {
        self.tallies.iter().map(|t| t.cases).sum()
    }

    pub fn tally(&self, check: &str) -> Option<&CheckTally> {
        self.tallies.iter().find(|t| t.check == check)
    }

    fn record(&mut self, check: &str, cases: usize, failed: Vec<Value>, literal: Option<usize>) {
        self.tallies.push(CheckTally {
            check: check.into(),
            cases,
            violations: failed.len(),
            literal_violations: literal,
        });
        let room = KEEP.saturating_sub(self.failures.len());
        self.failures
            .extend(failed.into_iter().take(room).map(|witness| Violation {
                check: check.into(),
                witness,
            }));
    }

    pub fn merge(mut self, other: SuiteReport) -> Self {
        self.suite = format!("{}+{}", self.suite, other.suite);
        self.tallies.extend(other.tallies);
        let room = KEEP.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
        self
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, stream))
}

fn std_normal(r: &mut ChaCha8Rng) -> f64 {
    // Open interval so the quantile stays finite.
    normal::quantile((r.random::<u64>() >> 11) as f64 * (1.0 / (1u64 << 53) as f64) + 0.5 / (1u64 << 53) as f64)
}

fn failed(r: &CheckResult<f64>) -> Option<Value> {
    (!r.holds).then(|| json!({ "lhs": r.lhs, "rhs": r.rhs, "slack": r.slack, "input": r.witness }))
}

fn random_law(r: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let n = r.random_range(1..=6);
    let w: Vec<f64> = (0..n).map(|_| r.random::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|p| (r.random_range(-5.0..5.0), p / total)).collect()
}

fn random_light_spec(r: &mut ChaCha8Rng) -> (DistributionSpec, f64) {
    let t = r.random_range(0.05..3.0);
    match r.random_range(0..5) {
        0 => (DistributionSpec::rademacher(), t),
        1 => (DistributionSpec::uniform(r.random_range(0.1..5.0)).expect("valid"), t),
        2 => (DistributionSpec::gaussian(r.random_range(0.1..3.0)).expect("valid"), t),
        3 => {
            let b = r.random_range(0.1..3.0);
            (
                DistributionSpec::laplace(b).expect("valid"),
                r.random_range(0.05..0.95) / b,
            )
        }
        _ => (
            DistributionSpec::two_point(r.random_range(0.02..0.98), r.random_range(0.1..4.0)).expect("valid"),
            t,
        ),
    }
}

/// The five lemma checks, `cases` random inputs each.
pub fn lemma_suite(cases: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("lemmas");

    let mut r = rng(seed, 0);
    let (mut bad, mut literal) = (Vec::new(), 0);
    for _ in 0..cases {
        let k = r.random_range(2..=64);
        let m = r.random_range(0..k);
        let mut acc = 0.0;
        let a: Vec<f64> = (0..k)
            .map(|_| {
                acc += std_normal(&mut r).abs();
                acc
            })
            .collect();
        let b: Vec<f64> = (0..k).map(|_| std_normal(&mut r)).collect();
        // Cumulative |normal| can start at 0 only with probability 0; guard anyway.
        let Ok(res) = maximal_weighted_check(&a, &b, m, k) else {
            continue;
        };
        literal += usize::from(!res.literal.holds);
        bad.extend(failed(&res.proven));
    }
    report.record("maximal_weighted", cases, bad, Some(literal));

    let mut r = rng(seed, 1);
    let mut bad = Vec::new();
    for _ in 0..cases {
        let (x, y) = (random_law(&mut r), random_law(&mut r));
        let p = r.random_range(2.0..8.0) + 1e-9;
        match moment_split_check(&x, &y, p) {
            Ok(res) => {
                bad.extend(failed(&res.split));
                bad.extend(failed(&res.centred));
            }
            Err(e) => bad.push(json!({ "error": e.to_string() })),
        }
    }
    report.record("moment_split", cases, bad, None);

    let mut r = rng(seed, 2);
    let mut bad = Vec::new();
    for _ in 0..cases {
        let (spec, t) = random_light_spec(&mut r);
        let q = r.random_range(2..=12);
        match poly_from_exp_check(&spec, t, q) {
            Ok(res) => bad.extend(failed(&res)),
            Err(e) => bad.push(json!({ "error": e.to_string(), "spec": spec, "t": t, "q": q })),
        }
    }
    report.record("poly_from_exp", cases, bad, None);

    let mut r = rng(seed, 3);
    let (mut bad, mut literal) = (Vec::new(), 0);
    for _ in 0..cases {
        let x = r.random_range(-10.0..10.0);
        let q = r.random_range(2.0..6.0) + 1e-9;
        let n = r.random_range(1..=1000);
        let res = truncation_sum_check(x, q, n).expect("valid input");
        literal += usize::from(!res.literal.holds);
        bad.extend(failed(&res.proven));
    }
    report.record("truncation_sum", cases, bad, Some(literal));

    // The identities are deterministic in n; cases draw n from 2..=16.
    let table = epoch_bound_identity_checks(2..=16).expect("n ≥ 2");
    let mut r = rng(seed, 4);
    let mut bad = Vec::new();
    for _ in 0..cases {
        let e = &table[r.random_range(0..table.len())];
        bad.extend(failed(&e.lower));
        bad.extend(failed(&e.upper));
    }
    report.record("epoch_identities", cases, bad, None);
    report
}

/// n_m by its definition: the largest n with D(n−1) + 1 ≤ m, in big integers.
fn epoch_index_by_definition(table: &[BigUint], m: u64) -> u32 {
    let m = BigUint::from(m);
    let mut n = 1;
    while (n as usize) < table.len() && table[n as usize] < m {
        n += 1;
    }
    n
}

/// b(n) = min{b : T_n > U 2^{−b}} by linear search.
fn b_by_search(total: f64, t: f64) -> u32 {
    (0..).find(|&b| t > libm::ldexp(total, -(b as i32))).expect("T_n > 0")
}

fn random_weights(r: &mut ChaCha8Rng) -> (Vec<f64>, TailBound) {
    let len = r.random_range(1..=10_000);
    let scale = r.random_range(0.0..3.0);
    // Interior zeros are allowed; the last weight stays positive so every T_n > 0.
    let u: Vec<f64> = (0..len)
        .map(|k| {
            if k + 1 < len && r.random::<f64>() < 0.05 {
                0.0
            } else {
                (scale * std_normal(r)).exp()
            }
        })
        .collect();
    let tail = if r.random::<bool>() {
        TailBound::Zero
    } else {
        TailBound::Geometric {
            ratio: r.random_range(0.0..0.99),
        }
    };
    (u, tail)
}

/// The epoch table for 4 ≤ m ≤ `epoch_limit` plus `cases` random weight sequences,
/// each checked at every m against the search-based definitions of b(n) and n_m.
pub fn partition_suite(cases: usize, seed: u64, epoch_limit: u64) -> SuiteReport {
    let mut report = SuiteReport::new("partitions");

    let table: Vec<BigUint> = (0..=7).map(cumulative_exact).collect();
    let mut bad = Vec::new();
    let limit = if cases == 0 { 0 } else { epoch_limit };
    let count = limit.saturating_sub(3) as usize;
    for m in 4..=limit {
        let got = epoch_index(m).expect("m ≥ 4");
        let want = epoch_index_by_definition(&table, m);
        if got != want {
            bad.push(json!({ "m": m, "got": got, "want": want }));
        }
    }
    report.record("epoch_index", count, bad, None);

    let mut r = rng(seed, 10);
    let mut bad = Vec::new();
    let mut sequences = Vec::with_capacity(cases + 1);
    if cases > 0 {
        sequences.push((
            (1..=60).map(|n| 0.5f64.powi(n)).collect::<Vec<_>>(),
            TailBound::Geometric { ratio: 0.5 },
        ));
    }
    while sequences.len() < cases {
        sequences.push(random_weights(&mut r));
    }
    for (i, (u, tail)) in sequences.iter().enumerate() {
        let p = match block_partition(u, *tail) {
            Ok(p) => p,
            Err(e) => {
                bad.push(json!({ "sequence": i, "error": e.to_string() }));
                continue;
            }
        };
        let b: Vec<u32> = (1..=u.len()).map(|n| b_by_search(p.total, p.tail_at(n))).collect();
        let mut first = std::collections::HashMap::new();
        for (n, &bn) in b.iter().enumerate() {
            first.entry(bn).or_insert(n + 1);
        }
        for m in 1..=u.len() {
            let want = first[&b[m - 1]];
            match power_nm(&p, m) {
                Ok(nm) if nm.n_m == want && p.b(m) == b[m - 1] => {}
                Ok(nm) => bad.push(json!({ "sequence": i, "m": m, "n_m": nm.n_m, "want": want })),
                Err(e) => bad.push(json!({ "sequence": i, "m": m, "error": e.to_string() })),
            }
            if i == 0 && p.b(m) as usize != m {
                bad.push(json!({ "fixture": "geometric", "m": m, "b": p.b(m) }));
            }
        }
    }
    report.record("block_partition", sequences.len(), bad, None);
    report
}
