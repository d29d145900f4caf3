//! Explicit couplings (X̃_k, Ỹ_k) with exact marginals, the discrepancy process
//! Λ̃_k = Σ_{i≤k} (X̃_i − Ỹ_i), and Monte Carlo estimates of weighted-supremum tails.
//!
//! These are surrogate couplings: they have the right marginals but are not the
//! optimal construction, so empirical tails say nothing about the optimal coupling.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::epoch_blocks;
use crate::dist::{DistributionSpec, Family};
use crate::error::{Error, Result};
use crate::numeric::seed::{mix, UniformStream};
use crate::numeric::{ln_gamma, normal};

/// Smallest replication count accepted by the tail estimators.
pub const MIN_REPS: usize = 100;
/// Two-sided 95% normal quantile used by the Wilson interval.
pub const WILSON_Z: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingStrategy {
    /// X̃ and Ỹ drawn from independent streams.
    Independent,
    /// X̃_i = F^{-1}(V_i), Ỹ_i = σΦ^{-1}(F(X̃_i−) + V'_i p(X̃_i)).
    PerVariableQuantile,
    /// Epoch blocks with quantile-coupled block sums and exact conditional paths.
    BlockwiseSumQuantile,
}

impl CouplingStrategy {
    pub const ALL: [CouplingStrategy; 3] = [
        CouplingStrategy::Independent,
        CouplingStrategy::PerVariableQuantile,
        CouplingStrategy::BlockwiseSumQuantile,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CouplingStrategy::Independent => "independent",
            CouplingStrategy::PerVariableQuantile => "per_variable_quantile",
            CouplingStrategy::BlockwiseSumQuantile => "blockwise_sum_quantile",
        }
    }

    pub fn supports(self, family: &Family) -> bool {
        match self {
            CouplingStrategy::BlockwiseSumQuantile => {
                matches!(family, Family::Rademacher | Family::CenteredGaussian { .. })
            }
            _ => true,
        }
    }
}

impl fmt::Display for CouplingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CouplingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown coupling strategy `{s}`")))
    }
}

/// Normalizing weight w(k) in sup_{k ≥ m} |Λ̃_k| / w(k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Weight {
    /// ln k.
    Log,
    /// k^{1/q}.
    Power { q: f64 },
}

impl Weight {
    pub fn at(self, k: usize) -> f64 {
        let k = k as f64;
        match self {
            Weight::Log => k.ln(),
            Weight::Power { q } => k.powf(1.0 / q),
        }
    }

    fn min_index(self) -> usize {
        match self {
            Weight::Log => 2,
            Weight::Power { .. } => 1,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Log => f.write_str("log"),
            Weight::Power { q } => write!(f, "pow:{q}"),
        }
    }
}

/// Accepts `log` or `pow:<q>`.
impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "log" {
            return Ok(Weight::Log);
        }
        let q = s
            .strip_prefix("pow:")
            .and_then(|q| q.parse::<f64>().ok())
            .ok_or_else(|| Error::InvalidArgument(format!("weight must be `log` or `pow:<q>`, got `{s}`")))?;
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "weight exponent must be positive, got {q}"
            )));
        }
        Ok(Weight::Power { q })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingRun {
    pub spec: DistributionSpec,
    pub strategy: CouplingStrategy,
    pub seed: u64,
    pub x_path: Vec<f64>,
    pub y_path: Vec<f64>,
    /// Λ̃_k for k = 1, …, K.
    pub lambda_path: Vec<f64>,
}

impl CouplingRun {
    pub fn len(&self) -> usize {
        self.x_path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_path.is_empty()
    }

    /// (k, x, y, lambda) with k 1-based.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64, f64, f64)> + '_ {
        (0..self.len()).map(|i| (i + 1, self.x_path[i], self.y_path[i], self.lambda_path[i]))
    }

    pub fn discrepancy_sup(&self, weight: Weight, m: usize) -> Result<f64> {
        discrepancy_sup(&self.lambda_path, weight, m)
    }
}

/// max_{m ≤ k ≤ K} |Λ̃_k| / w(k), with `lambda` holding Λ̃_1, …, Λ̃_K.
pub fn discrepancy_sup(lambda: &[f64], weight: Weight, m: usize) -> Result<f64> {
    check_range(lambda.len(), weight, m)?;
    Ok((m..=lambda.len())
        .map(|k| lambda[k - 1].abs() / weight.at(k))
        .fold(0.0, f64::max))
}

fn check_range(len: usize, weight: Weight, m: usize) -> Result<()> {
    if m < weight.min_index() || m > len {
        return Err(Error::InvalidArgument(format!(
            "m = {m} outside [{}, {len}] for weight {weight}",
            weight.min_index()
        )));
    }
    Ok(())
}

/// Suffix maxima s[k−1] = max_{j ≥ k} |Λ̃_j|/w(j), for reading off several m at once.
fn suffix_sup(lambda: &[f64], weight: Weight) -> Vec<f64> {
    let mut out = vec![0.0; lambda.len()];
    let mut acc = 0.0f64;
    for k in (weight.min_index()..=lambda.len()).rev() {
        acc = acc.max(lambda[k - 1].abs() / weight.at(k));
        out[k - 1] = acc;
    }
    out
}

/// Reusable path generator: validates the pair and caches block-sum tables so that
/// many replications can share them.
#[derive(Debug, Clone)]
pub struct Coupler {
    spec: DistributionSpec,
    strategy: CouplingStrategy,
    len: usize,
    /// CDF of Binomial(L, 1/2) per Rademacher block length L.
    binomial: HashMap<usize, Vec<f64>>,
}

impl Coupler {
    pub fn new(spec: &DistributionSpec, strategy: CouplingStrategy, len: usize) -> Result<Self> {
        if !strategy.supports(&spec.family()) {
            return Err(Error::Unsupported {
                family: spec.name().into(),
                strategy: strategy.name().into(),
            });
        }
        if len == 0 {
            return Err(Error::InvalidArgument("path length K must be at least 1".into()));
        }
        let mut binomial = HashMap::new();
        if strategy == CouplingStrategy::BlockwiseSumQuantile && spec.family() == Family::Rademacher {
            for b in epoch_blocks(len) {
                binomial.entry(b.len()).or_insert_with(|| binomial_cdf(b.len()));
            }
        }
        Ok(Self {
            spec: *spec,
            strategy,
            len,
            binomial,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn run(&self, seed: u64) -> CouplingRun {
        let (x_path, y_path) = self.paths(seed);
        let mut lambda_path = Vec::with_capacity(self.len);
        let mut acc = 0.0;
        for (x, y) in x_path.iter().zip(&y_path) {
            acc += x - y;
            lambda_path.push(acc);
        }
        CouplingRun {
            spec: self.spec,
            strategy: self.strategy,
            seed,
            x_path,
            y_path,
            lambda_path,
        }
    }

    fn paths(&self, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let sigma = self.spec.std_dev();
        let k = self.len;
        match self.strategy {
            CouplingStrategy::Independent => {
                let mut sx = UniformStream::new(mix(seed, 0));
                let mut sy = UniformStream::new(mix(seed, 1));
                let x = (0..k).map(|_| self.spec.quantile(sx.next_open01())).collect();
                let y = (0..k).map(|_| sigma * normal::quantile(sy.next_open01())).collect();
                (x, y)
            }
            CouplingStrategy::PerVariableQuantile => {
                let mut s = UniformStream::new(seed);
                (0..k)
                    .map(|_| {
                        let v = s.next_open01();
                        (self.spec.quantile(v), sigma * normal::quantile(self.atom_position(v)))
                    })
                    .unzip()
            }
            CouplingStrategy::BlockwiseSumQuantile => self.blockwise(seed, sigma),
        }
    }

    /// F(x−) + V' p(x) with x = F^{-1}(v) and V' = (v − F(x−))/p(x), which is uniform
    /// given x and independent of it; for continuous laws this is v itself.
    fn atom_position(&self, v: f64) -> f64 {
        match self.spec.atoms() {
            None => v,
            Some(_) => {
                let x = self.spec.quantile(v);
                let left = self.spec.cdf_left(x);
                let p = self.spec.cdf(x) - left;
                let within = ((v - left) / p).clamp(0.0, 1.0);
                (left + within * p).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
            }
        }
    }

    fn blockwise(&self, seed: u64, sigma: f64) -> (Vec<f64>, Vec<f64>) {
        let mut sums = UniformStream::new(mix(seed, 0));
        let mut paths = UniformStream::new(mix(seed, 1));
        let mut x = Vec::with_capacity(self.len);
        let mut y = Vec::with_capacity(self.len);
        for block in epoch_blocks(self.len) {
            let len = block.len();
            let v = sums.next_open01();
            let sy = sigma * (len as f64).sqrt() * normal::quantile(v);
            match self.spec.family() {
                Family::Rademacher => {
                    let cdf = &self.binomial[&len];
                    let ones = cdf.partition_point(|&c| c < v).min(len);
                    rademacher_given_ones(len, ones, &mut paths, &mut x);
                }
                _ => gaussian_bridge(len, sy, sigma, &mut paths, &mut x),
            }
            gaussian_bridge(len, sy, sigma, &mut paths, &mut y);
        }
        (x, y)
    }
}

/// X̃, Ỹ over indices 1..=K under the given strategy.
pub fn couple_paths(spec: &DistributionSpec, k: usize, strategy: CouplingStrategy, seed: u64) -> Result<CouplingRun> {
    Ok(Coupler::new(spec, strategy, k)?.run(seed))
}

fn binomial_cdf(n: usize) -> Vec<f64> {
    let ln_fact = |j: usize| ln_gamma(j as f64 + 1.0);
    let ln_n = ln_fact(n) - n as f64 * std::f64::consts::LN_2;
    let mut acc = 0.0;
    (0..=n)
        .map(|j| {
            let ln_p = ln_n - ln_fact(j) - ln_fact(n - j);
            acc += ln_p.exp();
            acc
        })
        .collect()
}

/// Uniformly random ±1 path of length `n` with exactly `ones` entries equal to +1:
/// each coordinate is +1 with probability (remaining ones)/(remaining slots).
fn rademacher_given_ones(n: usize, ones: usize, s: &mut UniformStream, out: &mut Vec<f64>) {
    let mut left = ones;
    for slots in (1..=n).rev() {
        if s.next_open01() * (slots as f64) < left as f64 {
            out.push(1.0);
            left -= 1;
        } else {
            out.push(-1.0);
        }
    }
}

/// N(0, σ²) path of length `n` conditioned on summing to `sum`.
fn gaussian_bridge(n: usize, sum: f64, sigma: f64, s: &mut UniformStream, out: &mut Vec<f64>) {
    let start = out.len();
    out.extend((0..n).map(|_| sigma * normal::quantile(s.next_open01())));
    let shift = (out[start..].iter().sum::<f64>() - sum) / n as f64;
    for v in &mut out[start..] {
        *v -= shift;
    }
}

/// Wilson score interval for `hits` successes in `n` trials.
pub fn wilson_interval(hits: usize, n: usize) -> (f64, f64) {
    let n_f = n as f64;
    let p = hits as f64 / n_f;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if hits == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailParams {
    pub spec: DistributionSpec,
    pub strategy: CouplingStrategy,
    pub weight: Weight,
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub z: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub reps: usize,
    pub params: TailParams,
}

/// Simulation settings shared by the tail estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailConfig {
    pub spec: DistributionSpec,
    pub strategy: CouplingStrategy,
    pub weight: Weight,
    #[serde(rename = "K")]
    pub k: usize,
    pub reps: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the global pool. Results do not depend on it.
    #[serde(default)]
    pub workers: usize,
}

impl TailConfig {
    /// sup_{k ≥ m} |Λ̃_k|/w(k) for each m in `ms` (outer) and replication (inner),
    /// replication r using seed mix(seed, r).
    pub fn sup_samples(&self, ms: &[usize]) -> Result<Vec<Vec<f64>>> {
        if self.reps < MIN_REPS {
            return Err(Error::InvalidArgument(format!(
                "reps must be at least {MIN_REPS}, got {}",
                self.reps
            )));
        }
        for &m in ms {
            check_range(self.k, self.weight, m)?;
        }
        let coupler = Coupler::new(&self.spec, self.strategy, self.k)?;
        let one = |r: usize| -> Vec<f64> {
            let run = coupler.run(mix(self.seed, r as u64));
            let s = suffix_sup(&run.lambda_path, self.weight);
            ms.iter().map(|&m| s[m - 1]).collect()
        };
        let per_rep: Vec<Vec<f64>> = if self.workers == 0 {
            (0..self.reps).into_par_iter().map(one).collect()
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(self.workers)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
                .install(|| (0..self.reps).into_par_iter().map(one).collect())
        };
        Ok((0..ms.len())
            .map(|j| per_rep.iter().map(|row| row[j]).collect())
            .collect())
    }

    /// One estimate per (m, z), m-major, all from the same replications.
    pub fn tail_grid(&self, ms: &[usize], zs: &[f64]) -> Result<Vec<TailEstimate>> {
        if let Some(z) = zs.iter().find(|z| !(**z >= 0.0)) {
            return Err(Error::InvalidArgument(format!("z must be nonnegative, got {z}")));
        }
        let samples = self.sup_samples(ms)?;
        let mut out = Vec::with_capacity(ms.len() * zs.len());
        for (&m, sups) in ms.iter().zip(&samples) {
            for &z in zs {
                let hits = sups.iter().filter(|&&s| s >= z).count();
                let (ci_low, ci_high) = wilson_interval(hits, self.reps);
                out.push(TailEstimate {
                    p_hat: hits as f64 / self.reps as f64,
                    ci_low,
                    ci_high,
                    reps: self.reps,
                    params: TailParams {
                        spec: self.spec,
                        strategy: self.strategy,
                        weight: self.weight,
                        m,
                        k: self.k,
                        z,
                        seed: self.seed,
                    },
                });
            }
        }
        Ok(out)
    }
}

/// Fraction of replications with sup_{m ≤ k ≤ K} |Λ̃_k|/w(k) ≥ z, with a Wilson 95% interval.
#[allow(clippy::too_many_arguments)]
pub fn tail_estimate(
    spec: &DistributionSpec,
    strategy: CouplingStrategy,
    weight: Weight,
    m: usize,
    k: usize,
    z: f64,
    reps: usize,
    seed: u64,
) -> Result<TailEstimate> {
    let cfg = TailConfig {
        spec: *spec,
        strategy,
        weight,
        k,
        reps,
        seed,
        workers: 0,
    };
    Ok(cfg.tail_grid(&[m], &[z])?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_quantile_coupling_is_identity() {
        let g = DistributionSpec::gaussian(1.3).unwrap();
        let run = couple_paths(&g, 500, CouplingStrategy::PerVariableQuantile, 7).unwrap();
        assert_eq!(run.x_path, run.y_path);
        assert!(run.lambda_path.iter().all(|&l| l == 0.0));
        assert_eq!(run.discrepancy_sup(Weight::Log, 2).unwrap(), 0.0);
    }

    #[test]
    fn hand_path_supremum() {
        let s = discrepancy_sup(&[1.0, -4.0, 2.0], Weight::Log, 2).unwrap();
        assert!((s - 4.0 / 2f64.ln()).abs() < 1e-15);
        assert!((s - 5.771).abs() < 1e-3);
        assert_eq!(
            discrepancy_sup(&[1.0, -4.0, 2.0], Weight::Log, 3).unwrap(),
            2.0 / 3f64.ln()
        );
        assert!(discrepancy_sup(&[1.0, -4.0, 2.0], Weight::Log, 1).is_err());
        assert!(discrepancy_sup(&[1.0, -4.0, 2.0], Weight::Power { q: 3.0 }, 4).is_err());
        assert_eq!(discrepancy_sup(&[3.0], Weight::Power { q: 3.0 }, 1).unwrap(), 3.0);
    }

    #[test]
    fn rademacher_quantile_pairs_signs() {
        let r = DistributionSpec::rademacher();
        let run = couple_paths(&r, 2000, CouplingStrategy::PerVariableQuantile, 3).unwrap();
        assert!(run.x_path.iter().zip(&run.y_path).all(|(x, y)| x * y > 0.0));
    }

    #[test]
    fn blockwise_block_sums_are_coupled() {
        let r = DistributionSpec::rademacher();
        let run = couple_paths(&r, 300, CouplingStrategy::BlockwiseSumQuantile, 11).unwrap();
        for b in epoch_blocks(300) {
            let sx: f64 = run.x_path[b.start - 1..b.end].iter().sum();
            let sy: f64 = run.y_path[b.start - 1..b.end].iter().sum();
            // Comonotone sums: never of opposite sign by more than one atom step.
            assert!(sx * sy >= 0.0 || sx.abs() <= 2.0, "{sx} {sy}");
        }
        assert!(run.x_path.iter().all(|&x| x == 1.0 || x == -1.0));
        let u = DistributionSpec::uniform(1.0).unwrap();
        assert!(matches!(
            couple_paths(&u, 10, CouplingStrategy::BlockwiseSumQuantile, 0),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn binomial_table_ends_at_one() {
        for n in [4, 16, 256, 65536] {
            let c = binomial_cdf(n);
            assert_eq!(c.len(), n + 1);
            assert!((c[n] - 1.0).abs() < 1e-10, "n={n}: {}", c[n]);
        }
        for (c, e) in binomial_cdf(4).iter().zip([1.0, 5.0, 11.0, 15.0, 16.0]) {
            assert!((c - e / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn wilson_degenerate() {
        let (lo, hi) = wilson_interval(0, 1000);
        assert_eq!(lo, 0.0);
        let z2 = 1.96f64.powi(2);
        assert!((hi - z2 / (1000.0 + z2)).abs() < 1e-5);
        let (_, hi) = wilson_interval(0, 100);
        assert!((hi * 100.0 - 3.7).abs() < 0.01);
        let (lo, hi) = wilson_interval(1000, 1000);
        assert!(hi == 1.0 && lo > 0.99);
    }

    #[test]
    fn weight_parsing() {
        assert_eq!("log".parse::<Weight>().unwrap(), Weight::Log);
        assert_eq!("pow:3".parse::<Weight>().unwrap(), Weight::Power { q: 3.0 });
        assert!("pow:-1".parse::<Weight>().is_err());
        assert_eq!(
            "blockwise_sum_quantile".parse::<CouplingStrategy>().unwrap(),
            CouplingStrategy::BlockwiseSumQuantile
        );
    }

    #[test]
    fn tail_estimate_edges() {
        let g = DistributionSpec::gaussian(1.0).unwrap();
        let t = tail_estimate(
            &g,
            CouplingStrategy::PerVariableQuantile,
            Weight::Log,
            4,
            64,
            0.1,
            100,
            1,
        )
        .unwrap();
        assert_eq!(t.p_hat, 0.0);
        let r = DistributionSpec::rademacher();
        let t = tail_estimate(&r, CouplingStrategy::Independent, Weight::Log, 4, 64, 0.0, 100, 1).unwrap();
        assert_eq!(t.p_hat, 1.0);
        assert!(tail_estimate(&r, CouplingStrategy::Independent, Weight::Log, 4, 64, 1.0, 99, 1).is_err());
    }
}
