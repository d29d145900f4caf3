//! Centered univariate laws and their moment functionals.
//!
//! Every law on the menu is mean-zero by construction. Functionals return
//! `f64::INFINITY` when the underlying integral diverges; divergence is a value,
//! not an error. Closed forms are used wherever the family admits one; the
//! remaining functionals (tilted third moments of the uniform and Gaussian laws)
//! go through adaptive quadrature on the density of |X|.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::seed::UniformStream;
use crate::numeric::{gamma_q, integrate, ln_gamma, log_sum_exp, normal, QuadOptions, QuadResult};

/// The closed family menu.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Rademacher,
    /// Uniform on (−h, h).
    CenteredUniform {
        halfwidth: f64,
    },
    CenteredGaussian {
        sigma: f64,
    },
    /// Density e^{−|x|/β} / (2β).
    CenteredLaplace {
        scale: f64,
    },
    /// Two atoms with P(X = a) = p, P(X = −c) = 1 − p, mean 0 and the given variance.
    CenteredTwoPoint {
        p: f64,
        variance: f64,
    },
    /// Random sign times a Pareto magnitude: P(|X| > x) = (s/x)^κ for x ≥ s.
    CenteredParetoSymmetric {
        kappa: f64,
        scale: f64,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Rademacher => "Rademacher",
            Family::CenteredUniform { .. } => "CenteredUniform",
            Family::CenteredGaussian { .. } => "CenteredGaussian",
            Family::CenteredLaplace { .. } => "CenteredLaplace",
            Family::CenteredTwoPoint { .. } => "CenteredTwoPoint",
            Family::CenteredParetoSymmetric { .. } => "CenteredParetoSymmetric",
        }
    }
}

/// A validated law from the family menu.
///
/// Serializes as `{"family": <name>, "params": {<name>: <number>}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct DistributionSpec {
    family: Family,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawSpec {
    family: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
}

impl TryFrom<RawSpec> for DistributionSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let get = |name: &str| -> Result<f64> {
            raw.params
                .get(name)
                .copied()
                .ok_or_else(|| Error::InvalidSpec(format!("{} requires parameter \"{name}\"", raw.family)))
        };
        let allowed: &[&str] = match raw.family.as_str() {
            "Rademacher" => &[],
            "CenteredUniform" => &["halfwidth"],
            "CenteredGaussian" => &["sigma"],
            "CenteredLaplace" => &["scale"],
            "CenteredTwoPoint" => &["p", "variance"],
            "CenteredParetoSymmetric" => &["kappa", "scale"],
            other => return Err(Error::InvalidSpec(format!("unknown family \"{other}\""))),
        };
        if let Some(extra) = raw.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidSpec(format!(
                "{} does not take parameter \"{extra}\"",
                raw.family
            )));
        }
        let family = match raw.family.as_str() {
            "Rademacher" => Family::Rademacher,
            "CenteredUniform" => Family::CenteredUniform {
                halfwidth: get("halfwidth")?,
            },
            "CenteredGaussian" => Family::CenteredGaussian { sigma: get("sigma")? },
            "CenteredLaplace" => Family::CenteredLaplace { scale: get("scale")? },
            "CenteredTwoPoint" => Family::CenteredTwoPoint {
                p: get("p")?,
                variance: get("variance")?,
            },
            _ => Family::CenteredParetoSymmetric {
                kappa: get("kappa")?,
                scale: get("scale")?,
            },
        };
        DistributionSpec::new(family)
    }
}

impl From<DistributionSpec> for RawSpec {
    fn from(spec: DistributionSpec) -> Self {
        let mut params = BTreeMap::new();
        match spec.family {
            Family::Rademacher => {}
            Family::CenteredUniform { halfwidth } => {
                params.insert("halfwidth".into(), halfwidth);
            }
            Family::CenteredGaussian { sigma } => {
                params.insert("sigma".into(), sigma);
            }
            Family::CenteredLaplace { scale } => {
                params.insert("scale".into(), scale);
            }
            Family::CenteredTwoPoint { p, variance } => {
                params.insert("p".into(), p);
                params.insert("variance".into(), variance);
            }
            Family::CenteredParetoSymmetric { kappa, scale } => {
                params.insert("kappa".into(), kappa);
                params.insert("scale".into(), scale);
            }
        }
        RawSpec {
            family: spec.family.name().to_string(),
            params,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "{name} must be a positive finite number, got {v}"
        )))
    }
}

/// How a moment profile was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    Analytic,
    Quadrature,
    Series,
}

/// σ², E|X|^q and E e^{t|X|} at requested orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentProfile {
    pub variance: f64,
    /// (q, E|X|^q); `inf` when divergent.
    pub abs_moments: Vec<(f64, f64)>,
    /// (t, E e^{t|X|}); `inf` when divergent.
    pub exp_moments: Vec<(f64, f64)>,
    pub method: MomentMethod,
}

impl DistributionSpec {
    pub fn new(family: Family) -> Result<Self> {
        match family {
            Family::Rademacher => {}
            Family::CenteredUniform { halfwidth } => positive("halfwidth", halfwidth)?,
            Family::CenteredGaussian { sigma } => positive("sigma", sigma)?,
            Family::CenteredLaplace { scale } => positive("scale", scale)?,
            Family::CenteredTwoPoint { p, variance } => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::InvalidSpec(format!("p must lie in (0, 1), got {p}")));
                }
                positive("variance", variance)?;
            }
            Family::CenteredParetoSymmetric { kappa, scale } => {
                if !(kappa.is_finite() && kappa > 2.0) {
                    return Err(Error::InvalidSpec(format!("kappa must exceed 2, got {kappa}")));
                }
                positive("scale", scale)?;
            }
        }
        Ok(Self { family })
    }

    pub fn rademacher() -> Self {
        Self {
            family: Family::Rademacher,
        }
    }

    pub fn uniform(halfwidth: f64) -> Result<Self> {
        Self::new(Family::CenteredUniform { halfwidth })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(Family::CenteredGaussian { sigma })
    }

    pub fn laplace(scale: f64) -> Result<Self> {
        Self::new(Family::CenteredLaplace { scale })
    }

    pub fn two_point(p: f64, variance: f64) -> Result<Self> {
        Self::new(Family::CenteredTwoPoint { p, variance })
    }

    pub fn pareto(kappa: f64, scale: f64) -> Result<Self> {
        Self::new(Family::CenteredParetoSymmetric { kappa, scale })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn name(&self) -> &'static str {
        self.family.name()
    }

    /// Atoms `(value, probability)` for the discrete families.
    pub fn atoms(&self) -> Option<[(f64, f64); 2]> {
        match self.family {
            Family::Rademacher => Some([(-1.0, 0.5), (1.0, 0.5)]),
            Family::CenteredTwoPoint { p, variance } => {
                let up = (variance * (1.0 - p) / p).sqrt();
                let down = (variance * p / (1.0 - p)).sqrt();
                Some([(-down, 1.0 - p), (up, p)])
            }
            _ => None,
        }
    }

    pub fn variance(&self) -> f64 {
        match self.family {
            Family::Rademacher => 1.0,
            Family::CenteredUniform { halfwidth: h } => h * h / 3.0,
            Family::CenteredGaussian { sigma } => sigma * sigma,
            Family::CenteredLaplace { scale } => 2.0 * scale * scale,
            Family::CenteredTwoPoint { variance, .. } => variance,
            Family::CenteredParetoSymmetric { kappa, scale } => kappa * scale * scale / (kappa - 2.0),
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Essential supremum of |X| for bounded laws.
    pub fn ess_sup(&self) -> Option<f64> {
        match self.family {
            Family::CenteredUniform { halfwidth } => Some(halfwidth),
            _ => self.atoms().map(|a| a.iter().map(|(x, _)| x.abs()).fold(0.0, f64::max)),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        !matches!(self.family, Family::CenteredTwoPoint { p, .. } if p != 0.5)
    }

    /// False only for the Pareto family, whose exponential moments are all infinite.
    pub fn has_exponential_moment(&self) -> bool {
        !matches!(self.family, Family::CenteredParetoSymmetric { .. })
    }

    /// Left-continuous inverse of the distribution function, u ∈ (0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        match self.family {
            Family::CenteredUniform { halfwidth } => halfwidth * (2.0 * u - 1.0),
            Family::CenteredGaussian { sigma } => sigma * normal::quantile(u),
            Family::CenteredLaplace { scale } => {
                if u < 0.5 {
                    scale * (2.0 * u).ln()
                } else {
                    -scale * (2.0 * (1.0 - u)).ln()
                }
            }
            Family::CenteredParetoSymmetric { kappa, scale } => {
                if u < 0.5 {
                    -scale * (2.0 * u).powf(-1.0 / kappa)
                } else {
                    scale * (2.0 * (1.0 - u)).powf(-1.0 / kappa)
                }
            }
            Family::Rademacher | Family::CenteredTwoPoint { .. } => {
                let [(lo, p_lo), (hi, _)] = self.atoms().expect("discrete family");
                if u <= p_lo {
                    lo
                } else {
                    hi
                }
            }
        }
    }

    /// P(X ≤ x).
    pub fn cdf(&self, x: f64) -> f64 {
        match self.family {
            Family::CenteredUniform { halfwidth: h } => ((x + h) / (2.0 * h)).clamp(0.0, 1.0),
            Family::CenteredGaussian { sigma } => normal::cdf(x / sigma),
            Family::CenteredLaplace { scale } => {
                if x < 0.0 {
                    0.5 * (x / scale).exp()
                } else {
                    1.0 - 0.5 * (-x / scale).exp()
                }
            }
            Family::CenteredParetoSymmetric { kappa, scale } => {
                if x <= -scale {
                    0.5 * (scale / -x).powf(kappa)
                } else if x < scale {
                    0.5
                } else {
                    1.0 - 0.5 * (scale / x).powf(kappa)
                }
            }
            Family::Rademacher | Family::CenteredTwoPoint { .. } => self
                .atoms()
                .expect("discrete family")
                .iter()
                .filter(|(v, _)| *v <= x)
                .map(|(_, p)| p)
                .sum(),
        }
    }

    /// P(X < x); differs from [`cdf`](Self::cdf) only at atoms.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match self.atoms() {
            Some(atoms) => atoms.iter().filter(|(v, _)| *v < x).map(|(_, p)| p).sum(),
            None => self.cdf(x),
        }
    }

    /// `n` i.i.d. draws by inverse transform from a ChaCha stream seeded with `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut stream = UniformStream::new(seed);
        (0..n).map(|_| self.quantile(stream.next_open01())).collect()
    }

    /// ln E|X|^q for q > 0, `+inf` when divergent.
    pub fn ln_abs_moment(&self, q: f64) -> Result<f64> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "moment order must be positive, got {q}"
            )));
        }
        Ok(match self.family {
            Family::Rademacher => 0.0,
            Family::CenteredUniform { halfwidth: h } => q * h.ln() - (q + 1.0).ln(),
            Family::CenteredGaussian { sigma } => {
                q * sigma.ln() + 0.5 * q * 2f64.ln() + ln_gamma(0.5 * (q + 1.0)) - 0.5 * PI.ln()
            }
            Family::CenteredLaplace { scale } => q * scale.ln() + ln_gamma(q + 1.0),
            Family::CenteredTwoPoint { .. } => {
                let atoms = self.atoms().expect("discrete family");
                let logs: Vec<f64> = atoms.iter().map(|(v, p)| p.ln() + q * v.abs().ln()).collect();
                log_sum_exp(&logs)
            }
            Family::CenteredParetoSymmetric { kappa, scale } => {
                if q >= kappa {
                    f64::INFINITY
                } else {
                    kappa.ln() + q * scale.ln() - (kappa - q).ln()
                }
            }
        })
    }

    /// E|X|^q for q ≥ 1.
    pub fn abs_moment(&self, q: f64) -> Result<f64> {
        if !(q >= 1.0) {
            return Err(Error::InvalidArgument(format!("abs_moment requires q >= 1, got {q}")));
        }
        Ok(self.ln_abs_moment(q)?.exp())
    }

    /// E e^{t|X|} for t > 0.
    pub fn exp_abs_moment(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "exp_abs_moment requires t > 0, got {t}"
            )));
        }
        Ok(match self.family {
            Family::Rademacher => t.exp(),
            Family::CenteredTwoPoint { .. } => self.atom_expectation(|x| (t * x.abs()).exp()),
            Family::CenteredUniform { halfwidth: h } => (t * h).exp_m1() / (t * h),
            Family::CenteredGaussian { sigma } => 2.0 * (0.5 * t * t * sigma * sigma).exp() * normal::cdf(t * sigma),
            Family::CenteredLaplace { scale } => {
                if t * scale >= 1.0 {
                    f64::INFINITY
                } else {
                    1.0 / (1.0 - t * scale)
                }
            }
            Family::CenteredParetoSymmetric { .. } => f64::INFINITY,
        })
    }

    /// E[|X|³ e^{λ|X|}] for λ ≥ 0.
    pub fn tilted_third(&self, lambda: f64) -> Result<f64> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "tilted_third requires finite lambda >= 0, got {lambda}"
            )));
        }
        match self.family {
            Family::Rademacher | Family::CenteredTwoPoint { .. } => {
                Ok(self.atom_expectation(|x| x.abs().powi(3) * (lambda * x.abs()).exp()))
            }
            Family::CenteredLaplace { scale } => {
                if lambda * scale >= 1.0 {
                    Ok(f64::INFINITY)
                } else {
                    Ok(6.0 * scale.powi(3) / (1.0 - lambda * scale).powi(4))
                }
            }
            Family::CenteredParetoSymmetric { .. } => {
                if lambda > 0.0 {
                    Ok(f64::INFINITY)
                } else {
                    self.abs_moment(3.0)
                }
            }
            Family::CenteredUniform { .. } | Family::CenteredGaussian { .. } => {
                if lambda == 0.0 {
                    return self.abs_moment(3.0);
                }
                let r = self.quad_expect(|x| 3.0 * x.ln() + lambda * x, 0.0, None, lambda, 3.0)?;
                Ok(r.value)
            }
        }
    }

    /// E[|X|^q · 1{|X|^q > m}] for q > 2, m ≥ 0.
    pub fn tail_moment(&self, q: f64, m: f64) -> Result<f64> {
        if !(q > 2.0) || !q.is_finite() {
            return Err(Error::InvalidArgument(format!("tail_moment requires q > 2, got {q}")));
        }
        if !(m >= 0.0) {
            return Err(Error::InvalidArgument(format!("tail_moment requires m >= 0, got {m}")));
        }
        if let Some(atoms) = self.atoms() {
            return Ok(atoms
                .iter()
                .map(|(x, p)| {
                    let v = x.abs().powf(q);
                    if v > m {
                        p * v
                    } else {
                        0.0
                    }
                })
                .sum());
        }
        let full = self.ln_abs_moment(q)?;
        if full.is_infinite() {
            return Ok(f64::INFINITY);
        }
        if m == 0.0 {
            return Ok(full.exp());
        }
        let level = m.powf(1.0 / q);
        Ok(match self.family {
            Family::CenteredUniform { halfwidth: h } => {
                if level >= h {
                    0.0
                } else {
                    (h.powf(q + 1.0) - level.powf(q + 1.0)) / (h * (q + 1.0))
                }
            }
            Family::CenteredGaussian { sigma } => {
                full.exp() * gamma_q(0.5 * (q + 1.0), level * level / (2.0 * sigma * sigma))
            }
            Family::CenteredLaplace { scale } => full.exp() * gamma_q(q + 1.0, level / scale),
            Family::CenteredParetoSymmetric { kappa, scale } => {
                let from = level.max(scale);
                kappa * scale.powf(kappa) * from.powf(q - kappa) / (kappa - q)
            }
            Family::Rademacher | Family::CenteredTwoPoint { .. } => unreachable!("handled above"),
        })
    }

    /// E[X² · 1{|X| ≤ K}].
    pub fn truncated_second(&self, k: f64) -> f64 {
        if let Some(atoms) = self.atoms() {
            return atoms.iter().filter(|(x, _)| x.abs() <= k).map(|(x, p)| p * x * x).sum();
        }
        match self.family {
            Family::CenteredUniform { halfwidth: h } => {
                if k >= h {
                    h * h / 3.0
                } else {
                    k.powi(3) / (3.0 * h)
                }
            }
            Family::CenteredGaussian { sigma } => {
                sigma * sigma * statrs::function::gamma::gamma_lr(1.5, k * k / (2.0 * sigma * sigma))
            }
            Family::CenteredLaplace { scale } => {
                2.0 * scale * scale * statrs::function::gamma::gamma_lr(3.0, k / scale)
            }
            Family::CenteredParetoSymmetric { kappa, scale } => {
                if k <= scale {
                    0.0
                } else {
                    kappa * scale.powf(kappa) * (scale.powf(2.0 - kappa) - k.powf(2.0 - kappa)) / (kappa - 2.0)
                }
            }
            Family::Rademacher | Family::CenteredTwoPoint { .. } => unreachable!("handled above"),
        }
    }

    /// Var(X · 1{|X| ≤ K}) for K > 0.
    pub fn truncated_variance(&self, k: f64) -> Result<f64> {
        if !(k > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "truncation level must be positive, got {k}"
            )));
        }
        let second = self.truncated_second(k);
        let mean = match self.atoms() {
            Some(atoms) if !self.is_symmetric() => atoms
                .iter()
                .filter(|(x, _)| x.abs() <= k)
                .map(|(x, p)| p * x)
                .sum::<f64>(),
            _ => 0.0,
        };
        Ok((second - mean * mean).max(0.0))
    }

    /// E[e^{t|X|} · 1{e^{t|X|} ≥ K}] for t > 0.
    pub fn exp_tail_moment(&self, t: f64, k: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "exp_tail_moment requires t > 0, got {t}"
            )));
        }
        if k <= 1.0 {
            return self.exp_abs_moment(t);
        }
        let level = k.ln() / t;
        if let Some(atoms) = self.atoms() {
            return Ok(atoms
                .iter()
                .filter(|(x, _)| x.abs() >= level)
                .map(|(x, p)| p * (t * x.abs()).exp())
                .sum());
        }
        Ok(match self.family {
            Family::CenteredUniform { halfwidth: h } => {
                if level >= h {
                    0.0
                } else {
                    ((t * h).exp() - (t * level).exp()) / (t * h)
                }
            }
            Family::CenteredGaussian { sigma } => {
                2.0 * (0.5 * t * t * sigma * sigma).exp() * normal::sf(level / sigma - t * sigma)
            }
            Family::CenteredLaplace { scale } => {
                if t * scale >= 1.0 {
                    f64::INFINITY
                } else {
                    let rate = 1.0 / scale - t;
                    (-rate * level).exp() / (1.0 - t * scale)
                }
            }
            Family::CenteredParetoSymmetric { .. } => f64::INFINITY,
            Family::Rademacher | Family::CenteredTwoPoint { .. } => unreachable!("handled above"),
        })
    }

    /// Variance, absolute moments at `orders` and exponential moments at `tilts`.
    pub fn moment_profile(&self, orders: &[f64], tilts: &[f64]) -> Result<MomentProfile> {
        let abs_moments = orders
            .iter()
            .map(|&q| Ok((q, self.abs_moment(q)?)))
            .collect::<Result<Vec<_>>>()?;
        let exp_moments = tilts
            .iter()
            .map(|&t| Ok((t, self.exp_abs_moment(t)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MomentProfile {
            variance: self.variance(),
            abs_moments,
            exp_moments,
            method: if self.atoms().is_some() {
                MomentMethod::Series
            } else {
                MomentMethod::Analytic
            },
        })
    }

    /// Same as [`moment_profile`](Self::moment_profile) but every entry is computed by
    /// quadrature on the density of |X| (continuous light-tailed families only).
    pub fn moment_profile_by_quadrature(&self, orders: &[f64], tilts: &[f64]) -> Result<MomentProfile> {
        if self.atoms().is_some() {
            return self.moment_profile(orders, tilts);
        }
        let abs_moments = orders
            .iter()
            .map(|&q| Ok((q, self.quad_expect(|x| q * x.ln(), 0.0, None, 0.0, q)?.value)))
            .collect::<Result<Vec<_>>>()?;
        let exp_moments = tilts
            .iter()
            .map(|&t| {
                if let Family::CenteredLaplace { scale } = self.family {
                    if t * scale >= 1.0 {
                        return Ok((t, f64::INFINITY));
                    }
                }
                Ok((t, self.quad_expect(|x| t * x, 0.0, None, t, 0.0)?.value))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MomentProfile {
            variance: self.quad_expect(|x| 2.0 * x.ln(), 0.0, None, 0.0, 2.0)?.value,
            abs_moments,
            exp_moments,
            method: MomentMethod::Quadrature,
        })
    }

    /// ln of the density of |X| at x > 0 (continuous families).
    fn ln_abs_density(&self, x: f64) -> f64 {
        match self.family {
            Family::CenteredUniform { halfwidth: h } => {
                if x <= h {
                    -h.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Family::CenteredGaussian { sigma } => {
                let z = x / sigma;
                (2.0 / PI).sqrt().ln() - sigma.ln() - 0.5 * z * z
            }
            Family::CenteredLaplace { scale } => -x / scale - scale.ln(),
            Family::CenteredParetoSymmetric { kappa, scale } => {
                if x < scale {
                    f64::NEG_INFINITY
                } else {
                    kappa.ln() + kappa * scale.ln() - (kappa + 1.0) * x.ln()
                }
            }
            Family::Rademacher | Family::CenteredTwoPoint { .. } => f64::NEG_INFINITY,
        }
    }

    /// E[g(|X|) · 1{lower ≤ |X| ≤ upper}] by adaptive quadrature, where `ln_g` is ln g.
    ///
    /// `tilt` and `power` describe the growth of g (≈ x^power e^{tilt x}) and are used
    /// to place the cut-off for unbounded supports so that the neglected mass is below
    /// e^{−700} of the peak.
    pub fn quad_expect<G: Fn(f64) -> f64>(
        &self,
        ln_g: G,
        lower: f64,
        upper: Option<f64>,
        tilt: f64,
        power: f64,
    ) -> Result<QuadResult<f64>> {
        let (support_lo, natural_hi, peak) = match self.family {
            Family::CenteredUniform { halfwidth } => (0.0, halfwidth, halfwidth),
            Family::CenteredGaussian { sigma } => {
                let center = tilt * sigma * sigma + sigma * power.max(0.0).sqrt();
                (
                    0.0,
                    center + sigma * (2.0 * (power.max(0.0) + 1.0).sqrt() + 40.0),
                    center,
                )
            }
            Family::CenteredLaplace { scale } => {
                let rate = 1.0 / scale - tilt;
                if rate <= 0.0 {
                    return Ok(QuadResult {
                        value: f64::INFINITY,
                        error: 0.0,
                        intervals: 0,
                        converged: true,
                    });
                }
                let peak = power.max(0.0) / rate;
                (0.0, (2.0 * power.max(0.0) + 800.0) / rate, peak)
            }
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "quadrature route not available for {}",
                    self.name()
                )))
            }
        };
        let lo = lower.max(support_lo);
        let hi = upper.map_or(natural_hi, |u| u.min(natural_hi));
        if hi <= lo {
            return Ok(QuadResult {
                value: 0.0,
                error: 0.0,
                intervals: 0,
                converged: true,
            });
        }
        let integrand = |x: f64| {
            if x <= 0.0 {
                let v = (ln_g(x) + self.ln_abs_density(x)).exp();
                return if v.is_nan() { 0.0 } else { v };
            }
            (ln_g(x) + self.ln_abs_density(x)).exp()
        };
        let breaks = [peak, 0.5 * peak, 2.0 * peak];
        let r = integrate(integrand, lo, hi, &breaks, QuadOptions::default());
        if r.value.is_infinite() {
            return Ok(QuadResult {
                value: f64::INFINITY,
                ..r
            });
        }
        Ok(r.into_result()?)
    }

    fn atom_expectation<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.atoms()
            .expect("discrete family")
            .iter()
            .map(|(x, p)| p * g(*x))
            .sum()
    }
}
