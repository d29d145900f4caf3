//! Regularity parameters of a centered law: the Sakhanenko parameter, the Bernstein
//! parameter, exponential-moment pairs, the constant relations between them, and
//! uniform-integrability profiles over a finite family sweep.

use std::cell::RefCell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::numeric::{bisect_increasing, expand_upper, gamma, ln_factorial};
use crate::serde_ext;

pub const DEFAULT_Q_MAX: u32 = 200;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_K_GRID: [f64; 6] = [1.0, 10.0, 1e2, 1e3, 1e4, 1e6];

/// λ(P) together with its bisection certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SakhanenkoParameter {
    pub lambda: f64,
    /// Upper end of the final bracket; `h(upper) > 0`.
    pub upper: f64,
    /// h(λ) = λ·E[|X|³e^{λ|X|}] − σ² at the returned λ (≤ 0).
    #[serde(with = "serde_ext")]
    pub residual: f64,
    pub iterations: usize,
    /// Set when E[|X|³e^{λ|X|}] = ∞ for every λ > 0, so λ(P) = 0.
    pub heavy_tail: bool,
}

/// h(λ) = λ·E[|X|³e^{λ|X|}] − Var(X).
pub fn sakhanenko_h(spec: &DistributionSpec, lambda: f64) -> Result<f64> {
    Ok(lambda * spec.tilted_third(lambda)? - spec.variance())
}

/// λ(P) = sup{λ ≥ 0 : λ E|X|³e^{λ|X|} ≤ Var X}, by bisection on `sakhanenko_h`.
///
/// The returned λ satisfies h(λ) ≤ 0 < h(λ(1 + tol) + tol).
pub fn sakhanenko_parameter(spec: &DistributionSpec, tol: f64) -> Result<SakhanenkoParameter> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tol must lie in (0, 1), got {tol}")));
    }
    let sigma2 = spec.variance();
    if !spec.has_exponential_moment() {
        return Ok(SakhanenkoParameter {
            lambda: 0.0,
            upper: 0.0,
            residual: -sigma2,
            iterations: 0,
            heavy_tail: true,
        });
    }
    let failure = RefCell::new(None);
    let h = |lambda: f64| match sakhanenko_h(spec, lambda) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let limit = spec.ess_sup().map_or(1e300, |s| 710.0 / s);
    let expanded = expand_upper(&h, 1.0, limit);
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    let (lo, hi) = expanded?;
    let bracket = bisect_increasing(&h, lo, hi, tol);
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    let bracket = bracket?;
    Ok(SakhanenkoParameter {
        lambda: bracket.lo,
        upper: bracket.hi,
        residual: bracket.f_lo,
        iterations: bracket.iterations,
        heavy_tail: false,
    })
}

/// b(P) truncated to orders 3..=q_max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernsteinParameter {
    #[serde(with = "serde_ext")]
    pub value: f64,
    pub argmax_q: u32,
    pub q_max: u32,
    /// t_{q_max} / t_{q_max−1}, where t_q = (2E|X|^q/(q!σ²))^{1/(q−2)}.
    #[serde(with = "serde_ext")]
    pub tail_ratio: f64,
    /// max(0, tail_ratio − 1): zero once the terms have stopped growing at the horizon.
    #[serde(with = "serde_ext")]
    pub margin: f64,
    /// First order whose moment diverges, if any.
    pub divergent_q: Option<u32>,
}

/// ln t_q for the Bernstein scan.
pub fn bernstein_log_term(spec: &DistributionSpec, q: u32) -> Result<f64> {
    let ln_moment = spec.ln_abs_moment(f64::from(q))?;
    Ok((std::f64::consts::LN_2 + ln_moment - ln_factorial(q) - spec.variance().ln()) / f64::from(q - 2))
}

/// max over integer q in [3, q_max] of (2E|X|^q/(q!σ²))^{1/(q−2)}.
pub fn bernstein_parameter(spec: &DistributionSpec, q_max: u32) -> Result<BernsteinParameter> {
    if q_max < 3 {
        return Err(Error::InvalidArgument(format!("q_max must be at least 3, got {q_max}")));
    }
    let mut best = f64::NEG_INFINITY;
    let mut argmax_q = 3;
    let mut last = [f64::NAN; 2];
    for q in 3..=q_max {
        let lt = bernstein_log_term(spec, q)?;
        if lt == f64::INFINITY {
            return Ok(BernsteinParameter {
                value: f64::INFINITY,
                argmax_q: q,
                q_max,
                tail_ratio: f64::INFINITY,
                margin: f64::INFINITY,
                divergent_q: Some(q),
            });
        }
        if lt > best {
            best = lt;
            argmax_q = q;
        }
        last = [last[1], lt];
    }
    let tail_ratio = if q_max > 3 { (last[1] - last[0]).exp() } else { 0.0 };
    Ok(BernsteinParameter {
        value: best.exp(),
        argmax_q,
        q_max,
        tail_ratio,
        margin: (tail_ratio - 1.0).max(0.0),
        divergent_q: None,
    })
}

/// One implication edge between the regularity constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationEdge {
    pub edge: String,
    pub description: String,
    #[serde(with = "serde_ext")]
    pub lhs: f64,
    #[serde(with = "serde_ext")]
    pub rhs: f64,
    #[serde(with = "serde_ext")]
    pub slack: f64,
    pub holds: bool,
}

impl RelationEdge {
    fn new(edge: &str, description: String, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            edge: edge.to_string(),
            description,
            lhs,
            rhs,
            slack,
            holds: slack >= -1e-12 * rhs.abs().max(1.0) - tolerance,
        }
    }
}

/// One grid point of E[e^{t|X|}1{e^{t|X|} ≥ K}].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTailPoint {
    #[serde(with = "serde_ext")]
    pub k: f64,
    #[serde(with = "serde_ext")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationOptions {
    /// Exponent of the exponential-moment pair; defaults to λ(P)/2.
    pub t: Option<f64>,
    pub q_max: u32,
    pub tol: f64,
    pub k_grid: Vec<f64>,
}

impl Default for RelationOptions {
    fn default() -> Self {
        Self {
            t: None,
            q_max: DEFAULT_Q_MAX,
            tol: DEFAULT_TOL,
            k_grid: DEFAULT_K_GRID.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub ubar_sigma: f64,
    pub lambda_sak: f64,
    #[serde(with = "serde_ext")]
    pub bernstein: f64,
    pub t: f64,
    #[serde(with = "serde_ext")]
    pub c: f64,
    /// Edges (b) to (e).
    pub edges: Vec<RelationEdge>,
    /// Exponential tail at t* = t/2 on the K-grid. This is grid evidence for
    /// uniform integrability, not a verdict about the limit K → ∞.
    pub t_star: f64,
    pub exp_tail: Vec<ExpTailPoint>,
}

impl RelationReport {
    pub fn all_hold(&self) -> bool {
        self.edges.iter().all(|e| e.holds)
    }

    pub fn edge(&self, name: &str) -> Option<&RelationEdge> {
        self.edges.iter().find(|e| e.edge == name)
    }
}

/// Measures (t, C), b(P) and λ(P) and checks each derived constant against them.
pub fn relation_check(spec: &DistributionSpec, ubar_sigma: f64, opts: &RelationOptions) -> Result<RelationReport> {
    if !(ubar_sigma > 0.0 && ubar_sigma.is_finite()) {
        return Err(Error::Infeasible(format!(
            "ubar_sigma must be positive, got {ubar_sigma}"
        )));
    }
    let sigma2 = spec.variance();
    if ubar_sigma * ubar_sigma > sigma2 * (1.0 + 1e-12) {
        return Err(Error::Infeasible(format!(
            "ubar_sigma^2 = {} exceeds Var(X) = {sigma2}",
            ubar_sigma * ubar_sigma
        )));
    }
    if !spec.has_exponential_moment() {
        return Err(Error::Infeasible(format!(
            "{} has no finite exponential moment",
            spec.name()
        )));
    }
    let sak = sakhanenko_parameter(spec, opts.tol)?;
    let lambda = sak.lambda;
    let bern = bernstein_parameter(spec, opts.q_max)?;
    let b = bern.value;

    let t = opts.t.unwrap_or(0.5 * lambda);
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    let c = spec.exp_abs_moment(t)?;
    let t_min = (t * ubar_sigma).min(1.0);
    let b_from_i = 2.0 * c * ubar_sigma / t_min.powi(3);

    let lambda_c = 1.0 / (7.0 * b);
    let lhs_c = lambda_c * spec.tilted_third(lambda_c)?;
    let exp_at_lambda = spec.exp_abs_moment(lambda)?;
    let c_from_iv = lambda.powi(-3) + lambda.exp();
    let quad_tol = 1e-10 * sigma2.max(1.0);

    let edges = vec![
        RelationEdge::new(
            "b",
            format!("b(P) <= 2 C ubar_sigma min(t ubar_sigma, 1)^-3 with t = {t}, C = {c}"),
            b,
            b_from_i,
            0.0,
        ),
        RelationEdge::new(
            "c",
            format!("lambda E|X|^3 e^(lambda|X|) <= Var(X) at lambda = 1/(7 b(P)) = {lambda_c}"),
            lhs_c,
            sigma2,
            quad_tol,
        ),
        RelationEdge::new("d", "b(P) <= 1/lambda(P)".into(), b, 1.0 / lambda, 0.0),
        RelationEdge::new(
            "e",
            "E e^(lambda(P)|X|) <= lambda(P)^-3 + e^lambda(P)".into(),
            exp_at_lambda,
            c_from_iv,
            quad_tol,
        ),
    ];

    let t_star = 0.5 * t;
    let exp_tail = opts
        .k_grid
        .iter()
        .map(|&k| {
            Ok(ExpTailPoint {
                k,
                value: spec.exp_tail_moment(t_star, k)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(RelationReport {
        ubar_sigma,
        lambda_sak: lambda,
        bernstein: b,
        t,
        c,
        edges,
        t_star,
        exp_tail,
    })
}

/// σ⁻¹ √(ln(σ̲²/(8√3 σ³))), a Sakhanenko constant for σ-sub-Gaussian laws.
pub fn sub_gaussian_lambda(sigma: f64, ubar_sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && ubar_sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma and ubar_sigma must be positive, got {sigma}, {ubar_sigma}"
        )));
    }
    let argument = ubar_sigma * ubar_sigma / (8.0 * 3f64.sqrt() * sigma.powi(3));
    if !(argument > 1.0) {
        return Err(Error::VacuousConstant { argument });
    }
    Ok(argument.ln().sqrt() / sigma)
}

/// q 2^{q/2} σ^q Γ(q/2), a bound on E|X|^q for σ-sub-Gaussian X.
pub fn sub_gaussian_moment_bound(q: f64, sigma: f64) -> Result<f64> {
    if !(q > 0.0 && sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "q and sigma must be positive, got {q}, {sigma}"
        )));
    }
    Ok(q * 2f64.powf(0.5 * q) * sigma.powf(q) * gamma(0.5 * q))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityOptions {
    pub tol: f64,
    pub q_max: u32,
    pub ubar_sigma: Option<f64>,
    pub t: Option<f64>,
    pub k_grid: Vec<f64>,
}

impl Default for RegularityOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            q_max: DEFAULT_Q_MAX,
            ubar_sigma: None,
            t: None,
            k_grid: DEFAULT_K_GRID.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// h(λ) at the returned λ(P).
    #[serde(with = "serde_ext")]
    pub sakhanenko_h: f64,
    /// Width of the final bisection bracket.
    pub sakhanenko_bracket: f64,
    #[serde(with = "serde_ext")]
    pub bernstein_tail_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub spec: DistributionSpec,
    pub variance: f64,
    pub lambda_sak: f64,
    pub heavy_tail: bool,
    #[serde(with = "serde_ext")]
    pub bernstein: f64,
    pub bernstein_argmax_q: u32,
    #[serde(with = "serde_ext")]
    pub bernstein_margin: f64,
    pub divergent_q: Option<u32>,
    /// (t, E e^{t|X|}) at t = λ(P)/2 unless overridden.
    pub exp_pair: Option<(f64, f64)>,
    pub residuals: Residuals,
    pub q_max_used: u32,
    pub relations: Option<RelationReport>,
}

pub fn regularity_report(spec: &DistributionSpec, opts: &RegularityOptions) -> Result<RegularityReport> {
    let sak = sakhanenko_parameter(spec, opts.tol)?;
    let bern = bernstein_parameter(spec, opts.q_max)?;
    let exp_pair = if sak.heavy_tail {
        None
    } else {
        let t = opts.t.unwrap_or(0.5 * sak.lambda);
        Some((t, spec.exp_abs_moment(t)?))
    };
    // A single law is its own family, so σ̲ defaults to its σ.
    let ubar_sigma = opts.ubar_sigma.or((!sak.heavy_tail).then(|| spec.std_dev()));
    let relations = match ubar_sigma {
        Some(ubar_sigma) => Some(relation_check(
            spec,
            ubar_sigma,
            &RelationOptions {
                t: opts.t,
                q_max: opts.q_max,
                tol: opts.tol,
                k_grid: opts.k_grid.clone(),
            },
        )?),
        None => None,
    };
    Ok(RegularityReport {
        spec: *spec,
        variance: spec.variance(),
        lambda_sak: sak.lambda,
        heavy_tail: sak.heavy_tail,
        bernstein: bern.value,
        bernstein_argmax_q: bern.argmax_q,
        bernstein_margin: bern.margin,
        divergent_q: bern.divergent_q,
        exp_pair,
        residuals: Residuals {
            sakhanenko_h: sak.residual,
            sakhanenko_bracket: sak.upper - sak.lambda,
            bernstein_tail_ratio: bern.tail_ratio,
        },
        q_max_used: opts.q_max,
        relations,
    })
}

/// A row of the flat CSV export: `quantity,value,slack,q_or_m,status`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub quantity: String,
    pub value: f64,
    pub slack: Option<f64>,
    pub q_or_m: Option<f64>,
    pub status: String,
}

impl ReportRow {
    fn new(quantity: &str, value: f64, slack: Option<f64>, q_or_m: Option<f64>, status: &str) -> Self {
        Self {
            quantity: quantity.to_string(),
            value,
            slack,
            q_or_m,
            status: status.to_string(),
        }
    }

    /// Fields rendered for CSV, with non-finite values spelled out.
    pub fn fields(&self) -> [String; 5] {
        let opt = |x: Option<f64>| x.map(serde_ext::format).unwrap_or_default();
        [
            self.quantity.clone(),
            serde_ext::format(self.value),
            opt(self.slack),
            opt(self.q_or_m),
            self.status.clone(),
        ]
    }
}

pub const REPORT_COLUMNS: [&str; 5] = ["quantity", "value", "slack", "q_or_m", "status"];

impl RegularityReport {
    pub fn rows(&self) -> Vec<ReportRow> {
        let mut rows = vec![
            ReportRow::new("variance", self.variance, None, None, "ok"),
            ReportRow::new(
                "lambda_sak",
                self.lambda_sak,
                Some(-self.residuals.sakhanenko_h),
                None,
                if self.heavy_tail { "heavy_tail" } else { "ok" },
            ),
            ReportRow::new(
                "bernstein",
                self.bernstein,
                None,
                Some(f64::from(self.bernstein_argmax_q)),
                if self.divergent_q.is_some() { "divergent" } else { "ok" },
            ),
            ReportRow::new(
                "bernstein_margin",
                self.bernstein_margin,
                None,
                Some(f64::from(self.q_max_used)),
                "ok",
            ),
        ];
        if let Some((t, c)) = self.exp_pair {
            rows.push(ReportRow::new("exp_pair_t", t, None, None, "ok"));
            rows.push(ReportRow::new("exp_pair_c", c, None, None, "ok"));
        }
        if let Some(rel) = &self.relations {
            rows.extend(rel.rows());
        }
        rows
    }
}

impl RelationReport {
    pub fn rows(&self) -> Vec<ReportRow> {
        let mut rows: Vec<ReportRow> = self
            .edges
            .iter()
            .map(|e| {
                ReportRow::new(
                    &format!("relation_{}", e.edge),
                    e.rhs,
                    Some(e.slack),
                    None,
                    if e.holds { "pass" } else { "fail" },
                )
            })
            .collect();
        rows.extend(
            self.exp_tail
                .iter()
                .map(|p| ReportRow::new("relation_a_exp_tail", p.value, None, Some(p.k), "reported")),
        );
        rows
    }
}

/// Golden-section search over one parameter of a family, used to refine a sweep sup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub family: String,
    pub param: String,
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub fixed: std::collections::BTreeMap<String, f64>,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
}

fn default_iterations() -> usize {
    60
}

impl Refinement {
    pub fn spec_at(&self, value: f64) -> Result<DistributionSpec> {
        let mut params = self.fixed.clone();
        params.insert(self.param.clone(), value);
        let raw = serde_json::json!({ "family": self.family, "params": params });
        serde_json::from_value(raw).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    /// Maximizes `f(spec(θ))` over θ ∈ [lo, hi]; assumes unimodality and also
    /// evaluates both endpoints. Returns (θ, value).
    pub fn maximize<F: Fn(&DistributionSpec) -> Result<f64>>(&self, f: F) -> Result<(f64, f64)> {
        if !(self.lo < self.hi) {
            return Err(Error::InvalidArgument(format!(
                "refinement interval [{}, {}] is empty",
                self.lo, self.hi
            )));
        }
        let eval = |x: f64| -> Result<f64> { f(&self.spec_at(x)?) };
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (self.lo, self.hi);
        let mut x1 = b - ratio * (b - a);
        let mut x2 = a + ratio * (b - a);
        let mut f1 = eval(x1)?;
        let mut f2 = eval(x2)?;
        for _ in 0..self.iterations {
            if f1 >= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - ratio * (b - a);
                f1 = eval(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + ratio * (b - a);
                f2 = eval(x2)?;
            }
        }
        let candidates = [(self.lo, eval(self.lo)?), (x1, f1), (x2, f2), (self.hi, eval(self.hi)?)];
        Ok(candidates.into_iter().fold(
            (f64::NAN, f64::NEG_INFINITY),
            |best, c| if c.1 > best.1 { c } else { best },
        ))
    }
}

/// A finite stand-in for an index set of laws, with evaluation grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySweep {
    pub specs: Vec<DistributionSpec>,
    #[serde(default)]
    pub m_grid: Vec<f64>,
    #[serde(default)]
    pub k_grid: Vec<f64>,
    #[serde(default)]
    pub refinement: Option<Refinement>,
}

impl FamilySweep {
    pub fn new(specs: Vec<DistributionSpec>, m_grid: Vec<f64>) -> Result<Self> {
        let sweep = Self {
            specs,
            m_grid,
            k_grid: Vec::new(),
            refinement: None,
        };
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn validate(&self) -> Result<()> {
        if self.specs.is_empty() && self.refinement.is_none() {
            return Err(Error::InvalidArgument("family sweep has no specs".into()));
        }
        if self.m_grid.iter().any(|m| !(*m >= 0.0)) {
            return Err(Error::InvalidArgument("m-grid entries must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub m: f64,
    #[serde(with = "serde_ext")]
    pub sup: f64,
    /// Index into the sweep of the maximizing spec; `None` when the refinement won.
    pub argmax: Option<usize>,
    pub refined_param: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailProfile {
    pub q: f64,
    /// "finite_sweep" or "finite_sweep+golden_section": the sup is over this surrogate only.
    pub index_set: String,
    pub points: Vec<ProfilePoint>,
    pub threshold: f64,
    /// Smallest grid m at which the sup falls to or below the threshold.
    pub first_m_below: Option<f64>,
}

impl TailProfile {
    pub fn rows(&self) -> Vec<ReportRow> {
        self.points
            .iter()
            .map(|p| {
                let status = if p.sup <= self.threshold {
                    "below_threshold"
                } else {
                    "above_threshold"
                };
                ReportRow::new("tail_sup", p.sup, None, Some(p.m), status)
            })
            .collect()
    }
}

/// m ↦ sup over the sweep of E[|X|^q 1{|X|^q > m}].
pub fn uniform_tail_profile(sweep: &FamilySweep, q: f64, threshold: f64) -> Result<TailProfile> {
    if !(q > 2.0) {
        return Err(Error::InvalidArgument(format!("q must exceed 2, got {q}")));
    }
    sweep.validate()?;
    let points = sweep
        .m_grid
        .par_iter()
        .map(|&m| {
            let values = sweep
                .specs
                .iter()
                .map(|s| s.tail_moment(q, m))
                .collect::<Result<Vec<_>>>()?;
            let mut point = ProfilePoint {
                m,
                sup: f64::NEG_INFINITY,
                argmax: None,
                refined_param: None,
            };
            for (i, v) in values.into_iter().enumerate() {
                if v > point.sup {
                    point.sup = v;
                    point.argmax = Some(i);
                }
            }
            if let Some(r) = &sweep.refinement {
                let (theta, v) = r.maximize(|s| s.tail_moment(q, m))?;
                if v > point.sup {
                    point.sup = v;
                    point.argmax = None;
                    point.refined_param = Some(theta);
                }
            }
            Ok(point)
        })
        .collect::<Result<Vec<_>>>()?;
    let first_m_below = points.iter().find(|p| p.sup <= threshold).map(|p| p.m);
    Ok(TailProfile {
        q,
        index_set: if sweep.refinement.is_some() {
            "finite_sweep+golden_section".into()
        } else {
            "finite_sweep".into()
        },
        points,
        threshold,
        first_m_below,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpTailProfile {
    pub t_star: f64,
    pub index_set: String,
    pub points: Vec<ExpTailPoint>,
}

/// K ↦ sup over the sweep of E[e^{t*|X|} 1{e^{t*|X|} ≥ K}] on the sweep's K-grid.
pub fn uniform_exp_tail_profile(sweep: &FamilySweep, t_star: f64) -> Result<ExpTailProfile> {
    sweep.validate()?;
    let points = sweep
        .k_grid
        .par_iter()
        .map(|&k| {
            let mut sup = f64::NEG_INFINITY;
            for s in &sweep.specs {
                sup = sup.max(s.exp_tail_moment(t_star, k)?);
            }
            Ok(ExpTailPoint { k, value: sup })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExpTailProfile {
        t_star,
        index_set: "finite_sweep".into(),
        points,
    })
}
