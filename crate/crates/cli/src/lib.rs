//! The `kmtlab` command-line frontend.
//!
//! Exit codes: 0 success, 1 oracle violation or runtime failure, 2 invalid input,
//! 3 infeasible parameters, 4 unsupported family/strategy pair.

pub mod config;
mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Read;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use clap::Parser;
use kmtlab::bounds::{block_partition, epoch_index, kmt_exponential_bound, power_bound, power_nm, TailBound};
use kmtlab::coupling::{Coupler, TailConfig};
use kmtlab::oracles::{lemma_suite, partition_suite, run_batch, CheckRequest, SuiteReport};
use kmtlab::regularity::{
    regularity_report, sakhanenko_parameter, uniform_exp_tail_profile, uniform_tail_profile, FamilySweep,
    RegularityOptions, DEFAULT_K_GRID, REPORT_COLUMNS,
};
use kmtlab::{DistributionSpec, Error};
use serde::{Deserialize, Serialize};

use config::{BoundArgs, CoupleArgs, FamilyArgs, RegularityArgs, Suite, Theorem, VerifyArgs};
pub use config::{CommandArgs, ExperimentConfig, Format, Output};
use output::{csv_bytes, json_bytes, write_atomic};

#[derive(Debug, Parser)]
#[command(name = "kmtlab", version, about = "Strong Gaussian approximation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<CommandArgs>,
    /// Output file; written atomically. Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, env = "KMTLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for replications; 0 uses every core. Never changes results.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Run the experiment described by this JSON file instead of the subcommand.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    /// Print the experiment configuration built from the flags and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,
}

/// Marker error for a failed theorem-backed check.
#[derive(Debug)]
struct ViolationFound;

impl std::fmt::Display for ViolationFound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("theorem-backed check violated")
    }
}

impl std::error::Error for ViolationFound {}

pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::InvalidSpec(_) | Error::InvalidArgument(_) | Error::Monotonicity(_) => 2,
                Error::Infeasible(_)
                | Error::VacuousConstant { .. }
                | Error::DivergentMoment { .. }
                | Error::HorizonExhausted { .. } => 3,
                Error::Unsupported { .. } => 4,
                _ => 1,
            };
        }
        if cause.is::<serde_json::Error>() || cause.is::<csv::Error>() {
            return 2;
        }
    }
    1
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            if !e.is::<ViolationFound>() {
                eprintln!("error: {e:#}");
            }
            exit_code(&e)
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    let config = match (&cli.config, cli.command) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<ExperimentConfig>(&text).context("parsing experiment config")?
        }
        (None, Some(command)) => ExperimentConfig {
            command,
            output: Output {
                path: cli.out,
                format: cli.format,
            },
            seed: cli.seed,
            workers: cli.workers,
        },
        (None, None) => {
            return Err(anyhow!(Error::InvalidArgument(
                "a subcommand or --config is required".into()
            )))
        }
    };
    if cli.dump_config {
        return write_atomic(None, &json_bytes(&config)?);
    }
    run_config(&config)
}

/// Runs a fully specified experiment.
pub fn run_config(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    let out = cfg.output.path.as_deref();
    match &cfg.command {
        CommandArgs::Regularity(a) => regularity(a, out, cfg.output.format.unwrap_or(Format::Json)),
        CommandArgs::Bound(a) => bound(a, out, cfg.output.format.unwrap_or(Format::Csv)),
        CommandArgs::Couple(a) => couple(a, cfg, out, cfg.output.format.unwrap_or(Format::Json)),
        CommandArgs::Verify(a) => verify(a, cfg.seed, out, cfg.output.format.unwrap_or(Format::Json)),
        CommandArgs::Family(a) => family(a, out, cfg.output.format.unwrap_or(Format::Csv)),
    }
}

fn read_source(src: &str) -> anyhow::Result<String> {
    let trimmed = src.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(src.to_string());
    }
    if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(src).with_context(|| format!("reading {src}"))
}

fn parse_json<T: for<'de> Deserialize<'de>>(src: &str, what: &str) -> anyhow::Result<T> {
    let text = read_source(src)?;
    serde_json::from_str(&text).with_context(|| what.to_string())
}

fn load_spec(src: &str) -> anyhow::Result<DistributionSpec> {
    parse_json(src, "distribution spec")
}

fn regularity(a: &RegularityArgs, out: Option<&Path>, format: Format) -> anyhow::Result<()> {
    let spec = load_spec(&a.spec)?;
    let opts = RegularityOptions {
        tol: a.tol,
        q_max: a.q_max,
        ubar_sigma: a.ubar_sigma,
        t: a.t,
        k_grid: if a.k_grid.is_empty() {
            DEFAULT_K_GRID.to_vec()
        } else {
            a.k_grid.clone()
        },
    };
    let report = regularity_report(&spec, &opts)?;
    let bytes = match format {
        Format::Json => json_bytes(&report)?,
        Format::Csv => csv_bytes(&REPORT_COLUMNS, report.rows().iter().map(|r| r.fields().to_vec()))?,
    };
    write_atomic(out, &bytes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub theorem: Theorem,
    pub z: f64,
    pub m: u64,
    pub n_m: usize,
    #[serde(flatten)]
    pub bound: kmtlab::BoundValue,
}

const BOUND_COLUMNS: [&str; 9] = [
    "theorem",
    "z",
    "m",
    "n_m",
    "log_value",
    "value",
    "vacuous",
    "terms_used",
    "truncation_bound",
];

#[derive(Debug, Deserialize)]
struct WeightRow {
    u: f64,
    a: f64,
    ubar_a: f64,
}

fn read_weights(path: &Path) -> anyhow::Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let (mut u, mut a, mut ab) = (Vec::new(), Vec::new(), Vec::new());
    for row in rdr.deserialize::<WeightRow>() {
        let row = row?;
        u.push(row.u);
        a.push(row.a);
        ab.push(row.ubar_a);
    }
    Ok((u, a, ab))
}

fn bound_rows(a: &BoundArgs) -> anyhow::Result<Vec<BoundRow>> {
    let mut rows = Vec::with_capacity(a.z_grid.len() * a.m_grid.len());
    match a.theorem {
        Theorem::Exp => {
            let (lambda, sigma) = match &a.spec {
                Some(src) => {
                    let spec = load_spec(src)?;
                    let sak = sakhanenko_parameter(&spec, kmtlab::regularity::DEFAULT_TOL)?;
                    if sak.heavy_tail || sak.lambda <= 0.0 {
                        bail!(Error::Infeasible(format!(
                            "{} has no exponential moment; λ(P) = 0",
                            spec.name()
                        )));
                    }
                    (sak.lambda, spec.std_dev())
                }
                None => match (a.lambda, a.sigma) {
                    (Some(l), Some(s)) => (l, s),
                    _ => bail!(Error::InvalidArgument(
                        "exp needs --spec or both --lambda and --sigma".into()
                    )),
                },
            };
            for &m in &a.m_grid {
                let n_m = epoch_index(m)? as usize;
                for &z in &a.z_grid {
                    let bound = kmt_exponential_bound(lambda, sigma, z, m, a.c)?;
                    rows.push(BoundRow {
                        theorem: Theorem::Exp,
                        z,
                        m,
                        n_m,
                        bound,
                    });
                }
            }
        }
        Theorem::Power => {
            let path = a
                .weights
                .as_deref()
                .ok_or_else(|| anyhow!(Error::InvalidArgument("power needs --weights".into())))?;
            let (u, seq_a, seq_ab) = read_weights(path)?;
            let tail: TailBound = match &a.tail {
                Some(p) => parse_json(&p.to_string_lossy(), "tail bound")?,
                None => TailBound::Zero,
            };
            let partition = block_partition(&u, tail)?;
            for &m in &a.m_grid {
                let m_idx = usize::try_from(m)?;
                let n_m = power_nm(&partition, m_idx)?.n_m;
                for &eps in &a.z_grid {
                    let bound = power_bound(&partition, &seq_a, &seq_ab, m_idx, eps, a.cq, a.q)?;
                    rows.push(BoundRow {
                        theorem: Theorem::Power,
                        z: eps,
                        m,
                        n_m,
                        bound,
                    });
                }
            }
        }
    }
    Ok(rows)
}

fn bound(a: &BoundArgs, out: Option<&Path>, format: Format) -> anyhow::Result<()> {
    let rows = bound_rows(a)?;
    let bytes = match format {
        Format::Json => json_bytes(&rows)?,
        Format::Csv => {
            let f = kmtlab::serde_ext::format;
            csv_bytes(
                &BOUND_COLUMNS,
                rows.iter().map(|r| {
                    vec![
                        match r.theorem {
                            Theorem::Exp => "exp".into(),
                            Theorem::Power => "power".into(),
                        },
                        f(r.z),
                        r.m.to_string(),
                        r.n_m.to_string(),
                        f(r.bound.log_value),
                        f(r.bound.value),
                        r.bound.vacuous.to_string(),
                        r.bound.terms_used.to_string(),
                        f(r.bound.truncation_bound),
                    ]
                }),
            )?
        }
    };
    write_atomic(out, &bytes)
}

fn couple(a: &CoupleArgs, cfg: &ExperimentConfig, out: Option<&Path>, format: Format) -> anyhow::Result<()> {
    let spec = load_spec(&a.spec)?;
    let tail = TailConfig {
        spec,
        strategy: a.strategy,
        weight: a.weight,
        k: a.k,
        reps: a.reps,
        seed: cfg.seed,
        workers: cfg.workers,
    };
    let estimates = tail.tail_grid(&a.m, &a.z)?;
    let run_bytes = match &a.run_csv {
        Some(_) => {
            let run = Coupler::new(&spec, a.strategy, a.k)?.run(kmtlab::numeric::seed::mix(cfg.seed, 0));
            let f = kmtlab::serde_ext::format;
            Some(csv_bytes(
                &["k", "x", "y", "lambda"],
                run.rows().map(|(k, x, y, l)| vec![k.to_string(), f(x), f(y), f(l)]),
            )?)
        }
        None => None,
    };
    let bytes = match format {
        Format::Json if estimates.len() == 1 => json_bytes(&estimates[0])?,
        Format::Json => json_bytes(&estimates)?,
        Format::Csv => csv_bytes(
            &["m", "z", "p_hat", "ci_low", "ci_high", "reps"],
            estimates.iter().map(|e| {
                vec![
                    e.params.m.to_string(),
                    e.params.z.to_string(),
                    e.p_hat.to_string(),
                    e.ci_low.to_string(),
                    e.ci_high.to_string(),
                    e.reps.to_string(),
                ]
            }),
        )?,
    };
    if let (Some(path), Some(run)) = (&a.run_csv, run_bytes) {
        write_atomic(Some(path), &run)?;
    }
    write_atomic(out, &bytes)
}

#[derive(Debug, Serialize)]
struct VerifySummary<'a> {
    ok: bool,
    cases: usize,
    suites: &'a [SuiteReport],
}

fn verify(a: &VerifyArgs, seed: u64, out: Option<&Path>, format: Format) -> anyhow::Result<()> {
    if let Some(path) = &a.batch {
        let requests: Vec<CheckRequest> = parse_json(&path.to_string_lossy(), "check batch")?;
        let results = run_batch(&requests);
        let ok = results.iter().all(|r| r.ok());
        write_atomic(out, &json_bytes(&results)?)?;
        return if ok { Ok(()) } else { Err(ViolationFound.into()) };
    }
    let mut suites = Vec::new();
    if matches!(a.suite, Suite::Lemmas | Suite::All) {
        suites.push(lemma_suite(a.cases, seed));
    }
    if matches!(a.suite, Suite::Partitions | Suite::All) {
        suites.push(partition_suite(a.cases, seed, a.epoch_limit));
    }
    let ok = suites.iter().all(SuiteReport::ok);
    let cases = suites.iter().map(SuiteReport::cases).sum();
    let bytes = match format {
        Format::Json => json_bytes(&VerifySummary {
            ok,
            cases,
            suites: &suites,
        })?,
        Format::Csv => csv_bytes(
            &["suite", "check", "cases", "violations", "literal_violations"],
            suites.iter().flat_map(|s| {
                s.tallies.iter().map(|t| {
                    vec![
                        s.suite.clone(),
                        t.check.clone(),
                        t.cases.to_string(),
                        t.violations.to_string(),
                        t.literal_violations.map(|v| v.to_string()).unwrap_or_default(),
                    ]
                })
            }),
        )?,
    };
    write_atomic(out, &bytes)?;
    for s in &suites {
        for t in &s.tallies {
            eprintln!(
                "{} {}: {} cases, {} violations",
                s.suite, t.check, t.cases, t.violations
            );
        }
        for v in &s.failures {
            eprintln!("violation in {}: {}", v.check, v.witness);
        }
    }
    if ok {
        Ok(())
    } else {
        Err(ViolationFound.into())
    }
}

fn family(a: &FamilyArgs, out: Option<&Path>, format: Format) -> anyhow::Result<()> {
    let sweep: FamilySweep = parse_json(&a.sweep, "family sweep")?;
    let bytes = match a.t_star {
        Some(t) => {
            let profile = uniform_exp_tail_profile(&sweep, t)?;
            match format {
                Format::Json => json_bytes(&profile)?,
                Format::Csv => csv_bytes(
                    &["k", "value"],
                    profile
                        .points
                        .iter()
                        .map(|p| vec![kmtlab::serde_ext::format(p.k), kmtlab::serde_ext::format(p.value)]),
                )?,
            }
        }
        None => {
            let profile = uniform_tail_profile(&sweep, a.q, a.threshold)?;
            match format {
                Format::Json => json_bytes(&profile)?,
                Format::Csv => csv_bytes(&REPORT_COLUMNS, profile.rows().iter().map(|r| r.fields().to_vec()))?,
            }
        }
    };
    write_atomic(out, &bytes)
}
