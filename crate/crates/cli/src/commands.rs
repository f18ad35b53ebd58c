use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use serde::Serialize;

use emint_core::bounds::{
    arcones_gine_bound, log_ratio_range, regime_report, theorem1_bound, BoundParams,
};
use emint_core::combinatorics::MAX_PARTITION_K;
use emint_core::descriptor::{kernel_hash, load_kernel, load_space};
use emint_core::montecarlo::{
    binomial_tail_exact, estimate_tail, fit_constants, BoundForm, McConfig, TailEstimate,
};
use emint_core::report::{b_nk_csv, bounds_csv, lemma5_csv, tails_csv, RunManifest};
use emint_core::verify::{run_verify, Fault, Scale, VerifyConfig};
use emint_core::{Execution, Kernel, Scalar};

use crate::config::{require, BoundConstants, ConfigError, Mode, M_MAX_CAP};

/// Failure classes with distinct exit statuses.
#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Runtime(anyhow::Error),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<emint_core::Error> for CliError {
    fn from(e: emint_core::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

pub type CmdResult = Result<i32, CliError>;

fn write(out: &Path, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub struct VerifyArgs {
    pub mode: Mode,
    pub seed: u64,
    pub scale: Scale,
    pub enum_cap: u64,
    pub out: Option<PathBuf>,
    pub fault: Option<Fault>,
}

pub fn cmd_verify(args: VerifyArgs) -> CmdResult {
    if args.mode != Mode::Exact {
        return Err(ConfigError(
            "verification suites check identities exactly and require --mode exact".into(),
        )
        .into());
    }
    let cfg = VerifyConfig {
        seed: args.seed,
        scale: args.scale,
        enum_cap: args.enum_cap,
        fault: args.fault,
    };
    let report = run_verify(&cfg, Execution::Parallel)?;
    for s in &report.suites {
        eprintln!(
            "{} suite {} ({}): checks={} failures={} worst={:e}",
            if s.passed() { "PASS" } else { "FAIL" },
            s.code,
            s.name,
            s.checks,
            s.failures,
            s.worst
        );
    }
    let json = to_json(&report);
    if let Some(out) = &args.out {
        write(out, "verify_report.json", &json)?;
    }
    print!("{json}");
    Ok(report.exit_code())
}

pub struct TailsArgs {
    pub space: PathBuf,
    pub kernel: PathBuf,
    pub mode: Mode,
    pub out: PathBuf,
    pub seed: u64,
    pub replicates: u64,
    pub n: usize,
    pub x_grid: Option<Vec<f64>>,
    pub sigma: Option<f64>,
    pub constants: Option<BoundConstants>,
}

pub fn cmd_tails(args: TailsArgs) -> CmdResult {
    match args.mode {
        Mode::Exact => tails_with::<emint_core::Rational>(&args),
        Mode::Float => tails_with::<f64>(&args),
    }
}

/// Constants actually used for the bound columns and where they came from.
#[derive(Debug, Serialize)]
struct UsedConstants {
    source: &'static str,
    sigma: f64,
    #[serde(flatten)]
    constants: BoundConstants,
}

fn tails_with<S: Scalar>(args: &TailsArgs) -> CmdResult {
    let space = Arc::new(load_space::<S>(&args.space).map_err(ConfigError::from)?);
    let f = load_kernel(&args.kernel, space).map_err(ConfigError::from)?;
    if f.arity() == 0 {
        return Err(ConfigError("kernel arity must be at least 1".into()).into());
    }
    let mut cfg = McConfig::new(args.replicates, args.seed, args.n);
    if let Some(g) = &args.x_grid {
        cfg = cfg.with_grid(g.clone());
    }
    let est = estimate_tail(&f, &cfg, Execution::Parallel)?;

    let sigma = args.sigma.unwrap_or_else(|| f.l2_norm_sq().to_f64().sqrt());
    let k = f.arity();
    let (b13, b16, used) = if sigma == 0.0 {
        // A zero kernel has a zero statistic; every tail bound is zero too.
        let zeros = vec![0.0; est.x_grid.len()];
        let used = UsedConstants {
            source: "zero_kernel",
            sigma,
            constants: args.constants.unwrap_or_default(),
        };
        (zeros.clone(), zeros, used)
    } else {
        let shape = BoundParams::new(k, sigma, args.n as u64);
        shape.validate().map_err(ConfigError::from)?;
        let (constants, source) = match args.constants {
            Some(c) => (c, "constants_file"),
            None => fitted_constants(&est, &shape),
        };
        let params = shape
            .with_theorem1(constants.c, constants.alpha)
            .with_bernstein(constants.c1, constants.c2);
        let mut b13 = Vec::with_capacity(est.x_grid.len());
        let mut b16 = Vec::with_capacity(est.x_grid.len());
        for &x in &est.x_grid {
            b13.push(theorem1_bound(&params, x)?.raw);
            b16.push(arcones_gine_bound(&params, x)?);
        }
        (
            b13,
            b16,
            UsedConstants {
                source,
                sigma,
                constants,
            },
        )
    };

    write(&args.out, "tails.csv", &tails_csv(&est, &b13, &b16))?;
    let manifest = RunManifest {
        seed: args.seed,
        replicates: args.replicates,
        n: args.n,
        kernel_hash: kernel_hash(&f),
    };
    write(&args.out, "manifest.json", &to_json(&manifest))?;
    write(&args.out, "constants.json", &to_json(&used))?;
    if let Some(check) = binomial_self_check(&f, &est, args.n as u64)? {
        write(&args.out, "self_check.csv", &check.csv)?;
        eprintln!("binomial self-check: max |z| = {:.3}", check.max_z);
    }
    eprintln!(
        "wrote tails for {} grid points to {}",
        est.x_grid.len(),
        args.out.display()
    );
    Ok(0)
}

/// Least-squares constants for both bound forms, falling back to unit
/// constants when the tail has too few positive points.
fn fitted_constants(est: &TailEstimate, shape: &BoundParams) -> (BoundConstants, &'static str) {
    let t1 = fit_constants(est, BoundForm::Theorem1, shape);
    let t16 = fit_constants(est, BoundForm::Bernstein, shape);
    match (t1, t16) {
        (Ok(a), Ok(b)) if a.rate > 0.0 && b.rate > 0.0 => (
            BoundConstants {
                c: a.scale,
                alpha: a.rate,
                c1: b.scale,
                c2: b.rate,
            },
            "fitted",
        ),
        _ => (BoundConstants::default(), "default"),
    }
}

struct SelfCheck {
    csv: String,
    max_z: f64,
}

/// For `f = c (1_A − μ(A))` the statistic is a rescaled centered binomial, so
/// the Monte Carlo tail can be compared with the exact one.
fn binomial_self_check<S: Scalar>(
    f: &Kernel<S>,
    est: &TailEstimate,
    n: u64,
) -> anyhow::Result<Option<SelfCheck>> {
    if f.arity() != 1 {
        return Ok(None);
    }
    let values: Vec<f64> = f.values().iter().map(Scalar::to_f64).collect();
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = f.space().weights().iter().map(Scalar::to_f64).collect();
    let mass: f64 = values
        .iter()
        .zip(&weights)
        .filter(|(v, _)| **v == hi)
        .map(|(_, w)| w)
        .sum();
    let two_valued = values.iter().all(|&v| v == hi || v == lo);
    let centered = (values.iter().zip(&weights).map(|(v, w)| v * w).sum::<f64>()).abs() < 1e-12;
    if hi <= lo || !two_valued || !centered {
        return Ok(None);
    }
    let c = hi - lo;
    let mut csv = String::from("x,p_hat,p_exact,z\n");
    let mut max_z = 0f64;
    for (&x, &p_hat) in est.x_grid.iter().zip(&est.p_hat) {
        let p = binomial_tail_exact(n, mass, x / c)?;
        let se = (p * (1.0 - p) / est.replicates as f64).sqrt();
        let z = if se > 0.0 {
            (p_hat - p).abs() / se
        } else if p_hat == p {
            0.0
        } else {
            f64::INFINITY
        };
        max_z = max_z.max(z);
        csv.push_str(&format!("{x:?},{p_hat:?},{p:?},{z:?}\n"));
    }
    Ok(Some(SelfCheck { csv, max_z }))
}

pub struct ConstantsArgs {
    pub out: PathBuf,
    pub k_max: usize,
    pub m_max: usize,
    pub n_max: usize,
}

pub fn cmd_constants(args: ConstantsArgs) -> CmdResult {
    if args.k_max == 0 || args.k_max > MAX_PARTITION_K {
        return Err(ConfigError(format!("--k-max must be in 1..={MAX_PARTITION_K}")).into());
    }
    if args.m_max > M_MAX_CAP {
        return Err(ConfigError(format!("--m-max must be at most {M_MAX_CAP}")).into());
    }
    if args.n_max == 0 {
        return Err(ConfigError("--n-max must be positive".into()).into());
    }
    write(
        &args.out,
        "lemma5_constants.csv",
        &lemma5_csv(args.k_max, args.m_max),
    )?;
    write(&args.out, "b_nk.csv", &b_nk_csv(args.n_max, args.k_max)?)?;
    eprintln!("wrote constant tables to {}", args.out.display());
    Ok(0)
}

pub struct BoundsArgs {
    pub out: PathBuf,
    pub k: usize,
    pub sigma: f64,
    pub n: u64,
    pub x_grid: Vec<f64>,
    pub constants: BoundConstants,
}

pub fn cmd_bounds(args: BoundsArgs) -> CmdResult {
    let params = BoundParams::new(args.k, args.sigma, args.n)
        .with_theorem1(args.constants.c, args.constants.alpha)
        .with_bernstein(args.constants.c1, args.constants.c2);
    params.validate().map_err(ConfigError::from)?;
    let rows = regime_report(&params, &args.x_grid).map_err(ConfigError::from)?;
    write(&args.out, "bounds.csv", &bounds_csv(&rows))?;
    let (lo, hi) = log_ratio_range(&params, &args.x_grid)?;
    eprintln!("log-ratio range over grid: [{lo:.6}, {hi:.6}]");
    Ok(0)
}

pub fn require_path(value: Option<PathBuf>, flag: &str) -> Result<PathBuf, ConfigError> {
    let p = require(value, flag)?;
    if !p.exists() {
        return Err(ConfigError(format!(
            "--{flag}: {} does not exist",
            p.display()
        )));
    }
    Ok(p)
}
