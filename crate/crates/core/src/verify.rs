//! Randomized exact verification suites.
//!
//! Each suite has a stable numeric code, used as the process exit status when
//! it fails:
//!
//! | code | suite |
//! |------|-------|
//! | 10 | pathwise diagram formula and canonical identity |
//! | 11 | expectation constants |
//! | 12 | norm inequalities |
//! | 13 | moment bounds |
//! | 14 | dominance certificates |
//! | 15 | constant system, partition bound, crossover |

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{crossover_rel_error, prop_moment_bound};
use crate::combinatorics::{
    b_nk, b_nk_growth, check_b_nk_bound, check_partition_bound, expected_j_oracle,
    lemma5_ln_partial_product, lemma5_maximizer_error, lemma5_recursion_report, moment_oracle,
    Lemma5Constants,
};
use crate::diagram::{
    contract, contract_class_average, enumerate_diagrams, is_gaussian, DiagramClass,
};
use crate::dominance::{
    fallback_certificate, lemma4_transform, verify_certificate, verify_certificate_with_tol,
};
use crate::error::Result;
use crate::exec::Execution;
use crate::gen::{
    random_bounded_kernel, random_dominated_kernel, random_rational_kernel, random_rational_space,
};
use crate::integral::{check_canonical_identity, DiagramExpansion};
use crate::scalar::{Rational, Scalar};
use crate::space::{RandomSource, DEFAULT_ENUMERATION_CAP};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub const SUITE_DIAGRAM: i32 = 10;
pub const SUITE_EXPECTATION: i32 = 11;
pub const SUITE_NORMS: i32 = 12;
pub const SUITE_MOMENTS: i32 = 13;
pub const SUITE_DOMINANCE: i32 = 14;
pub const SUITE_CONSTANTS: i32 = 15;

/// Pointwise domination tolerance for float-mode certificates.
pub const CERTIFICATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Full sweep sizes.
    #[default]
    Desk,
    /// Reduced sweeps for smoke runs.
    Quick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Adds one to the `(l, p) = (1, 0)` coefficient of every expansion.
    DiagramCoefficient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    #[serde(default)]
    pub scale: Scale,
    #[serde(default = "default_cap")]
    pub enum_cap: u64,
    #[serde(default)]
    pub fault: Option<Fault>,
}

fn default_cap() -> u64 {
    DEFAULT_ENUMERATION_CAP
}

impl VerifyConfig {
    pub fn new(seed: u64, scale: Scale) -> Self {
        VerifyConfig {
            seed,
            scale,
            enum_cap: DEFAULT_ENUMERATION_CAP,
            fault: None,
        }
    }

    fn desk(&self) -> bool {
        self.scale == Scale::Desk
    }

    fn stream(&self, suite: i32, item: usize) -> ChaCha8Rng {
        let suite_seed = RandomSource::new(self.seed).child_seed(suite as u64);
        RandomSource::new(suite_seed).stream(item as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub code: i32,
    pub name: String,
    pub checks: u64,
    pub failures: u64,
    /// Largest discrepancy (or violation ratio) observed; zero is ideal for
    /// identities, at most one for inequalities.
    pub worst: f64,
    pub details: Value,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub seed: u64,
    pub scale: Scale,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    /// `0` when every suite passes, otherwise the code of the first failure.
    pub fn exit_code(&self) -> i32 {
        self.suites
            .iter()
            .find(|s| !s.passed())
            .map_or(0, |s| s.code)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    checks: u64,
    failures: u64,
    worst: f64,
}

impl Tally {
    fn record(&mut self, ok: bool, magnitude: f64) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
        }
        if magnitude.is_nan() || magnitude > self.worst {
            self.worst = magnitude;
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checks += other.checks;
        self.failures += other.failures;
        self.worst = if other.worst.is_nan() {
            other.worst
        } else {
            self.worst.max(other.worst)
        };
        self
    }
}

fn merge_all(items: Vec<Result<Tally>>) -> Result<Tally> {
    items
        .into_iter()
        .try_fold(Tally::default(), |acc, t| Ok(acc.merge(t?)))
}

fn ratio(lhs: &Rational, rhs: &Rational) -> f64 {
    if rhs.is_zero() {
        if lhs.is_zero() {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (lhs.clone() / rhs.clone()).to_f64()
    }
}

/// Diagram formula on random pairs and samples, plus the canonical identity.
pub fn suite_diagram(cfg: &VerifyConfig, exec: Execution) -> Result<SuiteResult> {
    let (ns, atom_range, ks, samples): (Vec<usize>, Vec<usize>, Vec<usize>, usize) = if cfg.desk() {
        ((2..=6).collect(), (2..=4).collect(), (1..=3).collect(), 20)
    } else {
        (vec![2, 4], vec![2, 3], vec![1, 2], 4)
    };
    let mut combos = Vec::new();
    for &k1 in &ks {
        for &k2 in &ks {
            for &n in &ns {
                for &atoms in &atom_range {
                    combos.push((k1, k2, n, atoms));
                }
            }
        }
    }
    let fault = cfg.fault;
    let formula = merge_all(exec.map_range(combos.len(), |i| {
        let (k1, k2, n, atoms) = combos[i];
        let mut rng = cfg.stream(SUITE_DIAGRAM, i);
        let space = Arc::new(random_rational_space(&mut rng, atoms));
        let f = random_rational_kernel(&mut rng, &space, k1);
        let g = random_rational_kernel(&mut rng, &space, k2);
        let mut e = DiagramExpansion::new(&f, &g)?;
        if fault == Some(Fault::DiagramCoefficient) {
            for t in e.terms.iter_mut().filter(|t| t.l == 1 && t.p == 0) {
                t.coeff = t.coeff.clone() + Rational::from_i64(1);
            }
        }
        let mut tally = Tally::default();
        for _ in 0..samples {
            let s = space.draw_sample(n, &mut rng)?;
            let d = e.discrepancy(&s)?;
            tally.record(d.is_zero(), d.to_f64().abs());
        }
        Ok(tally)
    }))?;

    let canon_items: Vec<(usize, usize)> = ks
        .iter()
        .flat_map(|&k| atom_range.iter().map(move |&a| (k, a)))
        .collect();
    let canon_samples = if cfg.desk() { 50 } else { 10 };
    let canonical = merge_all(exec.map_range(canon_items.len(), |i| {
        let (k, atoms) = canon_items[i];
        let mut rng = cfg.stream(SUITE_DIAGRAM, 10_000 + i);
        let space = Arc::new(random_rational_space(&mut rng, atoms));
        let f = random_rational_kernel(&mut rng, &space, k).canonical_project();
        let mut tally = Tally::default();
        for _ in 0..canon_samples {
            let n = rng.random_range(1..=6);
            let s = space.draw_sample(n, &mut rng)?;
            tally.record(check_canonical_identity(&f, &s)?, 0.0);
        }
        Ok(tally)
    }))?;

    let total = formula.merge(canonical);
    Ok(SuiteResult {
        code: SUITE_DIAGRAM,
        name: "diagram".into(),
        checks: total.checks,
        failures: total.failures,
        worst: total.worst,
        details: json!({
            "kernel_pairs": combos.len(),
            "samples_per_pair": samples,
            "formula_checks": formula.checks,
            "formula_failures": formula.failures,
            "canonical_kernels": canon_items.len(),
            "canonical_checks": canonical.checks,
            "canonical_failures": canonical.failures,
        }),
    })
}

/// Exhaustive expectation oracle against the constants, hard-coded values,
/// and the growth bound `|B_{n,k}| k^{k/2} ≤ 10^k`.
pub fn suite_expectation(cfg: &VerifyConfig, exec: Execution) -> Result<SuiteResult> {
    let (kernels, n_max) = if cfg.desk() { (50, 5) } else { (12, 3) };
    let cap = cfg.enum_cap;
    let oracle = merge_all(exec.map_range(kernels, |i| {
        let mut rng = cfg.stream(SUITE_EXPECTATION, i);
        let k = 1 + i % 3;
        let atoms = 2 + (i / 3) % 2;
        let space = Arc::new(random_rational_space(&mut rng, atoms));
        let f = random_rational_kernel(&mut rng, &space, k);
        let integral = f.integral();
        let mut tally = Tally::default();
        for n in 1..=n_max {
            let exact = expected_j_oracle(&f, n, cap)?;
            let predicted = b_nk(n, k)?.r * &integral;
            let diff = exact - predicted;
            tally.record(diff.is_zero(), diff.to_f64().abs());
        }
        Ok(tally)
    }))?;

    let mut hard = Tally::default();
    for n in 1..=30 {
        let b1 = b_nk(n, 1)?;
        hard.record(b1.r.is_zero() && b1.b_exact() == "0", b1.b_f64().abs());
        let b2 = b_nk(n, 2)?;
        hard.record(b2.b_exact() == "-1/2", (b2.b_f64() + 0.5).abs());
        let b3 = b_nk(n, 3)?;
        let expected = Rational::from_ratio(1, 3 * (n * n) as i64);
        hard.record(b3.r == expected, (b3.r.clone() - expected).to_f64().abs());
    }

    let mut bound = Tally::default();
    let mut growth = BTreeMap::new();
    for k in 1..=8usize {
        let mut best = 0f64;
        for n in k.div_ceil(2)..=30 {
            let b = b_nk(n, k)?;
            best = best.max(b_nk_growth(&b));
            bound.record(check_b_nk_bound(&b, 10), 0.0);
        }
        growth.insert(k.to_string(), best);
    }

    let total = oracle.merge(hard).merge(bound);
    Ok(SuiteResult {
        code: SUITE_EXPECTATION,
        name: "expectation".into(),
        checks: total.checks,
        failures: total.failures,
        worst: total.worst,
        details: json!({
            "oracle_kernels": kernels,
            "oracle_failures": oracle.failures,
            "hard_coded_failures": hard.failures,
            "bound_failures": bound.failures,
            "max_growth_per_k": growth,
        }),
    })
}

/// Norm inequalities for contracted kernels of sup-norm bounded pairs.
pub fn suite_norms(cfg: &VerifyConfig, exec: Execution) -> Result<SuiteResult> {
    let pairs = if cfg.desk() { 500 } else { 40 };
    let results = exec.map_range(pairs, |i| -> Result<[Tally; 4]> {
        let mut rng = cfg.stream(SUITE_NORMS, i);
        let k1 = 1 + i % 3;
        let k2 = 1 + (i / 3) % 3;
        let atoms = 2 + (i / 9) % 2;
        let space = Arc::new(random_rational_space(&mut rng, atoms));
        let f = random_bounded_kernel(&mut rng, &space, k1);
        let g = random_bounded_kernel(&mut rng, &space, k2);
        let (nf, ng) = (f.l2_norm_sq(), g.l2_norm_sq());
        let prod = nf.clone() * &ng;
        let mut any = Tally::default();
        let mut gauss = Tally::default();
        let mut scalar = Tally::default();
        let mut l1 = Tally::default();
        for class in DiagramClass::all(k1, k2) {
            for d in enumerate_diagrams(class)? {
                let h = contract(&f, &g, &d)?;
                let nh = h.l2_norm_sq();
                let sq = nh.clone() * &nh;
                any.record(sq <= prod, ratio(&sq, &prod).sqrt());
                if is_gaussian(&d) {
                    gauss.record(nh <= prod, ratio(&nh, &prod));
                }
                if let Some(v) = h.scalar() {
                    let v2 = v.clone() * v;
                    scalar.record(v2 <= prod, ratio(&v2, &prod).sqrt());
                }
            }
        }
        for class in DiagramClass::all(k1, k1) {
            let h = contract_class_average(&f, &f, class)?;
            let n1 = h.l1_norm();
            l1.record(n1 <= nf, ratio(&n1, &nf));
        }
        Ok([any, gauss, scalar, l1])
    });
    let mut parts = [Tally::default(); 4];
    for r in results {
        let r = r?;
        for (acc, t) in parts.iter_mut().zip(r) {
            *acc = acc.merge(t);
        }
    }
    let total = parts.iter().fold(Tally::default(), |a, &t| a.merge(t));
    Ok(SuiteResult {
        code: SUITE_NORMS,
        name: "norms".into(),
        checks: total.checks,
        failures: total.failures,
        worst: total.worst,
        details: json!({
            "kernel_pairs": pairs,
            "all_diagrams": {"checks": parts[0].checks, "failures": parts[0].failures, "max_ratio": parts[0].worst},
            "gaussian_diagrams": {"checks": parts[1].checks, "failures": parts[1].failures, "max_ratio": parts[1].worst},
            "scalar_results": {"checks": parts[2].checks, "failures": parts[2].failures, "max_ratio": parts[2].worst},
            "l1_class_average": {"checks": parts[3].checks, "failures": parts[3].failures, "max_ratio": parts[3].worst},
        }),
    })
}

/// One exact moment instance.
#[derive(Debug, Clone)]
struct MomentCase {
    k: usize,
    m: u64,
    n: usize,
    sigma: f64,
    ej: f64,
    lemma3_ratio: Option<f64>,
}

/// Smallest constant for which the moment bound covers the instance.
fn needed_constant(case: &MomentCase, r: Option<usize>) -> Result<f64> {
    let unit = prop_moment_bound(case.k, case.m, case.sigma, case.n as u64, 1.0, r)?;
    Ok((case.ej / unit).powf(1.0 / case.m as f64))
}

/// Exact moments against both moment bounds; records the tightest constants.
pub fn suite_moments(cfg: &VerifyConfig, exec: Execution) -> Result<SuiteResult> {
    let per_k = if cfg.desk() { 8 } else { 2 };
    let cap = cfg.enum_cap;
    let items: Vec<(usize, usize)> = (1..=2usize)
        .flat_map(|k| (0..per_k).map(move |i| (k, i)))
        .collect();
    let cases = exec.map_slice(&items, |&(k, i)| -> Result<Vec<MomentCase>> {
        let mut rng = cfg.stream(SUITE_MOMENTS, k * 1000 + i);
        let atoms = 2 + i % 2;
        let space = Arc::new(random_rational_space(&mut rng, atoms));
        let f = random_bounded_kernel(&mut rng, &space, k);
        let s2 = f.l2_norm_sq();
        if s2.is_zero() {
            return Ok(Vec::new());
        }
        let sigma = s2.to_f64().sqrt();
        let mut out = Vec::new();
        for m in [1u64, 2] {
            for n in (k * m as usize)..=6 {
                let q = moment_oracle(&f, n, 2 * m as usize, cap)?;
                let ej = (q * Rational::from_i64(n as i64).powi((k as u64 * m) as i32)).to_f64();
                let lemma3_ratio = (m == 1).then(|| ej * (k as f64).powi(k as i32) / s2.to_f64());
                out.push(MomentCase {
                    k,
                    m,
                    n,
                    sigma,
                    ej,
                    lemma3_ratio,
                });
            }
        }
        Ok(out)
    });
    let cases: Vec<MomentCase> = cases
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut c1: BTreeMap<usize, f64> = BTreeMap::new();
    let mut c2: BTreeMap<usize, f64> = BTreeMap::new();
    let mut l3: BTreeMap<usize, f64> = BTreeMap::new();
    for case in &cases {
        let e1 = c1.entry(case.k).or_insert(0.0);
        *e1 = e1.max(needed_constant(case, None)?);
        let e2 = c2.entry(case.k).or_insert(0.0);
        *e2 = e2.max(needed_constant(case, Some(1))?);
        if let Some(r) = case.lemma3_ratio {
            let e3 = l3.entry(case.k).or_insert(0.0);
            *e3 = e3.max(r);
        }
    }

    let mut tally = Tally::default();
    for case in &cases {
        let b1 = prop_moment_bound(case.k, case.m, case.sigma, case.n as u64, c1[&case.k], None)?;
        tally.record(case.ej <= b1 * (1.0 + 1e-9), case.ej / b1);
        let b2 = prop_moment_bound(
            case.k,
            case.m,
            case.sigma,
            case.n as u64,
            c2[&case.k],
            Some(1),
        )?;
        tally.record(case.ej <= b2 * (1.0 + 1e-9), case.ej / b2);
        if let Some(r) = case.lemma3_ratio {
            tally.record(r <= 100f64.powi(case.k as i32), 0.0);
        }
    }
    let finite = c1
        .values()
        .chain(c2.values())
        .chain(l3.values())
        .all(|v| v.is_finite());
    if !finite {
        tally.failures += 1;
    }
    let keyed = |m: &BTreeMap<usize, f64>| -> BTreeMap<String, f64> {
        m.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    };
    Ok(SuiteResult {
        code: SUITE_MOMENTS,
        name: "moments".into(),
        checks: tally.checks,
        failures: tally.failures,
        worst: tally.worst,
        details: json!({
            "instances": cases.len(),
            "tightest_c_prop1": keyed(&c1),
            "tightest_c_prop2_r1": keyed(&c2),
            "max_second_moment_ratio": keyed(&l3),
        }),
    })
}

/// Soundness of transformed and fallback certificates over full diagram sweeps.
pub fn suite_dominance(cfg: &VerifyConfig, exec: Execution) -> Result<SuiteResult> {
    let per_combo = if cfg.desk() { 8 } else { 2 };
    let items: Vec<(usize, usize, usize)> = (1..=3)
        .flat_map(|k1| (1..=3).flat_map(move |k2| (0..per_combo).map(move |i| (k1, k2, i))))
        .collect();
    let results = exec.map_range(items.len(), |idx| -> Result<[Tally; 2]> {
        let (k1, k2, i) = items[idx];
        let mut rng = cfg.stream(SUITE_DOMINANCE, idx);
        let space = Arc::new(random_rational_space(&mut rng, 2 + i % 2));
        let sigma = Rational::from_ratio(rng.random_range(1..=4), 4);
        let r1 = rng.random_range(1..=k1);
        let r2 = rng.random_range(1..=k2);
        let (f, cf) = random_dominated_kernel(&mut rng, &space, k1, r1, &sigma);
        let (g, cg) = random_dominated_kernel(&mut rng, &space, k2, r2, &sigma);
        let (ff, gf) = (cf.to_float(), cg.to_float());
        let mut transformed = Tally::default();
        let mut fallback = Tally::default();
        for class in DiagramClass::all(k1, k2) {
            for d in enumerate_diagrams(class)? {
                let h = contract(&f, &g, &d)?;
                let fb = fallback_certificate(&f, &g, &cf, &cg, &d)?;
                fallback.record(verify_certificate(&h, &fb)?, 0.0);
                if r1 + r2 > d.l() - d.p() {
                    let c = lemma4_transform(&ff, &gf, &d)?;
                    let rank_ok = c.r() == r1 + r2 - (d.l() - d.p());
                    let ok =
                        rank_ok && verify_certificate_with_tol(&h.to_float(), &c, CERTIFICATE_TOL)?;
                    transformed.record(ok, 0.0);
                }
            }
        }
        Ok([transformed, fallback])
    });
    let mut parts = [Tally::default(); 2];
    for r in results {
        let r = r?;
        parts[0] = parts[0].merge(r[0]);
        parts[1] = parts[1].merge(r[1]);
    }
    let total = parts[0].merge(parts[1]);
    Ok(SuiteResult {
        code: SUITE_DOMINANCE,
        name: "dominance".into(),
        checks: total.checks,
        failures: total.failures,
        worst: total.worst,
        details: json!({
            "kernel_pairs": items.len(),
            "transformed": {"checks": parts[0].checks, "failures": parts[0].failures},
            "fallback": {"checks": parts[1].checks, "failures": parts[1].failures},
            "tolerance": CERTIFICATE_TOL,
        }),
    })
}

/// Constant-system recursion, partial products, maximizer, Stirling bound and
/// the crossover point of the two-regime bound.
pub fn suite_constants(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let mut lemma5 = Tally::default();
    let recursion = lemma5_recursion_report(8, 16);
    lemma5.checks += recursion.checked as u64;
    lemma5.failures += recursion.failures.len() as u64;

    let table = Lemma5Constants::new(8, 16);
    for k in 0..=8 {
        lemma5.record(table.cbar(k, 0) == Rational::from_i64(1), 0.0);
    }

    let limit = lemma5_ln_partial_product(200);
    let at60 = lemma5_ln_partial_product(60);
    let stabilization = (at60 - limit).exp_m1().abs();
    lemma5.record(stabilization < 5e-10, stabilization);

    let mut maximizer = 0f64;
    for k in 1..=6 {
        for m in 0..=12 {
            let err = lemma5_maximizer_error(k, m);
            maximizer = maximizer.max(err);
            lemma5.record(err <= 1e-12, err);
        }
    }

    let mut stirling = Tally::default();
    for k in 1..=12 {
        for s in 1..=k {
            stirling.record(check_partition_bound(k, s), 0.0);
        }
    }

    let mut rng = cfg.stream(SUITE_CONSTANTS, 0);
    let draws = if cfg.desk() { 200 } else { 20 };
    let mut cross = Tally::default();
    for k in 1..=6 {
        for _ in 0..draws {
            let n = rng.random_range(1..=1_000_000u64);
            let sigma: f64 = rng.random_range(1e-3..=1.0);
            let err = crossover_rel_error(k, n, sigma);
            cross.record(err <= 1e-12, err);
        }
    }

    let total = lemma5.merge(stirling).merge(cross);
    Ok(SuiteResult {
        code: SUITE_CONSTANTS,
        name: "constants".into(),
        checks: total.checks,
        failures: total.failures,
        worst: total.worst,
        details: json!({
            "lemma5_checks": lemma5.checks,
            "lemma5_failures": lemma5.failures,
            "recursion_checks": recursion.checked,
            "recursion_failures": recursion.failures.len(),
            "recursion_min_log_margin": recursion.min_log_margin,
            "partial_product_m60": at60.exp(),
            "partial_product_limit": limit.exp(),
            "partial_product_rel_gap": stabilization,
            "maximizer_max_rel_error": maximizer,
            "partition_bound_failures": stirling.failures,
            "crossover_checks": cross.checks,
            "crossover_failures": cross.failures,
            "crossover_max_rel_error": cross.worst,
        }),
    })
}

pub fn run_verify(cfg: &VerifyConfig, exec: Execution) -> Result<VerifyReport> {
    let suites = vec![
        suite_diagram(cfg, exec)?,
        suite_expectation(cfg, exec)?,
        suite_norms(cfg, exec)?,
        suite_moments(cfg, exec)?,
        suite_dominance(cfg, exec)?,
        suite_constants(cfg)?,
    ];
    Ok(VerifyReport {
        schema_version: REPORT_SCHEMA_VERSION,
        seed: cfg.seed,
        scale: cfg.scale,
        passed: suites.iter().all(SuiteResult::passed),
        suites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_run_passes() {
        let cfg = VerifyConfig::new(7, Scale::Quick);
        let report = run_verify(&cfg, Execution::Parallel).unwrap();
        for s in &report.suites {
            assert!(s.passed(), "{}: {:?}", s.name, s);
        }
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn fault_injection_fails_diagram_suite() {
        let mut cfg = VerifyConfig::new(7, Scale::Quick);
        cfg.fault = Some(Fault::DiagramCoefficient);
        let s = suite_diagram(&cfg, Execution::Parallel).unwrap();
        assert!(!s.passed());
        assert!(s.worst > 0.0);
    }
}
