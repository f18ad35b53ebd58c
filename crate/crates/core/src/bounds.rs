//! Closed-form tail and moment bounds and their regime structure.
//!
//! The universal constants are inputs. Tail bounds come in a raw form, used
//! for log-ratio comparisons, and a form capped at one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub k: usize,
    pub sigma: f64,
    pub n: u64,
    pub c: f64,
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
}

impl BoundParams {
    pub fn new(k: usize, sigma: f64, n: u64) -> Self {
        BoundParams {
            k,
            sigma,
            n,
            c: 1.0,
            alpha: 1.0,
            c1: 1.0,
            c2: 1.0,
        }
    }

    pub fn with_theorem1(mut self, c: f64, alpha: f64) -> Self {
        self.c = c;
        self.alpha = alpha;
        self
    }

    pub fn with_bernstein(mut self, c1: f64, c2: f64) -> Self {
        self.c1 = c1;
        self.c2 = c2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(self.sigma > 0.0 && self.sigma <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma = {} is outside (0, 1]",
                self.sigma
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        for (name, v) in [
            ("C", self.c),
            ("alpha", self.alpha),
            ("c1", self.c1),
            ("c2", self.c2),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must be positive"
                )));
            }
        }
        Ok(())
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonpositiveX(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `exp{−α (x/σ)^{2/k}}` dominates.
    Sigma,
    /// `exp{−α (n x²)^{1/(k+1)}}` dominates.
    N,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Sigma => "sigma",
            Branch::N => "n",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue {
    pub raw: f64,
    pub capped: f64,
    pub branch: Branch,
}

/// `(x/σ)^{2/k}`.
pub fn sigma_exponent(k: usize, sigma: f64, x: f64) -> f64 {
    (x / sigma).powf(2.0 / k as f64)
}

/// `(n x²)^{1/(k+1)}`.
pub fn n_exponent(k: usize, n: u64, x: f64) -> f64 {
    (n as f64 * x * x).powf(1.0 / (k as f64 + 1.0))
}

/// Both exponents of the two-regime bound and the larger-tail branch.
pub fn theorem1_exponents(p: &BoundParams, x: f64) -> (f64, f64, Branch) {
    let u1 = sigma_exponent(p.k, p.sigma, x);
    let u2 = n_exponent(p.k, p.n, x);
    let branch = if u1 <= u2 { Branch::Sigma } else { Branch::N };
    (u1, u2, branch)
}

/// Shape exponent `min(u₁, u₂)` so that the bound reads `C exp{−α u}`.
pub fn theorem1_shape(p: &BoundParams, x: f64) -> f64 {
    let (u1, u2, _) = theorem1_exponents(p, x);
    u1.min(u2)
}

/// `C max(exp{−α (x/σ)^{2/k}}, exp{−α (n x²)^{1/(k+1)}})`.
pub fn theorem1_bound(p: &BoundParams, x: f64) -> Result<BoundValue> {
    p.validate()?;
    check_x(x)?;
    let (u1, u2, branch) = theorem1_exponents(p, x);
    let raw = p.c * (-p.alpha * u1.min(u2)).exp();
    Ok(BoundValue {
        raw,
        capped: raw.min(1.0),
        branch,
    })
}

/// Same functional form, stated for `n^{−k/2} |I_{n,k}(f)|`.
pub fn theorem2_bound(p: &BoundParams, x: f64) -> Result<BoundValue> {
    theorem1_bound(p, x)
}

/// `x* = n^{k/2} σ^{k+1}`, where the two exponents meet.
pub fn crossover(k: usize, n: u64, sigma: f64) -> f64 {
    (n as f64).powf(k as f64 / 2.0) * sigma.powi(k as i32 + 1)
}

/// Relative difference of the two exponents at the crossover.
pub fn crossover_rel_error(k: usize, n: u64, sigma: f64) -> f64 {
    let x = crossover(k, n, sigma);
    let u1 = sigma_exponent(k, sigma, x);
    let u2 = n_exponent(k, n, x);
    (u1 - u2).abs() / u1.abs().max(u2.abs())
}

/// `C exp{−α (x/σ)^{2/k}}` for `x ≤ n^{k/2} σ^{k+1}`.
pub fn theorem1prime_bound(p: &BoundParams, x: f64) -> Result<f64> {
    p.validate()?;
    check_x(x)?;
    let threshold = crossover(p.k, p.n, p.sigma);
    if x > threshold {
        return Err(Error::OutOfRegime { x, threshold });
    }
    Ok(p.c * (-p.alpha * sigma_exponent(p.k, p.sigma, x)).exp())
}

/// Exponent shape `x^{2/k} / (σ^{2/k} + (x^{1/k} n^{−1/2})^{2/(k+1)})`.
pub fn bernstein_shape(k: usize, sigma: f64, n: u64, x: f64) -> f64 {
    let kf = k as f64;
    let inner = x.powf(1.0 / kf) / (n as f64).sqrt();
    x.powf(2.0 / kf) / (sigma.powf(2.0 / kf) + inner.powf(2.0 / (kf + 1.0)))
}

/// `c₁ exp{−c₂ · bernstein_shape}`; returns the raw value.
pub fn arcones_gine_bound(p: &BoundParams, x: f64) -> Result<f64> {
    p.validate()?;
    check_x(x)?;
    Ok(p.c1 * (-p.c2 * bernstein_shape(p.k, p.sigma, p.n, x)).exp())
}

fn is_power_of_two(m: u64) -> bool {
    m >= 1 && m.is_power_of_two()
}

/// Moment bound for `E J^{2M}`.
///
/// Without `r`: `(C σ² M^k)^M max(1, (M/(nσ²))^M)`.
/// With `r`: `(C M^k σ²/k^k)^M max(1, (kM/(nσ^{2/r}))^{M min(k,r)})`, defined for `kM ≤ n`.
pub fn prop_moment_bound(
    k: usize,
    m: u64,
    sigma: f64,
    n: u64,
    c_const: f64,
    r: Option<usize>,
) -> Result<f64> {
    if !is_power_of_two(m) {
        return Err(Error::BadM(m));
    }
    if k == 0 || !(sigma > 0.0 && sigma <= 1.0) || n == 0 || c_const.is_nan() || c_const <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "k={k}, sigma={sigma}, n={n}, C={c_const}"
        )));
    }
    let (kf, mf, nf) = (k as f64, m as f64, n as f64);
    let s2 = sigma * sigma;
    match r {
        None => {
            let head = (c_const * s2 * mf.powf(kf)).powf(mf);
            Ok(head * (mf / (nf * s2)).powf(mf).max(1.0))
        }
        Some(r) => {
            if r == 0 {
                return Err(Error::InvalidParameter("r must be at least 1".into()));
            }
            if k as u64 * m > n {
                return Err(Error::RegimeViolation(format!(
                    "kM = {} exceeds n = {n}",
                    k as u64 * m
                )));
            }
            let head = (c_const * mf.powf(kf) * s2 / kf.powf(kf)).powf(mf);
            let tail = (kf * mf / (nf * sigma.powf(2.0 / r as f64))).powf(mf * k.min(r) as f64);
            Ok(head * tail.max(1.0))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeRow {
    pub x: f64,
    pub bound13: BoundValue,
    pub bound16: f64,
    pub log_ratio: f64,
}

/// Per-`x` comparison of the two-regime bound and the Bernstein-type bound.
pub fn regime_report(p: &BoundParams, grid: &[f64]) -> Result<Vec<RegimeRow>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] <= 0.0 {
        return Err(Error::UnsortedGrid);
    }
    grid.iter()
        .map(|&x| {
            let b13 = theorem1_bound(p, x)?;
            let b16 = arcones_gine_bound(p, x)?;
            Ok(RegimeRow {
                x,
                bound13: b13,
                bound16: b16,
                log_ratio: b16.ln() / b13.raw.ln(),
            })
        })
        .collect()
}

impl serde::Serialize for BoundValue {
    fn serialize<Se: serde::Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BoundValue", 3)?;
        st.serialize_field("raw", &self.raw)?;
        st.serialize_field("capped", &self.capped)?;
        st.serialize_field("branch", &self.branch)?;
        st.end()
    }
}

/// Geometric grid of `points` values from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (points - 1) as f64;
    (0..points).map(|i| lo * (ratio * i as f64).exp()).collect()
}

/// `(min, max)` of the log-ratio over the grid, skipping points where the
/// two-regime bound is not below one.
pub fn log_ratio_range(p: &BoundParams, grid: &[f64]) -> Result<(f64, f64)> {
    let rows = regime_report(p, grid)?;
    Ok(rows
        .iter()
        .filter(|r| r.log_ratio.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.log_ratio), hi.max(r.log_ratio))
        }))
}
