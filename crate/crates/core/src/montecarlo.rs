//! Seeded Monte Carlo estimates of tails and moments of `J_{n,k}(f)` and of
//! `n^{−k/2} I_{n,k}(f)`.
//!
//! Replicate `r` draws its sample from the stream `RandomSource::stream(r)`.
//! Per-replicate statistics are computed in parallel and collected in index
//! order; tallies are then taken sequentially, so outputs do not depend on
//! the number of worker threads.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, Discrete};

use crate::bounds::{bernstein_shape, geometric_grid, theorem1_shape, BoundParams};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::integral::PreparedKernel;
use crate::kernel::Kernel;
use crate::scalar::Scalar;
use crate::space::RandomSource;

/// Replicate indices at and above this offset are reserved for pilot runs.
pub const PILOT_OFFSET: u64 = 1 << 63;
pub const PILOT_REPLICATES: u64 = 1000;
const AUTO_GRID_POINTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `|J_{n,k}(f)|`.
    #[default]
    J,
    /// `n^{−k/2} |I_{n,k}(f)|`.
    DescaledU,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub replicates: u64,
    pub seed: u64,
    pub n: usize,
    #[serde(default)]
    pub x_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub target: Target,
}

impl McConfig {
    pub fn new(replicates: u64, seed: u64, n: usize) -> Self {
        McConfig {
            replicates,
            seed,
            n,
            x_grid: None,
            target: Target::J,
        }
    }

    pub fn with_grid(mut self, grid: Vec<f64>) -> Self {
        self.x_grid = Some(grid);
        self
    }

    pub fn with_target(mut self, target: Target) -> Self {
        self.target = target;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidParameter(
                "replicates must be positive".into(),
            ));
        }
        if self.n == 0 {
            return Err(Error::EmptySample);
        }
        Ok(())
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid[0] <= 0.0
        || grid.windows(2).any(|w| w[0] >= w[1])
        || grid.iter().any(|x| !x.is_finite())
    {
        return Err(Error::UnsortedGrid);
    }
    Ok(())
}

/// Absolute value of the configured statistic for replicates `offset..offset+count`.
pub fn simulate<S: Scalar>(
    f: &Kernel<S>,
    cfg: &McConfig,
    offset: u64,
    count: u64,
    exec: Execution,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if f.arity() == 0 {
        return Err(Error::InvalidParameter(
            "kernel arity must be at least 1".into(),
        ));
    }
    let source = RandomSource::new(cfg.seed);
    let prepared = PreparedKernel::new(f);
    let space = f.space();
    let k = f.arity() as f64;
    let scale = (cfg.n as f64).powf(k / 2.0);
    let values = exec.map_range(count as usize, |i| -> Result<f64> {
        let sample = source.sample(space, cfg.n, offset + i as u64)?;
        Ok(match cfg.target {
            Target::J => prepared.eval_j(&sample)?.coeff.to_f64().abs() * scale,
            Target::DescaledU => prepared.eval_u(&sample)?.to_f64().abs() / scale,
        })
    });
    values.into_iter().collect()
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx.min(sorted.len() - 1)]
}

/// Geometric grid between the 50th and 99.9th percentiles of a pilot run on
/// the reserved replicate range; falls back to `0.1..10` when degenerate.
pub fn auto_grid<S: Scalar>(f: &Kernel<S>, cfg: &McConfig, exec: Execution) -> Result<Vec<f64>> {
    let mut pilot = simulate(f, cfg, PILOT_OFFSET, PILOT_REPLICATES, exec)?;
    pilot.sort_by(f64::total_cmp);
    let lo = quantile(&pilot, 0.5);
    let hi = quantile(&pilot, 0.999);
    if lo > 0.0 && hi > lo && hi.is_finite() {
        Ok(geometric_grid(lo, hi, AUTO_GRID_POINTS))
    } else {
        Ok(geometric_grid(0.1, 10.0, AUTO_GRID_POINTS))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub x_grid: Vec<f64>,
    pub p_hat: Vec<f64>,
    pub stderr: Vec<f64>,
    pub replicates: u64,
}

impl TailEstimate {
    /// Builds the tally from collected statistic values.
    pub fn from_values(values: &[f64], grid: Vec<f64>) -> Result<Self> {
        check_grid(&grid)?;
        let r = values.len() as f64;
        let mut counts = vec![0u64; grid.len()];
        for &v in values {
            for (c, &x) in counts.iter_mut().zip(&grid) {
                if v > x {
                    *c += 1;
                } else {
                    break;
                }
            }
        }
        let p_hat: Vec<f64> = counts.iter().map(|&c| c as f64 / r).collect();
        let stderr = p_hat.iter().map(|p| (p * (1.0 - p) / r).sqrt()).collect();
        Ok(TailEstimate {
            x_grid: grid,
            p_hat,
            stderr,
            replicates: values.len() as u64,
        })
    }

    pub fn is_monotone(&self) -> bool {
        self.p_hat.windows(2).all(|w| w[0] >= w[1])
    }
}

/// Empirical `P(|statistic| > x)` on the configured or automatic grid.
pub fn estimate_tail<S: Scalar>(
    f: &Kernel<S>,
    cfg: &McConfig,
    exec: Execution,
) -> Result<TailEstimate> {
    let grid = match &cfg.x_grid {
        Some(g) => {
            check_grid(g)?;
            g.clone()
        }
        None => auto_grid(f, cfg, exec)?,
    };
    let values = simulate(f, cfg, 0, cfg.replicates, exec)?;
    let est = TailEstimate::from_values(&values, grid)?;
    debug_assert!(est.is_monotone());
    Ok(est)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub m: u64,
    /// Monte Carlo mean of `statistic^{2M}`.
    pub mean: f64,
    pub stderr: f64,
}

/// Monte Carlo `E[statistic^{2M}]` for each `M` (powers of two).
pub fn estimate_moments<S: Scalar>(
    f: &Kernel<S>,
    cfg: &McConfig,
    ms: &[u64],
    exec: Execution,
) -> Result<Vec<MomentEstimate>> {
    if let Some(&bad) = ms.iter().find(|m| !(m.is_power_of_two())) {
        return Err(Error::BadM(bad));
    }
    let values = simulate(f, cfg, 0, cfg.replicates, exec)?;
    let r = values.len() as f64;
    Ok(ms
        .iter()
        .map(|&m| {
            let powered: Vec<f64> = values.iter().map(|v| v.powi(2 * m as i32)).collect();
            let mean = powered.iter().sum::<f64>() / r;
            let var = if values.len() > 1 {
                powered.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (r - 1.0)
            } else {
                0.0
            };
            MomentEstimate {
                m,
                mean,
                stderr: (var / r).sqrt(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundForm {
    /// `C exp{−α min((x/σ)^{2/k}, (nx²)^{1/(k+1)})}`; fits `(C, α)`.
    Theorem1,
    /// `c₁ exp{−c₂ · bernstein_shape}`; fits `(c₁, c₂)`.
    Bernstein,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FittedConstants {
    pub form: BoundForm,
    /// `C` or `c₁`.
    pub scale: f64,
    /// `α` or `c₂`.
    pub rate: f64,
    pub points: usize,
}

impl FittedConstants {
    pub fn apply(&self, params: BoundParams) -> BoundParams {
        match self.form {
            BoundForm::Theorem1 => params.with_theorem1(self.scale, self.rate),
            BoundForm::Bernstein => params.with_bernstein(self.scale, self.rate),
        }
    }
}

/// Exponent shape of the chosen bound at `x`.
pub fn bound_shape(form: BoundForm, shape: &BoundParams, x: f64) -> f64 {
    match form {
        BoundForm::Theorem1 => theorem1_shape(shape, x),
        BoundForm::Bernstein => bernstein_shape(shape.k, shape.sigma, shape.n, x),
    }
}

/// Least-squares fit of `ln p̂` against the bound's exponent shape, with the
/// scale raised afterwards so that the bound dominates every empirical point.
pub fn fit_constants(
    est: &TailEstimate,
    form: BoundForm,
    shape: &BoundParams,
) -> Result<FittedConstants> {
    let pts: Vec<(f64, f64)> = est
        .x_grid
        .iter()
        .zip(&est.p_hat)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&x, &p)| (bound_shape(form, shape, x), p))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientTailData(pts.len()));
    }
    let m = pts.len() as f64;
    let mean_u = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = pts.iter().map(|p| p.1.ln()).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_u).powi(2)).sum();
    let sxy: f64 = pts
        .iter()
        .map(|p| (p.0 - mean_u) * (p.1.ln() - mean_y))
        .sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientTailData(1));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_u;
    let rate = -slope;
    let lift = pts
        .iter()
        .map(|&(u, p)| p * (rate * u).exp())
        .fold(intercept.exp(), f64::max);
    Ok(FittedConstants {
        form,
        scale: lift,
        rate,
        points: pts.len(),
    })
}

/// Exact `P(|N − np| > x √n)` for `N ~ Bin(n, p)`, i.e. the tail of `|J|`
/// for the centered indicator kernel `1_{a} − μ(a)`.
pub fn binomial_tail_exact(n: u64, p: f64, x: f64) -> Result<f64> {
    let dist = Binomial::new(p, n).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let centre = n as f64 * p;
    let radius = x * (n as f64).sqrt();
    Ok((0..=n)
        .filter(|&k| (k as f64 - centre).abs() > radius)
        .map(|k| dist.pmf(k))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::moment_oracle;
    use crate::exec::with_threads;
    use crate::scalar::Rational;
    use crate::space::AtomSpace;
    use std::sync::Arc;

    fn indicator_space() -> Arc<AtomSpace<Rational>> {
        Arc::new(
            AtomSpace::new(vec![
                Rational::from_ratio(1, 5),
                Rational::from_ratio(3, 10),
                Rational::from_ratio(1, 2),
            ])
            .unwrap(),
        )
    }

    #[test]
    fn zero_kernel_has_no_tail() {
        let f = Kernel::zeros(indicator_space(), 2);
        let cfg = McConfig::new(500, 1, 10).with_grid(vec![0.1, 0.5]);
        let est = estimate_tail(&f, &cfg, Execution::Parallel).unwrap();
        assert!(est.p_hat.iter().all(|&p| p == 0.0));
        let m = estimate_moments(&f, &cfg, &[1, 2], Execution::Parallel).unwrap();
        assert!(m.iter().all(|e| e.mean == 0.0));
        assert!(matches!(
            fit_constants(&est, BoundForm::Theorem1, &BoundParams::new(2, 0.5, 10)),
            Err(Error::InsufficientTailData(0))
        ));
    }

    #[test]
    fn grid_validation() {
        let f = Kernel::indicator(indicator_space(), &[0]).unwrap();
        let cfg = McConfig::new(10, 1, 10).with_grid(vec![]);
        assert_eq!(
            estimate_tail(&f, &cfg, Execution::Sequential),
            Err(Error::EmptyGrid)
        );
        let cfg = McConfig::new(10, 1, 10).with_grid(vec![1.0, 0.5]);
        assert_eq!(
            estimate_tail(&f, &cfg, Execution::Sequential),
            Err(Error::UnsortedGrid)
        );
        assert_eq!(
            estimate_moments(&f, &McConfig::new(10, 1, 10), &[3], Execution::Sequential),
            Err(Error::BadM(3))
        );
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let f = Kernel::indicator(indicator_space(), &[2, 1])
            .unwrap()
            .canonical_project();
        let cfg = McConfig::new(2000, 99, 12);
        let a = with_threads(1, || estimate_tail(&f, &cfg, Execution::Parallel).unwrap());
        let b = with_threads(4, || estimate_tail(&f, &cfg, Execution::Parallel).unwrap());
        let c = estimate_tail(&f, &cfg, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert!(a.is_monotone());
    }

    #[test]
    fn binomial_oracle_agreement() {
        let space = indicator_space();
        let f = Kernel::indicator(space, &[1]).unwrap().canonical_project();
        let grid = vec![0.23, 0.51, 0.77, 1.03, 1.31];
        let cfg = McConfig::new(20_000, 5, 30).with_grid(grid.clone());
        let est = estimate_tail(&f, &cfg, Execution::Parallel).unwrap();
        for (i, &x) in grid.iter().enumerate() {
            let exact = binomial_tail_exact(30, 0.3, x).unwrap();
            let se = (exact * (1.0 - exact) / 20_000.0).sqrt();
            assert!(
                (est.p_hat[i] - exact).abs() <= 4.0 * se,
                "x={x}: {} vs {exact}",
                est.p_hat[i]
            );
        }
    }

    #[test]
    fn moments_match_oracle() {
        let space = Arc::new(AtomSpace::<Rational>::uniform(2).unwrap());
        let f = Kernel::from_values(
            space.clone(),
            2,
            vec![
                Rational::from_i64(1),
                Rational::from_ratio(-1, 2),
                Rational::from_ratio(1, 3),
                Rational::from_i64(2),
            ],
        )
        .unwrap();
        let n = 4;
        let cfg = McConfig::new(40_000, 17, n);
        let est = estimate_moments(&f, &cfg, &[1, 2], Execution::Parallel).unwrap();
        for e in &est {
            let exact = moment_oracle(&f, n, 2 * e.m as usize, 1000)
                .unwrap()
                .to_f64()
                * (n as f64).powi(2 * e.m as i32);
            assert!(
                (e.mean - exact).abs() <= 4.0 * e.stderr,
                "M={}: {} vs {exact}",
                e.m,
                e.mean
            );
        }
        // k = 1 canonical: E J² = Var f(ξ).
        let g = Kernel::indicator(space, &[0]).unwrap().canonical_project();
        let est =
            estimate_moments(&g, &McConfig::new(40_000, 3, 20), &[1], Execution::Parallel).unwrap();
        assert!((est[0].mean - 0.25).abs() <= 4.0 * est[0].stderr);
    }

    #[test]
    fn fit_round_trip() {
        let shape = BoundParams::new(2, 0.3, 100);
        let grid = geometric_grid(0.05, 2.0, 12);
        let (c, alpha) = (0.8, 1.7);
        let p_hat: Vec<f64> = grid
            .iter()
            .map(|&x| c * (-alpha * theorem1_shape(&shape, x)).exp())
            .collect();
        let est = TailEstimate {
            stderr: vec![0.0; grid.len()],
            x_grid: grid,
            p_hat,
            replicates: 1,
        };
        let fit = fit_constants(&est, BoundForm::Theorem1, &shape).unwrap();
        assert!((fit.scale - c).abs() < 1e-6 && (fit.rate - alpha).abs() < 1e-6);
        let bern = fit_constants(&est, BoundForm::Bernstein, &shape).unwrap();
        for (&x, &p) in est.x_grid.iter().zip(&est.p_hat) {
            let b = bern.scale * (-bern.rate * bernstein_shape(2, 0.3, 100, x)).exp();
            assert!(b >= p * (1.0 - 1e-12));
        }
    }

    #[test]
    fn auto_grid_spans_pilot_quantiles() {
        let f = Kernel::indicator(indicator_space(), &[0])
            .unwrap()
            .canonical_project();
        let cfg = McConfig::new(100, 8, 40);
        let grid = auto_grid(&f, &cfg, Execution::Parallel).unwrap();
        assert_eq!(grid.len(), 20);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        let z = Kernel::zeros(indicator_space(), 1);
        assert_eq!(
            auto_grid(&z, &cfg, Execution::Parallel).unwrap(),
            geometric_grid(0.1, 10.0, 20)
        );
    }
}
