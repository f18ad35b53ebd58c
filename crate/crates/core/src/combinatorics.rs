//! Set partitions, the expectation constants `B_{n,k}`, exhaustive moment
//! oracles, and the constant system `D(m)`, `C̄(k,m)`, `A(l,p,k,m)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::integral::PreparedKernel;
use crate::kernel::Kernel;
use crate::scalar::{exact_sqrt, factorial, falling_factorial, Rational, Scalar};

/// Largest `k` for which set partitions are enumerated.
pub const MAX_PARTITION_K: usize = 12;

/// Stirling number of the second kind by the usual triangle recurrence.
pub fn stirling2(k: usize, s: usize) -> Result<u128> {
    if s > k {
        return Err(Error::IndexOutOfRange(format!("S({k},{s})")));
    }
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for n in 1..=k {
        for j in (1..=n).rev() {
            row[j] = j as u128 * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    Ok(row[s])
}

/// `S(k,s) ≤ 2^k s^{k−s}`.
pub fn check_partition_bound(k: usize, s: usize) -> bool {
    match stirling2(k, s) {
        Ok(v) => v <= (1u128 << k) * (s as u128).pow((k - s) as u32),
        Err(_) => false,
    }
}

pub fn bell(k: usize) -> u128 {
    (0..=k).map(|s| stirling2(k, s).unwrap_or(0)).sum()
}

/// Restricted-growth-string iterator over set partitions of `{1..=k}`.
#[derive(Debug, Clone)]
pub struct SetPartitions {
    rgs: Vec<usize>,
    maxes: Vec<usize>,
    done: bool,
}

impl SetPartitions {
    pub fn new(k: usize) -> Result<Self> {
        if k > MAX_PARTITION_K {
            return Err(Error::IndexOutOfRange(format!(
                "set partitions of {k} elements (cap {MAX_PARTITION_K})"
            )));
        }
        Ok(SetPartitions {
            rgs: vec![0; k],
            maxes: vec![0; k],
            done: false,
        })
    }

    fn blocks(&self) -> Vec<Vec<usize>> {
        let count = self.rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (i, &b) in self.rgs.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        blocks
    }

    fn advance(&mut self) {
        let k = self.rgs.len();
        // maxes[i] = max(rgs[0..i]); position i may grow up to maxes[i] + 1.
        for i in (1..k).rev() {
            if self.rgs[i] <= self.maxes[i] {
                self.rgs[i] += 1;
                for j in i + 1..k {
                    self.rgs[j] = 0;
                    self.maxes[j] = self.maxes[j - 1].max(self.rgs[j - 1]);
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<Vec<usize>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = self.blocks();
        if self.rgs.is_empty() {
            self.done = true;
        } else {
            self.advance();
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionTable {
    pub k: usize,
    pub partitions: Vec<Vec<Vec<usize>>>,
}

impl PartitionTable {
    pub fn new(k: usize) -> Result<Self> {
        Ok(PartitionTable {
            k,
            partitions: SetPartitions::new(k)?.collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }
}

/// `T(k,s) = Σ_{π, |π| = s} ∏_{D ∈ π} (−1)^{|D|−1} (|D| − 1)`.
fn block_weight_sums(k: usize) -> Result<Vec<BigInt>> {
    let mut sums = vec![BigInt::zero(); k + 1];
    for partition in SetPartitions::new(k)? {
        let mut w = BigInt::one();
        for block in &partition {
            let size = block.len() as i64;
            let sign = if size % 2 == 1 { 1 } else { -1 };
            w *= sign * (size - 1);
            if w.is_zero() {
                break;
            }
        }
        sums[partition.len()] += w;
    }
    Ok(sums)
}

/// Expectation constant of `J_{n,k}`: `E J_{n,k}(f) = B_{n,k} ∫ f dμ^k`.
///
/// Stored as the rational `r = B_{n,k} n^{−k/2}`, the coefficient of
/// `∫f dμ^k` in the expectation of the descaled value.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationConstant {
    pub n: usize,
    pub k: usize,
    pub r: Rational,
}

impl ExpectationConstant {
    /// `B_{n,k}` as a float.
    pub fn b_f64(&self) -> f64 {
        self.r.to_f64() * (self.n as f64).powf(self.k as f64 / 2.0)
    }

    /// `B_{n,k}²`, always rational.
    pub fn b_squared(&self) -> Rational {
        self.r.clone() * &self.r * Rational::from_i64(self.n as i64).powi(self.k as i32)
    }

    /// Exact text: `"p/q"` when rational, otherwise `"c*sqrt(n)"`.
    pub fn b_exact(&self) -> String {
        let n = self.n as i64;
        let half = Rational::from_i64(n).powi((self.k / 2) as i32);
        let c = self.r.clone() * half;
        if self.k.is_multiple_of(2) || c.is_zero() {
            return c.to_text();
        }
        match exact_sqrt(self.n as u64) {
            Some(root) => (c * Rational::from_i64(root as i64)).to_text(),
            None => format!("{}*sqrt({})", c.to_text(), self.n),
        }
    }
}

/// Set-partition evaluation of the expectation constant.
pub fn b_nk(n: usize, k: usize) -> Result<ExpectationConstant> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter("B_nk needs n, k >= 1".into()));
    }
    let sums = block_weight_sums(k)?;
    let total = sums.iter().enumerate().fold(BigInt::zero(), |acc, (s, t)| {
        acc + t * BigInt::from(falling_factorial(n as u64, s as u64))
    });
    let den = BigInt::from(factorial(k as u64)) * BigInt::from(n).pow(k as u32);
    Ok(ExpectationConstant {
        n,
        k,
        r: Rational::new(total, den),
    })
}

/// `(|B_{n,k}| k^{k/2})^{1/k}`, the per-`k` quantity compared against `C`.
pub fn b_nk_growth(c: &ExpectationConstant) -> f64 {
    let k = c.k as f64;
    (c.b_f64().abs() * k.powf(k / 2.0)).powf(1.0 / k)
}

/// `|B_{n,k}| k^{k/2} ≤ C^k`, checked exactly through squares.
pub fn check_b_nk_bound(c: &ExpectationConstant, big_c: i64) -> bool {
    let k = c.k as i32;
    c.b_squared() * Rational::from_i64(c.k as i64).powi(k)
        <= Rational::from_i64(big_c * big_c).powi(k)
}

fn enumerate_weighted<S: Scalar>(
    f: &Kernel<S>,
    n: usize,
    cap: u64,
    exec: Execution,
    g: impl Fn(S) -> S + Sync + Send,
) -> Result<S> {
    let samples = f.space().enumerate_samples(n, cap)?;
    let prepared = PreparedKernel::new(f);
    let terms = exec.map_slice(&samples, |(s, w)| {
        prepared.eval_j(s).map(|q| g(q.coeff) * w)
    });
    terms.into_iter().try_fold(S::zero(), |acc, t| Ok(acc + t?))
}

/// Exact `E[n^{−k/2} J_{n,k}(f)]` by enumerating every sample.
pub fn expected_j_oracle<S: Scalar>(f: &Kernel<S>, n: usize, cap: u64) -> Result<S> {
    enumerate_weighted(f, n, cap, Execution::Sequential, |q| q)
}

/// Exact `E[(n^{−k/2} J_{n,k}(f))^order]` for even `order`.
pub fn moment_oracle<S: Scalar>(f: &Kernel<S>, n: usize, order: usize, cap: u64) -> Result<S> {
    moment_oracle_with(f, n, order, cap, Execution::Sequential)
}

pub fn moment_oracle_with<S: Scalar>(
    f: &Kernel<S>,
    n: usize,
    order: usize,
    cap: u64,
    exec: Execution,
) -> Result<S> {
    if order == 0 || order % 2 == 1 {
        return Err(Error::InvalidOrder(order));
    }
    enumerate_weighted(f, n, cap, exec, |q| q.powi(order as i32))
}

/// `D(m) = 1 + 2^{4−m}`.
pub fn lemma5_d(m: usize) -> Rational {
    Rational::one() + Rational::from_i64(2).powi(4 - m as i32)
}

/// `x^e` with `0^0 = 1` and `e` possibly negative.
fn pow_convention(base: i64, e: i64) -> Rational {
    if e == 0 {
        Rational::one()
    } else {
        Rational::from_i64(base).powi(e as i32)
    }
}

/// `A(l,p,k,m) = 2^{2l(4−m)} (2k)^{2k−l+p} (2k−l−p)^{3l−p−2k} / (2l)^{2l}`.
pub fn lemma5_a(l: usize, p: usize, k: usize, m: usize) -> Result<Rational> {
    if p > l || l > k {
        return Err(Error::IndexOutOfRange(format!("A({l},{p},{k},{m})")));
    }
    let (l, p, k, m) = (l as i64, p as i64, k as i64, m as i64);
    Ok(pow_convention(2, 2 * l * (4 - m))
        * pow_convention(2 * k, 2 * k - l + p)
        * pow_convention(2 * k - l - p, 3 * l - p - 2 * k)
        / pow_convention(2 * l, 2 * l))
}

/// Tables of `D(m)` and `C̄(1,m)` for `m ≤ m_max + 1`.
#[derive(Debug, Clone)]
pub struct Lemma5Constants {
    pub k_max: usize,
    pub m_max: usize,
    d: Vec<Rational>,
    cbar1: Vec<Rational>,
}

impl Lemma5Constants {
    pub fn new(k_max: usize, m_max: usize) -> Self {
        let d: Vec<Rational> = (0..=m_max + 1).map(lemma5_d).collect();
        let mut cbar1 = Vec::with_capacity(m_max + 2);
        cbar1.push(Rational::one());
        for m in 0..=m_max {
            let next = cbar1[m].clone() * &d[m];
            cbar1.push(next);
        }
        Lemma5Constants {
            k_max,
            m_max,
            d,
            cbar1,
        }
    }

    pub fn d(&self, m: usize) -> Rational {
        self.d.get(m).cloned().unwrap_or_else(|| lemma5_d(m))
    }

    /// `C̄(k,m) = (∏_{p<m} D(p))^k`.
    pub fn cbar(&self, k: usize, m: usize) -> Rational {
        let base = match self.cbar1.get(m) {
            Some(v) => v.clone(),
            None => (0..m).fold(Rational::one(), |acc, p| acc * lemma5_d(p)),
        };
        base.powi(k as i32)
    }

    pub fn a(&self, l: usize, p: usize, k: usize, m: usize) -> Result<Rational> {
        lemma5_a(l, p, k, m)
    }
}

/// Outcome of sweeping `C̄(k,m+1)² ≥ A(l,p,k,m) C̄(2k−l−p,m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionReport {
    pub checked: usize,
    pub failures: Vec<(usize, usize, usize, usize)>,
    /// Smallest `log(lhs / rhs)` over cases with a positive right side.
    pub min_log_margin: f64,
}

pub fn lemma5_recursion_report(k_max: usize, m_max: usize) -> RecursionReport {
    let table = Lemma5Constants::new(2 * k_max, m_max);
    let mut report = RecursionReport {
        checked: 0,
        failures: Vec::new(),
        min_log_margin: f64::INFINITY,
    };
    for k in 0..=k_max {
        for m in 0..=m_max {
            let lhs = table.cbar(k, m + 1).powi(2);
            for l in 0..=k {
                for p in 0..=l {
                    let rhs = lemma5_a(l, p, k, m).expect("indices in range")
                        * table.cbar(2 * k - l - p, m);
                    report.checked += 1;
                    if lhs < rhs {
                        report.failures.push((l, p, k, m));
                    }
                    if rhs.is_positive() {
                        let margin = (lhs.clone() / rhs).to_f64().ln();
                        report.min_log_margin = report.min_log_margin.min(margin);
                    }
                }
            }
        }
    }
    report
}

pub fn check_lemma5_recursion(k_max: usize, m_max: usize) -> bool {
    lemma5_recursion_report(k_max, m_max).failures.is_empty()
}

fn x_ln_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `ln B_{k,m}(v)` for real `0 ≤ v ≤ k`.
pub fn lemma5_ln_b(k: usize, m: usize, v: f64) -> f64 {
    let kf = k as f64;
    2.0 * (4.0 - m as f64) * v * std::f64::consts::LN_2 + x_ln_x(2.0 * kf)
        - x_ln_x(2.0 * kf - 2.0 * v)
        - x_ln_x(2.0 * v)
}

/// `v̄ = k / (2^{m−4} + 1)`.
pub fn lemma5_argmax(k: usize, m: usize) -> f64 {
    k as f64 / (2f64.powi(m as i32 - 4) + 1.0)
}

/// Relative error `|B(v̄) / (1+2^{4−m})^{2k} − 1|`.
pub fn lemma5_maximizer_error(k: usize, m: usize) -> f64 {
    let closed = 2.0 * k as f64 * (2f64.powi(4 - m as i32)).ln_1p();
    (lemma5_ln_b(k, m, lemma5_argmax(k, m)) - closed)
        .exp_m1()
        .abs()
}

/// `ln ∏_{p<m} (1 + 2^{4−p})`, summed with `ln_1p`.
pub fn lemma5_ln_partial_product(m: usize) -> f64 {
    (0..m).map(|p| 2f64.powi(4 - p as i32).ln_1p()).sum()
}
