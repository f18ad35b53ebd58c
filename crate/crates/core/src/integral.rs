//! Pathwise evaluation of `J_{n,k}(f)` and `I_{n,k}(f)` on a fixed sample.
//!
//! Both statistics only depend on how many coordinates of an atom tuple hit
//! each atom, so a kernel is first folded into its multiplicity profile
//! `m ↦ Σ_{t : mult(t) = m} f(t)`. Evaluating on a sample then costs one
//! product per profile entry.
//!
//! For `J`, the lifted expansion of `∏ (μ_n − μ)` with diagonals removed
//! factorizes over atoms: an atom `a` hit `m` times contributes
//! `Σ_j C(m,j) (−μ(a))^{m−j} n^{−j} (c_a)_j`, where `c_a` is the number of
//! sample points at `a`.

use std::collections::BTreeMap;

use crate::diagram::{contract_class_average, DiagramClass};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::{binomial, factorial, Rational, Scalar};
use crate::space::Sample;

/// Descaled value `q = n^{−k/2} J_{n,k}(f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledValue<S> {
    pub coeff: S,
    pub k: usize,
    pub n: usize,
}

impl<S: Scalar> ScaledValue<S> {
    /// `J = q · n^{k/2}` as a float.
    pub fn j_value(&self) -> f64 {
        self.coeff.to_f64() * (self.n as f64).powf(self.k as f64 / 2.0)
    }

    pub fn mul(&self, other: &ScaledValue<S>) -> Result<ScaledValue<S>> {
        if self.n != other.n {
            return Err(Error::InvalidParameter(format!(
                "scaled values for n = {} and n = {}",
                self.n, other.n
            )));
        }
        Ok(ScaledValue {
            coeff: self.coeff.clone() * &other.coeff,
            k: self.k + other.k,
            n: self.n,
        })
    }

    pub fn add(&self, other: &ScaledValue<S>) -> Result<ScaledValue<S>> {
        if self.n != other.n || self.k != other.k {
            return Err(Error::InvalidParameter(
                "adding scaled values with different (k, n)".into(),
            ));
        }
        Ok(ScaledValue {
            coeff: self.coeff.clone() + &other.coeff,
            k: self.k,
            n: self.n,
        })
    }
}

/// Kernel folded into its multiplicity profile, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct PreparedKernel<S> {
    k: usize,
    weights: Vec<S>,
    profile: Vec<(Vec<u8>, S)>,
    inv_k_factorial: S,
}

impl<S: Scalar> PreparedKernel<S> {
    pub fn new(f: &Kernel<S>) -> Self {
        let k = f.arity();
        let m = f.atoms();
        let mut buckets: BTreeMap<Vec<u8>, S> = BTreeMap::new();
        let mut digits = vec![0usize; k];
        for (flat, v) in f.values().iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let mut rest = flat;
            for d in digits.iter_mut().rev() {
                *d = rest % m;
                rest /= m;
            }
            let mut mult = vec![0u8; m];
            for &a in &digits {
                mult[a] += 1;
            }
            let slot = buckets.entry(mult).or_insert_with(S::zero);
            *slot = slot.clone() + v;
        }
        PreparedKernel {
            k,
            weights: f.space().weights().to_vec(),
            profile: buckets.into_iter().collect(),
            inv_k_factorial: S::one() / S::from_i64(factorial(k as u64) as i64),
        }
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    fn combine(&self, table: &[Vec<S>]) -> S {
        let total = self.profile.iter().fold(S::zero(), |acc, (mult, sum)| {
            let w = mult
                .iter()
                .enumerate()
                .fold(S::one(), |w, (a, &c)| w * &table[a][c as usize]);
            acc + w * sum
        });
        total * &self.inv_k_factorial
    }

    fn counts(&self, s: &Sample) -> Result<Vec<usize>> {
        s.check_atoms(self.weights.len())?;
        Ok(s.counts(self.weights.len()))
    }

    /// `q = n^{−k/2} J_{n,k}(f)` on the sample.
    pub fn eval_j(&self, s: &Sample) -> Result<ScaledValue<S>> {
        let counts = self.counts(s)?;
        let n = s.n();
        let inv_n = S::from_ratio(1, n as i64);
        let table: Vec<Vec<S>> = counts
            .iter()
            .zip(&self.weights)
            .map(|(&c, mu)| {
                let neg_mu = -mu.clone();
                (0..=self.k)
                    .map(|m| {
                        let mut falling = S::one();
                        (0..=m).fold(S::zero(), |acc, j| {
                            if j > 0 {
                                falling = falling.clone() * S::from_i64(c as i64 - (j as i64 - 1));
                            }
                            let term = S::from_i64(binomial(m as u64, j as u64) as i64)
                                * neg_mu.powi((m - j) as i32)
                                * inv_n.powi(j as i32)
                                * &falling;
                            acc + term
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(ScaledValue {
            coeff: self.combine(&table),
            k: self.k,
            n,
        })
    }

    /// `I_{n,k}(f) = (1/k!) Σ` over ordered distinct sample positions.
    pub fn eval_u(&self, s: &Sample) -> Result<S> {
        let counts = self.counts(s)?;
        let table: Vec<Vec<S>> = counts
            .iter()
            .map(|&c| {
                let mut falling = S::one();
                (0..=self.k)
                    .map(|m| {
                        if m > 0 {
                            falling = falling.clone() * S::from_i64(c as i64 - (m as i64 - 1));
                        }
                        falling.clone()
                    })
                    .collect()
            })
            .collect();
        Ok(self.combine(&table))
    }
}

/// `n^{−k/2} J_{n,k}(f)`; for `k = 0` the constant itself.
pub fn eval_j_descaled<S: Scalar>(f: &Kernel<S>, s: &Sample) -> Result<ScaledValue<S>> {
    PreparedKernel::new(f).eval_j(s)
}

/// The U-statistic `I_{n,k}(f)`.
pub fn eval_u<S: Scalar>(f: &Kernel<S>, s: &Sample) -> Result<S> {
    PreparedKernel::new(f).eval_u(s)
}

/// For canonical `f`, checks `n^{−k} I_{n,k}(f) = n^{−k/2} J_{n,k}(f)`.
pub fn check_canonical_identity<S: Scalar>(f: &Kernel<S>, s: &Sample) -> Result<bool> {
    if !f.is_canonical() {
        return Err(Error::NotCanonical);
    }
    let prepared = PreparedKernel::new(f);
    let q = prepared.eval_j(s)?.coeff;
    let u = prepared.eval_u(s)? / S::from_i64(s.n() as i64).powi(f.arity() as i32);
    Ok(if S::EXACT {
        q == u
    } else {
        (q - u).is_negligible()
    })
}

/// One term of the product expansion of `J(f) J(g)`.
#[derive(Debug, Clone)]
pub struct ExpansionTerm {
    pub l: usize,
    pub p: usize,
    /// `(k1+k2−l−p)! / ((k1−l)! (k2−l)! (l−p)! p!)`.
    pub coeff: Rational,
    pub kernel: Kernel<Rational>,
    prepared: PreparedKernel<Rational>,
}

impl ExpansionTerm {
    pub fn new(l: usize, p: usize, coeff: Rational, kernel: Kernel<Rational>) -> Self {
        let prepared = PreparedKernel::new(&kernel);
        ExpansionTerm {
            l,
            p,
            coeff,
            kernel,
            prepared,
        }
    }
}

/// Right-hand side of the diagram formula for a fixed pair `(f, g)`.
#[derive(Debug, Clone)]
pub struct DiagramExpansion {
    f: PreparedKernel<Rational>,
    g: PreparedKernel<Rational>,
    pub terms: Vec<ExpansionTerm>,
}

impl DiagramExpansion {
    pub fn new(f: &Kernel<Rational>, g: &Kernel<Rational>) -> Result<Self> {
        if !f.same_space(g) {
            return Err(Error::SpaceMismatch);
        }
        let (k1, k2) = (f.arity(), g.arity());
        let terms = DiagramClass::all(k1, k2)
            .map(|class| {
                let DiagramClass { l, p, .. } = class;
                let num = factorial((k1 + k2 - l - p) as u64);
                let den = factorial((k1 - l) as u64)
                    * factorial((k2 - l) as u64)
                    * factorial((l - p) as u64)
                    * factorial(p as u64);
                let coeff = Rational::new(num.into(), den.into());
                Ok(ExpansionTerm::new(
                    l,
                    p,
                    coeff,
                    contract_class_average(f, g, class)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DiagramExpansion {
            f: PreparedKernel::new(f),
            g: PreparedKernel::new(g),
            terms,
        })
    }

    /// `q_f · q_g`.
    pub fn lhs(&self, s: &Sample) -> Result<Rational> {
        Ok(self.f.eval_j(s)?.coeff * self.g.eval_j(s)?.coeff)
    }

    /// `Σ_{l,p} coeff · n^{−l} · q_{f∘g_{l,p}}`.
    pub fn rhs(&self, s: &Sample) -> Result<Rational> {
        let inv_n = Rational::from_ratio(1, s.n() as i64);
        self.terms.iter().try_fold(Rational::from_i64(0), |acc, t| {
            let q = t.prepared.eval_j(s)?.coeff;
            Ok(acc + t.coeff.clone() * inv_n.powi(t.l as i32) * q)
        })
    }

    /// `lhs − rhs`; zero when the identity holds.
    pub fn discrepancy(&self, s: &Sample) -> Result<Rational> {
        Ok(self.lhs(s)? - self.rhs(s)?)
    }

    pub fn check(&self, s: &Sample) -> Result<bool> {
        Ok(self.discrepancy(s)? == Rational::from_i64(0))
    }
}

/// Exact verdict of the diagram formula on one sample.
pub fn check_diagram_formula(
    f: &Kernel<Rational>,
    g: &Kernel<Rational>,
    s: &Sample,
) -> Result<bool> {
    DiagramExpansion::new(f, g)?.check(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_rational_kernel, random_rational_space};
    use crate::space::AtomSpace;
    use itertools::Itertools;
    use num_traits::{One, Signed, Zero};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    /// Literal expansion: subsets S of coordinates pinned to injectively
    /// chosen sample positions, the rest integrated against μ.
    fn j_oracle(f: &Kernel<Rational>, s: &Sample) -> Rational {
        let k = f.arity();
        let n = s.n();
        let mut total = Rational::zero();
        for size in 0..=k {
            for subset in (1..=k).combinations(size) {
                let mut reduced = f.clone();
                for label in (1..=k).filter(|l| !subset.contains(l)) {
                    reduced = reduced.marginal_integrate(label).unwrap();
                }
                let mut inner = Rational::zero();
                for phi in (0..n).permutations(size) {
                    let atoms: Vec<usize> = phi.iter().map(|&i| s.points()[i]).collect();
                    inner += reduced.get(&atoms);
                }
                let sign = if (k - size).is_multiple_of(2) { 1 } else { -1 };
                total += Rational::from_i64(sign)
                    * Rational::from_ratio(1, n as i64).powi(size as i32)
                    * inner;
            }
        }
        total / Rational::from_i64(factorial(k as u64) as i64)
    }

    fn u_oracle(f: &Kernel<Rational>, s: &Sample) -> Rational {
        let k = f.arity();
        let sum = (0..s.n())
            .permutations(k)
            .fold(Rational::zero(), |acc, idx| {
                let atoms: Vec<usize> = idx.iter().map(|&i| s.points()[i]).collect();
                acc + f.get(&atoms)
            });
        sum / Rational::from_i64(factorial(k as u64) as i64)
    }

    fn uniform2() -> Arc<AtomSpace<Rational>> {
        Arc::new(AtomSpace::uniform(2).unwrap())
    }

    #[test]
    fn hand_examples() {
        let s = uniform2();
        let sample = Sample::new(vec![1, 1]);
        let f = Kernel::indicator(s.clone(), &[1]).unwrap();
        assert_eq!(
            eval_j_descaled(&f, &sample).unwrap().coeff,
            Rational::from_ratio(1, 2)
        );
        let ff = Kernel::indicator(s.clone(), &[1, 1]).unwrap();
        let q = eval_j_descaled(&ff, &sample).unwrap();
        assert_eq!(q.coeff, Rational::from_ratio(-1, 8));
        assert!((q.j_value() + 0.25).abs() < 1e-15);
        let c = Kernel::constant(s, Rational::from_ratio(3, 7));
        assert_eq!(
            eval_j_descaled(&c, &sample).unwrap().coeff,
            Rational::from_ratio(3, 7)
        );
    }

    #[test]
    fn u_examples() {
        let s = Arc::new(AtomSpace::<Rational>::uniform(3).unwrap());
        let one = Kernel::filled(s.clone(), 2, Rational::one());
        let sample = Sample::new(vec![0, 2, 2]);
        assert_eq!(eval_u(&one, &sample).unwrap(), Rational::from_i64(3));
        let f = Kernel::from_values(
            s.clone(),
            1,
            vec![
                Rational::from_i64(1),
                Rational::from_i64(2),
                Rational::from_i64(5),
            ],
        )
        .unwrap();
        assert_eq!(eval_u(&f, &sample).unwrap(), Rational::from_i64(11));
        let short = Sample::new(vec![1]);
        assert_eq!(eval_u(&one, &short).unwrap(), Rational::zero());
    }

    #[test]
    fn sample_outside_space_is_rejected() {
        let f = Kernel::indicator(uniform2(), &[0]).unwrap();
        assert_eq!(
            eval_j_descaled(&f, &Sample::new(vec![0, 5])),
            Err(Error::SpaceMismatch)
        );
    }

    #[test]
    fn canonical_identity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let space = Arc::new(random_rational_space(&mut rng, 3));
        let f = random_rational_kernel(&mut rng, &space, 2).canonical_project();
        for _ in 0..50 {
            let s = space.draw_sample(5, &mut rng).unwrap();
            assert!(check_canonical_identity(&f, &s).unwrap());
        }
        let zero = Kernel::zeros(space.clone(), 2);
        assert!(check_canonical_identity(&zero, &Sample::new(vec![0, 1])).unwrap());
        let raw = random_rational_kernel(&mut rng, &space, 2);
        assert_eq!(
            check_canonical_identity(
                &Kernel::filled(space, 1, Rational::one()),
                &Sample::new(vec![0])
            ),
            Err(Error::NotCanonical)
        );
        let _ = raw;
    }

    #[test]
    fn k1_diagram_formula_expanded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let space = Arc::new(random_rational_space(&mut rng, 3));
        for _ in 0..20 {
            let f = random_rational_kernel(&mut rng, &space, 1);
            let g = random_rational_kernel(&mut rng, &space, 1);
            let s = space.draw_sample(4, &mut rng).unwrap();
            let inv_n = Rational::from_ratio(1, 4);
            let fg = f.tensor_product(&g).unwrap();
            let prod = f.mul_pointwise(&g).unwrap();
            let inner = prod.integral();
            let lhs =
                eval_j_descaled(&f, &s).unwrap().coeff * eval_j_descaled(&g, &s).unwrap().coeff;
            let rhs = Rational::from_i64(2) * eval_j_descaled(&fg, &s).unwrap().coeff
                + inv_n.clone() * eval_j_descaled(&prod, &s).unwrap().coeff
                + inv_n * inner;
            assert_eq!(lhs, rhs);
            assert!(check_diagram_formula(&f, &g, &s).unwrap());
        }
        let zero = Kernel::zeros(space.clone(), 2);
        let g = random_rational_kernel(&mut rng, &space, 1);
        let s = space.draw_sample(3, &mut rng).unwrap();
        let e = DiagramExpansion::new(&zero, &g).unwrap();
        assert!(e.lhs(&s).unwrap().is_zero() && e.rhs(&s).unwrap().is_zero());
    }

    #[test]
    fn corrupted_coefficient_is_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let space = Arc::new(random_rational_space(&mut rng, 3));
        let f = random_rational_kernel(&mut rng, &space, 2);
        let g = random_rational_kernel(&mut rng, &space, 2);
        let mut e = DiagramExpansion::new(&f, &g).unwrap();
        let s = space.draw_sample(4, &mut rng).unwrap();
        assert!(e.check(&s).unwrap());
        let t = e.terms.iter().position(|t| t.l == 1 && t.p == 0).unwrap();
        e.terms[t].coeff = e.terms[t].coeff.clone() + Rational::one();
        let bad = (0..10).any(|_| !e.check(&space.draw_sample(4, &mut rng).unwrap()).unwrap());
        assert!(bad);
    }

    #[test]
    fn float_mode_tracks_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let space = Arc::new(random_rational_space(&mut rng, 3));
        let f = random_rational_kernel(&mut rng, &space, 3);
        let ff = f.to_float();
        for _ in 0..10 {
            let s = space.draw_sample(5, &mut rng).unwrap();
            let exact = eval_j_descaled(&f, &s).unwrap().coeff.to_f64();
            let float = eval_j_descaled(&ff, &s).unwrap().coeff;
            assert!((exact - float).abs() < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fast_evaluation_matches_oracles(seed in any::<u64>(), atoms in 2usize..=3, k in 0usize..=3, n in 1usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let space = Arc::new(random_rational_space(&mut rng, atoms));
            let f = random_rational_kernel(&mut rng, &space, k);
            let s = space.draw_sample(n, &mut rng).unwrap();
            let q = eval_j_descaled(&f, &s).unwrap();
            prop_assert_eq!(&q.coeff, &j_oracle(&f, &s));
            if k > 0 {
                prop_assert_eq!(eval_u(&f, &s).unwrap(), u_oracle(&f, &s));
                prop_assert_eq!(eval_u(&f, &s).unwrap(), eval_u(&f.symmetrize(), &s).unwrap());
            }
            // |J| ≤ 2^k n^{k/2} ‖f‖∞, i.e. |q| ≤ 2^k ‖f‖∞.
            prop_assert!(q.coeff.abs() <= Rational::from_i64(1 << k) * f.sup_norm());
            if k == 1 {
                let mean = s.points().iter().fold(Rational::zero(), |acc, &a| acc + f.get(&[a]))
                    / Rational::from_i64(n as i64);
                prop_assert_eq!(q.coeff, mean - f.integral());
            }
        }

        #[test]
        fn diagram_formula_holds(seed in any::<u64>(), k1 in 1usize..=3, k2 in 1usize..=3, atoms in 2usize..=3, n in 2usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let space = Arc::new(random_rational_space(&mut rng, atoms));
            let f = random_rational_kernel(&mut rng, &space, k1);
            let g = random_rational_kernel(&mut rng, &space, k2);
            let e = DiagramExpansion::new(&f, &g).unwrap();
            for _ in 0..3 {
                let s = space.draw_sample(n, &mut rng).unwrap();
                prop_assert!(e.check(&s).unwrap());
            }
        }
    }
}
