//! Dense kernels `f(x_1, ..., x_k)` over the atoms of a finite space.
//!
//! Axes are identified by label rather than position. Labels are strictly
//! increasing positive integers; the value tensor is stored row-major with the
//! smallest label as the most significant coordinate. Operators that remove an
//! axis keep the remaining labels untouched, mirroring the index lists used
//! when contracting diagrams; [`Kernel::compact`] renumbers to `1..=k`.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::AtomSpace;

#[derive(Clone, PartialEq)]
pub struct Kernel<S> {
    space: Arc<AtomSpace<S>>,
    labels: Vec<usize>,
    values: Vec<S>,
}

impl<S: Scalar> fmt::Debug for Kernel<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("labels", &self.labels)
            .field("atoms", &self.space.len())
            .field(
                "values",
                &self.values.iter().map(Scalar::to_text).collect::<Vec<_>>(),
            )
            .finish()
    }
}

fn tensor_len(atoms: usize, arity: usize) -> usize {
    atoms.pow(arity as u32)
}

/// Writes the base-`atoms` digits of `flat` into `digits` (most significant first).
fn decode(mut flat: usize, atoms: usize, digits: &mut [usize]) {
    for d in digits.iter_mut().rev() {
        *d = flat % atoms;
        flat /= atoms;
    }
}

fn encode(digits: impl IntoIterator<Item = usize>, atoms: usize) -> usize {
    digits.into_iter().fold(0, |acc, d| acc * atoms + d)
}

fn check_labels(labels: &[usize]) -> Result<()> {
    if labels.contains(&0) || labels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::LabelsNotIncreasing(labels.to_vec()));
    }
    Ok(())
}

impl<S: Scalar> Kernel<S> {
    pub fn new(space: Arc<AtomSpace<S>>, labels: Vec<usize>, values: Vec<S>) -> Result<Self> {
        check_labels(&labels)?;
        let expected = tensor_len(space.len(), labels.len());
        if values.len() != expected {
            return Err(Error::WrongValueCount {
                expected,
                got: values.len(),
            });
        }
        Ok(Kernel {
            space,
            labels,
            values,
        })
    }

    /// Kernel with labels `1..=arity` from row-major values.
    pub fn from_values(space: Arc<AtomSpace<S>>, arity: usize, values: Vec<S>) -> Result<Self> {
        Self::new(space, (1..=arity).collect(), values)
    }

    pub fn from_fn(
        space: Arc<AtomSpace<S>>,
        labels: Vec<usize>,
        mut f: impl FnMut(&[usize]) -> S,
    ) -> Result<Self> {
        check_labels(&labels)?;
        let m = space.len();
        let k = labels.len();
        let mut digits = vec![0; k];
        let values = (0..tensor_len(m, k))
            .map(|flat| {
                decode(flat, m, &mut digits);
                f(&digits)
            })
            .collect();
        Ok(Kernel {
            space,
            labels,
            values,
        })
    }

    pub fn constant(space: Arc<AtomSpace<S>>, value: S) -> Self {
        Kernel {
            space,
            labels: Vec::new(),
            values: vec![value],
        }
    }

    /// Constant kernel of the given arity (labels `1..=arity`).
    pub fn filled(space: Arc<AtomSpace<S>>, arity: usize, value: S) -> Self {
        let len = tensor_len(space.len(), arity);
        Kernel {
            space,
            labels: (1..=arity).collect(),
            values: vec![value; len],
        }
    }

    pub fn zeros(space: Arc<AtomSpace<S>>, arity: usize) -> Self {
        Self::filled(space, arity, S::zero())
    }

    /// Indicator of a single atom tuple.
    pub fn indicator(space: Arc<AtomSpace<S>>, tuple: &[usize]) -> Result<Self> {
        if tuple.iter().any(|&a| a >= space.len()) {
            return Err(Error::IndexOutOfRange(format!("atom tuple {tuple:?}")));
        }
        Self::from_fn(space, (1..=tuple.len()).collect(), |d| {
            if d == tuple {
                S::one()
            } else {
                S::zero()
            }
        })
    }

    pub fn arity(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn space(&self) -> &Arc<AtomSpace<S>> {
        &self.space
    }

    pub fn atoms(&self) -> usize {
        self.space.len()
    }

    /// Value at an atom tuple given in label order.
    pub fn get(&self, atoms: &[usize]) -> &S {
        &self.values[encode(atoms.iter().copied(), self.atoms())]
    }

    /// Value of an arity-0 kernel.
    pub fn scalar(&self) -> Option<&S> {
        (self.arity() == 0).then(|| &self.values[0])
    }

    pub fn same_space(&self, other: &Kernel<S>) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space
    }

    fn require_same_space(&self, other: &Kernel<S>) -> Result<()> {
        if self.same_space(other) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    fn position(&self, label: usize) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::NoSuchAxis(label))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Scalar::is_negligible)
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Kernel {
            space: self.space.clone(),
            labels: self.labels.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(Scalar::abs_val)
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|v| v.clone() * c)
    }

    fn zip_with(&self, other: &Kernel<S>, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        self.require_same_space(other)?;
        if self.labels != other.labels {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                got: other.arity(),
            });
        }
        Ok(Kernel {
            space: self.space.clone(),
            labels: self.labels.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Kernel<S>) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b)
    }

    pub fn sub(&self, other: &Kernel<S>) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b)
    }

    /// Pointwise product of kernels on identical labels.
    pub fn mul_pointwise(&self, other: &Kernel<S>) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() * b)
    }

    /// Replaces the labels by another strictly increasing list of the same length.
    pub fn relabel(&self, labels: Vec<usize>) -> Result<Self> {
        check_labels(&labels)?;
        if labels.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                got: labels.len(),
            });
        }
        Ok(Kernel {
            space: self.space.clone(),
            labels,
            values: self.values.clone(),
        })
    }

    /// Renumbers the labels to `1..=k`, preserving order.
    pub fn compact(&self) -> Self {
        Kernel {
            space: self.space.clone(),
            labels: (1..=self.arity()).collect(),
            values: self.values.clone(),
        }
    }

    pub fn to_float(&self) -> Kernel<f64> {
        Kernel {
            space: Arc::new(self.space.to_float()),
            labels: self.labels.clone(),
            values: self.values.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// `max |f|`.
    pub fn sup_norm(&self) -> S {
        self.values
            .iter()
            .map(Scalar::abs_val)
            .fold(S::zero(), |acc, v| if v > acc { v } else { acc })
    }

    /// Weighted sum `Σ g(f(a)) ∏ μ(a_i)` over all atom tuples.
    fn weighted_sum(&self, g: impl Fn(&S) -> S) -> S {
        let m = self.atoms();
        let k = self.arity();
        let w = self.space.weights();
        let mut digits = vec![0; k];
        let mut total = S::zero();
        for (flat, v) in self.values.iter().enumerate() {
            decode(flat, m, &mut digits);
            let weight = digits.iter().fold(S::one(), |acc, &a| acc * &w[a]);
            total = total + g(v) * weight;
        }
        total
    }

    /// `∫ f² dμ^k`.
    pub fn l2_norm_sq(&self) -> S {
        self.weighted_sum(|v| v.clone() * v)
    }

    /// `∫ |f| dμ^k`.
    pub fn l1_norm(&self) -> S {
        self.weighted_sum(Scalar::abs_val)
    }

    /// `∫ f dμ^k`.
    pub fn integral(&self) -> S {
        self.weighted_sum(Clone::clone)
    }

    /// Integrates axis `label` against μ.
    pub fn marginal_integrate(&self, label: usize) -> Result<Self> {
        let t = self.position(label)?;
        let m = self.atoms();
        let k = self.arity();
        let stride = tensor_len(m, k - 1 - t);
        let outer = tensor_len(m, t);
        let w = self.space.weights();
        let mut values = Vec::with_capacity(outer * stride);
        for o in 0..outer {
            for i in 0..stride {
                let mut acc = S::zero();
                for (a, wa) in w.iter().enumerate() {
                    acc = acc + self.values[(o * m + a) * stride + i].clone() * wa;
                }
                values.push(acc);
            }
        }
        let mut labels = self.labels.clone();
        labels.remove(t);
        Ok(Kernel {
            space: self.space.clone(),
            labels,
            values,
        })
    }

    /// Restricts to the diagonal `x_drop = x_keep`; axis `drop` disappears.
    pub fn substitute(&self, keep: usize, drop: usize) -> Result<Self> {
        if keep == drop {
            return Err(Error::SameAxis(keep));
        }
        let tk = self.position(keep)?;
        let td = self.position(drop)?;
        let m = self.atoms();
        let k = self.arity();
        let mut labels = self.labels.clone();
        labels.remove(td);
        // Position of `keep` among the surviving axes.
        let tk_out = if tk > td { tk - 1 } else { tk };
        let mut out_digits = vec![0; k - 1];
        let values = (0..tensor_len(m, k - 1))
            .map(|flat| {
                decode(flat, m, &mut out_digits);
                let shared = out_digits[tk_out];
                let src = (0..k).map(|t| match t.cmp(&td) {
                    std::cmp::Ordering::Less => out_digits[t],
                    std::cmp::Ordering::Equal => shared,
                    std::cmp::Ordering::Greater => out_digits[t - 1],
                });
                self.values[encode(src, m)].clone()
            })
            .collect();
        Ok(Kernel {
            space: self.space.clone(),
            labels,
            values,
        })
    }

    /// `(f ∘ g)(x_1..x_{k1+k2}) = f(x_1..x_{k1}) g(x_{k1+1}..x_{k1+k2})`.
    ///
    /// Both operands are read positionally; the result carries labels `1..=k1+k2`.
    pub fn tensor_product(&self, other: &Kernel<S>) -> Result<Self> {
        self.require_same_space(other)?;
        let mut values = Vec::with_capacity(self.values.len() * other.values.len());
        for a in &self.values {
            for b in &other.values {
                values.push(a.clone() * b);
            }
        }
        Ok(Kernel {
            space: self.space.clone(),
            labels: (1..=self.arity() + other.arity()).collect(),
            values,
        })
    }

    /// Product of kernels on disjoint label sets; the result lives on the union.
    pub fn outer(&self, other: &Kernel<S>) -> Result<Self> {
        self.require_same_space(other)?;
        if self.labels.iter().any(|l| other.labels.contains(l)) {
            return Err(Error::OverlappingLabels);
        }
        let labels: Vec<usize> = self
            .labels
            .iter()
            .chain(&other.labels)
            .copied()
            .sorted()
            .collect();
        let pick_self: Vec<usize> = self
            .labels
            .iter()
            .map(|l| labels.binary_search(l).unwrap())
            .collect();
        let pick_other: Vec<usize> = other
            .labels
            .iter()
            .map(|l| labels.binary_search(l).unwrap())
            .collect();
        let m = self.atoms();
        Self::from_fn(self.space.clone(), labels, |d| {
            let a = &self.values[encode(pick_self.iter().map(|&t| d[t]), m)];
            let b = &other.values[encode(pick_other.iter().map(|&t| d[t]), m)];
            a.clone() * b
        })
    }

    /// Average over all `k!` permutations of the arguments.
    pub fn symmetrize(&self) -> Self {
        let k = self.arity();
        if k < 2 {
            return self.clone();
        }
        let m = self.atoms();
        let perms: Vec<Vec<usize>> = (0..k).permutations(k).collect();
        let count = S::from_i64(perms.len() as i64);
        let mut digits = vec![0; k];
        let values = (0..self.values.len())
            .map(|flat| {
                decode(flat, m, &mut digits);
                let sum = perms.iter().fold(S::zero(), |acc, p| {
                    acc + &self.values[encode(p.iter().map(|&t| digits[t]), m)]
                });
                sum / count.clone()
            })
            .collect();
        Kernel {
            space: self.space.clone(),
            labels: self.labels.clone(),
            values,
        }
    }

    /// Subtracts the μ-mean along the axis at position `t`.
    fn center_position(&mut self, t: usize) {
        let m = self.atoms();
        let k = self.arity();
        let stride = tensor_len(m, k - 1 - t);
        let outer = tensor_len(m, t);
        let w = self.space.weights().to_vec();
        for o in 0..outer {
            for i in 0..stride {
                let idx = |a: usize| (o * m + a) * stride + i;
                let mean = (0..m).fold(S::zero(), |acc, a| {
                    acc + self.values[idx(a)].clone() * &w[a]
                });
                for a in 0..m {
                    let j = idx(a);
                    self.values[j] = self.values[j].clone() - &mean;
                }
            }
        }
    }

    /// Applies `∏_j (I − P_j)`, yielding a canonical kernel.
    pub fn canonical_project(&self) -> Self {
        let mut out = self.clone();
        if out.arity() == 0 {
            out.values[0] = S::zero();
            return out;
        }
        for t in 0..out.arity() {
            out.center_position(t);
        }
        out
    }

    /// True iff every single-axis μ-marginal vanishes.
    pub fn is_canonical(&self) -> bool {
        self.labels.iter().all(|&l| {
            self.marginal_integrate(l)
                .map(|p| p.is_zero())
                .unwrap_or(false)
        })
    }
}

impl Kernel<f64> {
    pub fn sqrt(&self) -> Self {
        self.map(|v| v.max(0.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_rational_kernel, random_rational_space};
    use crate::scalar::Rational;
    use num_traits::{One, Zero};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn uniform2() -> Arc<AtomSpace<Rational>> {
        Arc::new(AtomSpace::uniform(2).unwrap())
    }

    #[test]
    fn rejects_bad_construction() {
        let s = uniform2();
        assert!(matches!(
            Kernel::new(s.clone(), vec![1, 2], vec![Rational::zero(); 3]),
            Err(Error::WrongValueCount {
                expected: 4,
                got: 3
            })
        ));
        assert!(matches!(
            Kernel::new(s, vec![2, 1], vec![Rational::zero(); 4]),
            Err(Error::LabelsNotIncreasing(_))
        ));
    }

    #[test]
    fn sup_norm_examples() {
        let s = uniform2();
        assert_eq!(Kernel::zeros(s.clone(), 2).sup_norm(), Rational::zero());
        assert_eq!(
            Kernel::indicator(s.clone(), &[1, 0]).unwrap().sup_norm(),
            Rational::one()
        );
        let f =
            Kernel::from_values(s, 1, vec![Rational::from_i64(-3), Rational::from_i64(2)]).unwrap();
        assert_eq!(f.sup_norm(), Rational::from_i64(3));
    }

    #[test]
    fn norm_examples() {
        let s = uniform2();
        let ind = Kernel::indicator(s.clone(), &[1]).unwrap();
        assert_eq!(ind.l2_norm_sq(), q(1, 2));
        assert_eq!(ind.l1_norm(), q(1, 2));
        assert_eq!(
            ind.scale(&Rational::from_i64(-2)).l1_norm(),
            Rational::one()
        );
        let c = Kernel::filled(s.clone(), 3, q(-2, 3));
        assert_eq!(c.l2_norm_sq(), q(4, 9));
        assert_eq!(c.l1_norm(), q(2, 3));
        assert_eq!(Kernel::constant(s, q(5, 7)).l2_norm_sq(), q(25, 49));
    }

    #[test]
    fn tensor_product_examples() {
        let s = uniform2();
        let two = Kernel::filled(s.clone(), 1, Rational::from_i64(2));
        let three = Kernel::filled(s.clone(), 1, Rational::from_i64(3));
        let six = two.tensor_product(&three).unwrap();
        assert_eq!(six, Kernel::filled(s.clone(), 2, Rational::from_i64(6)));

        let ind = Kernel::indicator(s.clone(), &[1]).unwrap();
        let bb = ind.tensor_product(&ind).unwrap();
        assert_eq!(bb, Kernel::indicator(s.clone(), &[1, 1]).unwrap());

        let f = Kernel::from_values(s.clone(), 1, vec![q(1, 3), q(-1, 5)]).unwrap();
        let g = f
            .tensor_product(&Kernel::filled(s, 1, Rational::one()))
            .unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(g.get(&[a, b]), f.get(&[a]));
            }
        }
    }

    #[test]
    fn tensor_product_rejects_other_space() {
        let f = Kernel::filled(uniform2(), 1, Rational::one());
        let other = Arc::new(AtomSpace::<Rational>::uniform(3).unwrap());
        let g = Kernel::filled(other, 1, Rational::one());
        assert_eq!(f.tensor_product(&g), Err(Error::SpaceMismatch));
    }

    #[test]
    fn marginal_examples() {
        let s = uniform2();
        let c = Kernel::filled(s.clone(), 2, q(7, 3));
        let pc = c.marginal_integrate(1).unwrap();
        assert_eq!(pc.labels(), &[2]);
        assert!(pc.values().iter().all(|v| *v == q(7, 3)));

        let ind = Kernel::indicator(s.clone(), &[1]).unwrap();
        let p = ind.marginal_integrate(1).unwrap();
        assert_eq!(p.scalar(), Some(&q(1, 2)));
        assert_eq!(ind.marginal_integrate(4), Err(Error::NoSuchAxis(4)));
    }

    #[test]
    fn marginals_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let space = Arc::new(random_rational_space(&mut rng, 3));
            let f = random_rational_kernel(&mut rng, &space, 3);
            let a = f
                .marginal_integrate(1)
                .unwrap()
                .marginal_integrate(2)
                .unwrap();
            let b = f
                .marginal_integrate(2)
                .unwrap()
                .marginal_integrate(1)
                .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn substitute_examples() {
        let s = Arc::new(AtomSpace::<Rational>::uniform(3).unwrap());
        let f = Kernel::from_values(s.clone(), 1, vec![q(1, 2), q(2, 3), q(-1, 1)]).unwrap();
        let g = Kernel::from_values(s.clone(), 1, vec![q(3, 1), q(1, 7), q(2, 5)]).unwrap();
        let r = f.tensor_product(&g).unwrap().substitute(1, 2).unwrap();
        assert_eq!(r.labels(), &[1]);
        for a in 0..3 {
            assert_eq!(r.get(&[a]), &(f.get(&[a]).clone() * g.get(&[a])));
        }

        let c = Kernel::filled(s.clone(), 2, q(4, 9))
            .substitute(1, 2)
            .unwrap();
        assert_eq!(c, Kernel::filled(s.clone(), 1, q(4, 9)));

        let off = Kernel::indicator(s.clone(), &[0, 2])
            .unwrap()
            .substitute(1, 2)
            .unwrap();
        assert!(off.is_zero());
        assert_eq!(
            Kernel::filled(s, 2, q(1, 1)).substitute(2, 2),
            Err(Error::SameAxis(2))
        );
    }

    #[test]
    fn substitute_keeps_requested_label() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = Arc::new(random_rational_space(&mut rng, 3));
        let f = random_rational_kernel(&mut rng, &s, 3);
        let r = f.substitute(3, 1).unwrap();
        assert_eq!(r.labels(), &[2, 3]);
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(r.get(&[a, b]), f.get(&[b, a, b]));
            }
        }
    }

    #[test]
    fn outer_interleaves_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = Arc::new(random_rational_space(&mut rng, 2));
        let f = random_rational_kernel(&mut rng, &s, 2)
            .relabel(vec![1, 4])
            .unwrap();
        let g = random_rational_kernel(&mut rng, &s, 1)
            .relabel(vec![2])
            .unwrap();
        let h = f.outer(&g).unwrap();
        assert_eq!(h.labels(), &[1, 2, 4]);
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let expected = f.get(&[a, c]).clone() * g.get(&[b]);
                    assert_eq!(h.get(&[a, b, c]), &expected);
                }
            }
        }
        assert_eq!(f.outer(&f), Err(Error::OverlappingLabels));
    }

    #[test]
    fn symmetrize_examples() {
        let s = uniform2();
        let ind = Kernel::indicator(s.clone(), &[0, 1]).unwrap();
        let sym = ind.symmetrize();
        assert_eq!(sym.get(&[0, 1]), &q(1, 2));
        assert_eq!(sym.get(&[1, 0]), &q(1, 2));
        assert_eq!(sym.get(&[0, 0]), &Rational::zero());
        assert_eq!(sym.symmetrize(), sym);
    }

    #[test]
    fn canonical_examples() {
        let s = uniform2();
        let c = Kernel::filled(s.clone(), 2, q(3, 2));
        assert!(c.canonical_project().is_zero());
        assert!(Kernel::zeros(s.clone(), 2).is_canonical());
        assert!(!Kernel::filled(s.clone(), 1, Rational::one()).is_canonical());

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let space = Arc::new(random_rational_space(&mut rng, 3));
        let f = random_rational_kernel(&mut rng, &space, 2);
        let cf = f.canonical_project();
        assert!(cf.is_canonical());
        assert_eq!(cf.canonical_project(), cf);
        // Independent check of the defining property.
        for a in 0..3 {
            let row: Rational = (0..3).fold(Rational::zero(), |acc, b| {
                acc + cf.get(&[a, b]).clone() * space.weight(b)
            });
            let col: Rational = (0..3).fold(Rational::zero(), |acc, b| {
                acc + cf.get(&[b, a]).clone() * space.weight(b)
            });
            assert!(row.is_zero() && col.is_zero());
        }
    }

    #[test]
    fn float_canonical_uses_tolerance() {
        let s = Arc::new(AtomSpace::<f64>::uniform(3).unwrap());
        let f = Kernel::from_values(s, 1, vec![1.0, -0.5, -0.5 + 1e-14]).unwrap();
        assert!(f.is_canonical());
        assert!(!f.scale(&1e3).is_canonical());
    }

    fn arb_case() -> impl Strategy<Value = (u64, usize, usize)> {
        (any::<u64>(), 2usize..=3, 1usize..=3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn operator_invariants((seed, atoms, arity) in arb_case()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let space = Arc::new(random_rational_space(&mut rng, atoms));
            let f = random_rational_kernel(&mut rng, &space, arity);
            let l2 = f.l2_norm_sq();
            let l1 = f.l1_norm();
            for &j in f.labels() {
                let p = f.marginal_integrate(j).unwrap();
                prop_assert!(p.l2_norm_sq() <= l2);
                prop_assert!(p.l1_norm() <= l1);
            }
            prop_assert!(f.symmetrize().l2_norm_sq() <= l2);
            prop_assert_eq!(f.symmetrize().symmetrize(), f.symmetrize());
            let cf = f.canonical_project();
            prop_assert_eq!(cf.canonical_project(), cf);
            prop_assert!(l2 <= f.sup_norm() * l1);
            let g = random_rational_kernel(&mut rng, &space, 2);
            let fg = f.tensor_product(&g).unwrap();
            prop_assert_eq!(fg.l2_norm_sq(), f.l2_norm_sq() * g.l2_norm_sq());
        }

        #[test]
        fn disjoint_p_and_r_commute(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let space = Arc::new(random_rational_space(&mut rng, 2));
            let f = random_rational_kernel(&mut rng, &space, 4);
            let a = f.substitute(1, 3).unwrap().marginal_integrate(2).unwrap();
            let b = f.marginal_integrate(2).unwrap().substitute(1, 3).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
