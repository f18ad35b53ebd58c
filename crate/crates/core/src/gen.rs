//! Seeded generators for random rational spaces and kernels used by the
//! verification sweeps.

use std::sync::Arc;

use rand::Rng;

use crate::dominance::DominanceCertificate;
use crate::kernel::Kernel;
use crate::scalar::{Rational, Scalar};
use crate::space::AtomSpace;

/// Space with `atoms` atoms and random weights `w_i / Σw`, `w_i ∈ 1..=6`.
pub fn random_rational_space<R: Rng + ?Sized>(rng: &mut R, atoms: usize) -> AtomSpace<Rational> {
    let raw: Vec<i64> = (0..atoms).map(|_| rng.random_range(1..=6)).collect();
    let total: i64 = raw.iter().sum();
    AtomSpace::new(
        raw.iter()
            .map(|&w| Rational::from_ratio(w, total))
            .collect(),
    )
    .expect("positive weights summing to one")
}

fn random_value<R: Rng + ?Sized>(rng: &mut R, max_num: i64) -> Rational {
    let den = rng.random_range(1..=6);
    let num = rng.random_range(-max_num * den..=max_num * den);
    Rational::from_ratio(num, den)
}

/// Kernel with labels `1..=arity` and values `a/b`, `|a/b| ≤ 3`.
pub fn random_rational_kernel<R: Rng + ?Sized>(
    rng: &mut R,
    space: &Arc<AtomSpace<Rational>>,
    arity: usize,
) -> Kernel<Rational> {
    Kernel::from_fn(space.clone(), (1..=arity).collect(), |_| {
        random_value(rng, 3)
    })
    .expect("labels 1..=arity are increasing")
}

/// Kernel with sup-norm at most one.
pub fn random_bounded_kernel<R: Rng + ?Sized>(
    rng: &mut R,
    space: &Arc<AtomSpace<Rational>>,
    arity: usize,
) -> Kernel<Rational> {
    Kernel::from_fn(space.clone(), (1..=arity).collect(), |_| {
        random_value(rng, 1)
    })
    .expect("labels 1..=arity are increasing")
}

/// Nonnegative kernel with values in `[0, 1]` on the given labels.
pub fn random_unit_factor<R: Rng + ?Sized>(
    rng: &mut R,
    space: &Arc<AtomSpace<Rational>>,
    labels: Vec<usize>,
) -> Kernel<Rational> {
    Kernel::from_fn(space.clone(), labels, |_| {
        let den = rng.random_range(1..=6);
        Rational::from_ratio(rng.random_range(0..=den), den)
    })
    .expect("caller supplies increasing labels")
}

/// Random partition of `1..=arity` into `r` possibly empty blocks.
pub fn random_blocks<R: Rng + ?Sized>(rng: &mut R, arity: usize, r: usize) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); r.max(1)];
    for label in 1..=arity {
        let b = rng.random_range(0..blocks.len());
        blocks[b].push(label);
    }
    blocks
}

/// Kernel `f = ε · ∏ h_l` with `ε ∈ [−1, 1]` random and factors `h_l = σ u_l`,
/// `u_l ∈ [0, 1]`, together with its `(r, σ²)` certificate.
pub fn random_dominated_kernel<R: Rng + ?Sized>(
    rng: &mut R,
    space: &Arc<AtomSpace<Rational>>,
    arity: usize,
    r: usize,
    sigma: &Rational,
) -> (Kernel<Rational>, DominanceCertificate<Rational>) {
    let blocks = random_blocks(rng, arity, r);
    let factors: Vec<Kernel<Rational>> = blocks
        .iter()
        .map(|b| random_unit_factor(rng, space, b.clone()).scale(sigma))
        .collect();
    let cert = DominanceCertificate::new(sigma.clone() * sigma, blocks, factors)
        .expect("one factor per block");
    let bound = cert.product().expect("factors share the space");
    let values = bound
        .values()
        .iter()
        .map(|v| {
            let den = rng.random_range(1..=4);
            v.clone() * Rational::from_ratio(rng.random_range(-den..=den), den)
        })
        .collect();
    let f = Kernel::new(space.clone(), bound.labels().to_vec(), values)
        .expect("same shape as the bound");
    (f, cert)
}
