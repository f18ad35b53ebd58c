//! Finite probability spaces, iid sampling and exhaustive sample enumeration.
//!
//! A non-atomic base measure is simulated by an implicit lift: every sample
//! position is a distinct point of `X × [0, 1]` and kernels only look at the
//! atom coordinate. Two different positions therefore never coincide as
//! points, even when they carry the same atom.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default cap on `|atoms|^n` for [`AtomSpace::enumerate_samples`].
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Finite probability space: ordered atoms with their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpace<S> {
    labels: Vec<String>,
    weights: Vec<S>,
    cumulative: Vec<f64>,
}

/// Builds a validated space with default atom labels `a0, a1, ...`.
pub fn make_space<S: Scalar>(weights: Vec<S>) -> Result<AtomSpace<S>> {
    AtomSpace::new(weights)
}

impl<S: Scalar> AtomSpace<S> {
    pub fn new(weights: Vec<S>) -> Result<Self> {
        let labels = (0..weights.len()).map(|i| format!("a{i}")).collect();
        Self::with_labels(labels, weights)
    }

    pub fn with_labels(labels: Vec<String>, weights: Vec<S>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySpace);
        }
        if labels.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "{} labels for {} weights",
                labels.len(),
                weights.len()
            )));
        }
        for (index, w) in weights.iter().enumerate() {
            if *w < S::zero() {
                return Err(Error::NegativeWeight {
                    index,
                    value: w.to_text(),
                });
            }
        }
        let sum = weights.iter().fold(S::zero(), |acc, w| acc + w);
        let weights = if S::EXACT {
            if sum != S::one() {
                return Err(Error::WeightsNotNormalized { sum: sum.to_text() });
            }
            weights
        } else {
            if (sum.to_f64() - 1.0).abs() > 1e-12 {
                return Err(Error::WeightsNotNormalized { sum: sum.to_text() });
            }
            weights.into_iter().map(|w| w / sum.clone()).collect()
        };
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w.to_f64();
                acc
            })
            .collect();
        Ok(AtomSpace {
            labels,
            weights,
            cumulative,
        })
    }

    pub fn uniform(atoms: usize) -> Result<Self> {
        Self::new(vec![S::from_ratio(1, atoms.max(1) as i64); atoms])
    }

    pub fn point_mass() -> Self {
        Self::new(vec![S::one()]).expect("point mass is normalized")
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> &S {
        &self.weights[atom]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn to_float(&self) -> AtomSpace<f64> {
        AtomSpace {
            labels: self.labels.clone(),
            weights: self.weights.iter().map(Scalar::to_f64).collect(),
            cumulative: self.cumulative.clone(),
        }
    }

    /// Inverse-CDF draw of a single atom.
    pub fn draw_atom<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        match self.cumulative.iter().position(|&c| u < c) {
            Some(i) => i,
            // u landed in the rounding gap above the last cumulative value.
            None => self
                .weights
                .iter()
                .rposition(|w| !w.is_negligible())
                .unwrap_or(self.len() - 1),
        }
    }

    /// `n` iid draws from the space.
    pub fn draw_sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Sample> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let points = (0..n).map(|_| self.draw_atom(rng)).collect();
        Ok(Sample { points, seed: None })
    }

    /// All `|atoms|^n` ordered samples with their product-measure weights.
    pub fn enumerate_samples(&self, n: usize, cap: u64) -> Result<Vec<(Sample, S)>> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let m = self.len();
        let total = (m as u64)
            .checked_pow(n as u32)
            .filter(|&t| t <= cap)
            .ok_or(Error::EnumerationTooLarge { atoms: m, n, cap })? as usize;
        let mut out = Vec::with_capacity(total);
        let mut digits = vec![0usize; n];
        for _ in 0..total {
            let weight = digits
                .iter()
                .fold(S::one(), |acc, &a| acc * &self.weights[a]);
            out.push((Sample::new(digits.clone()), weight));
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < m {
                    break;
                }
                *d = 0;
            }
        }
        Ok(out)
    }
}

/// An ordered sample of atom indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sample {
    points: Vec<usize>,
    /// Provenance: the derived stream seed the sample was drawn from.
    pub seed: Option<u64>,
}

impl Sample {
    pub fn new(points: Vec<usize>) -> Self {
        Sample { points, seed: None }
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    /// Number of positions carrying each atom.
    pub fn counts(&self, atoms: usize) -> Vec<usize> {
        let mut counts = vec![0; atoms];
        for &p in &self.points {
            counts[p] += 1;
        }
        counts
    }

    /// Whether positions `i` and `j` are the same lifted point.
    pub fn coincide(&self, i: usize, j: usize) -> bool {
        i == j
    }

    pub(crate) fn check_atoms(&self, atoms: usize) -> Result<()> {
        if self.points.iter().all(|&p| p < atoms) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }
}

/// Seeded source of per-replicate random streams.
///
/// Replicate `r` always gets the stream seeded by [`RandomSource::child_seed`],
/// so results do not depend on how replicates are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSource {
    seed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn child_seed(&self, replicate: u64) -> u64 {
        splitmix64(self.seed ^ splitmix64(replicate.wrapping_add(0x9E37_79B9_7F4A_7C15)))
    }

    pub fn stream(&self, replicate: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.child_seed(replicate))
    }

    /// Draws the sample of replicate `replicate`, tagging it with its stream seed.
    pub fn sample<S: Scalar>(
        &self,
        space: &AtomSpace<S>,
        n: usize,
        replicate: u64,
    ) -> Result<Sample> {
        let mut rng = self.stream(replicate);
        let mut sample = space.draw_sample(n, &mut rng)?;
        sample.seed = Some(self.child_seed(replicate));
        Ok(sample)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
