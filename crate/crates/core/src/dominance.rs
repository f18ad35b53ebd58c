//! `(r, σ²)`-dominance certificates.
//!
//! A certificate bounds `|f|` pointwise by a product of `r` factors living on
//! disjoint groups of axis labels, each factor having sup-norm at most one and
//! squared `L₂` norm at most `σ²`. The constructive transform below carries a
//! pair of certificates through the contraction of a colored diagram.

use crate::diagram::{contract, ColoredDiagram};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::{Scalar, FLOAT_ZERO_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceCertificate<S: Scalar> {
    pub sigma_sq: S,
    pub blocks: Vec<Vec<usize>>,
    pub factors: Vec<Kernel<S>>,
}

impl<S: Scalar> DominanceCertificate<S> {
    pub fn new(sigma_sq: S, blocks: Vec<Vec<usize>>, factors: Vec<Kernel<S>>) -> Result<Self> {
        if blocks.len() != factors.len() {
            return Err(Error::BlockMismatch(format!(
                "{} blocks but {} factors",
                blocks.len(),
                factors.len()
            )));
        }
        Ok(DominanceCertificate {
            sigma_sq,
            blocks,
            factors,
        })
    }

    /// Rank `r`, counting empty blocks.
    pub fn r(&self) -> usize {
        self.blocks.len()
    }

    /// Number of labels covered by the blocks.
    pub fn arity(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn to_float(&self) -> DominanceCertificate<f64> {
        DominanceCertificate {
            sigma_sq: self.sigma_sq.to_f64(),
            blocks: self.blocks.clone(),
            factors: self.factors.iter().map(Kernel::to_float).collect(),
        }
    }

    fn check_structure(&self, f: &Kernel<S>) -> Result<()> {
        if self.blocks.is_empty() || self.blocks.len() != self.factors.len() {
            return Err(Error::BlockMismatch(format!(
                "{} blocks, {} factors",
                self.blocks.len(),
                self.factors.len()
            )));
        }
        let mut covered: Vec<usize> = self.blocks.iter().flatten().copied().collect();
        covered.sort_unstable();
        if covered != f.labels() {
            return Err(Error::BlockMismatch(format!(
                "blocks cover {covered:?}, kernel has {:?}",
                f.labels()
            )));
        }
        for (block, h) in self.blocks.iter().zip(&self.factors) {
            let mut sorted = block.clone();
            sorted.sort_unstable();
            if sorted != h.labels() {
                return Err(Error::BlockMismatch(format!(
                    "factor on {:?} attached to block {block:?}",
                    h.labels()
                )));
            }
            if !h.same_space(f) {
                return Err(Error::SpaceMismatch);
            }
        }
        Ok(())
    }

    /// `∏_l h_l` as a kernel on the union of the blocks.
    pub fn product(&self) -> Result<Kernel<S>> {
        let space = self
            .factors
            .first()
            .map(|h| h.space().clone())
            .ok_or_else(|| Error::BlockMismatch("no factors".into()))?;
        self.factors
            .iter()
            .try_fold(Kernel::constant(space, S::one()), |acc, h| acc.outer(h))
    }
}

/// Checks every defining inequality; exact in rational mode, `1e-12` in float mode.
pub fn verify_certificate<S: Scalar>(f: &Kernel<S>, c: &DominanceCertificate<S>) -> Result<bool> {
    verify_certificate_with_tol(f, c, FLOAT_ZERO_TOL)
}

/// As [`verify_certificate`] with a custom float tolerance (ignored in exact mode).
pub fn verify_certificate_with_tol<S: Scalar>(
    f: &Kernel<S>,
    c: &DominanceCertificate<S>,
    tol: f64,
) -> Result<bool> {
    c.check_structure(f)?;
    if c.sigma_sq <= S::zero() || !c.sigma_sq.le_tol(&S::one(), tol) {
        return Ok(false);
    }
    for h in &c.factors {
        if !h.sup_norm().le_tol(&S::one(), tol) || !h.l2_norm_sq().le_tol(&c.sigma_sq, tol) {
            return Ok(false);
        }
        if let Some(v) = h.scalar() {
            if !S::zero().le_tol(v, tol) {
                return Ok(false);
            }
        }
    }
    let bound = c.product()?;
    Ok(f.values()
        .iter()
        .zip(bound.values())
        .all(|(v, b)| v.abs_val().le_tol(b, tol)))
}

/// Certificate for `f ∘ g`, with `g`'s labels shifted past `f`'s.
pub fn tensor_certificate<S: Scalar>(
    c_f: &DominanceCertificate<S>,
    c_g: &DominanceCertificate<S>,
) -> Result<DominanceCertificate<S>> {
    if c_f.sigma_sq != c_g.sigma_sq {
        return Err(Error::SigmaMismatch);
    }
    let shift = c_f.arity();
    let mut blocks = c_f.blocks.clone();
    let mut factors = c_f.factors.clone();
    for (block, h) in c_g.blocks.iter().zip(&c_g.factors) {
        blocks.push(block.iter().map(|l| l + shift).collect());
        factors.push(h.relabel(h.labels().iter().map(|l| l + shift).collect())?);
    }
    Ok(DominanceCertificate {
        sigma_sq: c_f.sigma_sq.clone(),
        blocks,
        factors,
    })
}

fn block_of(blocks: &[Vec<usize>], label: usize) -> Result<usize> {
    blocks
        .iter()
        .position(|b| b.contains(&label))
        .ok_or_else(|| Error::BlockMismatch(format!("label {label} is in no block")))
}

/// Replaces `h` on the block holding `label` by `sqrt(P_label(h²))`.
fn schwarz_step(
    blocks: &mut [Vec<usize>],
    factors: &mut [Kernel<f64>],
    label: usize,
) -> Result<()> {
    let b = block_of(blocks, label)?;
    let h = &factors[b];
    factors[b] = h.mul_pointwise(h)?.marginal_integrate(label)?.sqrt();
    blocks[b].retain(|&l| l != label);
    Ok(())
}

/// Constructive transform of `(r₁,σ²)` and `(r₂,σ²)` certificates for `f` and
/// `g` into an `(r₁+r₂−(l−p), σ²)` certificate for `contract(f, g, d)`.
///
/// Colored edges are handled first by the Schwarz step on each endpoint;
/// uncolored edges then merge the two blocks they join into one factor with
/// the edge substitutions applied; remaining surplus blocks are merged by
/// plain products until the rank is exact.
pub fn lemma4_transform(
    c_f: &DominanceCertificate<f64>,
    c_g: &DominanceCertificate<f64>,
    d: &ColoredDiagram,
) -> Result<DominanceCertificate<f64>> {
    let uncolored: Vec<(usize, usize)> = d.uncolored_edges().collect();
    let r_total = c_f.r() + c_g.r();
    if r_total <= uncolored.len() {
        return Err(Error::RankTooSmall {
            r: r_total,
            uncolored: uncolored.len(),
        });
    }
    if c_f.arity() != d.k1() || c_g.arity() != d.k2() {
        return Err(Error::ArityMismatch {
            expected: d.k1() + d.k2(),
            got: c_f.arity() + c_g.arity(),
        });
    }
    let target = r_total - uncolored.len();
    let start = tensor_certificate(c_f, c_g)?;
    let sigma_sq = start.sigma_sq;
    let mut blocks = start.blocks;
    let mut factors: Vec<Kernel<f64>> = start.factors.iter().map(Kernel::abs).collect();

    for (j, jp) in d.colored_edges() {
        schwarz_step(&mut blocks, &mut factors, j)?;
        schwarz_step(&mut blocks, &mut factors, jp)?;
    }

    let mut consumed = vec![false; uncolored.len()];
    while let Some(e) = consumed.iter().position(|c| !c) {
        let x = block_of(&blocks, uncolored[e].0)?;
        let y = block_of(&blocks, uncolored[e].1)?;
        let mut merged = factors[x].outer(&factors[y])?;
        let mut labels: Vec<usize> = blocks[x].iter().chain(&blocks[y]).copied().collect();
        for (t, &(j, jp)) in uncolored.iter().enumerate() {
            if consumed[t] {
                continue;
            }
            let joins = (blocks[x].contains(&j) && blocks[y].contains(&jp))
                || (blocks[y].contains(&j) && blocks[x].contains(&jp));
            if joins {
                merged = merged.substitute(j, jp)?;
                labels.retain(|&l| l != jp);
                consumed[t] = true;
            }
        }
        labels.sort_unstable();
        let (lo, hi) = (x.min(y), x.max(y));
        blocks.remove(hi);
        factors.remove(hi);
        blocks[lo] = labels;
        factors[lo] = merged;
    }

    while blocks.len() > target {
        let last = blocks.pop().expect("rank above target is positive");
        let h = factors.pop().expect("one factor per block");
        let end = blocks.len() - 1;
        factors[end] = factors[end].outer(&h)?;
        blocks[end].extend(last);
        blocks[end].sort_unstable();
    }

    let survivors = d.surviving_labels();
    let rename = |l: &usize| -> Result<usize> {
        survivors
            .iter()
            .position(|s| s == l)
            .map(|i| i + 1)
            .ok_or_else(|| Error::BlockMismatch(format!("label {l} did not survive")))
    };
    let blocks = blocks
        .iter()
        .map(|b| b.iter().map(rename).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let factors = factors
        .iter()
        .zip(&blocks)
        .map(|(h, b)| h.relabel(b.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(DominanceCertificate {
        sigma_sq,
        blocks,
        factors,
    })
}

/// Rank-one certificate `|contract(f, g, d)|` with `L₂²` slot `σ^{r₁+r₂}`.
pub fn fallback_certificate<S: Scalar>(
    f: &Kernel<S>,
    g: &Kernel<S>,
    c_f: &DominanceCertificate<S>,
    c_g: &DominanceCertificate<S>,
    d: &ColoredDiagram,
) -> Result<DominanceCertificate<S>> {
    if c_f.sigma_sq != c_g.sigma_sq {
        return Err(Error::SigmaMismatch);
    }
    let r_total = c_f.r() + c_g.r();
    let base = if r_total.is_multiple_of(2) {
        c_f.sigma_sq.clone()
    } else {
        c_f.sigma_sq.sqrt_exact().ok_or_else(|| {
            Error::InvalidParameter(format!(
                "sigma^2 = {} has no exact square root",
                c_f.sigma_sq.to_text()
            ))
        })?
    };
    let exponent = if r_total.is_multiple_of(2) {
        r_total / 2
    } else {
        r_total
    };
    let sigma_sq = base.powi(exponent as i32);
    let h = contract(f, g, d)?.abs();
    Ok(DominanceCertificate {
        sigma_sq,
        blocks: vec![h.labels().to_vec()],
        factors: vec![h],
    })
}
