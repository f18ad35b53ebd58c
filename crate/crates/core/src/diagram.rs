//! Colored two-row diagrams and the contracted kernels they define.
//!
//! A diagram joins vertices `1..=k1` of the first row to vertices
//! `k1+1..=k1+k2` of the second. Every edge `(j, j')` identifies the two
//! coordinates; a colored edge additionally integrates the merged coordinate
//! out against μ.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::{binomial, falling_factorial, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColoredDiagram {
    k1: usize,
    k2: usize,
    edges: Vec<(usize, usize)>,
    /// Bit `t` set iff edge `t` (0-based) carries color +1.
    colored: u64,
}

impl ColoredDiagram {
    pub fn new(k1: usize, k2: usize, edges: Vec<(usize, usize)>, colored: u64) -> Result<Self> {
        if edges.len() > 63 {
            return Err(Error::InvalidDiagram("too many edges".into()));
        }
        for &(j, jp) in &edges {
            if !(1..=k1).contains(&j) || !(k1 + 1..=k1 + k2).contains(&jp) {
                return Err(Error::InvalidDiagram(format!(
                    "edge ({j},{jp}) does not join the rows of a ({k1},{k2}) diagram"
                )));
            }
        }
        if edges.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidDiagram(
                "first endpoints must be strictly increasing".into(),
            ));
        }
        if !edges.iter().map(|e| e.1).all_unique() {
            return Err(Error::InvalidDiagram(
                "second endpoints must be distinct".into(),
            ));
        }
        if colored >> edges.len() != 0 {
            return Err(Error::InvalidDiagram(
                "colored set refers to missing edges".into(),
            ));
        }
        Ok(ColoredDiagram {
            k1,
            k2,
            edges,
            colored,
        })
    }

    pub fn empty(k1: usize, k2: usize) -> Self {
        ColoredDiagram {
            k1,
            k2,
            edges: Vec::new(),
            colored: 0,
        }
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn k2(&self) -> usize {
        self.k2
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn colored_mask(&self) -> u64 {
        self.colored
    }

    /// `l = |N|`.
    pub fn l(&self) -> usize {
        self.edges.len()
    }

    /// `p = |N₁|`.
    pub fn p(&self) -> usize {
        self.colored.count_ones() as usize
    }

    pub fn is_colored(&self, edge: usize) -> bool {
        self.colored >> edge & 1 == 1
    }

    pub fn colored_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(|(t, _)| self.is_colored(*t))
            .map(|(_, &e)| e)
    }

    pub fn uncolored_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(|(t, _)| !self.is_colored(*t))
            .map(|(_, &e)| e)
    }

    pub fn class(&self) -> DiagramClass {
        DiagramClass {
            l: self.l(),
            p: self.p(),
            k1: self.k1,
            k2: self.k2,
        }
    }

    /// Arity of the contracted kernel, `k1 + k2 - l - p`.
    pub fn result_arity(&self) -> usize {
        self.k1 + self.k2 - self.l() - self.p()
    }

    /// Labels of `f ∘ g` that survive contraction, in ascending order.
    pub fn surviving_labels(&self) -> Vec<usize> {
        (1..=self.k1 + self.k2)
            .filter(|&u| {
                !self.edges.iter().any(|e| e.1 == u) && !self.colored_edges().any(|e| e.0 == u)
            })
            .collect()
    }
}

impl fmt::Display for ColoredDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({},{};", self.k1, self.k2)?;
        for (t, (j, jp)) in self.edges.iter().enumerate() {
            let sign = if self.is_colored(t) { '+' } else { '-' };
            write!(f, " ({j},{jp}){sign}")?;
        }
        write!(f, ")")
    }
}

/// Diagrams with `|N| = l` edges of which `|N₁| = p` are colored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DiagramClass {
    pub l: usize,
    pub p: usize,
    pub k1: usize,
    pub k2: usize,
}

impl DiagramClass {
    pub fn new(l: usize, p: usize, k1: usize, k2: usize) -> Result<Self> {
        let class = DiagramClass { l, p, k1, k2 };
        class.validate()?;
        Ok(class)
    }

    fn validate(&self) -> Result<()> {
        if self.p > self.l || self.l > self.k1.min(self.k2) {
            return Err(Error::InvalidClass {
                l: self.l,
                p: self.p,
                k1: self.k1,
                k2: self.k2,
            });
        }
        Ok(())
    }

    /// All classes `0 ≤ p ≤ l ≤ min(k1, k2)`.
    pub fn all(k1: usize, k2: usize) -> impl Iterator<Item = DiagramClass> {
        (0..=k1.min(k2)).flat_map(move |l| (0..=l).map(move |p| DiagramClass { l, p, k1, k2 }))
    }

    pub fn result_arity(&self) -> usize {
        self.k1 + self.k2 - self.l - self.p
    }
}

/// Lists each diagram of the class once: first endpoints ascending, second
/// endpoints as an ordered injection, colors as a subset of edge positions.
pub fn enumerate_diagrams(class: DiagramClass) -> Result<Vec<ColoredDiagram>> {
    class.validate()?;
    let DiagramClass { l, p, k1, k2 } = class;
    let mut out = Vec::new();
    for firsts in (1..=k1).combinations(l) {
        for seconds in (k1 + 1..=k1 + k2).permutations(l) {
            let edges: Vec<(usize, usize)> = firsts
                .iter()
                .copied()
                .zip(seconds.iter().copied())
                .collect();
            for colored in (0..l).combinations(p) {
                let mask = colored.iter().fold(0u64, |m, &t| m | 1 << t);
                out.push(ColoredDiagram {
                    k1,
                    k2,
                    edges: edges.clone(),
                    colored: mask,
                });
            }
        }
    }
    Ok(out)
}

/// `k1! k2! / ((k1-l)! (k2-l)! (l-p)! p!)`.
pub fn diagram_count(class: DiagramClass) -> Result<u128> {
    class.validate()?;
    let DiagramClass { l, p, k1, k2 } = class;
    Ok(binomial(k1 as u64, l as u64)
        * falling_factorial(k2 as u64, l as u64)
        * binomial(l as u64, p as u64))
}

fn check_operands<S: Scalar>(f: &Kernel<S>, g: &Kernel<S>, k1: usize, k2: usize) -> Result<()> {
    if f.arity() != k1 {
        return Err(Error::ArityMismatch {
            expected: k1,
            got: f.arity(),
        });
    }
    if g.arity() != k2 {
        return Err(Error::ArityMismatch {
            expected: k2,
            got: g.arity(),
        });
    }
    if !f.same_space(g) {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// `f ∘ g_{B(N,N₁)}`: tensor product, every `R_{j,j'}` in edge order, then
/// `P_j` for each colored edge, then compact relabelling.
pub fn contract<S: Scalar>(f: &Kernel<S>, g: &Kernel<S>, d: &ColoredDiagram) -> Result<Kernel<S>> {
    check_operands(f, g, d.k1, d.k2)?;
    let mut h = f.tensor_product(g)?;
    for &(j, jp) in &d.edges {
        h = h.substitute(j, jp)?;
    }
    for (j, _) in d.colored_edges() {
        h = h.marginal_integrate(j)?;
    }
    Ok(h.compact())
}

/// `f ∘ g_{l,p}`: the average of [`contract`] over the class.
pub fn contract_class_average<S: Scalar>(
    f: &Kernel<S>,
    g: &Kernel<S>,
    class: DiagramClass,
) -> Result<Kernel<S>> {
    check_operands(f, g, class.k1, class.k2)?;
    let diagrams = enumerate_diagrams(class)?;
    let count = S::from_i64(diagrams.len() as i64);
    let mut acc = Kernel::zeros(f.space().clone(), class.result_arity());
    for d in &diagrams {
        acc = acc.add(&contract(f, g, d)?)?;
    }
    Ok(acc.map(|v| v.clone() / count.clone()))
}

/// A diagram is Gaussian when every edge is colored.
pub fn is_gaussian(d: &ColoredDiagram) -> bool {
    d.p() == d.l()
}
