//! Exact and Monte Carlo tooling for degenerate U-statistics and multiple
//! integrals with respect to normalized empirical measures.
//!
//! Identities are verified over exact rationals on finite atom spaces; tail
//! and moment behaviour is explored with seeded, thread-count independent
//! Monte Carlo.

pub mod bounds;
pub mod combinatorics;
pub mod descriptor;
pub mod diagram;
pub mod dominance;
pub mod error;
pub mod exec;
pub mod gen;
pub mod integral;
pub mod kernel;
pub mod montecarlo;
pub mod report;
pub mod scalar;
pub mod space;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use kernel::Kernel;
pub use scalar::{Rational, Scalar};
pub use space::{AtomSpace, RandomSource, Sample};
