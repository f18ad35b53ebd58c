//! CSV and JSON artifacts.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::bounds::RegimeRow;
use crate::combinatorics::{b_nk, Lemma5Constants};
use crate::error::Result;
use crate::montecarlo::TailEstimate;
use crate::scalar::Scalar;

fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Columns `x,p_hat,stderr,bound13,bound16`; bounds are capped at one.
pub fn tails_csv(est: &TailEstimate, bound13: &[f64], bound16: &[f64]) -> String {
    let mut out = String::from("x,p_hat,stderr,bound13,bound16\n");
    for i in 0..est.x_grid.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(est.x_grid[i]),
            num(est.p_hat[i]),
            num(est.stderr[i]),
            num(bound13[i].min(1.0)),
            num(bound16[i].min(1.0))
        );
    }
    out
}

/// Columns `x,bound13,bound16,active_branch,log_ratio`.
pub fn bounds_csv(rows: &[RegimeRow]) -> String {
    let mut out = String::from("x,bound13,bound16,active_branch,log_ratio\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(r.x),
            num(r.bound13.capped),
            num(r.bound16.min(1.0)),
            r.bound13.branch.as_str(),
            num(r.log_ratio)
        );
    }
    out
}

/// Columns `k,m,D,Cbar` with exact rational entries.
pub fn lemma5_csv(k_max: usize, m_max: usize) -> String {
    let table = Lemma5Constants::new(k_max, m_max);
    let mut out = String::from("k,m,D,Cbar\n");
    for k in 0..=k_max {
        for m in 0..=m_max {
            let _ = writeln!(
                out,
                "{k},{m},{},{}",
                table.d(m).to_text(),
                table.cbar(k, m).to_text()
            );
        }
    }
    out
}

/// Columns `n,k,B_nk,r_descaled,B_nk_f64`.
pub fn b_nk_csv(n_max: usize, k_max: usize) -> Result<String> {
    let mut out = String::from("n,k,B_nk,r_descaled,B_nk_f64\n");
    for n in 1..=n_max {
        for k in 1..=k_max {
            let b = b_nk(n, k)?;
            let _ = writeln!(
                out,
                "{n},{k},{},{},{}",
                b.b_exact(),
                b.r.to_text(),
                num(b.b_f64())
            );
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub seed: u64,
    pub replicates: u64,
    pub n: usize,
    pub kernel_hash: String,
}
