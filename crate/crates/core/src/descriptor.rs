//! JSON descriptors for spaces and kernels.
//!
//! ```json
//! {"weights": ["1/5", "3/10", 0.5], "labels": ["a", "b", "c"]}
//! {"arity": 1, "values": ["4/5", -0.2, "-1/5"]}
//! ```
//!
//! Values may be JSON strings (`"p/q"`, integers, decimals) or JSON numbers.
//! Numbers are read through their decimal text, so `0.1` is exactly `1/10` in
//! exact mode.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::scalar::Scalar;
use crate::space::AtomSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDescriptor {
    pub weights: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelDescriptor {
    pub arity: usize,
    pub values: Vec<Value>,
}

pub fn parse_value<S: Scalar>(v: &Value) -> Result<S> {
    match v {
        Value::String(s) => S::parse_str(s),
        Value::Number(n) => S::parse_str(&n.to_string()),
        other => Err(Error::Parse(format!(
            "expected a number or string, got {other}"
        ))),
    }
}

impl SpaceDescriptor {
    pub fn build<S: Scalar>(&self) -> Result<AtomSpace<S>> {
        let weights = self
            .weights
            .iter()
            .map(parse_value)
            .collect::<Result<Vec<S>>>()?;
        match &self.labels {
            Some(labels) => AtomSpace::with_labels(labels.clone(), weights),
            None => AtomSpace::new(weights),
        }
    }

    pub fn from_space<S: Scalar>(space: &AtomSpace<S>) -> Self {
        SpaceDescriptor {
            weights: space
                .weights()
                .iter()
                .map(|w| Value::String(w.to_text()))
                .collect(),
            labels: Some(space.labels().to_vec()),
        }
    }
}

impl KernelDescriptor {
    pub fn build<S: Scalar>(&self, space: Arc<AtomSpace<S>>) -> Result<Kernel<S>> {
        let values = self
            .values
            .iter()
            .map(parse_value)
            .collect::<Result<Vec<S>>>()?;
        Kernel::from_values(space, self.arity, values)
    }

    pub fn from_kernel<S: Scalar>(kernel: &Kernel<S>) -> Self {
        KernelDescriptor {
            arity: kernel.arity(),
            values: kernel
                .values()
                .iter()
                .map(|v| Value::String(v.to_text()))
                .collect(),
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_space<S: Scalar>(path: &Path) -> Result<AtomSpace<S>> {
    read_json::<SpaceDescriptor>(path)?.build()
}

pub fn load_kernel<S: Scalar>(path: &Path, space: Arc<AtomSpace<S>>) -> Result<Kernel<S>> {
    read_json::<KernelDescriptor>(path)?.build(space)
}

/// SHA-256 over a canonical text form of the space weights and kernel values.
pub fn kernel_hash<S: Scalar>(kernel: &Kernel<S>) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!(
        "arity={};atoms={};",
        kernel.arity(),
        kernel.atoms()
    ));
    for w in kernel.space().weights() {
        hasher.update(w.to_text());
        hasher.update(",");
    }
    hasher.update(";");
    for v in kernel.values() {
        hasher.update(v.to_text());
        hasher.update(",");
    }
    hex::encode(hasher.finalize())
}
