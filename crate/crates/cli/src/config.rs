//! Run configuration: command-line flags layered over an optional JSON file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use emint_core::verify::Scale;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_REPLICATES: u64 = 100_000;
pub const DEFAULT_K_MAX: usize = 8;
pub const DEFAULT_M_MAX: usize = 16;
pub const DEFAULT_N_MAX: usize = 30;
/// Largest `m` accepted for the constant table.
pub const M_MAX_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

/// Fields of the JSON config file; every field is optional and flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub space: Option<PathBuf>,
    pub kernel: Option<PathBuf>,
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub enum_cap: Option<u64>,
    pub replicates: Option<u64>,
    pub n: Option<usize>,
    pub scale: Option<Scale>,
    pub x_grid: Option<Vec<f64>>,
    pub k: Option<usize>,
    pub sigma: Option<f64>,
    pub constants_file: Option<PathBuf>,
    pub k_max: Option<usize>,
    pub m_max: Option<usize>,
    pub n_max: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let mut cfg: FileConfig = serde_json::from_str(&text)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        // Relative paths inside the file are taken relative to the file.
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut cfg.space,
            &mut cfg.kernel,
            &mut cfg.out,
            &mut cfg.constants_file,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Constants for the bound evaluators, read from `--constants-file`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConstants {
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub c1: f64,
    #[serde(default = "one")]
    pub c2: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for BoundConstants {
    fn default() -> Self {
        BoundConstants {
            c: 1.0,
            alpha: 1.0,
            c1: 1.0,
            c2: 1.0,
        }
    }
}

impl BoundConstants {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }
}

/// Invalid or missing configuration; maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<emint_core::Error> for ConfigError {
    fn from(e: emint_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

pub fn require<T>(value: Option<T>, flag: &str) -> Result<T, ConfigError> {
    value.ok_or_else(|| ConfigError(format!("missing required setting --{flag}")))
}

/// Strictly increasing positive grid given as one comma-separated argument.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

pub fn parse_grid(text: &str) -> Result<Grid, String> {
    let grid = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if grid.is_empty() || grid[0] <= 0.0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err("grid must be positive and strictly increasing".into());
    }
    Ok(Grid(grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.5, 1,2").unwrap().0, vec![0.5, 1.0, 2.0]);
        assert!(parse_grid("1,1").is_err());
        assert!(parse_grid("-1,2").is_err());
        assert!(parse_grid("x").is_err());
    }

    #[test]
    fn file_paths_resolve_against_file() {
        let dir = std::env::temp_dir().join(format!("emint-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.json");
        std::fs::write(&path, r#"{"space": "s.json", "seed": 4, "mode": "float"}"#).unwrap();
        let cfg = FileConfig::load(Some(&path)).unwrap();
        assert_eq!(cfg.space.unwrap(), dir.join("s.json"));
        assert_eq!(cfg.seed, Some(4));
        assert_eq!(cfg.mode, Some(Mode::Float));
        std::fs::write(&path, r#"{"sede": 4}"#).unwrap();
        assert!(FileConfig::load(Some(&path)).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
