//! Run configuration: a flat `key = value` TOML file.
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `j_rel_tol` | `1e-3` | relative tolerance of the J quadratures |
//! | `j_abs_tol` | `1e-6` | absolute tolerance of the J quadratures |
//! | `radius_factor` | `40` | J truncation radius in hull scales |
//! | `max_cells` | `60000` | cell budget of the J quadratures |
//! | `trace_steps` | `1000` | samples per traced curve |
//! | `loop_samples` | `200` | chord samples when building a loop from a driving function |
//! | `loop_reach` | `1e4` | how far a generated loop is followed towards ∞ |
//! | `shape_samples` | `256` | samples of built-in shapes |
//! | `disk_tol` | `1e-3` | relative tolerance of the disk integrals in S₁ |
//! | `modes` | `128` | Fourier modes of the jump operator |
//! | `energy_rel_tol` | `0.02` | allowed relative disagreement between energy methods |
//! | `energy_abs_tol` | `1e-4` | absolute floor added to energy comparisons |
//! | `det_rel_tol` | `0.05` | allowed relative disagreement of `12ΔH` |
//! | `skip_spectral` | `false` | omit the Liouville and determinant columns in `verify` |

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

pub const CONFIG_ENV: &str = "LOEWNER_LAB_CONFIG";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub j_rel_tol: f64,
    pub j_abs_tol: f64,
    pub radius_factor: f64,
    pub max_cells: usize,
    pub trace_steps: usize,
    pub loop_samples: usize,
    pub loop_reach: f64,
    pub shape_samples: usize,
    pub disk_tol: f64,
    pub modes: usize,
    pub energy_rel_tol: f64,
    pub energy_abs_tol: f64,
    pub det_rel_tol: f64,
    pub skip_spectral: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            j_rel_tol: 1e-3,
            j_abs_tol: 1e-6,
            radius_factor: 40.0,
            max_cells: 60_000,
            trace_steps: 1000,
            loop_samples: 200,
            loop_reach: 1e4,
            shape_samples: 256,
            disk_tol: 1e-3,
            modes: 128,
            energy_rel_tol: 0.02,
            energy_abs_tol: 1e-4,
            det_rel_tol: 0.05,
            skip_spectral: false,
        }
    }
}

impl Config {
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            Error::Parse { path: path.to_string(), line, msg: e.message().to_string() }
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, &path.display().to_string())
    }

    /// Reads `explicit`, else the file named by `LOEWNER_LAB_CONFIG`, else the defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self> {
        match explicit {
            Some(p) => Self::from_file(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::from_file(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("j_rel_tol", self.j_rel_tol),
            ("j_abs_tol", self.j_abs_tol),
            ("radius_factor", self.radius_factor),
            ("loop_reach", self.loop_reach),
            ("disk_tol", self.disk_tol),
            ("energy_rel_tol", self.energy_rel_tol),
            ("energy_abs_tol", self.energy_abs_tol),
            ("det_rel_tol", self.det_rel_tol),
        ];
        for (k, v) in pos {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{k} must be positive, got {v}")));
            }
        }
        if self.trace_steps < 2 || self.loop_samples < 2 || self.shape_samples < 8 {
            return Err(Error::InvalidInput("sample counts too small".into()));
        }
        if self.modes < 16 {
            return Err(Error::InvalidInput(format!("modes must be at least 16, got {}", self.modes)));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical serialization of the effective configuration.
    pub fn hash(&self) -> String {
        let text = toml::to_string(self).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn j_options(&self) -> crate::field_energy::JOptions {
        crate::field_energy::JOptions {
            rel_tol: self.j_rel_tol,
            abs_tol: self.j_abs_tol,
            radius_factor: self.radius_factor,
            max_cells: self.max_cells,
            ..Default::default()
        }
    }

    pub fn disk_options(&self) -> crate::teichmuller::DiskQuadOptions {
        crate::teichmuller::DiskQuadOptions { tol: self.disk_tol, ..Default::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let c = Config::parse("modes = 64\ndisk_tol = 1e-4\n", "x").unwrap();
        assert_eq!(c.modes, 64);
        assert_eq!(c.trace_steps, Config::default().trace_steps);
    }

    #[test]
    fn unknown_key_reports_line() {
        match Config::parse("modes = 64\n\nbogus = 1\n", "x") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hash_tracks_values() {
        let a = Config::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.modes += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
