//! Run configuration.
//!
//! The file format is TOML restricted to flat sections of `key = value`
//! pairs. Every key is optional; missing keys take the defaults below.
//!
//! ```toml
//! [model]
//! variant = "pt"        # "pt" or "escape"
//! n = 1001              # Hilbert-space dimension (odd)
//! k = 1.1
//! gamma = 0.001
//! q_left = 0.0          # loss strip, escape variant only
//! q_right = 0.2
//!
//! [grid]
//! nq = 400
//! np = 400
//!
//! [landscape]
//! t_f = 66
//! samples = 16
//! # sigma = 0.0089      # default sqrt(hbar / 2)
//! seed = 0
//!
//! [density]
//! mode = "gain"         # gain | stable | loss | top-n (husimi also takes "all")
//! # count = 499         # default: size of the matching quantum set
//! compare = true        # also compute the quantum Husimi sum and the JSD
//!
//! [scan]
//! t_min = 10
//! t_max = 100
//! t_step = 1
//!
//! [spectral]
//! # tol_mu = 1e-17      # default 1e3 * eps * max|ln|lambda|| * hbar
//!
//! [su2]
//! dim = 11
//! gamma = 1.5
//! tau = 0.3
//! times = [1, 10, 100, 400]
//! generic = false       # use a random 8x8 matrix instead
//! matrix_seed = 0
//!
//! [poincare]
//! seeds = 200
//! steps = 500
//! seed = 0
//!
//! [output]
//! dir = "out"
//! csv = true
//! binary = true
//! pgm = true
//! ```
//!
//! Overrides are `section.key=value` pairs whose value is parsed as a TOML
//! value (bare words fall back to strings). They are applied after the file.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use schurscape::classical::Ensemble;
use schurscape::model::RotorParams;
use schurscape::phasespace::TorusGrid;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub grid: GridConfig,
    pub landscape: LandscapeConfig,
    pub density: DensityConfig,
    pub scan: ScanConfig,
    pub spectral: SpectralConfig,
    pub su2: Su2Config,
    pub poincare: PoincareConfig,
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub variant: String,
    pub n: usize,
    pub k: f64,
    pub gamma: f64,
    pub q_left: f64,
    pub q_right: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { variant: "pt".into(), n: 1001, k: 1.1, gamma: 0.001, q_left: 0.0, q_right: 0.2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub nq: usize,
    pub np: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { nq: 400, np: 400 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LandscapeConfig {
    pub t_f: usize,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    pub seed: u64,
}

impl Default for LandscapeConfig {
    fn default() -> Self {
        Self { t_f: 66, samples: 16, sigma: None, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityConfig {
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    pub compare: bool,
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self { mode: "gain".into(), count: None, compare: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub t_min: usize,
    pub t_max: usize,
    pub t_step: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { t_min: 10, t_max: 100, t_step: 1 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_mu: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Su2Config {
    pub dim: usize,
    pub gamma: f64,
    pub tau: f64,
    pub times: Vec<usize>,
    pub generic: bool,
    pub matrix_seed: u64,
}

impl Default for Su2Config {
    fn default() -> Self {
        Self { dim: 11, gamma: 1.5, tau: 0.3, times: vec![1, 10, 100, 400], generic: false, matrix_seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoincareConfig {
    pub seeds: usize,
    pub steps: usize,
    pub seed: u64,
}

impl Default for PoincareConfig {
    fn default() -> Self {
        Self { seeds: 200, steps: 500, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub csv: bool,
    pub binary: bool,
    pub pgm: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into(), csv: true, binary: true, pgm: true }
    }
}

impl RunConfig {
    /// Parses a config file. A `[run]` section, as written into manifests,
    /// is ignored so that a manifest can be fed back in.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let mut table: toml::Table = text.parse().map_err(|e| CliError::Config(format!("config: {e}")))?;
        table.remove("run");
        table.try_into().map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Applies `section.key = value` overrides in order.
    pub fn apply_overrides(&mut self, overrides: &[(String, toml::Value)]) -> Result<(), CliError> {
        if overrides.is_empty() {
            return Ok(());
        }
        let mut table = toml::Table::try_from(&*self).expect("config serialises");
        for (path, value) in overrides {
            let (section, key) = path
                .split_once('.')
                .ok_or_else(|| CliError::Config(format!("override '{path}' must be section.key")))?;
            let entry = table
                .get_mut(section)
                .and_then(|s| s.as_table_mut())
                .ok_or_else(|| CliError::Config(format!("unknown config section '{section}'")))?;
            entry.insert(key.to_string(), value.clone());
        }
        *self = table.try_into().map_err(|e| CliError::Config(format!("override: {e}")))?;
        Ok(())
    }

    pub fn rotor(&self) -> Result<RotorParams, CliError> {
        let m = &self.model;
        let p = match m.variant.as_str() {
            "pt" => RotorParams::pt(m.n, m.k, m.gamma),
            "escape" => RotorParams::escape(m.n, m.k, m.gamma, m.q_left, m.q_right),
            other => return Err(CliError::Config(format!("unknown model variant '{other}'"))),
        };
        Ok(p?)
    }

    pub fn grid(&self) -> Result<TorusGrid, CliError> {
        Ok(TorusGrid::new(self.grid.nq, self.grid.np)?)
    }

    pub fn ensemble(&self) -> Ensemble {
        let mut e = Ensemble::for_dimension(self.model.n, self.landscape.seed);
        e.samples = self.landscape.samples;
        if let Some(s) = self.landscape.sigma {
            e.sigma = s;
        }
        e
    }

    pub fn scan_times(&self) -> Result<Vec<usize>, CliError> {
        let s = &self.scan;
        if s.t_min == 0 || s.t_step == 0 || s.t_max < s.t_min {
            return Err(CliError::Config(format!(
                "scan range needs 1 <= t_min <= t_max and t_step >= 1, got {}..{} step {}",
                s.t_min, s.t_max, s.t_step
            )));
        }
        Ok((s.t_min..=s.t_max).step_by(s.t_step).collect())
    }
}

/// Parses `section.key=value`.
pub fn parse_override(text: &str) -> Result<(String, toml::Value), CliError> {
    let (path, raw) = text
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{text}' must look like section.key=value")))?;
    Ok((path.trim().to_string(), parse_value(raw.trim())))
}

/// A TOML value, or the raw text as a string.
pub fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn missing_keys_take_defaults() {
        let c = RunConfig::from_toml("[model]\nk = 10.0\n").unwrap();
        assert_eq!(c.model.k, 10.0);
        assert_eq!(c.model.n, 1001);
        assert_eq!(c.grid.nq, 400);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("[model]\nkk = 1.0\n").is_err());
        assert!(RunConfig::from_toml("[nonsense]\n").is_err());
    }

    #[test]
    fn manifest_run_section_is_ignored() {
        let c = RunConfig::from_toml("[run]\ncommand = \"scan\"\n[model]\nn = 101\n").unwrap();
        assert_eq!(c.model.n, 101);
    }

    #[test]
    fn overrides_win() {
        let mut c = RunConfig::from_toml("[model]\nk = 10.0\n").unwrap();
        let o = ["model.k=2.5", "density.count=7", "density.mode=top-n", "su2.times=[2, 4]"]
            .iter()
            .map(|s| parse_override(s).unwrap())
            .collect::<Vec<_>>();
        c.apply_overrides(&o).unwrap();
        assert_eq!(c.model.k, 2.5);
        assert_eq!(c.density.count, Some(7));
        assert_eq!(c.density.mode, "top-n");
        assert_eq!(c.su2.times, vec![2, 4]);
    }

    #[test]
    fn bad_overrides_are_config_errors() {
        let mut c = RunConfig::default();
        for bad in ["model.k=\"x\"", "model.zzz=1", "zzz.k=1"] {
            let o = vec![parse_override(bad).unwrap()];
            assert!(matches!(c.apply_overrides(&o), Err(CliError::Config(_))), "{bad}");
        }
        assert!(parse_override("model.k").is_err());
    }

    #[test]
    fn integers_coerce_where_floats_are_expected() {
        let mut c = RunConfig::default();
        c.apply_overrides(&[parse_override("model.k=10").unwrap()]).unwrap();
        assert_eq!(c.model.k, 10.0);
    }
}
