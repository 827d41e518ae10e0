//! JSON run configuration. Every section rejects unknown keys.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::CliError;
use crate::fields::{linspace, ApertureSpec, GridSpec, TrapLaserParams};
use crate::gates::CollisionParams;
use crate::machine::{default_lattice, ArrayConfig, ProtocolSettings};
use crate::statedep::{StateDepConfig, ThetaRamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    TrapScan,
    PotentialMap,
    Transport,
    ProtocolRun,
    Schedule,
    Selftest,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Option<Experiment>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub trap_scan: Option<TrapScanConfig>,
    pub potential_map: Option<PotentialMapConfig>,
    pub transport: Option<TransportConfig>,
    pub protocol: Option<ProtocolConfig>,
    pub schedule: Option<ScheduleConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapScanConfig {
    pub radii: Vec<f64>,
}

/// Either explicit coordinates or an evenly spaced range.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Values(Vec<f64>),
    Range { lo: f64, hi: f64, n: usize },
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::Values(v) => v.clone(),
            Self::Range { lo, hi, n } => linspace(*lo, *hi, *n),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialMapConfig {
    pub aperture_radius: f64,
    pub r: AxisSpec,
    pub z: AxisSpec,
    #[serde(default)]
    pub laser: TrapLaserParams,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RampSpec {
    Linear { t0: f64, t1: f64, theta0: f64, theta1: f64 },
    Samples { samples: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportConfig {
    #[serde(default = "default_lattice")]
    pub lattice: StateDepConfig,
    #[serde(default)]
    pub x_start: f64,
    pub ramp: RampSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub array: ArrayConfig,
    /// Site of each qubit.
    pub qubits: Vec<usize>,
    /// Initial computational-basis state, one bit per qubit (default all 0).
    #[serde(default)]
    pub initial: Option<Vec<u8>>,
    /// Qubit pairs; more than one pair runs them as one simultaneous batch.
    pub pairs: Vec<[usize; 2]>,
    pub collision: CollisionParams,
    #[serde(default = "default_true")]
    pub pre_hadamard: bool,
    #[serde(default)]
    pub settings: ProtocolSettings,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub array: ArrayConfig,
    /// Site pairs.
    pub pairs: Vec<[usize; 2]>,
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every section against the invariants of the types it feeds.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(t) = self.tolerance {
            check_tol(t)?;
        }
        if let Some(s) = &self.trap_scan {
            s.apertures()?;
        }
        if let Some(m) = &self.potential_map {
            m.aperture()?;
            m.grid()?;
            m.laser.validate().map_err(config_err)?;
        }
        if let Some(t) = &self.transport {
            t.lattice.validate().map_err(config_err)?;
            t.ramp()?;
            if !t.x_start.is_finite() {
                return Err(CliError::Config("x_start must be finite".into()));
            }
        }
        if let Some(p) = &self.protocol {
            p.collision.validate().map_err(config_err)?;
            if p.pairs.is_empty() {
                return Err(CliError::Config("protocol needs at least one pair".into()));
            }
            if let Some(bits) = &p.initial {
                if bits.len() != p.qubits.len() || bits.iter().any(|&b| b > 1) {
                    return Err(CliError::Config(
                        "initial must hold one 0/1 entry per qubit".into(),
                    ));
                }
            }
        }
        if let Some(s) = &self.schedule {
            if s.pairs.is_empty() {
                return Err(CliError::Config("schedule needs at least one pair".into()));
            }
        }
        Ok(())
    }
}

pub fn check_tol(t: f64) -> Result<(), CliError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(CliError::Config(format!("tolerance must lie in (0, 1), got {t}")));
    }
    Ok(())
}

impl TrapScanConfig {
    pub fn apertures(&self) -> Result<Vec<ApertureSpec>, CliError> {
        if self.radii.is_empty() {
            return Err(CliError::Config("trap_scan.radii is empty".into()));
        }
        self.radii
            .iter()
            .map(|&a| ApertureSpec::new(a).map_err(config_err))
            .collect()
    }
}

impl PotentialMapConfig {
    pub fn aperture(&self) -> Result<ApertureSpec, CliError> {
        ApertureSpec::new(self.aperture_radius).map_err(config_err)
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        let grid = GridSpec {
            r: self.r.values(),
            z: self.z.values(),
        };
        if grid.r.is_empty() || grid.z.is_empty() {
            return Err(CliError::Config("potential map grid is empty".into()));
        }
        if grid.r.iter().any(|r| !r.is_finite()) || grid.z.iter().any(|z| !(*z > 0.0) || !z.is_finite()) {
            return Err(CliError::Config(
                "grid needs finite r and positive finite z".into(),
            ));
        }
        Ok(grid)
    }
}

impl TransportConfig {
    pub fn ramp(&self) -> Result<ThetaRamp, CliError> {
        match &self.ramp {
            RampSpec::Linear { t0, t1, theta0, theta1 } => {
                ThetaRamp::linear(*t0, *t1, *theta0, *theta1).map_err(config_err)
            }
            RampSpec::Samples { samples } => ThetaRamp::new(samples.clone()).map_err(config_err),
        }
    }
}

impl ProtocolConfig {
    pub fn initial_bits(&self) -> Vec<bool> {
        match &self.initial {
            Some(bits) => bits.iter().map(|&b| b == 1).collect(),
            None => vec![false; self.qubits.len()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse(r#"{"trap_scan": {"radii": [1.0]}, "bogus": 1}"#).is_err());
        assert!(RunConfig::parse(r#"{"trap_scan": {"radii": [1.0], "bogus": 1}}"#).is_err());
    }

    #[test]
    fn invariants_checked_at_load() {
        assert!(RunConfig::parse(r#"{"trap_scan": {"radii": []}}"#).is_err());
        assert!(RunConfig::parse(r#"{"trap_scan": {"radii": [0.5]}}"#).is_err());
        assert!(RunConfig::parse(r#"{"tolerance": -1}"#).is_err());
        let ok = RunConfig::parse(r#"{"experiment": "trap-scan", "format": "json", "trap_scan": {"radii": [1, 2]}}"#)
            .unwrap();
        assert_eq!(ok.format, Some(Format::Json));
    }

    #[test]
    fn axis_specs() {
        let cfg = RunConfig::parse(
            r#"{"potential_map": {"aperture_radius": 1, "r": [-0.5, 0, 0.5], "z": {"lo": 0.5, "hi": 1.5, "n": 3}}}"#,
        )
        .unwrap();
        let grid = cfg.potential_map.unwrap().grid().unwrap();
        assert_eq!(grid.r, vec![-0.5, 0.0, 0.5]);
        assert_eq!(grid.z, vec![0.5, 1.0, 1.5]);
    }

    #[test]
    fn ramp_specs() {
        let cfg = RunConfig::parse(
            r#"{"transport": {"ramp": {"t0": 0, "t1": 1, "theta0": 0, "theta1": 1}}}"#,
        )
        .unwrap();
        assert!(cfg.transport.unwrap().ramp().unwrap().len() > 64);
        let cfg = RunConfig::parse(r#"{"transport": {"ramp": {"samples": [[0, 0], [1, 0.1]]}}}"#).unwrap();
        assert_eq!(cfg.transport.unwrap().ramp().unwrap().len(), 2);
        assert!(RunConfig::parse(r#"{"transport": {"ramp": {"samples": [[0, 0], [0, 0.1]]}}}"#).is_err());
    }
}
