//! JSON configuration with units carried in the key names.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use coupler_core::exact::{GridSpec, KineticStencil, UncoupledBias};
use coupler_core::units::{ghz_to_rad_s, mhz_to_rad_s, rad_s_to_ghz, rad_s_to_mhz};
use coupler_core::CircuitParams;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SweepError};

/// One of the four ways of computing the couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingPath {
    Weak,
    Linear,
    Perturbative,
    Exact,
}

impl CouplingPath {
    pub const ALL: [CouplingPath; 4] = [
        CouplingPath::Weak,
        CouplingPath::Linear,
        CouplingPath::Perturbative,
        CouplingPath::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CouplingPath::Weak => "weak",
            CouplingPath::Linear => "linear",
            CouplingPath::Perturbative => "perturbative",
            CouplingPath::Exact => "exact",
        }
    }
}

impl FromStr for CouplingPath {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self> {
        CouplingPath::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| {
                SweepError::Config(format!(
                    "unknown path '{s}' (expected weak, linear, perturbative or exact)"
                ))
            })
    }
}

impl fmt::Display for CouplingPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a phase given either in radians ("1.88") or in units of π
/// ("0.598pi", "-pi", "2π").
pub fn parse_flux(text: &str) -> Result<f64> {
    let t = text.trim();
    let bad = || SweepError::Config(format!("cannot parse flux '{text}'"));
    let stripped = t.strip_suffix("pi").or_else(|| t.strip_suffix('π'));
    let value = match stripped {
        Some(coef) => {
            let coef = coef.trim().trim_end_matches('*').trim();
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            c * PI
        }
        None => t.parse::<f64>().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// A phase in a config file: a bare number in radians or a string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FluxValue {
    Radians(f64),
    Text(String),
}

impl FluxValue {
    pub fn radians(&self) -> Result<f64> {
        match self {
            FluxValue::Radians(r) if r.is_finite() => Ok(*r),
            FluxValue::Radians(r) => Err(SweepError::Config(format!("flux {r} is not finite"))),
            FluxValue::Text(s) => parse_flux(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    #[serde(rename = "C1_fF")]
    pub c1_ff: f64,
    #[serde(rename = "C2_fF")]
    pub c2_ff: f64,
    #[serde(rename = "Lj1_nH")]
    pub lj1_nh: f64,
    #[serde(rename = "Lj2_nH")]
    pub lj2_nh: f64,
    #[serde(rename = "L01_pH")]
    pub l01_ph: f64,
    #[serde(rename = "L02_pH")]
    pub l02_ph: f64,
    #[serde(rename = "LT_nH")]
    pub lt_nh: f64,
}

impl CircuitFile {
    pub fn to_params(&self) -> CircuitParams {
        CircuitParams {
            c1: self.c1_ff / 1e15,
            c2: self.c2_ff / 1e15,
            lj1: self.lj1_nh / 1e9,
            lj2: self.lj2_nh / 1e9,
            l01: self.l01_ph / 1e12,
            l02: self.l02_ph / 1e12,
            lt: self.lt_nh / 1e9,
            ..CircuitParams::reference_circuit()
        }
    }

    pub fn from_params(p: &CircuitParams) -> Self {
        Self {
            c1_ff: p.c1 * 1e15,
            c2_ff: p.c2 * 1e15,
            lj1_nh: p.lj1 * 1e9,
            lj2_nh: p.lj2 * 1e9,
            l01_ph: p.l01 * 1e12,
            l02_ph: p.l02 * 1e12,
            lt_nh: p.lt * 1e9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub n_points: Option<usize>,
    pub span: Option<FluxValue>,
    pub stencil: Option<KineticStencil>,
}

/// The config file as written by the user; everything except the circuit
/// has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub circuit: CircuitFile,
    pub flux_start: Option<FluxValue>,
    pub flux_stop: Option<FluxValue>,
    pub n_flux: Option<usize>,
    pub paths: Option<Vec<CouplingPath>>,
    pub grid: Option<GridFile>,
    #[serde(rename = "omega_q_weak_GHz")]
    pub omega_q_weak_ghz: Option<f64>,
    #[serde(rename = "eta_override_MHz")]
    pub eta_override_mhz: Option<f64>,
    pub eta_bias: Option<UncoupledBias>,
    pub output_prefix: Option<String>,
    pub workers: Option<usize>,
}

pub const DEFAULT_N_FLUX: usize = 241;
/// Qubit frequency used by the weak-coupling formula.
pub const DEFAULT_OMEGA_Q_WEAK_GHZ: f64 = 5.62;
pub const DEFAULT_OUTPUT_PREFIX: &str = "sweep";

/// Validated configuration, SI units throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub circuit: CircuitParams,
    pub flux_start: f64,
    pub flux_stop: f64,
    pub n_flux: usize,
    pub paths: BTreeSet<CouplingPath>,
    pub grid: GridSpec,
    /// rad/s.
    pub omega_q_weak: f64,
    /// rad/s; replaces the computed single-qubit anharmonicity.
    pub eta_override: Option<f64>,
    pub eta_bias: UncoupledBias,
    pub output_prefix: String,
    pub workers: Option<usize>,
}

impl SweepConfig {
    pub fn from_file_form(file: &ConfigFile) -> Result<Self> {
        let defaults = GridSpec::default();
        let grid_file = file.grid.clone().unwrap_or_default();
        let grid = GridSpec {
            n_points: grid_file.n_points.unwrap_or(defaults.n_points),
            span: match &grid_file.span {
                Some(s) => s.radians()?,
                None => defaults.span,
            },
            stencil: grid_file.stencil.unwrap_or(defaults.stencil),
        };
        let config = Self {
            circuit: file.circuit.to_params(),
            flux_start: match &file.flux_start {
                Some(f) => f.radians()?,
                None => 0.0,
            },
            flux_stop: match &file.flux_stop {
                Some(f) => f.radians()?,
                None => 2.0 * PI,
            },
            n_flux: file.n_flux.unwrap_or(DEFAULT_N_FLUX),
            paths: match &file.paths {
                Some(p) => p.iter().copied().collect(),
                None => CouplingPath::ALL.into_iter().collect(),
            },
            grid,
            omega_q_weak: ghz_to_rad_s(file.omega_q_weak_ghz.unwrap_or(DEFAULT_OMEGA_Q_WEAK_GHZ)),
            eta_override: file.eta_override_mhz.map(mhz_to_rad_s),
            eta_bias: file.eta_bias.unwrap_or_default(),
            output_prefix: file
                .output_prefix
                .clone()
                .unwrap_or_else(|| DEFAULT_OUTPUT_PREFIX.to_string()),
            workers: file.workers,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_str(text: &str, origin: &Path) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|source| SweepError::Json {
            path: origin.to_path_buf(),
            source,
        })?;
        Self::from_file_form(&file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SweepError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(SweepError::Config(msg));
        if let Err(e) = self.circuit.validate() {
            return cfg(e.to_string());
        }
        if let Err(e) = self.grid.validate() {
            return cfg(e.to_string());
        }
        if self.n_flux < 2 {
            return cfg(format!("n_flux must be at least 2, got {}", self.n_flux));
        }
        if self.flux_stop.is_nan() || self.flux_start.is_nan() || self.flux_stop <= self.flux_start
        {
            return cfg(format!(
                "flux_stop ({}) must exceed flux_start ({})",
                self.flux_stop, self.flux_start
            ));
        }
        if self.paths.is_empty() {
            return cfg("paths must not be empty".into());
        }
        if !(self.omega_q_weak.is_finite() && self.omega_q_weak > 0.0) {
            return cfg("omega_q_weak_GHz must be positive".into());
        }
        if let Some(eta) = self.eta_override {
            if !(eta.is_finite() && eta > 0.0) {
                return cfg("eta_override_MHz must be positive".into());
            }
        }
        if self.output_prefix.trim().is_empty() {
            return cfg("output_prefix must not be empty".into());
        }
        if self.workers == Some(0) {
            return cfg("workers must be at least 1".into());
        }
        Ok(())
    }

    pub fn has(&self, path: CouplingPath) -> bool {
        self.paths.contains(&path)
    }

    /// External flux of sweep point `index`.
    pub fn flux(&self, index: usize) -> f64 {
        let t = index as f64 / (self.n_flux - 1) as f64;
        self.flux_start + (self.flux_stop - self.flux_start) * t
    }

    pub fn fluxes(&self) -> Vec<f64> {
        (0..self.n_flux).map(|i| self.flux(i)).collect()
    }

    /// File form with every default filled in, for echoing.
    pub fn resolved(&self) -> ConfigFile {
        ConfigFile {
            circuit: CircuitFile::from_params(&self.circuit),
            flux_start: Some(FluxValue::Radians(self.flux_start)),
            flux_stop: Some(FluxValue::Radians(self.flux_stop)),
            n_flux: Some(self.n_flux),
            paths: Some(self.paths.iter().copied().collect()),
            grid: Some(GridFile {
                n_points: Some(self.grid.n_points),
                span: Some(FluxValue::Radians(self.grid.span)),
                stencil: Some(self.grid.stencil),
            }),
            omega_q_weak_ghz: Some(rad_s_to_ghz(self.omega_q_weak)),
            eta_override_mhz: self.eta_override.map(rad_s_to_mhz),
            eta_bias: Some(self.eta_bias),
            output_prefix: Some(self.output_prefix.clone()),
            workers: self.workers,
        }
    }

    pub fn csv_path(&self) -> PathBuf {
        PathBuf::from(format!("{}.csv", self.output_prefix))
    }

    pub fn plot_path(&self) -> PathBuf {
        PathBuf::from(format!("{}.gp", self.output_prefix))
    }
}

/// The bundled reference configuration.
pub const REFERENCE_CONFIG_JSON: &str = include_str!("../configs/tableI.json");

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_circuit() -> SweepConfig {
        SweepConfig::from_json_str(REFERENCE_CONFIG_JSON, Path::new("tableI.json")).unwrap()
    }

    #[test]
    fn bundled_config_is_reference_circuit() {
        let c = reference_circuit();
        let p = CircuitParams::reference_circuit();
        for (a, b) in [
            (c.circuit.c1, p.c1),
            (c.circuit.lj1, p.lj1),
            (c.circuit.l01, p.l01),
            (c.circuit.lt, p.lt),
        ] {
            assert_eq!(a, b);
        }
        assert_eq!(c.n_flux, DEFAULT_N_FLUX);
        assert_eq!(c.paths.len(), 4);
        assert_eq!(c.grid, GridSpec::default());
    }

    #[test]
    fn flux_parsing() {
        assert_eq!(parse_flux("0").unwrap(), 0.0);
        assert!((parse_flux("0.598pi").unwrap() - 0.598 * PI).abs() < 1e-15);
        assert!((parse_flux("pi").unwrap() - PI).abs() < 1e-15);
        assert!((parse_flux("-pi").unwrap() + PI).abs() < 1e-15);
        assert!((parse_flux("2π").unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!((parse_flux(" 1.5 ").unwrap() - 1.5).abs() < 1e-15);
        assert!(parse_flux("half").is_err());
        assert!(parse_flux("inf").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = REFERENCE_CONFIG_JSON.replacen("\"circuit\"", "\"n_flx\": 3, \"circuit\"", 1);
        assert!(matches!(
            SweepConfig::from_json_str(&text, Path::new("x.json")),
            Err(SweepError::Json { .. })
        ));
        let text = REFERENCE_CONFIG_JSON.replacen("\"C1_fF\"", "\"C1_pF\": 1, \"C1_fF\"", 1);
        assert!(SweepConfig::from_json_str(&text, Path::new("x.json")).is_err());
    }

    #[test]
    fn invariants_are_enforced() {
        let base: ConfigFile = serde_json::from_str(REFERENCE_CONFIG_JSON).unwrap();
        let mut f = base.clone();
        f.n_flux = Some(1);
        assert!(SweepConfig::from_file_form(&f).is_err());
        let mut f = base.clone();
        f.flux_stop = Some(FluxValue::Text("0".into()));
        assert!(SweepConfig::from_file_form(&f).is_err());
        let mut f = base.clone();
        f.paths = Some(vec![]);
        assert!(SweepConfig::from_file_form(&f).is_err());
        let mut f = base.clone();
        f.circuit.lt_nh = 0.3;
        assert!(matches!(
            SweepConfig::from_file_form(&f),
            Err(SweepError::Config(_))
        ));
        let mut f = base;
        f.grid = Some(GridFile {
            n_points: Some(60),
            ..GridFile::default()
        });
        assert!(SweepConfig::from_file_form(&f).is_err());
    }

    #[test]
    fn resolved_form_round_trips() {
        let c = reference_circuit();
        let again = SweepConfig::from_file_form(&c.resolved()).unwrap();
        assert_eq!(c.paths, again.paths);
        assert_eq!(c.grid, again.grid);
        assert_eq!(c.n_flux, again.n_flux);
        assert!((c.omega_q_weak / again.omega_q_weak - 1.0).abs() < 1e-15);
        assert!((c.circuit.lj1 / again.circuit.lj1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fluxes_span_the_range() {
        let c = reference_circuit();
        let f = c.fluxes();
        assert_eq!(f.len(), 241);
        assert_eq!(f[0], 0.0);
        assert!((f[240] - 2.0 * PI).abs() < 1e-15);
        assert!((f[120] - PI).abs() < 1e-15);
    }
}
