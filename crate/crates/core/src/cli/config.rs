//! Run configuration, read from a TOML file.
//!
//! ```toml
//! [params]
//! y1 = 2.0
//! y2 = 4.0
//! q1 = 2.0
//! q2 = 3.0
//! rho = 0.5
//!
//! [initial_prices]
//! p1 = 2.0
//! p2 = 1.0
//!
//! [discrete]            # optional, likewise [ode], [sde], [sweep], [portrait]
//! max_steps = 10000
//! ```
//!
//! Every section rejects unknown keys. Omitted options take the defaults
//! below.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::continuous::{IntegratorConfig, Method};
use crate::discrete::DiscreteConfig;
use crate::model::{ModelParams, PriceState};
use crate::sampling::SampleRanges;
use crate::stochastic::{NoiseSpec, ShockMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Equilibrium,
    Zones,
    Discrete,
    Ode,
    Sde,
    Sweep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Equilibrium => "equilibrium",
            Mode::Zones => "zones",
            Mode::Discrete => "discrete",
            Mode::Ode => "ode",
            Mode::Sde => "sde",
            Mode::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Informational; the mode given on the command line wins.
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub params: Option<ModelParams>,
    #[serde(default)]
    pub initial_prices: Option<PriceState>,
    #[serde(default)]
    pub discrete: DiscreteOptions,
    #[serde(default)]
    pub ode: OdeOptions,
    #[serde(default)]
    pub sde: SdeOptions,
    #[serde(default)]
    pub sweep: SweepOptions,
    /// Field grid written by the `ode` and `zones` modes.
    #[serde(default)]
    pub portrait: Option<PortraitOptions>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscreteOptions {
    pub max_steps: usize,
    pub tol: f64,
    pub enforce_orientation: bool,
}

impl Default for DiscreteOptions {
    fn default() -> Self {
        let d = DiscreteConfig::default();
        Self { max_steps: d.max_steps, tol: d.tol, enforce_orientation: d.enforce_orientation }
    }
}

impl DiscreteOptions {
    pub fn to_config(self) -> DiscreteConfig {
        DiscreteConfig { max_steps: self.max_steps, tol: self.tol, enforce_orientation: self.enforce_orientation }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OdeOptions {
    pub dt: f64,
    pub horizon: f64,
    pub method: Method,
    pub dt_min: f64,
    pub stationary_tol: f64,
    /// Write every n-th sample to the trajectory file.
    pub every: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        let c = IntegratorConfig::default();
        Self { dt: c.dt, horizon: c.horizon, method: c.method, dt_min: c.dt_min, stationary_tol: c.stationary_tol, every: 1 }
    }
}

impl OdeOptions {
    pub fn to_config(self) -> IntegratorConfig {
        IntegratorConfig {
            dt: self.dt,
            horizon: self.horizon,
            method: self.method,
            dt_min: self.dt_min,
            stationary_tol: self.stationary_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SdeOptions {
    pub dt: f64,
    pub horizon: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub seed: u64,
    pub shock_mode: ShockMode,
    /// Number of paths; path `i` uses seed `seed + i`.
    pub paths: usize,
    pub every: usize,
}

impl Default for SdeOptions {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            horizon: 10.0,
            sigma1: 0.01,
            sigma2: 0.01,
            seed: 0,
            shock_mode: ShockMode::Symmetric,
            paths: 1,
            every: 1,
        }
    }
}

impl SdeOptions {
    pub fn noise(&self) -> NoiseSpec {
        NoiseSpec { sigma1: self.sigma1, sigma2: self.sigma2, seed: self.seed, shock_mode: self.shock_mode }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepOptions {
    pub draws: usize,
    pub seed: u64,
    /// Redraws allowed per draw while looking for the target zone.
    pub max_attempts: usize,
    /// Cycle through the zone strata; otherwise draw uniformly.
    pub stratify: bool,
    /// Grid size of the brute-force check; 0 disables it.
    pub oracle_grid: usize,
    pub ranges: SampleRanges,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { draws: 1000, seed: 0, max_attempts: 20_000, stratify: true, oracle_grid: 0, ranges: SampleRanges::default() }
    }
}

pub const MAX_DRAWS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PortraitOptions {
    pub p1: [f64; 2],
    pub p2: [f64; 2],
    pub n1: usize,
    pub n2: usize,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        Self { p1: [0.1, 3.0], p2: [0.1, 3.0], n1: 50, n2: 50 }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Apply a seed given on the command line to every seeded mode.
    pub fn override_seed(&mut self, seed: u64) {
        self.sde.seed = seed;
        self.sweep.seed = seed;
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        let p = self.params.ok_or_else(|| CliError::Config("missing [params] section".into()))?;
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }

    pub fn prices(&self) -> Result<PriceState, CliError> {
        let p = self.initial_prices.ok_or_else(|| CliError::Config("missing [initial_prices] section".into()))?;
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if p.p1 == 0.0 && p.p2 == 0.0 {
            return Err(CliError::Config("initial prices cannot both be zero".into()));
        }
        Ok(p)
    }

    /// Check everything `mode` needs before running it.
    pub fn validate(&self, mode: Mode) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if mode != Mode::Sweep {
            self.params()?;
            self.prices()?;
        }
        match mode {
            Mode::Equilibrium | Mode::Zones => {}
            Mode::Discrete => {
                let d = self.discrete;
                if !(d.tol.is_finite() && d.tol >= 0.0) {
                    return bad(format!("discrete.tol must be finite and >= 0, got {}", d.tol));
                }
            }
            Mode::Ode => {
                let o = self.ode;
                if !(o.dt.is_finite() && o.dt > 0.0 && o.horizon.is_finite() && o.horizon >= 0.0) {
                    return bad(format!("ode needs dt > 0 and horizon >= 0, got dt = {}, horizon = {}", o.dt, o.horizon));
                }
                if !(o.dt_min > 0.0 && o.stationary_tol >= 0.0) || o.every == 0 {
                    return bad("ode needs dt_min > 0, stationary_tol >= 0 and every >= 1".into());
                }
            }
            Mode::Sde => {
                let s = self.sde;
                if !(s.dt.is_finite() && s.dt > 0.0 && s.horizon.is_finite() && s.horizon >= 0.0) {
                    return bad(format!("sde needs dt > 0 and horizon >= 0, got dt = {}, horizon = {}", s.dt, s.horizon));
                }
                s.noise().validate().map_err(|e| CliError::Config(e.to_string()))?;
                if s.paths == 0 || s.every == 0 {
                    return bad("sde needs paths >= 1 and every >= 1".into());
                }
            }
            Mode::Sweep => {
                let s = self.sweep;
                if s.draws == 0 || s.draws > MAX_DRAWS {
                    return bad(format!("sweep.draws must lie in 1..={MAX_DRAWS}, got {}", s.draws));
                }
                if s.max_attempts == 0 {
                    return bad("sweep.max_attempts must be >= 1".into());
                }
                s.ranges.validate().map_err(CliError::Config)?;
            }
        }
        if let Some(g) = &self.portrait {
            let ok = |[lo, hi]: [f64; 2]| lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi;
            if !(ok(g.p1) && ok(g.p2) && g.n1 > 0 && g.n2 > 0) {
                return bad("portrait needs positive ordered ranges and n1, n2 >= 1".into());
            }
        }
        Ok(())
    }
}
