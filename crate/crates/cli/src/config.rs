//! Experiment specification: JSON schema, validation, defaults and
//! resolution into engine types.

use std::fmt;

use serde::{Deserialize, Serialize};

use pairwalk_core::integrator::IntegratorConfig;
use pairwalk_core::lattice::{InitialStateSpec, LatticeSpec};
use pairwalk_core::pulse::{Drive, GaussianPulse};

/// Desk-scale defaults for the figure presets.
pub const DEFAULT_N_SITES: usize = 400;
pub const DEFAULT_T_FINAL: f64 = 100.0;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_PULSE_WIDTH: f64 = 1.0;
pub const DEFAULT_PULSE_CENTER: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct ConfigError {
    /// Dotted path of the offending field, e.g. `pulse.impulse`.
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        ConfigError { field: field.to_string(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn default_hopping() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    #[serde(default = "default_n_sites")]
    pub n_sites: usize,
    #[serde(default = "default_hopping")]
    pub hopping: f64,
    pub interaction: f64,
}

fn default_n_sites() -> usize {
    DEFAULT_N_SITES
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateSection {
    pub width: f64,
    /// Half-separation d0 between the two packet centers (sites); both
    /// particles sit at N/2 when zero.
    #[serde(default)]
    pub offset: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    /// Time-integrated field I; mutually exclusive with `amplitude`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impulse: Option<f64>,
    /// Peak field B; mutually exclusive with `impulse`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default = "default_pulse_width")]
    pub width: f64,
    #[serde(default = "default_pulse_center")]
    pub center: f64,
}

fn default_pulse_width() -> f64 {
    DEFAULT_PULSE_WIDTH
}

fn default_pulse_center() -> f64 {
    DEFAULT_PULSE_CENTER
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub dt: f64,
    pub t_final: f64,
    pub record_interval: f64,
    pub marginal_interval: f64,
    pub norm_tolerance: f64,
    pub edge_tolerance: f64,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        IntegratorSection {
            dt: DEFAULT_DT,
            t_final: DEFAULT_T_FINAL,
            record_interval: d.record_interval,
            marginal_interval: d.marginal_interval,
            norm_tolerance: d.norm_tolerance,
            edge_tolerance: d.edge_tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObservablesSection {
    /// Relative-coordinate window |n1 - n2| <= w counted as bound.
    pub w_bound: usize,
}

impl Default for ObservablesSection {
    fn default() -> Self {
        ObservablesSection { w_bound: 1 }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impulse: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<Vec<f64>>,
}

impl SweepSection {
    pub fn is_empty(&self) -> bool {
        self.impulse.is_none() && self.interaction.is_none() && self.width.is_none()
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output directory; overridden by --out-dir and the environment default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub lattice: LatticeSection,
    pub initial_state: InitialStateSection,
    pub pulse: PulseSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub observables: ObservablesSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

/// Command-line overrides applied on top of a parsed spec.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    /// Halve n_sites and t_final (CI scale).
    pub fast: bool,
    pub dt: Option<f64>,
    pub n_sites: Option<usize>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text)
            .map_err(|e| ConfigError::new("(document)", e.to_string()))
    }

    pub fn apply_overrides(&mut self, ov: &Overrides) {
        if let Some(n) = ov.n_sites {
            self.lattice.n_sites = n;
        }
        if ov.fast {
            self.lattice.n_sites /= 2;
            self.integrator.t_final /= 2.0;
        }
        if let Some(dt) = ov.dt {
            self.integrator.dt = dt;
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.lattice.n_sites < 8 {
            return Err(ConfigError::new("lattice.n_sites", "must be at least 8"));
        }
        if !(self.lattice.interaction >= 0.0) {
            return Err(ConfigError::new("lattice.interaction", "must be >= 0"));
        }
        if !(self.lattice.hopping > 0.0) {
            return Err(ConfigError::new("lattice.hopping", "must be > 0"));
        }
        if !(self.initial_state.width > 0.0) {
            return Err(ConfigError::new("initial_state.width", "must be > 0"));
        }
        match (self.pulse.impulse, self.pulse.amplitude) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::new(
                    "pulse.impulse",
                    "impulse and amplitude are mutually exclusive; give exactly one",
                ))
            }
            (None, None) => {
                return Err(ConfigError::new(
                    "pulse.impulse",
                    "one of impulse or amplitude is required",
                ))
            }
            _ => {}
        }
        if !(self.pulse.width > 0.0) {
            return Err(ConfigError::new("pulse.width", "must be > 0"));
        }
        if !(self.integrator.dt > 0.0) {
            return Err(ConfigError::new("integrator.dt", "must be > 0"));
        }
        if !(self.integrator.t_final >= 0.0) {
            return Err(ConfigError::new("integrator.t_final", "must be >= 0"));
        }
        if !(self.integrator.record_interval > 0.0) {
            return Err(ConfigError::new("integrator.record_interval", "must be > 0"));
        }
        if !(self.integrator.marginal_interval > 0.0) {
            return Err(ConfigError::new("integrator.marginal_interval", "must be > 0"));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.is_empty() {
                return Err(ConfigError::new("sweep", "present but all axes missing"));
            }
            for (name, axis) in [
                ("sweep.impulse", &sweep.impulse),
                ("sweep.interaction", &sweep.interaction),
                ("sweep.width", &sweep.width),
            ] {
                if let Some(values) = axis {
                    if values.is_empty() {
                        return Err(ConfigError::new(name, "axis must be non-empty"));
                    }
                }
            }
            if let Some(us) = &sweep.interaction {
                if us.iter().any(|u| !(*u >= 0.0)) {
                    return Err(ConfigError::new("sweep.interaction", "values must be >= 0"));
                }
            }
            if let Some(ws) = &sweep.width {
                if ws.iter().any(|w| !(*w > 0.0)) {
                    return Err(ConfigError::new("sweep.width", "values must be > 0"));
                }
            }
        }
        // stability precondition checked here so bad time steps are rejected
        // before any work happens
        self.resolve()?;
        Ok(())
    }

    /// One grid point: a fully concrete run.
    pub fn resolve(&self) -> Result<ResolvedRun, ConfigError> {
        let lattice = LatticeSpec::new(self.lattice.n_sites, self.lattice.interaction)
            .map_err(|e| ConfigError::new("lattice", e.to_string()))?;
        let init = InitialStateSpec::centered(
            self.initial_state.width,
            self.initial_state.offset,
            self.lattice.n_sites,
        );
        let pulse = match (self.pulse.impulse, self.pulse.amplitude) {
            (Some(i), None) => GaussianPulse::from_impulse(i, self.pulse.width, self.pulse.center),
            (None, Some(b)) => GaussianPulse::new(b, self.pulse.width, self.pulse.center),
            _ => return Err(ConfigError::new("pulse", "exactly one of impulse/amplitude")),
        }
        .map_err(|e| ConfigError::new("pulse", e.to_string()))?;
        let integrator = IntegratorConfig {
            dt: self.integrator.dt,
            t_final: self.integrator.t_final,
            record_interval: self.integrator.record_interval,
            marginal_interval: self.integrator.marginal_interval,
            norm_tolerance: self.integrator.norm_tolerance,
            edge_tolerance: self.integrator.edge_tolerance,
            w_bound: self.observables.w_bound,
        };
        integrator
            .validate(&lattice, pulse.peak_amplitude())
            .map_err(|e| ConfigError::new("integrator.dt", e.to_string()))?;
        Ok(ResolvedRun { lattice, init, pulse, integrator })
    }

    /// Expands the sweep axes into the cross-product grid; axes that are
    /// absent keep the base value. Without a sweep section this is the single
    /// base point.
    pub fn grid(&self) -> Vec<GridPoint> {
        let base_impulse = self.pulse.impulse.unwrap_or_else(|| {
            // amplitude-specified pulse: report its implied impulse
            GaussianPulse::new(
                self.pulse.amplitude.unwrap_or(0.0),
                self.pulse.width,
                self.pulse.center,
            )
            .map(|p| p.impulse())
            .unwrap_or(0.0)
        });
        let one = |v: &Option<Vec<f64>>, base: f64| -> Vec<f64> {
            v.clone().unwrap_or_else(|| vec![base])
        };
        let sweep = self.sweep.clone().unwrap_or_default();
        let impulses = one(&sweep.impulse, base_impulse);
        let interactions = one(&sweep.interaction, self.lattice.interaction);
        let widths = one(&sweep.width, self.initial_state.width);
        let mut grid = Vec::new();
        for &u in &interactions {
            for &w in &widths {
                for &i in &impulses {
                    grid.push(GridPoint { impulse: i, interaction: u, width: w });
                }
            }
        }
        grid
    }

    /// Spec for a single grid point (sweep section dropped).
    pub fn at_point(&self, point: &GridPoint) -> ExperimentSpec {
        let mut spec = self.clone();
        spec.sweep = None;
        spec.pulse.amplitude = None;
        spec.pulse.impulse = Some(point.impulse);
        spec.lattice.interaction = point.interaction;
        spec.initial_state.width = point.width;
        spec
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub impulse: f64,
    pub interaction: f64,
    pub width: f64,
}

/// Engine-level inputs for one run.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub lattice: LatticeSpec,
    pub init: InitialStateSpec,
    pub pulse: GaussianPulse,
    pub integrator: IntegratorConfig,
}
