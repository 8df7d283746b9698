//! Run configuration: JSON schema, defaults, validation and sweep expansion.

use std::path::PathBuf;

use chlab::initial::{Coefficient, InitialCondition};
use chlab::peakon::Domain;
use chlab::scaling::{CurrentProfile, PhysicalParams};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

pub const DEFAULT_N: usize = 256;
pub const DEFAULT_LENGTH: f64 = 40.0;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T: f64 = 1.0;
pub const DEFAULT_RECORD_EVERY: usize = 100;
pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;
pub const DEFAULT_BREAKING_THRESHOLD: f64 = -10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Peakon,
    Scale,
    VerifyVariational,
    VerifyLinear,
    Sweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(rename = "L", default = "default_length")]
    pub length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n: DEFAULT_N,
            length: DEFAULT_LENGTH,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeakonConfig {
    pub positions: Vec<f64>,
    pub momenta: Vec<f64>,
    #[serde(default = "default_domain")]
    pub domain: Domain,
}

/// Surface profile `A sin(k ξ + phase)` for the linear-solution check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearConfig {
    #[serde(default = "default_linear_amplitude")]
    pub amplitude: f64,
    #[serde(default = "one")]
    pub wavenumber: f64,
    #[serde(default)]
    pub phase: f64,
    /// Grid points per period in `x`.
    #[serde(default = "default_linear_n")]
    pub n: usize,
    /// Levels in `z ∈ [0, 1]`.
    #[serde(default = "default_nz")]
    pub nz: usize,
    #[serde(default = "default_linear_times")]
    pub times: Vec<f64>,
    /// `𝓕` for the arbitrary regime; defaults to a modal current with the
    /// physical `c₀`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current: Option<CurrentProfile>,
}

impl Default for LinearConfig {
    fn default() -> Self {
        Self {
            amplitude: default_linear_amplitude(),
            wavenumber: 1.0,
            phase: 0.0,
            n: default_linear_n(),
            nz: default_nz(),
            times: default_linear_times(),
            current: None,
        }
    }
}

/// Offset `c` of the action.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum OffsetConfig {
    Zero,
    Constant { c0: f64 },
    /// `ω₀√(g h₀)/g + c₀` from the physical parameters.
    Shear,
    /// `F(x) = mean + amplitude sin x`.
    Field { mean: f64, amplitude: f64 },
}

impl OffsetConfig {
    pub fn label(&self) -> String {
        match self {
            OffsetConfig::Zero => "zero".into(),
            OffsetConfig::Constant { c0 } => format!("constant({c0})"),
            OffsetConfig::Shear => "shear".into(),
            OffsetConfig::Field { mean, amplitude } => format!("field({mean}+{amplitude}sin)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationalConfig {
    /// Spatial points on `[0, 2π)`.
    #[serde(default = "default_variational_n")]
    pub n: usize,
    /// Time resolutions of the convergence table, each even and ≥ 16.
    #[serde(default = "default_steps")]
    pub steps: Vec<usize>,
    #[serde(default = "default_offsets")]
    pub offsets: Vec<OffsetConfig>,
    /// Largest gap accepted at the finest resolution.
    #[serde(default = "default_max_gap")]
    pub max_gap: f64,
    /// Smallest observed convergence order accepted between resolutions.
    #[serde(default = "default_min_order")]
    pub min_order: f64,
    /// Spatial points for the randomized formula and invariance checks.
    #[serde(default = "default_oracle_n")]
    pub oracle_n: usize,
    /// Random (γ, φ) pairs for the variation-formula oracles.
    #[serde(default = "default_formula_pairs")]
    pub formula_pairs: usize,
    /// Random relabelings for the right-invariance check.
    #[serde(default = "default_relabelings")]
    pub relabelings: usize,
}

impl Default for VariationalConfig {
    fn default() -> Self {
        Self {
            n: default_variational_n(),
            steps: default_steps(),
            offsets: default_offsets(),
            max_gap: default_max_gap(),
            min_order: default_min_order(),
            oracle_n: default_oracle_n(),
            formula_pairs: default_formula_pairs(),
            relabelings: default_relabelings(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dotted path into the child configuration, e.g. `grid.n`.
    pub parameter: String,
    pub values: Vec<Value>,
}

/// Axis values of one sweep child, as `(dotted path, value)` pairs.
pub type Assignment = Vec<(String, Value)>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Command run by every child.
    pub command: Command,
    pub axes: Vec<SweepAxis>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Coefficient profile of the generalized equation.
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<Coefficient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialCondition>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(rename = "T", default = "default_t")]
    pub t_final: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Retained fraction of the spectrum; `null` disables filtering.
    #[serde(default = "default_dealias")]
    pub dealias: Option<f64>,
    #[serde(default = "default_breaking_threshold")]
    pub breaking_threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peakons: Option<PeakonConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<LinearConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variational: Option<VariationalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_n() -> usize {
    DEFAULT_N
}
fn default_length() -> f64 {
    DEFAULT_LENGTH
}
fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_t() -> f64 {
    DEFAULT_T
}
fn default_record_every() -> usize {
    DEFAULT_RECORD_EVERY
}
fn default_dealias() -> Option<f64> {
    Some(DEFAULT_DEALIAS)
}
fn default_breaking_threshold() -> f64 {
    DEFAULT_BREAKING_THRESHOLD
}
fn default_domain() -> Domain {
    Domain::Line
}
fn default_linear_amplitude() -> f64 {
    0.1
}
fn one() -> f64 {
    1.0
}
fn default_linear_n() -> usize {
    64
}
fn default_nz() -> usize {
    17
}
fn default_linear_times() -> Vec<f64> {
    vec![0.0, 0.37, 1.1]
}
fn default_variational_n() -> usize {
    128
}
fn default_steps() -> Vec<usize> {
    vec![32, 64, 128]
}
fn default_offsets() -> Vec<OffsetConfig> {
    vec![
        OffsetConfig::Zero,
        OffsetConfig::Constant { c0: 0.7 },
        OffsetConfig::Shear,
        OffsetConfig::Field {
            mean: 0.5,
            amplitude: 0.2,
        },
    ]
}
fn default_max_gap() -> f64 {
    1e-4
}
fn default_min_order() -> f64 {
    4.0
}
fn default_oracle_n() -> usize {
    256
}
fn default_formula_pairs() -> usize {
    10
}
fn default_relabelings() -> usize {
    5
}

/// Parameters used when a command needs physical inputs and none are given.
pub fn default_physical() -> PhysicalParams {
    PhysicalParams {
        g: 9.81,
        h0: 1.0,
        a: 0.1,
        lambda: 20.0,
        omega0: 0.4,
        c0: 0.7,
        rho: 1000.0,
        p0: 101_325.0,
    }
}

const TOP_LEVEL_KEYS: &[&str] = &[
    "command",
    "grid",
    "kappa",
    "F",
    "initial",
    "dt",
    "T",
    "record_every",
    "dealias",
    "breaking_threshold",
    "peakons",
    "physical",
    "linear",
    "variational",
    "output",
    "sweep",
];

/// Parse and validate a JSON configuration. Unknown top-level keys and all
/// semantic problems are reported together.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::validation(format!("malformed JSON: {e}")))?;
    from_value(value)
}

pub fn from_value(value: Value) -> Result<RunConfig> {
    let Value::Object(map) = &value else {
        return Err(CliError::validation("configuration must be a JSON object"));
    };
    let unknown: Vec<String> = map
        .keys()
        .filter(|k| !TOP_LEVEL_KEYS.contains(&k.as_str()))
        .map(|k| format!("unknown key `{k}`"))
        .collect();
    if !unknown.is_empty() {
        return Err(CliError::Validation(unknown));
    }
    let config: RunConfig = serde_json::from_value(value).map_err(|e| CliError::validation(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

fn positive(errors: &mut Vec<String>, name: &str, v: f64) {
    if !(v.is_finite() && v > 0.0) {
        errors.push(format!("{name} must be positive and finite, got {v}"));
    }
}

impl RunConfig {
    /// Every problem with the configuration, or `Ok` if there are none.
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        if self.grid.n < 8 || !self.grid.n.is_multiple_of(2) {
            errors.push(format!("grid.n must be even and at least 8, got {}", self.grid.n));
        }
        positive(&mut errors, "grid.L", self.grid.length);
        positive(&mut errors, "dt", self.dt);
        positive(&mut errors, "T", self.t_final);
        if self.record_every == 0 {
            errors.push("record_every must be at least 1".into());
        }
        if self.kappa.is_some() && self.coefficient.is_some() {
            errors.push("exclusive coefficient settings: set either `kappa` or `F`, not both".into());
        }
        if let Some(k) = self.kappa {
            if !k.is_finite() {
                errors.push(format!("kappa must be finite, got {k}"));
            }
        }
        if let Some(d) = self.dealias {
            if !(d > 0.0 && d <= 1.0) {
                errors.push(format!("dealias must lie in (0, 1] or be null, got {d}"));
            }
        }
        if self.breaking_threshold.is_nan() {
            errors.push("breaking_threshold must not be NaN".into());
        }
        if let Some(p) = &self.physical {
            if let Err(e) = p.validate() {
                errors.push(format!("physical: {e}"));
            }
        }
        match self.command {
            Command::Simulate => {
                if self.initial.is_none() {
                    errors.push("simulate needs an `initial` condition".into());
                }
                if let Some(InitialCondition::MollifiedPeakons { positions, momenta, width }) = &self.initial {
                    if positions.len() != momenta.len() || positions.is_empty() {
                        errors.push("initial: positions and momenta must be non-empty and of equal length".into());
                    }
                    let dx = self.grid.length / self.grid.n.max(1) as f64;
                    if *width < 4.0 * dx {
                        errors.push(format!("initial: mollifier width {width} is below 4 dx = {}", 4.0 * dx));
                    }
                }
            }
            Command::Peakon => match &self.peakons {
                None => errors.push("peakon needs a `peakons` section".into()),
                Some(p) => {
                    if p.positions.len() != p.momenta.len() || p.positions.is_empty() {
                        errors.push("peakons: positions and momenta must be non-empty and of equal length".into());
                    }
                    if let Domain::Periodic { length } = p.domain {
                        positive(&mut errors, "peakons.domain.length", length);
                    }
                }
            },
            Command::Scale => {
                if self.physical.is_none() {
                    errors.push("scale needs a `physical` section".into());
                }
            }
            Command::VerifyLinear => {
                if let Some(l) = &self.linear {
                    positive(&mut errors, "linear.wavenumber", l.wavenumber);
                    if !l.amplitude.is_finite() {
                        errors.push("linear.amplitude must be finite".into());
                    }
                    if l.n < 8 {
                        errors.push(format!("linear.n must be at least 8, got {}", l.n));
                    }
                    if l.nz < 2 {
                        errors.push(format!("linear.nz must be at least 2, got {}", l.nz));
                    }
                    if l.times.is_empty() {
                        errors.push("linear.times must not be empty".into());
                    }
                }
            }
            Command::VerifyVariational => {
                if let Some(v) = &self.variational {
                    if v.n < 8 {
                        errors.push(format!("variational.n must be at least 8, got {}", v.n));
                    }
                    if v.oracle_n < 8 {
                        errors.push(format!("variational.oracle_n must be at least 8, got {}", v.oracle_n));
                    }
                    if v.steps.is_empty() {
                        errors.push("variational.steps must not be empty".into());
                    }
                    for &m in &v.steps {
                        if m < 16 || m % 2 != 0 {
                            errors.push(format!("variational.steps: {m} is not even and at least 16"));
                        }
                    }
                    if v.offsets.is_empty() {
                        errors.push("variational.offsets must not be empty".into());
                    }
                    positive(&mut errors, "variational.max_gap", v.max_gap);
                }
            }
            Command::Sweep => {}
        }
        match (&self.sweep, self.command) {
            (None, Command::Sweep) => errors.push("sweep needs a `sweep` section".into()),
            (Some(_), c) if c != Command::Sweep => errors.push("`sweep` is only allowed with command `sweep`".into()),
            (Some(s), _) => {
                if s.command == Command::Sweep {
                    errors.push("sweep.command cannot itself be `sweep`".into());
                }
                if s.axes.is_empty() {
                    errors.push("sweep.axes must not be empty".into());
                }
                for axis in &s.axes {
                    if axis.values.is_empty() {
                        errors.push(format!("sweep axis `{}` has no values", axis.parameter));
                    }
                    if axis.parameter.is_empty() || axis.parameter.split('.').any(str::is_empty) {
                        errors.push(format!("sweep axis `{}` is not a dotted path", axis.parameter));
                    }
                    if axis.parameter == "command" || axis.parameter.starts_with("sweep") {
                        errors.push(format!("sweep axis `{}` cannot be swept", axis.parameter));
                    }
                }
                if errors.is_empty() {
                    if let Err(CliError::Validation(child)) = self.expand_sweep() {
                        errors.extend(child);
                    }
                }
            }
            _ => {}
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(errors))
        }
    }

    pub fn physical_or_default(&self) -> PhysicalParams {
        self.physical.unwrap_or_else(default_physical)
    }

    /// Resolved child configurations of a sweep, in cartesian order with the
    /// last axis varying fastest, each paired with its axis assignments.
    pub fn expand_sweep(&self) -> Result<Vec<(Assignment, RunConfig)>> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::validation("not a sweep configuration"))?;
        let mut base = serde_json::to_value(self).expect("configuration serializes");
        let obj = base.as_object_mut().expect("configuration is an object");
        obj.remove("sweep");
        obj.insert("command".into(), serde_json::to_value(sweep.command).expect("command serializes"));
        obj.remove("output");

        let mut combos: Vec<Assignment> = vec![Vec::new()];
        for axis in &sweep.axes {
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |v| {
                        let mut next = prefix.clone();
                        next.push((axis.parameter.clone(), v.clone()));
                        next
                    })
                })
                .collect();
        }

        let mut children = Vec::with_capacity(combos.len());
        let mut errors = Vec::new();
        for (index, assignment) in combos.into_iter().enumerate() {
            let mut value = base.clone();
            for (path, v) in &assignment {
                set_path(&mut value, path, v.clone());
            }
            match from_value(value) {
                Ok(child) => children.push((assignment, child)),
                Err(CliError::Validation(es)) => {
                    errors.extend(es.into_iter().map(|e| format!("sweep child {index}: {e}")));
                }
                Err(e) => return Err(e),
            }
        }
        if errors.is_empty() {
            Ok(children)
        } else {
            Err(CliError::Validation(errors))
        }
    }
}

// Set a dotted path, creating intermediate objects as needed.
fn set_path(root: &mut Value, path: &str, v: Value) {
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    for part in &parts[..parts.len() - 1] {
        if !node.get(part).is_some_and(Value::is_object) {
            node[*part] = Value::Object(Default::default());
        }
        node = node.get_mut(part).expect("just inserted");
    }
    node[parts[parts.len() - 1]] = v;
}
