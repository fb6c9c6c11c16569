//! JSON experiment configuration, command-line overrides and validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::channel::AngleRange;
use crate::pilot::Scenario;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed configuration: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("bad override {0:?}: expected key=value")]
    Override(String),
    #[error("invalid configuration: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

/// Which runner a configuration drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    NmseSweep,
    Tradeoff,
    Scaling,
    Contamination,
    PilotTable,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::NmseSweep,
        ExperimentKind::Tradeoff,
        ExperimentKind::Scaling,
        ExperimentKind::Contamination,
        ExperimentKind::PilotTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::NmseSweep => "nmse-sweep",
            ExperimentKind::Tradeoff => "tradeoff",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::Contamination => "contamination",
            ExperimentKind::PilotTable => "pilot-table",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A scalar or a list, for sweep axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

impl<T> From<T> for OneOrMany<T> {
    fn from(x: T) -> Self {
        OneOrMany::One(x)
    }
}

/// Linear energy. Accepts a number or a string such as `"10 dB"` or `"0.5"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "EnergyRepr", into = "f64")]
pub struct Energy(f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum EnergyRepr {
    Number(f64),
    Text(String),
}

impl Energy {
    pub fn new(linear: f64) -> Result<Self, String> {
        if linear.is_finite() && linear >= 0.0 {
            Ok(Energy(linear))
        } else {
            Err(format!("energy must be finite and non-negative, got {linear}"))
        }
    }

    pub fn linear(self) -> f64 {
        self.0
    }
}

impl From<Energy> for f64 {
    fn from(e: Energy) -> f64 {
        e.0
    }
}

impl FromStr for Energy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        let (number, db) = match t.strip_suffix("dB").or_else(|| t.strip_suffix("db")) {
            Some(head) => (head.trim(), true),
            None => (t, false),
        };
        let x: f64 = number.parse().map_err(|_| format!("cannot read energy {s:?}"))?;
        Energy::new(if db { 10f64.powf(x / 10.0) } else { x })
    }
}

impl TryFrom<EnergyRepr> for Energy {
    type Error = String;

    fn try_from(r: EnergyRepr) -> Result<Self, String> {
        match r {
            EnergyRepr::Number(x) => Energy::new(x),
            EnergyRepr::Text(s) => s.parse(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKind {
    /// Uniform linear array.
    #[default]
    #[serde(alias = "ula")]
    UniformLinear,
    /// Sorted random element positions, redrawn per angle realization.
    #[serde(alias = "random")]
    RandomPositions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArraysConfig {
    #[serde(rename = "M")]
    pub bs_antennas: OneOrMany<usize>,
    #[serde(rename = "N")]
    pub ue_antennas: OneOrMany<usize>,
    pub geometry: GeometryKind,
    /// Element spacing in wavelengths.
    pub spacing: f64,
}

impl Default for ArraysConfig {
    fn default() -> Self {
        Self {
            bs_antennas: 128.into(),
            ue_antennas: 32.into(),
            geometry: GeometryKind::UniformLinear,
            spacing: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsConfig {
    #[serde(rename = "L")]
    pub paths: OneOrMany<usize>,
    pub aoa_range: AngleRange,
    pub aod_range: AngleRange,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            paths: 4.into(),
            aoa_range: AngleRange::default_arrival(),
            aod_range: AngleRange::default_departure(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CellConfig {
    #[serde(rename = "K")]
    pub ue_count: OneOrMany<usize>,
    /// `σ_k² / σ_z²`, one per UE or a single shared value.
    pub sigma_ratios: Vec<f64>,
}

impl Default for CellConfig {
    fn default() -> Self {
        Self {
            ue_count: 2.into(),
            sigma_ratios: vec![1.0],
        }
    }
}

impl CellConfig {
    pub fn sigma_sq(&self, ue: usize) -> f64 {
        if self.sigma_ratios.len() == 1 {
            self.sigma_ratios[0]
        } else {
            self.sigma_ratios[ue]
        }
    }
}

/// Normalized pilot-energy grid used when none is configured: dense below 0.3, coarse above.
pub fn default_tradeoff_grid() -> Vec<f64> {
    let step = 0.021_357_142_857_142_9;
    let mut g = vec![0.0, 0.001];
    g.extend((0..14).map(|n| 0.022_357_142_857_142_9 + n as f64 * step));
    g.extend([0.4167, 0.53335, 0.65, 0.76665, 0.8833, 1.0]);
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyConfig {
    pub rho_tau: Option<OneOrMany<Energy>>,
    pub rho_d: Option<Energy>,
    pub total: Option<OneOrMany<Energy>>,
    pub normalized_grid: Option<Vec<f64>>,
}

impl EnergyConfig {
    pub fn pilot_energies(&self) -> Vec<f64> {
        self.rho_tau
            .as_ref()
            .map_or_else(|| vec![1.0], |r| r.to_vec().into_iter().map(Energy::linear).collect())
    }

    pub fn totals(&self) -> Vec<f64> {
        self.total
            .as_ref()
            .map_or_else(Vec::new, |r| r.to_vec().into_iter().map(Energy::linear).collect())
    }

    pub fn grid(&self) -> Vec<f64> {
        self.normalized_grid.clone().unwrap_or_else(default_tradeoff_grid)
    }
}

/// Pilot lengths: one list for every scenario or a list per scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PilotLengths {
    Shared(OneOrMany<usize>),
    PerScenario(BTreeMap<Scenario, OneOrMany<usize>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimingConfig {
    #[serde(rename = "T_c")]
    pub coherence_length: usize,
    #[serde(rename = "T_tau")]
    pub pilot_length: Option<PilotLengths>,
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self {
            coherence_length: 128,
            pilot_length: None,
        }
    }
}

impl TimingConfig {
    /// Configured pilot lengths for one scenario, or its default length.
    pub fn pilot_lengths(&self, scenario: Scenario, ue_count: usize, ue_antennas: usize, paths: usize) -> Vec<usize> {
        let fallback = || vec![scenario.default_pilot_length(ue_count, ue_antennas, paths)];
        match &self.pilot_length {
            None => fallback(),
            Some(PilotLengths::Shared(v)) => v.to_vec(),
            Some(PilotLengths::PerScenario(map)) => map.get(&scenario).map_or_else(fallback, OneOrMany::to_vec),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub angle_realizations: usize,
    pub noise_realizations: usize,
    pub seed: u64,
    /// Set false to skip Monte Carlo NMSE rows in NMSE sweeps.
    pub empirical: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            angle_realizations: 10,
            noise_realizations: 2000,
            seed: 0,
            empirical: true,
        }
    }
}

fn all_scenarios() -> OneOrMany<Scenario> {
    OneOrMany::Many(Scenario::ALL.to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "all_scenarios")]
    pub scenario: OneOrMany<Scenario>,
    #[serde(default)]
    pub arrays: ArraysConfig,
    #[serde(default)]
    pub paths: PathsConfig,
    #[serde(default)]
    pub cell: CellConfig,
    #[serde(default)]
    pub energy: EnergyConfig,
    #[serde(default)]
    pub timing: TimingConfig,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Thread count; defaults to the available parallelism.
    #[serde(default)]
    pub workers: Option<usize>,
}

/// Splits `key=value`. The value is read as JSON when possible and as a string otherwise.
pub fn parse_override(text: &str) -> Result<(String, Value), ConfigError> {
    let (key, raw) = text.split_once('=').ok_or_else(|| ConfigError::Override(text.into()))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(ConfigError::Override(text.into()));
    }
    let raw = raw.trim();
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((key.to_string(), value))
}

/// Sets a dotted key, creating intermediate objects.
pub fn apply_override(doc: &mut Value, key: &str, value: Value) -> Result<(), ConfigError> {
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    let (last, parents) = parts.split_last().ok_or_else(|| ConfigError::Override(key.into()))?;
    for part in parents {
        if !node.is_object() {
            return Err(ConfigError::Override(format!("{key}: {part} is not an object")));
        }
        node = node
            .as_object_mut()
            .expect("checked")
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    match node.as_object_mut() {
        Some(obj) => {
            obj.insert(last.to_string(), value);
            Ok(())
        }
        None => Err(ConfigError::Override(format!("{key}: parent is not an object"))),
    }
}

/// Reads a JSON document from disk.
pub fn read_document(path: &Path) -> Result<Value, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

/// Fills in the runner, applies overrides in order, then parses and validates.
///
/// A document that names a different experiment than `kind` is rejected.
pub fn resolve_config(
    mut doc: Value,
    kind: ExperimentKind,
    overrides: &[(String, Value)],
) -> Result<ExperimentConfig, ConfigError> {
    let obj = doc
        .as_object_mut()
        .ok_or_else(|| ConfigError::Invalid(vec!["top level must be a JSON object".into()]))?;
    let wanted = Value::String(kind.name().into());
    match obj.get("experiment") {
        None => {
            obj.insert("experiment".into(), wanted);
        }
        Some(v) if *v == wanted => {}
        Some(v) => {
            return Err(ConfigError::Invalid(vec![format!(
                "experiment: document is for {v}, but the {kind} runner was requested"
            )]))
        }
    }
    for (key, value) in overrides {
        apply_override(&mut doc, key, value.clone())?;
    }
    let cfg: ExperimentConfig = serde_json::from_value(doc)?;
    cfg.validate()?;
    Ok(cfg)
}

fn nonempty_positive(field: &str, values: &[usize], problems: &mut Vec<String>) {
    if values.is_empty() {
        problems.push(format!("{field}: empty list"));
    }
    if values.contains(&0) {
        problems.push(format!("{field}: values must be at least 1"));
    }
}

impl ExperimentConfig {
    pub fn scenarios(&self) -> Vec<Scenario> {
        self.scenario.to_vec()
    }

    /// Checks every field and cross-field rule; all problems are reported together.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut problems = Vec::new();
        let scenarios = self.scenarios();
        let ms = self.arrays.bs_antennas.to_vec();
        let ns = self.arrays.ue_antennas.to_vec();
        let ls = self.paths.paths.to_vec();
        let ks = self.cell.ue_count.to_vec();
        if scenarios.is_empty() {
            problems.push("scenario: empty list".into());
        }
        nonempty_positive("arrays.M", &ms, &mut problems);
        nonempty_positive("arrays.N", &ns, &mut problems);
        nonempty_positive("paths.L", &ls, &mut problems);
        nonempty_positive("cell.K", &ks, &mut problems);
        if !(self.arrays.spacing > 0.0 && self.arrays.spacing.is_finite()) {
            problems.push(format!("arrays.spacing: must be positive, got {}", self.arrays.spacing));
        }
        for &n in &ns {
            for &l in ls.iter().filter(|&&l| l > n) {
                problems.push(format!("arrays.N: {n} antennas cannot carry paths.L = {l} paths"));
            }
        }
        let ratios = &self.cell.sigma_ratios;
        if ratios.is_empty() || ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            problems.push("cell.sigma_ratios: need one or more positive finite values".into());
        } else if ratios.len() > 1 {
            for &k in ks.iter().filter(|&&k| k != ratios.len()) {
                problems.push(format!("cell.sigma_ratios: {} values for K = {k}", ratios.len()));
            }
        }
        if self.mc.angle_realizations == 0 {
            problems.push("mc.angle_realizations: must be at least 1".into());
        }
        if self.mc.noise_realizations == 0 {
            problems.push("mc.noise_realizations: must be at least 1".into());
        }
        if self.workers == Some(0) {
            problems.push("workers: must be at least 1".into());
        }
        if let Some(PilotLengths::PerScenario(map)) = &self.timing.pilot_length {
            for s in map.keys().filter(|s| !scenarios.contains(s)) {
                problems.push(format!("timing.T_tau: entry for {s}, which is not simulated"));
            }
        }
        let rate = matches!(self.experiment, ExperimentKind::Tradeoff | ExperimentKind::Scaling);
        let tc = self.timing.coherence_length;
        for &s in &scenarios {
            for &k in &ks {
                for &n in &ns {
                    for &l in &ls {
                        for t in self.timing.pilot_lengths(s, k, n, l) {
                            if let Err(e) = s.check_pilot_length(t, k, n, l) {
                                problems.push(format!("timing.T_tau: K={k}, N={n}, L={l}: {e}"));
                            } else if rate && t >= tc {
                                problems.push(format!(
                                    "timing.T_c: {tc} leaves no data symbols after {s} pilots of length {t}"
                                ));
                            }
                        }
                    }
                }
            }
        }
        match self.experiment {
            ExperimentKind::NmseSweep | ExperimentKind::Contamination => {
                if self.energy.rho_tau.as_ref().is_some_and(|r| r.to_vec().is_empty()) {
                    problems.push("energy.rho_tau: empty list".into());
                }
            }
            ExperimentKind::Tradeoff | ExperimentKind::Scaling => {
                if self.energy.totals().is_empty() {
                    problems.push("energy.total: required for pilot/data splits".into());
                }
                let grid = self.energy.grid();
                if grid.is_empty() {
                    problems.push("energy.normalized_grid: empty list".into());
                }
                if grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
                    problems.push("energy.normalized_grid: values must lie in [0, 1]".into());
                }
            }
            ExperimentKind::PilotTable => {}
        }
        if self.experiment == ExperimentKind::Contamination && scenarios.iter().any(|&s| s != Scenario::PC) {
            problems.push("scenario: contamination sweeps are defined for PC only".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(problems))
        }
    }
}
