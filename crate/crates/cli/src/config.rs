//! Run configuration: a versioned TOML document plus command-line overrides.
//!
//! Every experiment-dependent default is resolved before the run starts, so
//! the echoed configuration is complete and re-running it reproduces the
//! payload.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Lowest regularity for which the well-posedness experiments are meaningful.
pub const WELL_POSED_THRESHOLD: f64 = 5.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Simulate,
    ExactWaveTest,
    Illposed,
    GalerkinConvergence,
    EnergyIdentity,
    IneqKatoPonce,
    IneqProduct,
    IneqStrichartz,
    IneqTransference,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Simulate,
        Experiment::ExactWaveTest,
        Experiment::Illposed,
        Experiment::GalerkinConvergence,
        Experiment::EnergyIdentity,
        Experiment::IneqKatoPonce,
        Experiment::IneqProduct,
        Experiment::IneqStrichartz,
        Experiment::IneqTransference,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::ExactWaveTest => "exact-wave-test",
            Experiment::Illposed => "illposed",
            Experiment::GalerkinConvergence => "galerkin-convergence",
            Experiment::EnergyIdentity => "energy-identity",
            Experiment::IneqKatoPonce => "ineq-kato-ponce",
            Experiment::IneqProduct => "ineq-product",
            Experiment::IneqStrichartz => "ineq-strichartz",
            Experiment::IneqTransference => "ineq-transference",
        }
    }

    /// Experiments whose statements need `s > 5/3`.
    pub fn needs_well_posedness(self) -> bool {
        matches!(
            self,
            Experiment::Simulate
                | Experiment::ExactWaveTest
                | Experiment::GalerkinConvergence
                | Experiment::EnergyIdentity
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `|û(k)| = amplitude · e^{-rate |k|}` with seeded phases.
    Exponential,
    /// Seeded amplitudes in `[0.5, 1]` scaled by `⟨k⟩^{-beta}`, times `amplitude`.
    Random,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct EquationBlock {
    pub lambda: Option<f64>,
    pub s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct GridBlock {
    pub bandwidth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverBlock {
    pub cutoff: Option<usize>,
    pub policy: Option<Policy>,
    pub dt: Option<f64>,
    pub tolerance: f64,
    pub t_end: Option<f64>,
    pub record_every: usize,
    /// Write every recorded state to `snapshots/` (simulate only).
    pub snapshots: bool,
}

impl Default for SolverBlock {
    fn default() -> Self {
        Self {
            cutoff: None,
            policy: None,
            dt: None,
            tolerance: 1e-10,
            t_end: None,
            record_every: 1,
            snapshots: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InitialBlock {
    pub profile: Profile,
    pub amplitude: f64,
    pub rate: f64,
    pub beta: f64,
}

impl Default for InitialBlock {
    fn default() -> Self {
        Self { profile: Profile::Exponential, amplitude: 1.0, rate: 1.0, beta: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExactWaveBlock {
    pub m: usize,
    pub r: f64,
}

impl Default for ExactWaveBlock {
    fn default() -> Self {
        Self { m: 4, r: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IllposedBlock {
    pub m_list: Vec<usize>,
    pub r: f64,
    pub samples: usize,
    pub fit_time: f64,
    pub bandwidth_factor: usize,
    pub bandwidth_margin: usize,
}

impl Default for IllposedBlock {
    fn default() -> Self {
        let d = mzk_core::illposed::DivergenceSettings::default();
        Self {
            m_list: d.m_list,
            r: d.r,
            samples: d.samples,
            fit_time: d.fit_time,
            bandwidth_factor: d.bandwidth_factor,
            bandwidth_margin: d.bandwidth_margin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConvergenceBlock {
    pub cutoffs: Vec<usize>,
    pub samples: usize,
}

impl Default for ConvergenceBlock {
    fn default() -> Self {
        Self { cutoffs: vec![8, 12, 16, 24, 32], samples: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnergyBlock {
    pub delta: f64,
    pub count: usize,
    pub amplitude: f64,
    pub beta: f64,
}

impl Default for EnergyBlock {
    fn default() -> Self {
        Self { delta: 1e-5, count: 20, amplitude: 0.1, beta: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleBlock {
    /// Bandwidths to sample at; defaults to `[grid.bandwidth]`.
    pub bands: Option<Vec<usize>>,
    pub beta: Option<f64>,
    pub count: usize,
}

impl Default for EnsembleBlock {
    fn default() -> Self {
        Self { bands: None, beta: None, count: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StrichartzBlock {
    pub j_min: u32,
    pub j_max: u32,
}

impl Default for StrichartzBlock {
    fn default() -> Self {
        Self { j_min: 2, j_max: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransferenceBlock {
    pub alpha: f64,
    pub lattice_radius: usize,
    pub sample_points: usize,
    pub tolerance: f64,
}

impl Default for TransferenceBlock {
    fn default() -> Self {
        Self { alpha: 1.0, lattice_radius: 4, sample_points: 16, tolerance: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub schema_version: Option<u32>,
    pub experiment: Option<Experiment>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub allow_low_regularity: bool,
    pub equation: EquationBlock,
    pub grid: GridBlock,
    pub solver: SolverBlock,
    pub initial: InitialBlock,
    pub exact_wave: ExactWaveBlock,
    pub illposed: IllposedBlock,
    pub convergence: ConvergenceBlock,
    pub energy: EnergyBlock,
    pub ensemble: EnsembleBlock,
    pub strichartz: StrichartzBlock,
    pub transference: TransferenceBlock,
    /// `<metric>_max = bound` or `<metric>_min = bound`.
    #[serde(rename = "assert")]
    pub assertions: BTreeMap<String, f64>,
}

/// All problems found in a configuration, one message per problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// Applies `key.path=value` overrides to a parsed document. Values are read
/// as TOML when possible (`1e-3`, `true`, `[4, 8]`) and as bare strings
/// otherwise.
pub fn apply_overrides(doc: &mut toml::Table, overrides: &[String]) -> Result<(), ConfigErrors> {
    let mut errors = Vec::new();
    for item in overrides {
        let Some((path, raw)) = item.split_once('=') else {
            errors.push(format!("override `{item}` is not of the form key=value"));
            continue;
        };
        let path = path.trim();
        let value = parse_value(raw.trim());
        if let Err(e) = set_path(doc, path, value) {
            errors.push(e);
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(ConfigErrors(errors))
    }
}

fn parse_value(raw: &str) -> toml::Value {
    match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("key was just parsed"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn set_path(doc: &mut toml::Table, path: &str, value: toml::Value) -> Result<(), String> {
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(format!("override key `{path}` is malformed"));
    }
    let (last, parents) = parts.split_last().expect("split yields at least one part");
    let mut table = doc;
    for p in parents {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = match entry {
            toml::Value::Table(t) => t,
            _ => return Err(format!("override `{path}`: `{p}` is not a table")),
        };
    }
    if let Some(toml::Value::Table(_)) = table.get(*last) {
        return Err(format!("override `{path}` names a table, not a scalar key"));
    }
    table.insert(last.to_string(), value);
    Ok(())
}

/// Parses, merges overrides, resolves defaults for `experiment` and
/// validates. Returns every problem found, not just the first.
pub fn parse_config(text: &str, experiment: Experiment, overrides: &[String]) -> Result<RunConfig, ConfigErrors> {
    let mut doc: toml::Table = toml::from_str(text).map_err(|e| ConfigErrors(vec![format!("invalid TOML: {e}")]))?;
    apply_overrides(&mut doc, overrides)?;

    let mut unknown = Vec::new();
    let parsed: Result<RunConfig, _> =
        serde_ignored::deserialize(toml::Value::Table(doc), |path| unknown.push(path.to_string()));
    let mut errors: Vec<String> = unknown.iter().map(|k| format!("unknown key `{k}`")).collect();
    let cfg = match parsed {
        Ok(cfg) => cfg,
        Err(e) => {
            errors.push(format!("{e}"));
            return Err(ConfigErrors(errors));
        }
    };
    let cfg = cfg.resolve(experiment);
    errors.extend(cfg.validate(experiment));
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigErrors(errors))
    }
}

struct Defaults {
    lambda: f64,
    s: f64,
    bandwidth: usize,
    policy: Policy,
    dt: f64,
    t_end: f64,
    beta: f64,
}

fn defaults(experiment: Experiment, cfg: &RunConfig) -> Defaults {
    let base = Defaults { lambda: 6.0, s: 2.0, bandwidth: 16, policy: Policy::Adaptive, dt: 1e-3, t_end: 0.5, beta: 1.0 };
    match experiment {
        Experiment::Simulate => base,
        Experiment::ExactWaveTest => Defaults {
            lambda: 1.0,
            bandwidth: cfg.exact_wave.m + 1,
            t_end: 1.0,
            ..base
        },
        Experiment::Illposed => {
            let m = cfg.illposed.m_list.iter().copied().max().unwrap_or(0);
            Defaults {
                lambda: 1.0,
                bandwidth: cfg.illposed.bandwidth_factor * m + cfg.illposed.bandwidth_margin,
                policy: Policy::Fixed,
                dt: 1.0 / 512.0,
                t_end: 1.0,
                ..base
            }
        }
        Experiment::GalerkinConvergence => Defaults {
            lambda: 1.0,
            bandwidth: cfg.convergence.cutoffs.iter().copied().max().unwrap_or(32),
            policy: Policy::Fixed,
            ..base
        },
        Experiment::EnergyIdentity => Defaults { bandwidth: 3, ..base },
        Experiment::IneqKatoPonce | Experiment::IneqProduct => base,
        Experiment::IneqStrichartz => Defaults { bandwidth: 32, beta: 0.0, ..base },
        Experiment::IneqTransference => base,
    }
}

impl RunConfig {
    /// Fills every experiment-dependent default so the echo is complete.
    pub fn resolve(mut self, experiment: Experiment) -> Self {
        let d = defaults(experiment, &self);
        self.experiment.get_or_insert(experiment);
        self.schema_version.get_or_insert(0);
        self.equation.lambda.get_or_insert(d.lambda);
        self.equation.s.get_or_insert(d.s);
        let k = *self.grid.bandwidth.get_or_insert(d.bandwidth);
        self.solver.cutoff.get_or_insert(k);
        self.solver.policy.get_or_insert(d.policy);
        self.solver.dt.get_or_insert(d.dt);
        self.solver.t_end.get_or_insert(d.t_end);
        self.ensemble.bands.get_or_insert_with(|| vec![k]);
        self.ensemble.beta.get_or_insert(d.beta);
        self
    }

    pub fn lambda(&self) -> f64 {
        self.equation.lambda.expect("resolved")
    }

    pub fn s(&self) -> f64 {
        self.equation.s.expect("resolved")
    }

    pub fn bandwidth(&self) -> usize {
        self.grid.bandwidth.expect("resolved")
    }

    pub fn cutoff(&self) -> usize {
        self.solver.cutoff.expect("resolved")
    }

    pub fn t_end(&self) -> f64 {
        self.solver.t_end.expect("resolved")
    }

    pub fn bands(&self) -> &[usize] {
        self.ensemble.bands.as_deref().expect("resolved")
    }

    /// Shell indices of the Strichartz experiment.
    pub fn shells(&self) -> std::ops::RangeInclusive<u32> {
        self.strichartz.j_min..=self.strichartz.j_max
    }

    /// Solver settings shared by every time-stepping experiment.
    pub fn solver_config(&self, cutoff: usize) -> mzk_core::SolverConfig {
        use mzk_core::{EquationParams, SolverConfig};
        let params = EquationParams { lambda: self.lambda() };
        let dt = self.solver.dt.expect("resolved");
        let mut cfg = match self.solver.policy.expect("resolved") {
            Policy::Fixed => SolverConfig::fixed(cutoff, dt, self.t_end(), params),
            Policy::Adaptive => {
                let mut c = SolverConfig::adaptive(cutoff, self.solver.tolerance, self.t_end(), params);
                c.dt = dt;
                c
            }
        };
        cfg.record_every = self.solver.record_every;
        cfg.sobolev_s = self.s();
        cfg
    }

    /// Warnings that do not stop the run.
    pub fn warnings(&self, experiment: Experiment) -> Vec<String> {
        let mut w = Vec::new();
        if experiment.needs_well_posedness() && self.s() <= WELL_POSED_THRESHOLD && self.allow_low_regularity {
            w.push(format!(
                "equation.s = {} is not above 5/3; running anyway because allow_low_regularity is set",
                self.s()
            ));
        }
        w
    }

    /// Constraint violations of a resolved configuration.
    pub fn validate(&self, experiment: Experiment) -> Vec<String> {
        let mut e = Vec::new();
        match self.schema_version {
            Some(SCHEMA_VERSION) => {}
            Some(0) | None => e.push(format!("schema_version is required (current: {SCHEMA_VERSION})")),
            Some(v) => e.push(format!("schema_version {v} is not supported (current: {SCHEMA_VERSION})")),
        }
        if let Some(x) = self.experiment {
            if x != experiment {
                e.push(format!("config is for experiment `{x}` but `{experiment}` was requested"));
            }
        }
        let (lambda, s, k, n) = (self.lambda(), self.s(), self.bandwidth(), self.cutoff());
        if !lambda.is_finite() {
            e.push(format!("equation.lambda must be finite, got {lambda}"));
        }
        if !s.is_finite() {
            e.push(format!("equation.s must be finite, got {s}"));
        }
        if experiment.needs_well_posedness() && s <= WELL_POSED_THRESHOLD && !self.allow_low_regularity {
            e.push(format!(
                "equation.s = {s} violates s > 5/3 required by `{experiment}`; set allow_low_regularity = true to override"
            ));
        }

        let steps = matches!(
            experiment,
            Experiment::Simulate | Experiment::ExactWaveTest | Experiment::Illposed | Experiment::GalerkinConvergence
        );
        if steps {
            let dt = self.solver.dt.expect("resolved");
            if !(dt > 0.0 && dt.is_finite()) {
                e.push(format!("solver.dt must be positive, got {dt}"));
            }
            if !(self.solver.tolerance > 0.0) {
                e.push(format!("solver.tolerance must be positive, got {}", self.solver.tolerance));
            }
            let t = self.t_end();
            if !(t >= 0.0 && t.is_finite()) {
                e.push(format!("solver.t_end must be >= 0, got {t}"));
            }
            if self.solver.record_every == 0 {
                e.push("solver.record_every must be >= 1".into());
            }
        }
        if matches!(experiment, Experiment::Simulate | Experiment::ExactWaveTest | Experiment::EnergyIdentity) && n > k {
            e.push(format!("solver.cutoff N = {n} exceeds grid.bandwidth K = {k}"));
        }
        if matches!(experiment, Experiment::Simulate | Experiment::GalerkinConvergence) {
            let i = &self.initial;
            if !(i.amplitude.is_finite()) {
                e.push(format!("initial.amplitude must be finite, got {}", i.amplitude));
            }
            if !(i.rate > 0.0 && i.rate.is_finite()) {
                e.push(format!("initial.rate must be positive, got {}", i.rate));
            }
            if !i.beta.is_finite() {
                e.push(format!("initial.beta must be finite, got {}", i.beta));
            }
        }

        match experiment {
            Experiment::ExactWaveTest => {
                let m = self.exact_wave.m;
                if m == 0 {
                    e.push("exact_wave.m must be >= 1".into());
                }
                if !(self.exact_wave.r > 0.0) {
                    e.push(format!("exact_wave.r must be positive, got {}", self.exact_wave.r));
                }
                if m > k {
                    e.push(format!("exact_wave.m = {m} exceeds grid.bandwidth K = {k}"));
                }
                if n * n < m * m + 1 {
                    e.push(format!(
                        "solver.cutoff N = {n} leaves the carrier ({m}, -1) outside the ball |k| <= N; need N^2 >= m^2 + 1"
                    ));
                }
            }
            Experiment::Illposed => {
                let il = &self.illposed;
                if il.m_list.is_empty() {
                    e.push("illposed.m_list is empty".into());
                }
                if il.m_list.contains(&0) {
                    e.push("illposed.m_list entries must be >= 1".into());
                }
                let mmax = il.m_list.iter().copied().max().unwrap_or(0);
                let need = il.bandwidth_factor * mmax + il.bandwidth_margin;
                if k < mmax {
                    e.push(format!("grid.bandwidth K = {k} is below max(m_list) = {mmax}"));
                } else if k < need {
                    e.push(format!(
                        "grid.bandwidth K = {k} is below bandwidth_factor * max(m_list) + bandwidth_margin = {need}"
                    ));
                }
                if il.bandwidth_factor < 3 {
                    e.push(format!(
                        "illposed.bandwidth_factor = {} must be >= 3 so cubic interactions stay on the grid",
                        il.bandwidth_factor
                    ));
                }
                if il.samples == 0 {
                    e.push("illposed.samples must be >= 1".into());
                }
                if !(il.r > 0.0) {
                    e.push(format!("illposed.r must be positive, got {}", il.r));
                }
            }
            Experiment::GalerkinConvergence => {
                let c = &self.convergence;
                if c.cutoffs.is_empty() {
                    e.push("convergence.cutoffs is empty".into());
                }
                for &cut in &c.cutoffs {
                    if cut > k {
                        e.push(format!("convergence.cutoffs entry {cut} exceeds grid.bandwidth K = {k}"));
                    }
                }
                if c.samples == 0 {
                    e.push("convergence.samples must be >= 1".into());
                }
            }
            Experiment::EnergyIdentity => {
                let max = mzk_core::timestepping::ORACLE_MAX_CUTOFF;
                if n > max {
                    e.push(format!("solver.cutoff N = {n} exceeds {max}, the limit of the direct quadruple sum"));
                }
                let en = &self.energy;
                if !(en.delta > 0.0 && en.delta.is_finite()) {
                    e.push(format!("energy.delta must be positive, got {}", en.delta));
                }
                if en.count == 0 {
                    e.push("energy.count must be >= 1".into());
                }
                if !en.amplitude.is_finite() || !en.beta.is_finite() {
                    e.push("energy.amplitude and energy.beta must be finite".into());
                }
            }
            Experiment::IneqKatoPonce | Experiment::IneqProduct | Experiment::IneqStrichartz => {
                for &b in self.bands() {
                    if b == 0 || b > k {
                        e.push(format!("ensemble.bands entry {b} must lie in 1..=K = {k}"));
                    }
                }
                if self.ensemble.count == 0 {
                    e.push("ensemble.count must be >= 1".into());
                }
                if experiment == Experiment::IneqStrichartz {
                    let st = &self.strichartz;
                    if st.j_min == 0 || st.j_min > st.j_max {
                        e.push(format!("strichartz shells need 1 <= j_min <= j_max, got {}..={}", st.j_min, st.j_max));
                    } else if st.j_max > 20 || (1usize << (st.j_max - 1)) > k {
                        e.push(format!("strichartz.j_max = {} needs 2^(j_max - 1) <= K = {k}", st.j_max));
                    }
                    if self.bands() != [k] {
                        e.push("ensemble.bands is not used by ineq-strichartz; the ensemble lives on grid.bandwidth".into());
                    }
                }
            }
            Experiment::IneqTransference => {
                let t = &self.transference;
                if !(t.alpha > 0.0 && t.alpha.is_finite()) {
                    e.push(format!("transference.alpha must be positive, got {}", t.alpha));
                }
                if t.lattice_radius == 0 || t.sample_points == 0 {
                    e.push("transference.lattice_radius and sample_points must be >= 1".into());
                }
                if !(t.tolerance > 0.0) {
                    e.push(format!("transference.tolerance must be positive, got {}", t.tolerance));
                }
            }
            Experiment::Simulate => {}
        }

        let names = crate::experiments::metric_names(experiment, self);
        for key in self.assertions.keys() {
            match crate::assertions::split_key(key) {
                Some((metric, _)) if names.iter().any(|n| n == metric) => {}
                Some((metric, _)) => e.push(format!(
                    "assert.{key}: `{metric}` is not a metric of `{experiment}` (known: {})",
                    names.join(", ")
                )),
                None => e.push(format!("assert.{key}: key must end in `_max` or `_min`")),
            }
        }
        e
    }

    /// The merged configuration as TOML, for the run directory.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "schema_version = 1\n";

    #[test]
    fn minimal_simulate_fills_defaults() {
        let cfg = parse_config(MINIMAL, Experiment::Simulate, &[]).unwrap();
        assert_eq!(cfg.lambda(), 6.0);
        assert_eq!(cfg.bandwidth(), 16);
        assert_eq!(cfg.cutoff(), 16);
        assert_eq!(cfg.experiment, Some(Experiment::Simulate));
        let echo = cfg.to_toml();
        assert!(echo.contains("lambda = 6.0"), "{echo}");
        // the echo is itself a valid config that resolves to the same thing
        assert_eq!(parse_config(&echo, Experiment::Simulate, &[]).unwrap(), cfg);
    }

    #[test]
    fn low_regularity_needs_override() {
        let err = parse_config("schema_version = 1\n[equation]\ns = 1.0\n", Experiment::Simulate, &[]).unwrap_err();
        assert!(err.0.iter().any(|m| m.contains("s > 5/3")), "{err}");
        let ok = parse_config(
            "schema_version = 1\nallow_low_regularity = true\n[equation]\ns = 1.0\n",
            Experiment::Simulate,
            &[],
        )
        .unwrap();
        assert_eq!(ok.warnings(Experiment::Simulate).len(), 1);
        // not a well-posedness experiment
        parse_config("schema_version = 1\n[equation]\ns = 1.0\n", Experiment::IneqKatoPonce, &[]).unwrap();
    }

    #[test]
    fn bandwidth_below_m_list() {
        let text = "schema_version = 1\n[grid]\nbandwidth = 10\n[illposed]\nm_list = [4, 16]\n";
        let err = parse_config(text, Experiment::Illposed, &[]).unwrap_err();
        assert!(err.0.iter().any(|m| m.contains("below max(m_list) = 16")), "{err}");
    }

    #[test]
    fn all_errors_reported() {
        let text = "schema_version = 1\nbogus = 3\n[solver]\ncutoff = 40\ndt = -1.0\nwhat = 1\n[equation]\ns = 0.5\n";
        let err = parse_config(text, Experiment::Simulate, &[]).unwrap_err();
        let joined = err.to_string();
        for needle in ["`bogus`", "`solver.what`", "exceeds grid.bandwidth", "solver.dt", "5/3"] {
            assert!(joined.contains(needle), "missing {needle} in\n{joined}");
        }
        assert_eq!(err.0.len(), 5);
    }

    #[test]
    fn schema_version_required() {
        let err = parse_config("", Experiment::Simulate, &[]).unwrap_err();
        assert!(err.0[0].contains("schema_version is required"));
        let err = parse_config("schema_version = 7", Experiment::Simulate, &[]).unwrap_err();
        assert!(err.0[0].contains("not supported"));
    }

    #[test]
    fn overrides_win_and_are_echoed() {
        let text = "schema_version = 1\n[solver]\ndt = 0.1\n";
        let cfg = parse_config(
            text,
            Experiment::Simulate,
            &["solver.dt=2e-3".into(), "illposed.m_list=[2, 3]".into(), "initial.profile=random".into()],
        )
        .unwrap();
        assert_eq!(cfg.solver.dt, Some(2e-3));
        assert_eq!(cfg.illposed.m_list, vec![2, 3]);
        assert_eq!(cfg.initial.profile, Profile::Random);
        assert!(cfg.to_toml().contains("dt = 0.002"));
    }

    #[test]
    fn bad_overrides() {
        let mut doc = toml::Table::new();
        let err = apply_overrides(&mut doc, &["novalue".into(), "solver=3".into(), "a..b=1".into()]);
        // `solver=3` is fine on an empty document; the other two are not
        assert_eq!(err.unwrap_err().0.len(), 2);
        let mut doc: toml::Table = toml::from_str("[solver]\ndt = 1.0").unwrap();
        assert!(apply_overrides(&mut doc, &["solver=3".into()]).is_err());
        assert!(apply_overrides(&mut doc, &["solver.dt.x=3".into()]).is_err());
    }

    #[test]
    fn unknown_assert_metric() {
        let text = "schema_version = 1\n[assert]\nfinal_error_max = 1e-8\nl2_drift_rate_max = 1e-9\n";
        let err = parse_config(text, Experiment::Simulate, &[]).unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert!(err.0[0].contains("final_error"));
        parse_config(text, Experiment::ExactWaveTest, &["assert.l2_drift_rate_max=1".into()]).unwrap_err();
        let text = "schema_version = 1\n[assert]\nfinal_error = 1e-8\n";
        assert!(parse_config(text, Experiment::ExactWaveTest, &[]).unwrap_err().0[0].contains("_max"));
    }

    #[test]
    fn experiment_mismatch() {
        let err = parse_config("schema_version = 1\nexperiment = \"illposed\"\n", Experiment::Simulate, &[]).unwrap_err();
        assert!(err.0[0].contains("`illposed`"));
    }

    #[test]
    fn exact_wave_carrier_inside_ball() {
        let err = parse_config(
            "schema_version = 1\n[solver]\ncutoff = 4\n",
            Experiment::ExactWaveTest,
            &[],
        )
        .unwrap_err();
        assert!(err.0[0].contains("carrier"));
    }

    #[test]
    fn strichartz_shell_range() {
        let err = parse_config(
            "schema_version = 1\n[grid]\nbandwidth = 8\n[strichartz]\nj_max = 5\n",
            Experiment::IneqStrichartz,
            &[],
        )
        .unwrap_err();
        assert!(err.0[0].contains("2^(j_max - 1)"));
    }
}
