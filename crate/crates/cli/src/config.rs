//! Experiment manifests: one TOML file per experiment, with command-line
//! overrides applied on top.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rotorlab::ensemble::{Distribution, EnsembleSpec, Method, Sampling};
use rotorlab::quadrature::{QuadratureSpec, Scheme};
use rotorlab::rotor::RotorParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SingleBeta,
    Fig2Main,
    Fig2Inset,
    Ramsey,
    Energy,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::SingleBeta,
        Command::Fig2Main,
        Command::Fig2Inset,
        Command::Ramsey,
        Command::Energy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::SingleBeta => "single-beta",
            Command::Fig2Main => "fig2-main",
            Command::Fig2Inset => "fig2-inset",
            Command::Ramsey => "ramsey",
            Command::Energy => "energy",
        }
    }

    fn default_kicks(self) -> u64 {
        match self {
            Command::SingleBeta => 100,
            Command::Fig2Main | Command::Ramsey => 50,
            Command::Fig2Inset => 200,
            Command::Energy => 20,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| CliError::Config(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RotorSection {
    pub ell: u32,
    pub epsilon: f64,
    pub k1: f64,
    pub dk: f64,
    pub beta: f64,
    pub n0: i64,
    /// Grid half-width; zero selects the sizing rule.
    pub n_max: usize,
}

impl Default for RotorSection {
    fn default() -> Self {
        Self {
            ell: 1,
            epsilon: 0.0,
            k1: 0.8 * PI,
            dk: 0.6283,
            beta: 0.5,
            n0: 0,
            n_max: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    Uniform01,
    GaussianMomentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingKind {
    Stratified,
    Pseudorandom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSection {
    pub distribution: DistributionKind,
    pub sigma: f64,
    pub count: usize,
    pub sampling: SamplingKind,
    pub seed: u64,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self {
            distribution: DistributionKind::Uniform01,
            sigma: 2.5,
            count: 10_000,
            sampling: SamplingKind::Stratified,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Midpoint,
    GaussLegendreComposite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSection {
    pub nodes: usize,
    pub scheme: SchemeKind,
    pub singularity_margin: f64,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let spec = QuadratureSpec::default();
        Self {
            nodes: spec.nodes,
            scheme: SchemeKind::GaussLegendreComposite,
            singularity_margin: spec.singularity_margin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    AnalyticResonant,
    Propagator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Zero selects the command's default.
    pub n_kicks: u64,
    pub dk_start: f64,
    pub dk_stop: f64,
    pub dk_step: f64,
    pub epsilons: Vec<f64>,
    pub phases: usize,
    pub method: MethodKind,
    pub threads: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            n_kicks: 0,
            dk_start: 0.0,
            dk_stop: 6.4,
            dk_step: 0.1,
            epsilons: vec![0.025, 0.1],
            phases: 256,
            method: MethodKind::AnalyticResonant,
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Empty writes to standard output.
    pub path: String,
    pub format: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            path: String::new(),
            format: "csv".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub rotor: RotorSection,
    pub ensemble: EnsembleSection,
    pub quadrature: QuadratureSection,
    pub run: RunSection,
    pub output: OutputSection,
}

/// Values given on the command line; each one wins over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<String>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub n_kicks: Option<u64>,
    pub dk: Option<f64>,
    pub k1: Option<f64>,
    pub beta: Option<f64>,
    pub epsilon: Option<f64>,
    pub ell: Option<u32>,
    pub count: Option<usize>,
    pub n0: Option<i64>,
    pub phases: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration always serialises")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.out {
            self.output.path = v.clone();
        }
        if let Some(v) = o.threads {
            self.run.threads = v;
        }
        if let Some(v) = o.seed {
            self.ensemble.seed = v;
        }
        if let Some(v) = o.n_kicks {
            self.run.n_kicks = v;
        }
        if let Some(v) = o.dk {
            self.rotor.dk = v;
        }
        if let Some(v) = o.k1 {
            self.rotor.k1 = v;
        }
        if let Some(v) = o.beta {
            self.rotor.beta = v;
        }
        if let Some(v) = o.epsilon {
            self.rotor.epsilon = v;
        }
        if let Some(v) = o.ell {
            self.rotor.ell = v;
        }
        if let Some(v) = o.count {
            self.ensemble.count = v;
        }
        if let Some(v) = o.n0 {
            self.rotor.n0 = v;
        }
        if let Some(v) = o.phases {
            self.run.phases = v;
        }
    }

    /// Fills command-dependent defaults and checks every field, so that the
    /// echoed header is complete and re-executable.
    pub fn resolve(mut self, command: Command) -> Result<Self, CliError> {
        if let Some(declared) = self.command {
            if declared != command {
                return Err(CliError::Config(format!(
                    "configuration is for `{declared}`, not `{command}`"
                )));
            }
        }
        self.command = Some(command);
        if self.run.n_kicks == 0 {
            self.run.n_kicks = command.default_kicks();
        }
        if command == Command::Fig2Inset || command == Command::Ramsey {
            self.run.method = if self.rotor.epsilon == 0.0 {
                self.run.method
            } else {
                MethodKind::Propagator
            };
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, why: String| Err(CliError::Config(format!("{field}: {why}")));
        let r = &self.rotor;
        if r.ell == 0 {
            return bad("rotor.ell", "must be a positive integer".into());
        }
        if !(r.k1.is_finite() && r.k1 >= 0.0) {
            return bad("rotor.k1", format!("{} must be non-negative", r.k1));
        }
        if !(r.dk.is_finite() && r.dk >= 0.0) {
            return bad("rotor.dk", format!("{} must be non-negative", r.dk));
        }
        if !(0.0..1.0).contains(&r.beta) {
            return bad("rotor.beta", format!("{} must lie in [0, 1)", r.beta));
        }
        let tau = 2.0 * PI * f64::from(r.ell) - r.epsilon;
        if !(r.epsilon.is_finite() && tau > 0.0) {
            return bad(
                "rotor.epsilon",
                format!("{} leaves no positive period", r.epsilon),
            );
        }
        let e = &self.ensemble;
        if e.count == 0 {
            return bad("ensemble.count", "must be positive".into());
        }
        if e.distribution == DistributionKind::GaussianMomentum {
            if !(e.sigma.is_finite() && e.sigma > 0.0) {
                return bad("ensemble.sigma", format!("{} must be positive", e.sigma));
            }
            if e.sampling == SamplingKind::Stratified {
                return bad(
                    "ensemble.sampling",
                    "stratified sampling needs the uniform01 distribution".into(),
                );
            }
        }
        self.quadrature_spec()
            .validate()
            .or_else(|err| bad("quadrature", err.to_string()))?;
        let run = &self.run;
        if !(run.dk_step.is_finite() && run.dk_step > 0.0) {
            return bad("run.dk_step", format!("{} must be positive", run.dk_step));
        }
        if !(run.dk_start.is_finite() && run.dk_start >= 0.0 && run.dk_stop >= run.dk_start) {
            return bad(
                "run.dk_start",
                format!(
                    "grid [{}, {}] is not a non-negative range",
                    run.dk_start, run.dk_stop
                ),
            );
        }
        if run.epsilons.iter().any(|eps| !eps.is_finite()) {
            return bad("run.epsilons", "detunings must be finite".into());
        }
        if self.output.format != "csv" {
            return bad(
                "output.format",
                format!("unsupported format `{}`", self.output.format),
            );
        }
        Ok(())
    }

    pub fn rotor_params(&self, k: f64, n_max: usize) -> Result<RotorParams, CliError> {
        let r = &self.rotor;
        Ok(RotorParams::new(r.ell, r.epsilon, k, r.beta, n_max)?)
    }

    pub fn ensemble_spec(&self) -> EnsembleSpec {
        let e = &self.ensemble;
        EnsembleSpec {
            distribution: match e.distribution {
                DistributionKind::Uniform01 => Distribution::Uniform01,
                DistributionKind::GaussianMomentum => {
                    Distribution::GaussianMomentum { sigma: e.sigma }
                }
            },
            count: e.count,
            sampling: match e.sampling {
                SamplingKind::Stratified => Sampling::Stratified,
                SamplingKind::Pseudorandom => Sampling::Pseudorandom { seed: e.seed },
            },
            n0: self.rotor.n0,
        }
    }

    pub fn quadrature_spec(&self) -> QuadratureSpec {
        let q = &self.quadrature;
        QuadratureSpec {
            nodes: q.nodes,
            scheme: match q.scheme {
                SchemeKind::Midpoint => Scheme::Midpoint,
                SchemeKind::GaussLegendreComposite => Scheme::GaussLegendreComposite,
            },
            singularity_margin: q.singularity_margin,
        }
    }

    pub fn method(&self) -> Method {
        match self.run.method {
            MethodKind::AnalyticResonant => Method::AnalyticResonant,
            MethodKind::Propagator => Method::Propagator,
        }
    }

    /// `dk_start, dk_start + dk_step, ...` up to `dk_stop` inclusive.
    pub fn dk_grid(&self) -> Vec<f64> {
        let run = &self.run;
        let count = ((run.dk_stop - run.dk_start) / run.dk_step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| run.dk_start + i as f64 * run.dk_step)
            .collect()
    }
}
