//! Experiment configuration: JSON schema, defaults and validation.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use swarmsec::placement::CorridorSearchSpec;
use swarmsec::{
    EavesdropperDisc, EavesdropperModel, LinkFading, McPlan, Method, NodePosition, Numerics, PathLossModel, Scenario,
    Scheme, ShadowedRicianParams, SystemConfig,
};

use crate::CliError;

/// Value of the top-level `schema` field this build understands.
pub const SCHEMA: &str = "swarmsec-experiment/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    /// Transmit SNR in dB.
    pub psi_db: f64,
    pub alpha: f64,
    pub eta_eh: f64,
    #[serde(default = "one")]
    pub delta: f64,
    pub uav_count: u32,
    pub c_th: f64,
}

fn one() -> f64 {
    1.0
}

impl SystemSection {
    pub fn to_system(&self) -> SystemConfig {
        SystemConfig {
            psi: 10f64.powf(self.psi_db / 10.0),
            alpha: self.alpha,
            eta_eh: self.eta_eh,
            delta: self.delta,
            uav_count: self.uav_count,
            c_th: self.c_th,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum EavesdropperSection {
    Fixed(NodePosition),
    Disc { radius: f64 },
}

/// Shadowed-Rician parameters for all links, with optional per-link overrides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingSection {
    #[serde(default = "ShadowedRicianParams::average_shadowing")]
    pub all: ShadowedRicianParams,
    #[serde(default)]
    pub source_relay: Option<ShadowedRicianParams>,
    #[serde(default)]
    pub relay_destination: Option<ShadowedRicianParams>,
    #[serde(default)]
    pub relay_eve: Option<ShadowedRicianParams>,
}

impl Default for FadingSection {
    fn default() -> Self {
        Self {
            all: ShadowedRicianParams::average_shadowing(),
            source_relay: None,
            relay_destination: None,
            relay_eve: None,
        }
    }
}

impl FadingSection {
    pub fn to_links(&self) -> LinkFading {
        LinkFading {
            source_relay: self.source_relay.unwrap_or(self.all),
            relay_destination: self.relay_destination.unwrap_or(self.all),
            relay_eve: self.relay_eve.unwrap_or(self.all),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub source: NodePosition,
    pub destination: NodePosition,
    pub swarm: NodePosition,
    pub eavesdropper: EavesdropperSection,
    #[serde(default)]
    pub path_loss: PathLossModel,
    #[serde(default)]
    pub fading: FadingSection,
}

impl ScenarioSection {
    pub fn to_scenario(&self) -> Scenario {
        Scenario {
            source: self.source,
            destination: self.destination,
            swarm: self.swarm,
            eavesdropper: match self.eavesdropper {
                EavesdropperSection::Fixed(p) => EavesdropperModel::Fixed(p),
                EavesdropperSection::Disc { radius } => EavesdropperModel::Disc(EavesdropperDisc { radius }),
            },
            path_loss: self.path_loss,
            fading: self.fading.to_links(),
        }
    }
}

/// Quadrature and series tolerances; omitted fields keep library defaults.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    pub quad_rel_tol: Option<f64>,
    pub quad_abs_tol: Option<f64>,
    pub quad_max_subdivisions: Option<usize>,
    pub series_rel_tol: Option<f64>,
    pub series_max_terms: Option<usize>,
    pub series_max_condition: Option<f64>,
}

impl NumericsSection {
    pub fn to_numerics(&self) -> Numerics {
        let mut n = Numerics::default();
        if let Some(v) = self.quad_rel_tol {
            n.quad.rel_tol = v;
        }
        if let Some(v) = self.quad_abs_tol {
            n.quad.abs_tol = v;
        }
        if let Some(v) = self.quad_max_subdivisions {
            n.quad.max_subdivisions = v;
        }
        if let Some(v) = self.series_rel_tol {
            n.series.rel_tol = v;
        }
        if let Some(v) = self.series_max_terms {
            n.series.max_terms = v;
        }
        if let Some(v) = self.series_max_condition {
            n.series.max_condition = v;
        }
        n
    }
}

fn all_schemes() -> Vec<Scheme> {
    Scheme::ALL.to_vec()
}

fn both_jamming() -> Vec<bool> {
    vec![false, true]
}

fn both_methods() -> Vec<Method> {
    vec![Method::Analytic, Method::MonteCarlo]
}

/// Which (scheme, jamming, method) combinations to compute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    #[serde(default = "all_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default = "both_jamming")]
    pub jamming: Vec<bool>,
    #[serde(default = "both_methods")]
    pub methods: Vec<Method>,
}

impl Default for OutputsSection {
    fn default() -> Self {
        Self { schemes: all_schemes(), jamming: both_jamming(), methods: both_methods() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "alpha")]
    Alpha,
    #[serde(rename = "eta_eh")]
    EtaEh,
    #[serde(rename = "U")]
    UavCount,
    #[serde(rename = "C_th")]
    CTh,
    #[serde(rename = "psi")]
    Psi,
    #[serde(rename = "r_c")]
    DiscRadius,
    #[serde(rename = "eve_position_index")]
    EvePositionIndex,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            Self::Alpha => "alpha",
            Self::EtaEh => "eta_eh",
            Self::UavCount => "U",
            Self::CTh => "C_th",
            Self::Psi => "psi",
            Self::DiscRadius => "r_c",
            Self::EvePositionIndex => "eve_position_index",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    /// Free text; not interpreted.
    #[serde(default)]
    pub description: Option<String>,
    pub system: SystemSection,
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub monte_carlo: McPlan,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub outputs: OutputsSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    /// Candidate fixed eavesdropper positions for the `eve_position_index` axis.
    #[serde(default)]
    pub eve_positions: Vec<NodePosition>,
    #[serde(default)]
    pub corridor: Option<CorridorSearchSpec>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn system(&self) -> SystemConfig {
        self.system.to_system()
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario.to_scenario()
    }

    pub fn numerics(&self) -> Numerics {
        self.numerics.to_numerics()
    }

    /// System and scenario with one sweep value applied.
    pub fn apply(&self, axis: SweepAxis, value: f64) -> Result<(SystemConfig, Scenario), String> {
        let mut sys = self.system.clone();
        let mut sc = self.scenario();
        match axis {
            SweepAxis::Alpha => sys.alpha = value,
            SweepAxis::EtaEh => sys.eta_eh = value,
            SweepAxis::CTh => sys.c_th = value,
            SweepAxis::Psi => sys.psi_db = value,
            SweepAxis::UavCount => {
                if value.fract() != 0.0 || value < 1.0 || value > u32::MAX as f64 {
                    return Err(format!("U = {value} must be a positive integer"));
                }
                sys.uav_count = value as u32;
            }
            SweepAxis::DiscRadius => sc.eavesdropper = EavesdropperModel::Disc(EavesdropperDisc { radius: value }),
            SweepAxis::EvePositionIndex => {
                if value.fract() != 0.0 || value < 0.0 || value as usize >= self.eve_positions.len() {
                    return Err(format!(
                        "eve_position_index = {value} must index the {} listed eve_positions",
                        self.eve_positions.len()
                    ));
                }
                sc.eavesdropper = EavesdropperModel::Fixed(self.eve_positions[value as usize]);
            }
        }
        Ok((sys.to_system(), sc))
    }

    /// Every violated invariant, each prefixed with its field path.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.schema != SCHEMA {
            v.push(format!("schema: expected \"{SCHEMA}\", found \"{}\"", self.schema));
        }
        if !self.system.psi_db.is_finite() {
            v.push(format!("system.psi_db: {} must be finite", self.system.psi_db));
        }
        v.extend(self.system().violations().into_iter().map(|m| format!("system: {m}")));
        v.extend(self.scenario().violations().into_iter().map(|m| format!("scenario: {m}")));
        if self.monte_carlo.trials < 1 {
            v.push("monte_carlo.trials: must be at least 1".into());
        }
        if let Err(m) = self.numerics().validate() {
            v.push(format!("numerics: {m}"));
        }
        if self.outputs.schemes.is_empty() {
            v.push("outputs.schemes: must not be empty".into());
        }
        if self.outputs.jamming.is_empty() {
            v.push("outputs.jamming: must not be empty".into());
        }
        if self.outputs.methods.is_empty() {
            v.push("outputs.methods: must not be empty".into());
        }
        for (i, p) in self.eve_positions.iter().enumerate() {
            if let Err(e) = p.validate("eavesdropper") {
                v.push(format!("eve_positions[{i}]: {e}"));
            }
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                v.push("sweep.values: must not be empty".into());
            }
            for (i, &x) in s.values.iter().enumerate() {
                match self.apply(s.parameter, x) {
                    Err(m) => v.push(format!("sweep.values[{i}]: {m}")),
                    Ok((sys, sc)) => {
                        for m in sys.violations().into_iter().chain(sc.violations()) {
                            v.push(format!("sweep.values[{i}] ({} = {x}): {m}", s.parameter));
                        }
                    }
                }
            }
        }
        if let Some(c) = &self.corridor {
            v.extend(c.violations().into_iter().map(|m| format!("corridor: {m}")));
        }
        v
    }
}

/// Reads, parses and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Parses and validates configuration text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." || path.is_empty() {
            CliError::Config(inner.to_string())
        } else {
            CliError::Config(format!("{path}: {inner}"))
        }
    })?;
    let v = cfg.violations();
    if v.is_empty() {
        Ok(cfg)
    } else {
        Err(CliError::Config(v.join("\n")))
    }
}
