//! Time-switching wireless-powered relaying: configuration, derived constants,
//! instantaneous SNRs, eavesdropper combining and jamming power.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fading::ShadowedRicianParams;
use crate::geometry::{distance, path_loss, EavesdropperDisc, NodePosition, PathLossModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("invalid configuration: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("{0}")]
    Domain(String),
}

/// Combining at the eavesdropper.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Sc,
    Mrc,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Sc, Scheme::Mrc];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Sc => "sc",
            Scheme::Mrc => "mrc",
        }
    }
}

/// How jammer transmit power is modelled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum JammingModel {
    /// Per-jammer harvested energy from sampled gains, including harvested noise.
    Exact,
    /// Common power from the mean source-to-jammer gain.
    #[default]
    Approximate,
}

/// Protocol and power parameters (block length normalized to 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// Transmit SNR P_S/σ², linear.
    pub psi: f64,
    /// Fraction of the block spent harvesting.
    pub alpha: f64,
    /// Energy-conversion efficiency.
    pub eta_eh: f64,
    /// Fraction of harvested energy jammers spend.
    pub delta: f64,
    pub uav_count: u32,
    /// Target secrecy rate, bits/s/Hz.
    pub c_th: f64,
}

impl SystemConfig {
    /// 40 dB, α = 0.8, η = 0.8, δ = 1, U = 5, C_th = 0.1.
    pub fn baseline() -> Self {
        Self { psi: 1e4, alpha: 0.8, eta_eh: 0.8, delta: 1.0, uav_count: 5, c_th: 0.1 }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.psi > 0.0) || !self.psi.is_finite() {
            v.push(format!("psi = {} must be positive", self.psi));
        }
        if !(self.alpha >= 0.0 && self.alpha < 1.0) {
            v.push(format!("alpha = {} must lie in [0, 1)", self.alpha));
        }
        if !(self.eta_eh > 0.0 && self.eta_eh < 1.0) {
            v.push(format!("eta_eh = {} must lie in (0, 1)", self.eta_eh));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            v.push(format!("delta = {} must lie in (0, 1]", self.delta));
        }
        if self.uav_count < 1 {
            v.push("uav_count must be at least 1".into());
        }
        if !(self.c_th > 0.0) || !self.c_th.is_finite() {
            v.push(format!("c_th = {} must be positive", self.c_th));
        }
        v
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ProtocolError::Invalid(v))
        }
    }
}

/// ε and γ_S.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedConstants {
    /// 2 η α / (1 − α).
    pub epsilon: f64,
    /// 2^{2 C_th / (1 − α)}.
    pub gamma_s: f64,
}

pub fn derived_constants(cfg: &SystemConfig) -> Result<DerivedConstants, ProtocolError> {
    if !(cfg.alpha < 1.0) {
        return Err(ProtocolError::Domain(format!("alpha = {} leaves no transmission time", cfg.alpha)));
    }
    cfg.validate()?;
    let rest = 1.0 - cfg.alpha;
    Ok(DerivedConstants { epsilon: 2.0 * cfg.eta_eh * cfg.alpha / rest, gamma_s: (2.0 * cfg.c_th / rest).exp2() })
}

/// Where the eavesdropper is.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum EavesdropperModel {
    Fixed(NodePosition),
    /// Uniform on a ground disc centred below the source.
    Disc(EavesdropperDisc),
}

/// Fading laws of the air-to-ground links.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkFading {
    /// Source to each UAV (also source to jammers).
    pub source_relay: ShadowedRicianParams,
    pub relay_destination: ShadowedRicianParams,
    /// Each UAV to the eavesdropper (also jammers to the eavesdropper).
    pub relay_eve: ShadowedRicianParams,
}

impl LinkFading {
    pub fn uniform(p: ShadowedRicianParams) -> Self {
        Self { source_relay: p, relay_destination: p, relay_eve: p }
    }
}

/// Node placement, propagation and fading.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub source: NodePosition,
    pub destination: NodePosition,
    /// Swarm centroid; all UAVs share its path loss.
    pub swarm: NodePosition,
    pub eavesdropper: EavesdropperModel,
    pub path_loss: PathLossModel,
    pub fading: LinkFading,
}

/// Large-scale gains λ of the four links.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathGains {
    pub source_relay: f64,
    pub relay_destination: f64,
    pub relay_eve: f64,
    pub source_eve: f64,
}

impl PathGains {
    pub fn from_distances(model: &PathLossModel, sr: f64, rd: f64, re: f64, se: f64) -> Result<Self, ProtocolError> {
        let pl = |d: f64| path_loss(model, d).map_err(|e| ProtocolError::Domain(e.to_string()));
        Ok(Self { source_relay: pl(sr)?, relay_destination: pl(rd)?, relay_eve: pl(re)?, source_eve: pl(se)? })
    }
}

impl Scenario {
    /// S = (300,300,25), D = (600,300,0), swarm (350,300,60), E (600,400,0).
    pub fn baseline() -> Self {
        Self {
            source: NodePosition::new(300.0, 300.0, 25.0),
            destination: NodePosition::new(600.0, 300.0, 0.0),
            swarm: NodePosition::new(350.0, 300.0, 60.0),
            eavesdropper: EavesdropperModel::Fixed(NodePosition::new(600.0, 400.0, 0.0)),
            path_loss: PathLossModel::default(),
            fading: LinkFading::uniform(ShadowedRicianParams::average_shadowing()),
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (name, p) in [("source", self.source), ("destination", self.destination), ("swarm", self.swarm)] {
            if let Err(e) = p.validate(name) {
                v.push(e.to_string());
            }
        }
        match &self.eavesdropper {
            EavesdropperModel::Fixed(p) => {
                if let Err(e) = p.validate("eavesdropper") {
                    v.push(e.to_string());
                }
            }
            EavesdropperModel::Disc(d) => {
                if let Err(e) = d.validate() {
                    v.push(e.to_string());
                }
            }
        }
        if let Err(e) = self.path_loss.validate() {
            v.push(e.to_string());
        }
        for (name, f) in [
            ("fading.source_relay", self.fading.source_relay),
            ("fading.relay_destination", self.fading.relay_destination),
            ("fading.relay_eve", self.fading.relay_eve),
        ] {
            if let Err(e) = f.validate() {
                v.push(format!("{name}: {e}"));
            }
        }
        for (name, a, b) in
            [("source and swarm", self.source, self.swarm), ("swarm and destination", self.swarm, self.destination)]
        {
            if distance(a, b) <= 0.0 {
                v.push(format!("{name} coincide"));
            }
        }
        v
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ProtocolError::Invalid(v))
        }
    }

    /// Path gains with the eavesdropper at `eve`.
    pub fn gains_at(&self, eve: NodePosition) -> Result<PathGains, ProtocolError> {
        PathGains::from_distances(
            &self.path_loss,
            distance(self.source, self.swarm),
            distance(self.swarm, self.destination),
            distance(self.swarm, eve),
            distance(self.source, eve),
        )
    }

    /// Path gains for a fixed eavesdropper.
    pub fn fixed_gains(&self) -> Result<PathGains, ProtocolError> {
        match self.eavesdropper {
            EavesdropperModel::Fixed(e) => self.gains_at(e),
            EavesdropperModel::Disc(_) => Err(ProtocolError::Domain("eavesdropper is not at a fixed position".into())),
        }
    }

    /// Mean source-to-jammer gain g = 2b + Ω.
    pub fn mean_jammer_gain(&self) -> f64 {
        self.fading.source_relay.mean()
    }
}

/// Everything needed to turn channel draws into SNRs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkBudget {
    pub psi: f64,
    pub alpha: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub gamma_s: f64,
    pub gains: PathGains,
    pub mean_jammer_gain: f64,
}

impl LinkBudget {
    pub fn new(cfg: &SystemConfig, gains: PathGains, mean_jammer_gain: f64) -> Result<Self, ProtocolError> {
        let d = derived_constants(cfg)?;
        Ok(Self {
            psi: cfg.psi,
            alpha: cfg.alpha,
            delta: cfg.delta,
            epsilon: d.epsilon,
            gamma_s: d.gamma_s,
            gains,
            mean_jammer_gain,
        })
    }

    /// γ_D = εψλ_SRλ_RD x y / (ελ_RD y + 1).
    pub fn snr_destination(&self, x: f64, y: f64) -> f64 {
        let g = &self.gains;
        let num = self.epsilon * self.psi * g.source_relay * g.relay_destination * x * y;
        if num == 0.0 {
            0.0
        } else {
            num / (self.epsilon * g.relay_destination * y + 1.0)
        }
    }

    /// γ_SE = ψ λ_SE w.
    pub fn snr_eve_direct(&self, w: f64) -> f64 {
        self.psi * self.gains.source_eve * w
    }

    /// γ_RE = εψλ_SRλ_RE x z / (ελ_RE z + 1 + jamming_power).
    pub fn snr_eve_relay(&self, x: f64, z: f64, jamming_power: f64) -> f64 {
        let g = &self.gains;
        let num = self.epsilon * self.psi * g.source_relay * g.relay_eve * x * z;
        if num == 0.0 {
            0.0
        } else {
            num / (self.epsilon * g.relay_eve * z + 1.0 + jamming_power)
        }
    }

    /// P_J = δ ε ψ λ_SR g.
    pub fn jamming_coefficient(&self) -> f64 {
        self.delta * self.epsilon * self.psi * self.gains.source_relay * self.mean_jammer_gain
    }

    /// P_J λ_RE 𝒥 for aggregate jammer-to-eavesdropper gain `j_sum`.
    pub fn jamming_power_approx(&self, j_sum: f64) -> f64 {
        self.jamming_coefficient() * self.gains.relay_eve * j_sum
    }

    /// δ ε Σ_j (ψ λ_SR s_j + 1) λ_RE e_j over (source→jammer, jammer→eve) gains.
    pub fn jamming_power_exact(&self, pairs: &[(f64, f64)]) -> f64 {
        let g = &self.gains;
        let s: f64 = pairs.iter().map(|&(hs, he)| (self.psi * g.source_relay * hs + 1.0) * g.relay_eve * he).sum();
        self.delta * self.epsilon * s
    }
}

/// Combined eavesdropper SNR.
pub fn combine_eve(scheme: Scheme, gamma_se: f64, gamma_re: f64) -> f64 {
    match scheme {
        Scheme::Sc => gamma_se.max(gamma_re),
        Scheme::Mrc => gamma_se + gamma_re,
    }
}

/// C_S = max(0, (1−α)/2 · log2((1+γ_D)/(1+γ_E))).
pub fn secrecy_capacity(gamma_d: f64, gamma_e: f64, alpha: f64) -> f64 {
    let c = 0.5 * (1.0 - alpha) * ((1.0 + gamma_d) / (1.0 + gamma_e)).log2();
    c.max(0.0)
}
