//! Trial-level simulation of the full relaying protocol.
//!
//! Every trial owns a ChaCha8 stream selected by its index, so outcomes are
//! independent of how trials are scheduled across threads. All channel
//! variables are drawn in a fixed order whatever the plan, which lets one pass
//! score both combining schemes with and without jamming on shared draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fading::{sample_rayleigh_gain, FadingError, SrGainSampler};
use crate::protocol::{
    combine_eve, EavesdropperModel, JammingModel, LinkBudget, ProtocolError, Scenario, Scheme, SystemConfig,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Fading(#[from] FadingError),
    #[error("{0}")]
    Plan(String),
}

/// Which outage event is counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SopDefinition {
    /// (1+γ_D)/(1+γ_E) < γ_S.
    Exact,
    /// γ_D/γ_E < γ_S.
    #[default]
    Asymptotic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McPlan {
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub definition: SopDefinition,
    #[serde(default)]
    pub jamming_model: JammingModel,
}

impl Default for McPlan {
    fn default() -> Self {
        Self {
            trials: 1_000_000,
            seed: 1,
            definition: SopDefinition::Asymptotic,
            jamming_model: JammingModel::Approximate,
        }
    }
}

impl McPlan {
    pub fn validate(&self) -> Result<(), McError> {
        if self.trials < 1 {
            return Err(McError::Plan("trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// Binomial proportion estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub trials: u64,
    pub outage_count: u64,
}

impl McEstimate {
    pub fn from_counts(outage_count: u64, trials: u64) -> Self {
        let n = trials as f64;
        let p = outage_count as f64 / n;
        Self { p_hat: p, std_err: (p * (1.0 - p) / n).sqrt(), trials, outage_count }
    }

    /// |p̂ − p| in standard errors, using the larger of the empirical and the
    /// reference binomial variance so a zero empirical spread cannot inflate
    /// the score.
    pub fn z_score(&self, reference: f64) -> f64 {
        let n = self.trials as f64;
        let var = (self.p_hat * (1.0 - self.p_hat)).max(reference * (1.0 - reference));
        let diff = (self.p_hat - reference).abs();
        if diff == 0.0 {
            0.0
        } else if var <= 0.0 {
            f64::INFINITY
        } else {
            diff / (var / n).sqrt()
        }
    }
}

/// Estimates for every (scheme, jamming) pair from one set of draws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimates {
    estimates: [[McEstimate; 2]; 2],
}

impl McEstimates {
    pub fn get(&self, scheme: Scheme, jamming: bool) -> McEstimate {
        self.estimates[scheme as usize][jamming as usize]
    }
}

/// One trial's channel draws.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialDraw {
    pub eve_offset: (f64, f64),
    /// Best source→UAV gain.
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
    /// Jammer→eavesdropper gains.
    pub jammer_eve: Vec<f64>,
    /// Independent source→jammer gains for the exact jamming model.
    pub source_jammer: Vec<f64>,
}

/// Samplers for one scenario.
#[derive(Clone, Debug)]
pub struct TrialSampler {
    uav_count: u32,
    source_relay: SrGainSampler,
    relay_destination: SrGainSampler,
    relay_eve: SrGainSampler,
}

impl TrialSampler {
    pub fn new(scenario: &Scenario, cfg: &SystemConfig) -> Result<Self, McError> {
        Ok(Self {
            uav_count: cfg.uav_count,
            source_relay: SrGainSampler::new(&scenario.fading.source_relay)?,
            relay_destination: SrGainSampler::new(&scenario.fading.relay_destination)?,
            relay_eve: SrGainSampler::new(&scenario.fading.relay_eve)?,
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> TrialDraw {
        let eve_offset = (rng.random::<f64>(), rng.random::<f64>());
        let mut x = 0.0f64;
        for _ in 0..self.uav_count {
            x = x.max(self.source_relay.sample(rng));
        }
        let y = self.relay_destination.sample(rng);
        let z = self.relay_eve.sample(rng);
        let w = sample_rayleigh_gain(rng);
        let jammers = self.uav_count as usize - 1;
        let jammer_eve = (0..jammers).map(|_| self.relay_eve.sample(rng)).collect();
        let source_jammer = (0..jammers).map(|_| self.source_relay.sample(rng)).collect();
        TrialDraw { eve_offset, x, y, z, w, jammer_eve, source_jammer }
    }
}

/// Budget for a trial, placing a disc eavesdropper from the trial's offsets.
fn trial_budget(
    base: &LinkBudget,
    scenario: &Scenario,
    cfg: &SystemConfig,
    d: &TrialDraw,
) -> Result<LinkBudget, McError> {
    match scenario.eavesdropper {
        EavesdropperModel::Fixed(_) => Ok(*base),
        EavesdropperModel::Disc(disc) => {
            let (u, v) = d.eve_offset;
            let r = disc.radius * u.sqrt();
            let th = 2.0 * std::f64::consts::PI * v;
            let c = scenario.source;
            let eve = crate::geometry::NodePosition::new(c.x + r * th.cos(), c.y + r * th.sin(), 0.0);
            let gains = scenario.gains_at(eve)?;
            Ok(LinkBudget::new(cfg, gains, scenario.mean_jammer_gain())?)
        }
    }
}

fn base_budget(scenario: &Scenario, cfg: &SystemConfig) -> Result<LinkBudget, McError> {
    let gains = match scenario.eavesdropper {
        EavesdropperModel::Fixed(e) => scenario.gains_at(e)?,
        // Placeholder; replaced per trial.
        EavesdropperModel::Disc(_) => scenario.gains_at(scenario.source.ground())?,
    };
    Ok(LinkBudget::new(cfg, gains, scenario.mean_jammer_gain())?)
}

/// Outage flags indexed [scheme][jamming].
fn outcomes(b: &LinkBudget, plan: &McPlan, d: &TrialDraw) -> [[bool; 2]; 2] {
    let gd = b.snr_destination(d.x, d.y);
    let gse = b.snr_eve_direct(d.w);
    let jp = match plan.jamming_model {
        JammingModel::Approximate => b.jamming_power_approx(d.jammer_eve.iter().sum()),
        JammingModel::Exact => {
            let pairs: Vec<(f64, f64)> = d.source_jammer.iter().copied().zip(d.jammer_eve.iter().copied()).collect();
            b.jamming_power_exact(&pairs)
        }
    };
    let gre = [b.snr_eve_relay(d.x, d.z, 0.0), b.snr_eve_relay(d.x, d.z, jp)];
    let mut out = [[false; 2]; 2];
    for s in Scheme::ALL {
        for j in 0..2 {
            let ge = combine_eve(s, gse, gre[j]);
            out[s as usize][j] = match plan.definition {
                SopDefinition::Asymptotic => gd < b.gamma_s * ge,
                SopDefinition::Exact => 1.0 + gd < b.gamma_s * (1.0 + ge),
            };
        }
    }
    out
}

/// Draws one trial from `rng` and reports whether it is in outage.
pub fn run_trial<R: Rng + ?Sized>(
    rng: &mut R,
    scenario: &Scenario,
    cfg: &SystemConfig,
    plan: &McPlan,
    scheme: Scheme,
    jamming: bool,
) -> Result<bool, McError> {
    let sampler = TrialSampler::new(scenario, cfg)?;
    let base = base_budget(scenario, cfg)?;
    let d = sampler.draw(rng);
    let b = trial_budget(&base, scenario, cfg, &d)?;
    Ok(outcomes(&b, plan, &d)[scheme as usize][jamming as usize])
}

/// RNG for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

const CHUNK: u64 = 4096;

/// All four estimates from shared draws.
pub fn estimate_all(plan: &McPlan, scenario: &Scenario, cfg: &SystemConfig) -> Result<McEstimates, McError> {
    plan.validate()?;
    scenario.validate()?;
    cfg.validate()?;
    let sampler = TrialSampler::new(scenario, cfg)?;
    let base = base_budget(scenario, cfg)?;
    let root = ChaCha8Rng::seed_from_u64(plan.seed);
    let chunks = plan.trials.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<[u64; 4], McError> {
            let mut acc = [0u64; 4];
            for i in c * CHUNK..((c + 1) * CHUNK).min(plan.trials) {
                let mut rng = root.clone();
                rng.set_stream(i);
                let d = sampler.draw(&mut rng);
                let b = trial_budget(&base, scenario, cfg, &d)?;
                let o = outcomes(&b, plan, &d);
                for s in 0..2 {
                    for j in 0..2 {
                        acc[2 * s + j] += o[s][j] as u64;
                    }
                }
            }
            Ok(acc)
        })
        .try_reduce(|| [0u64; 4], |a, b| Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]))?;
    let e = |k: usize| McEstimate::from_counts(counts[k], plan.trials);
    Ok(McEstimates { estimates: [[e(0), e(1)], [e(2), e(3)]] })
}

/// Estimate for one (scheme, jamming) pair.
pub fn estimate_sop(
    plan: &McPlan,
    scenario: &Scenario,
    cfg: &SystemConfig,
    scheme: Scheme,
    jamming: bool,
) -> Result<McEstimate, McError> {
    Ok(estimate_all(plan, scenario, cfg)?.get(scheme, jamming))
}

/// Estimate with the eavesdropper redrawn uniformly on its disc every trial.
pub fn estimate_sop_random_e(
    plan: &McPlan,
    scenario: &Scenario,
    cfg: &SystemConfig,
    scheme: Scheme,
    jamming: bool,
) -> Result<McEstimate, McError> {
    if !matches!(scenario.eavesdropper, EavesdropperModel::Disc(_)) {
        return Err(McError::Plan("random-eavesdropper estimate needs a disc model".into()));
    }
    estimate_sop(plan, scenario, cfg, scheme, jamming)
}
