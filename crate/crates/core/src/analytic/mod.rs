//! Closed-form asymptotic secrecy outage probability.
//!
//! The asymptotic outage event is γ_D < γ_S γ_E. For each combining scheme,
//! with and without jamming, the probability reduces to finite sums of Θ
//! integrals, with at most two numerical integrations left over (the jammer
//! gain and the relay→eavesdropper gain). A disc eavesdropper is handled by
//! substituting mean distances, which gives the Jensen-type lower bound.

mod closed_form;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::composite::{max_gain_dist, sum_gain_dist};
use crate::fading::{sr_pdf_mixture, ExpPolyMix, FadingError, ShadowedRicianParams};
use crate::geometry::{distance, expected_disc_distances, GeometryError};
use crate::montecarlo::SopDefinition;
use crate::protocol::{EavesdropperModel, LinkBudget, PathGains, ProtocolError, Scenario, Scheme, SystemConfig};
use crate::specfun::{Numerics, SpecFunError};

/// Raw values may leave [0, 1] by at most this much before being rejected.
pub const CLAMP_SLACK: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Fading(#[from] FadingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] SpecFunError),
    #[error("{0}")]
    Query(String),
    #[error("raw probability {0} outside [0, 1] beyond tolerance")]
    Overshoot(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    #[serde(rename = "mc")]
    MonteCarlo,
}

/// An outage probability with its provenance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SopResult {
    pub value: f64,
    /// Value before clamping to [0, 1].
    pub raw_value: f64,
    pub method: Method,
    pub scheme: Scheme,
    pub jamming: bool,
    pub definition: SopDefinition,
    /// Binomial standard error for Monte Carlo results.
    pub std_err: Option<f64>,
    /// True when the value is the mean-distance bound for a disc eavesdropper.
    pub lower_bound: bool,
}

impl SopResult {
    fn analytic(raw: f64, scheme: Scheme, jamming: bool, lower_bound: bool) -> Result<Self, AnalyticError> {
        if !(-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&raw) {
            return Err(AnalyticError::Overshoot(raw));
        }
        Ok(Self {
            value: raw.clamp(0.0, 1.0),
            raw_value: raw,
            method: Method::Analytic,
            scheme,
            jamming,
            definition: SopDefinition::Asymptotic,
            std_err: None,
            lower_bound,
        })
    }
}

/// What to evaluate; the eavesdropper model comes from the scenario.
#[derive(Clone, Copy, Debug)]
pub struct SopQuery<'a> {
    pub scheme: Scheme,
    pub jamming: bool,
    pub scenario: &'a Scenario,
    pub cfg: &'a SystemConfig,
}

/// Shadowed-Rician link law in the forms the expressions use.
#[derive(Clone, Debug)]
pub(crate) struct LinkLaw {
    pub zeta: Vec<f64>,
    pub eta: f64,
    /// κ̄_q: 1 − F(x) = Σ_q κ̄_q x^q e^{−ηx}.
    pub tail: Vec<f64>,
    pub pdf: ExpPolyMix,
}

impl LinkLaw {
    fn new(p: &ShadowedRicianParams) -> Self {
        Self { zeta: p.zeta(), eta: p.eta(), tail: p.tail_coefficients(), pdf: sr_pdf_mixture(p) }
    }

    pub fn tail_at(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 0.0;
        }
        let e = (-self.eta * x).exp();
        if e == 0.0 {
            return 0.0;
        }
        let mut s = 0.0;
        let mut p = 1.0;
        for &k in &self.tail {
            s += k * p;
            p *= x;
        }
        s * e
    }
}

/// Everything the closed forms need for one set of path gains.
pub(crate) struct Model<'n> {
    pub b: LinkBudget,
    /// f_X grouped by rate: (a, [(k, c·k!)]).
    pub x_groups: Vec<(f64, Vec<(u32, f64)>)>,
    pub x_max_power: u32,
    pub y: LinkLaw,
    pub z: LinkLaw,
    /// Law of the aggregate jammer gain; None for a single UAV.
    pub jam: Option<ExpPolyMix>,
    pub num: &'n Numerics,
}

impl<'n> Model<'n> {
    pub fn new(
        scenario: &Scenario,
        cfg: &SystemConfig,
        gains: PathGains,
        num: &'n Numerics,
    ) -> Result<Self, AnalyticError> {
        let b = LinkBudget::new(cfg, gains, scenario.mean_jammer_gain())?;
        let x = max_gain_dist(&scenario.fading.source_relay, cfg.uav_count)?;
        let x_groups = x
            .pdf
            .rate_groups()
            .into_iter()
            .map(|(a, terms)| (a, terms.into_iter().map(|(k, c)| (k, c * crate::specfun::factorial(k))).collect()))
            .collect();
        let jam = if cfg.uav_count > 1 {
            Some(sum_gain_dist(&scenario.fading.relay_eve, cfg.uav_count - 1)?.pdf)
        } else {
            None
        };
        Ok(Self {
            b,
            x_groups,
            x_max_power: x.pdf.max_power(),
            y: LinkLaw::new(&scenario.fading.relay_destination),
            z: LinkLaw::new(&scenario.fading.relay_eve),
            jam,
            num,
        })
    }
}

fn check_query(q: &SopQuery, scheme: Scheme, jamming: bool) -> Result<(), AnalyticError> {
    if q.scheme != scheme || q.jamming != jamming {
        return Err(AnalyticError::Query(format!(
            "query is ({}, jamming={}) but this evaluator handles ({}, jamming={jamming})",
            q.scheme.label(),
            q.jamming,
            scheme.label()
        )));
    }
    Ok(())
}

/// Asymptotic SOP for explicit path gains.
pub fn sop_for_gains(
    scenario: &Scenario,
    cfg: &SystemConfig,
    gains: PathGains,
    scheme: Scheme,
    jamming: bool,
    num: &Numerics,
) -> Result<f64, AnalyticError> {
    cfg.validate()?;
    num.validate().map_err(AnalyticError::Query)?;
    if cfg.alpha == 0.0 {
        // No harvesting: the relay cannot forward and γ_D = 0.
        return Ok(1.0);
    }
    let m = Model::new(scenario, cfg, gains, num)?;
    if m.b.gamma_s <= 1.0 {
        return Err(AnalyticError::Query("target secrecy SNR must exceed 1".into()));
    }
    match (scheme, jamming) {
        (Scheme::Sc, false) => closed_form::sc_without_jamming(&m),
        (Scheme::Mrc, false) => closed_form::mrc_without_jamming(&m),
        (Scheme::Sc, true) => closed_form::with_jamming(&m, Scheme::Sc),
        (Scheme::Mrc, true) => closed_form::with_jamming(&m, Scheme::Mrc),
    }
}

fn fixed(q: &SopQuery, num: &Numerics) -> Result<SopResult, AnalyticError> {
    q.scenario.validate()?;
    let gains = q.scenario.fixed_gains()?;
    let raw = sop_for_gains(q.scenario, q.cfg, gains, q.scheme, q.jamming, num)?;
    SopResult::analytic(raw, q.scheme, q.jamming, false)
}

/// Selection combining, no jamming.
pub fn sop_sc_nojam(q: &SopQuery, num: &Numerics) -> Result<SopResult, AnalyticError> {
    check_query(q, Scheme::Sc, false)?;
    fixed(q, num)
}

/// Selection combining with jamming.
pub fn sop_sc_jam(q: &SopQuery, num: &Numerics) -> Result<SopResult, AnalyticError> {
    check_query(q, Scheme::Sc, true)?;
    fixed(q, num)
}

/// Maximum-ratio combining, no jamming.
pub fn sop_mrc_nojam(q: &SopQuery, num: &Numerics) -> Result<SopResult, AnalyticError> {
    check_query(q, Scheme::Mrc, false)?;
    fixed(q, num)
}

/// Maximum-ratio combining with jamming.
pub fn sop_mrc_jam(q: &SopQuery, num: &Numerics) -> Result<SopResult, AnalyticError> {
    check_query(q, Scheme::Mrc, true)?;
    fixed(q, num)
}

/// Path gains with eavesdropper distances replaced by their disc means.
pub fn mean_distance_gains(scenario: &Scenario, num: &Numerics) -> Result<PathGains, AnalyticError> {
    let EavesdropperModel::Disc(disc) = scenario.eavesdropper else {
        return Err(AnalyticError::Query("mean-distance gains need a disc eavesdropper".into()));
    };
    let (r_se, r_re) = expected_disc_distances(&disc, scenario.source, scenario.swarm, &num.quad)?;
    Ok(PathGains::from_distances(
        &scenario.path_loss,
        distance(scenario.source, scenario.swarm),
        distance(scenario.swarm, scenario.destination),
        r_re,
        r_se,
    )?)
}

/// Disc eavesdropper: the fixed-eavesdropper closed form at mean distances.
pub fn sop_lower_bound_random_e(q: &SopQuery, num: &Numerics) -> Result<SopResult, AnalyticError> {
    q.scenario.validate()?;
    let gains = mean_distance_gains(q.scenario, num)?;
    let raw = sop_for_gains(q.scenario, q.cfg, gains, q.scheme, q.jamming, num)?;
    SopResult::analytic(raw, q.scheme, q.jamming, true)
}

/// Dispatches on the scenario's eavesdropper model.
pub fn evaluate(q: &SopQuery, num: &Numerics) -> Result<SopResult, AnalyticError> {
    match q.scenario.eavesdropper {
        EavesdropperModel::Fixed(_) => fixed(q, num),
        EavesdropperModel::Disc(_) => sop_lower_bound_random_e(q, num),
    }
}
