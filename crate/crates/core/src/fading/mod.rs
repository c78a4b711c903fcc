//! Shadowed-Rician and Rayleigh channel-gain laws.

mod exppoly;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use exppoly::{lower_gamma_integral, ExpPolyMix, ExpPolyTerm};

pub const MAX_SEVERITY: u32 = 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FadingError {
    #[error("invalid shadowed-Rician parameters: {0}")]
    InvalidParams(String),
    #[error("{0}")]
    Domain(String),
}

/// Shadowed-Rician squared-envelope parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShadowedRicianParams {
    /// Integer fading severity.
    pub m: u32,
    /// Half the average multipath power.
    pub b: f64,
    /// Average line-of-sight power.
    pub omega: f64,
}

impl ShadowedRicianParams {
    pub fn new(m: u32, b: f64, omega: f64) -> Result<Self, FadingError> {
        let p = Self { m, b, omega };
        p.validate()?;
        Ok(p)
    }

    /// Average shadowing: (5, 0.251, 0.279).
    pub fn average_shadowing() -> Self {
        Self { m: 5, b: 0.251, omega: 0.279 }
    }

    pub fn validate(&self) -> Result<(), FadingError> {
        if self.m < 1 || self.m > MAX_SEVERITY {
            return Err(FadingError::InvalidParams(format!("m = {} must lie in 1..={MAX_SEVERITY}", self.m)));
        }
        if !(self.b > 0.0) || !self.b.is_finite() {
            return Err(FadingError::InvalidParams(format!("b = {} must be positive", self.b)));
        }
        if !(self.omega >= 0.0) || !self.omega.is_finite() {
            return Err(FadingError::InvalidParams(format!("omega = {} must be nonnegative", self.omega)));
        }
        Ok(())
    }

    /// A = (2bm/(2bm+Ω))^m / (2b).
    pub fn a(&self) -> f64 {
        self.ln_a().exp()
    }

    fn ln_a(&self) -> f64 {
        let two_b_m = 2.0 * self.b * self.m as f64;
        self.m as f64 * (two_b_m / (two_b_m + self.omega)).ln() - (2.0 * self.b).ln()
    }

    /// B = 1/(2b).
    pub fn big_b(&self) -> f64 {
        0.5 / self.b
    }

    /// ϑ = Ω / ((2bm+Ω) 2b).
    pub fn theta(&self) -> f64 {
        self.omega / (2.0 * self.b * self.m as f64 + self.omega) / (2.0 * self.b)
    }

    /// Common decay rate η = B − ϑ.
    pub fn eta(&self) -> f64 {
        let two_b_m = 2.0 * self.b * self.m as f64;
        // B − ϑ = m / (2bm + Ω), written without cancellation.
        self.m as f64 / (two_b_m + self.omega)
    }

    /// Mean gain 2b + Ω.
    pub fn mean(&self) -> f64 {
        2.0 * self.b + self.omega
    }

    /// ζ_l = A (m−l)_l ϑ^l / (l!)², l = 0..m−1, computed in log space.
    pub fn zeta(&self) -> Vec<f64> {
        let ln_a = self.ln_a();
        let theta = self.theta();
        let m = self.m;
        (0..m)
            .map(|l| {
                if l > 0 && theta == 0.0 {
                    return 0.0;
                }
                // rising factorial (m−l)(m−l+1)…(m−1)
                let ln_poch: f64 = (0..l).map(|i| ((m - l + i) as f64).ln()).sum();
                let ln_fact: f64 = (1..=l).map(|i| (i as f64).ln()).sum();
                let ln_theta = if l == 0 { 0.0 } else { l as f64 * theta.ln() };
                (ln_a + ln_poch + ln_theta - 2.0 * ln_fact).exp()
            })
            .collect()
    }

    /// κ_{l,q} = ζ_l (l!/q!) η^{−(l+1−q)}, indexed [l][q] for q ≤ l.
    pub fn kappa(&self) -> Vec<Vec<f64>> {
        let eta = self.eta();
        self.zeta()
            .iter()
            .enumerate()
            .map(|(l, &z)| {
                (0..=l)
                    .map(|q| {
                        let ratio: f64 = (q + 1..=l).map(|i| i as f64).product();
                        z * ratio * eta.powi(-((l + 1 - q) as i32))
                    })
                    .collect()
            })
            .collect()
    }

    /// Σ_l κ_{l,q} for each q: the tail 1 − F(x) = Σ_q κ̄_q x^q e^{−ηx}.
    pub fn tail_coefficients(&self) -> Vec<f64> {
        let k = self.kappa();
        (0..self.m as usize).map(|q| k.iter().skip(q).map(|row| row[q]).sum()).collect()
    }

    /// Mixture weights ζ_l l!/η^{l+1} of the Gamma(l+1, η) components.
    pub fn component_weights(&self) -> Vec<f64> {
        let eta = self.eta();
        self.zeta()
            .iter()
            .enumerate()
            .map(|(l, &z)| {
                let f: f64 = (1..=l).map(|i| i as f64).product();
                z * f / eta.powi(l as i32 + 1)
            })
            .collect()
    }
}

/// PDF as Σ_l ζ_l x^l e^{−ηx}.
pub fn sr_pdf_mixture(p: &ShadowedRicianParams) -> ExpPolyMix {
    let eta = p.eta();
    ExpPolyMix::new(0.0, p.zeta().into_iter().enumerate().map(|(l, z)| ExpPolyTerm::new(z, l as u32, eta)))
}

/// CDF as 1 − Σ_q κ̄_q x^q e^{−ηx}.
pub fn sr_cdf_mixture(p: &ShadowedRicianParams) -> ExpPolyMix {
    let eta = p.eta();
    ExpPolyMix::new(
        1.0,
        p.tail_coefficients().into_iter().enumerate().map(|(q, k)| ExpPolyTerm::new(-k, q as u32, eta)),
    )
}

pub fn rayleigh_gain_pdf() -> ExpPolyMix {
    ExpPolyMix::new(0.0, [ExpPolyTerm::new(1.0, 0, 1.0)])
}

pub fn rayleigh_gain_cdf() -> ExpPolyMix {
    ExpPolyMix::new(1.0, [ExpPolyTerm::new(-1.0, 0, 1.0)])
}

/// Exact sampler for the shadowed-Rician gain as a Gamma mixture.
#[derive(Clone, Debug)]
pub struct SrGainSampler {
    cumulative: Vec<f64>,
    components: Vec<Gamma<f64>>,
}

impl SrGainSampler {
    pub fn new(p: &ShadowedRicianParams) -> Result<Self, FadingError> {
        p.validate()?;
        let w = p.component_weights();
        let total: f64 = w.iter().sum();
        let mut acc = 0.0;
        let cumulative = w
            .iter()
            .map(|x| {
                acc += x / total;
                acc
            })
            .collect();
        let scale = 1.0 / p.eta();
        let components = (0..p.m)
            .map(|l| Gamma::new(l as f64 + 1.0, scale).map_err(|e| FadingError::InvalidParams(e.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(Self { cumulative, components })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let l = self.cumulative.iter().position(|&c| u < c).unwrap_or(self.components.len() - 1);
        self.components[l].sample(rng)
    }
}

/// One draw of the shadowed-Rician gain.
pub fn sample_sr_gain<R: Rng + ?Sized>(p: &ShadowedRicianParams, rng: &mut R) -> Result<f64, FadingError> {
    Ok(SrGainSampler::new(p)?.sample(rng))
}

/// One draw of the unit-mean Rayleigh power gain.
pub fn sample_rayleigh_gain<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_constants() {
        let p = ShadowedRicianParams::average_shadowing();
        assert!((p.a() - 1.1760).abs() < 5e-4);
        assert!((p.big_b() - 1.99203).abs() < 5e-6);
        assert!((p.theta() - 0.19928).abs() < 1e-5);
        assert!((p.eta() - 1.79276).abs() < 5e-6);
        assert!((p.eta() - (p.big_b() - p.theta())).abs() < 1e-14);
    }

    #[test]
    fn single_severity_is_exponential() {
        let p = ShadowedRicianParams::new(1, 0.4, 0.3).unwrap();
        let f = sr_pdf_mixture(&p);
        assert_eq!(f.terms().len(), 1);
        assert!((f.terms()[0].coeff - p.a()).abs() < 1e-15);
    }

    #[test]
    fn pdf_normalized_and_cdf_limits() {
        for m in 1..=MAX_SEVERITY {
            let p = ShadowedRicianParams::new(m, 0.251, 0.279).unwrap();
            let total = sr_pdf_mixture(&p).integrate_0_to_inf().unwrap();
            assert!((total - 1.0).abs() < 1e-10, "m={m}: {total}");
            let c = sr_cdf_mixture(&p);
            assert!(c.evaluate(0.0).abs() < 1e-10);
            assert!((c.evaluate(1e4) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weights_sum_to_one() {
        let w = ShadowedRicianParams::average_shadowing().component_weights();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_is_total_power() {
        let p = ShadowedRicianParams::average_shadowing();
        let m = sr_pdf_mixture(&p).moment(1).unwrap();
        assert!((m - 0.781).abs() < 1e-12);
    }

    #[test]
    fn no_line_of_sight_limit() {
        let p = ShadowedRicianParams::new(1, 0.3, 0.0).unwrap();
        let f = sr_pdf_mixture(&p);
        assert!((f.terms()[0].rate - 1.0 / 0.6).abs() < 1e-15);
        let p3 = ShadowedRicianParams::new(3, 0.3, 0.0).unwrap();
        assert_eq!(sr_pdf_mixture(&p3).terms().len(), 1);
    }

    #[test]
    fn cdf_is_antiderivative_of_pdf() {
        let p = ShadowedRicianParams::average_shadowing();
        let x = 0.781;
        let a = sr_cdf_mixture(&p).evaluate(x);
        let b = sr_pdf_mixture(&p).integrate_0_to(x);
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn rayleigh_reference_points() {
        assert_eq!(rayleigh_gain_pdf().evaluate(0.0), 1.0);
        assert!((rayleigh_gain_cdf().evaluate(2f64.ln()) - 0.5).abs() < 1e-15);
        assert!((rayleigh_gain_pdf().moment(1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(ShadowedRicianParams::new(0, 0.2, 0.1).is_err());
        assert!(ShadowedRicianParams::new(31, 0.2, 0.1).is_err());
        assert!(ShadowedRicianParams::new(2, 0.0, 0.1).is_err());
        assert!(ShadowedRicianParams::new(2, 0.2, -0.1).is_err());
    }
}
