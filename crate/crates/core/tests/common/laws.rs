//! Distribution checks shared by the distribution suite and acceptance run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use swarmsec::composite::{max_gain_dist, sum_gain_dist};
use swarmsec::fading::{rayleigh_gain_cdf, sample_rayleigh_gain, sr_cdf_mixture, sr_pdf_mixture, SrGainSampler};
use swarmsec::ShadowedRicianParams;

use super::{integrate, ks_critical_0p1_percent, ks_statistic, scale_cuts};

pub const DRAWS: usize = 1_000_000;
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Light to heavy shadowing, and a large severity parameter.
pub fn fading_cases() -> Vec<ShadowedRicianParams> {
    vec![
        ShadowedRicianParams::average_shadowing(),
        ShadowedRicianParams::new(1, 0.063, 0.000_8).unwrap(),
        ShadowedRicianParams::new(2, 0.063, 0.000_8).unwrap(),
        ShadowedRicianParams::new(10, 0.126, 0.835).unwrap(),
        ShadowedRicianParams::new(20, 0.158, 1.29).unwrap(),
    ]
}

/// Largest |∫f − 1| over the closed form and an independent quadrature.
pub fn normalization_error(p: &ShadowedRicianParams) -> f64 {
    let pdf = sr_pdf_mixture(p);
    let closed = pdf.integrate_0_to_inf().unwrap();
    let s = p.mean().max(1e-3);
    let numeric = integrate(|x| pdf.evaluate(x), 0.0, f64::INFINITY, &scale_cuts(&[s]), s);
    (closed - 1.0).abs().max((numeric - 1.0).abs())
}

/// A KS statistic with its 0.1% critical value.
#[derive(Clone, Copy, Debug)]
pub struct Ks {
    pub d: f64,
    pub critical: f64,
}

impl Ks {
    fn of(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> Self {
        let critical = ks_critical_0p1_percent(xs.len());
        Self { d: ks_statistic(&mut xs, cdf), critical }
    }

    pub fn passes(&self) -> bool {
        self.d < self.critical
    }
}

pub fn sampler_ks(p: &ShadowedRicianParams, seed: u64) -> Ks {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = SrGainSampler::new(p).unwrap();
    let cdf = sr_cdf_mixture(p);
    Ks::of((0..DRAWS).map(|_| s.sample(&mut rng)).collect(), |x| cdf.evaluate(x))
}

pub fn rayleigh_ks(seed: u64) -> Ks {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cdf = rayleigh_gain_cdf();
    Ks::of((0..DRAWS).map(|_| sample_rayleigh_gain(&mut rng)).collect(), |x| cdf.evaluate(x))
}

/// Best-of-`uavs` law against the maximum of sampled gains.
pub fn max_ks(p: &ShadowedRicianParams, uavs: u32, seed: u64) -> Ks {
    let law = max_gain_dist(p, uavs).unwrap();
    let s = SrGainSampler::new(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = (0..DRAWS).map(|_| (0..uavs).map(|_| s.sample(&mut rng)).fold(0.0, f64::max)).collect();
    Ks::of(xs, |x| law.cdf.evaluate(x))
}

/// Aggregate-gain law against the sum of `count` sampled gains.
pub fn sum_ks(p: &ShadowedRicianParams, count: u32, seed: u64) -> Ks {
    let law = sum_gain_dist(p, count).unwrap();
    let s = SrGainSampler::new(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = (0..DRAWS).map(|_| (0..count).map(|_| s.sample(&mut rng)).sum()).collect();
    Ks::of(xs, |x| law.cdf(x))
}
