//! Randomized parameter sets for the special-function kernels, each paired
//! with an independent quadrature of the defining integral.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swarmsec::specfun::*;

use super::{close, integrate, scale_cuts};

/// (parameters, library value, reference value).
pub type Case = (String, Result<f64, SpecFunError>, f64);

pub const REL: f64 = 1e-8;
pub const ABS: f64 = 1e-12;

pub type Generator = fn() -> Vec<Case>;

/// Every kernel with its generator.
pub const KERNELS: [(&str, Generator); 9] = [
    ("phi1", phi1_cases),
    ("phi2", phi2_cases),
    ("theta1", theta1_cases),
    ("theta2", theta2_cases),
    ("theta3", theta3_cases),
    ("theta4", theta4_cases),
    ("theta5", theta5_cases),
    ("theta6", theta6_cases),
    ("theta7", theta7_cases),
];

/// Descriptions of the sets whose value errs or misses the tolerance.
pub fn failures(cases: &[Case]) -> Vec<String> {
    cases
        .iter()
        .filter_map(|(label, got, want)| match got {
            Ok(v) if close(*v, *want, REL, ABS) => None,
            Ok(v) => Some(format!("{label}: {v} vs {want}")),
            Err(e) => Some(format!("{label}: {e}")),
        })
        .collect()
}

pub const SETS: usize = 50;

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

/// Log-uniform draw on [lo, hi].
fn log_uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (r.random_range(lo.ln()..hi.ln())).exp()
}

fn pow_decay(x: f64, v: u32, mu: f64) -> f64 {
    if x == 0.0 {
        if v == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        (v as f64 * x.ln() - mu * x).exp()
    }
}

fn phi1_cases() -> Vec<Case> {
    let mut r = rng(1);
    (0..SETS)
        .map(|_| {
            let u = log_uniform(&mut r, 0.01, 5.0);
            let v: i32 = r.random_range(-6..=8);
            let mu = log_uniform(&mut r, 0.1, 5.0);
            let f = |x: f64| x.powi(v) * (-mu * x).exp();
            let s = (v.max(0) as f64 + 1.0) / mu;
            let cuts: Vec<f64> = scale_cuts(&[s, u]).into_iter().map(|c| u + c).collect();
            let want = integrate(f, u, f64::INFINITY, &cuts, s);
            (format!("u={u} v={v} mu={mu}"), phi1(u, v, mu), want)
        })
        .collect()
}

fn phi2_cases() -> Vec<Case> {
    let mut r = rng(2);
    (0..SETS)
        .map(|_| {
            let g: u32 = r.random_range(1..=8);
            let mu = log_uniform(&mut r, 0.1, 5.0);
            let beta = log_uniform(&mut r, 0.01, 5.0);
            let f = |x: f64| (-mu * x).exp() / (x + beta).powi(g as i32);
            let want = integrate(f, 0.0, f64::INFINITY, &scale_cuts(&[beta, 1.0 / mu]), 1.0 / mu);
            (format!("g={g} mu={mu} beta={beta}"), phi2(g, mu, beta), want)
        })
        .collect()
}

fn theta1_cases() -> Vec<Case> {
    let mut r = rng(3);
    let n = Numerics::default();
    (0..SETS)
        .map(|_| {
            let v: u32 = r.random_range(0..=6);
            let g: u32 = r.random_range(1..=12);
            let mu = log_uniform(&mut r, 0.1, 5.0);
            let a = log_uniform(&mut r, 1e-3, 5.0);
            let b = log_uniform(&mut r, 1e-3, 5.0);
            let f = |x: f64| pow_decay(x, v, mu) * ((x + a) / (x + b)).powi(g as i32);
            let s = (v as f64 + 1.0) / mu;
            let want = integrate(f, 0.0, f64::INFINITY, &scale_cuts(&[s, a, b]), s);
            (format!("v={v} g={g} mu={mu} a={a} b={b}"), theta1(v, g, mu, a, b, &n), want)
        })
        .collect()
}

fn theta2_cases() -> Vec<Case> {
    let mut r = rng(4);
    let n = Numerics::default();
    (0..SETS)
        .map(|_| {
            let v: u32 = r.random_range(0..=6);
            let g: u32 = r.random_range(0..=6);
            let mu = log_uniform(&mut r, 0.1, 5.0);
            let rho = r.random_range(0.0..10.0);
            let b = log_uniform(&mut r, 0.01, 5.0);
            let f = |x: f64| {
                let q = x / (x + b);
                pow_decay(x, v, mu) * q.powi(g as i32) * (-rho * q).exp()
            };
            let s = (v as f64 + 1.0) / mu;
            let want = integrate(f, 0.0, f64::INFINITY, &scale_cuts(&[s, b]), s);
            (format!("v={v} g={g} mu={mu} rho={rho} b={b}"), theta2(v, g, mu, rho, b, &n), want)
        })
        .collect()
}

fn theta3_cases() -> Vec<Case> {
    let mut r = rng(5);
    let n = Numerics::default();
    (0..SETS)
        .map(|_| {
            let v: u32 = r.random_range(0..=5);
            let g: u32 = r.random_range(1..=8);
            let l: u32 = r.random_range(0..=5);
            let mu = log_uniform(&mut r, 0.1, 5.0);
            let rho = r.random_range(0.0..10.0);
            let a = log_uniform(&mut r, 1e-3, 5.0);
            let b = log_uniform(&mut r, 1e-3, 5.0);
            let xi = log_uniform(&mut r, 1e-2, 5.0);
            let f = |x: f64| {
                let q = x / (x + xi);
                pow_decay(x, v, mu) * ((x + a) / (x + b)).powi(g as i32) * q.powi(l as i32) * (-rho * q).exp()
            };
            let s = (v as f64 + 1.0) / mu;
            let want = integrate(f, 0.0, f64::INFINITY, &scale_cuts(&[s, a, b, xi]), s);
            (
                format!("v={v} g={g} l={l} mu={mu} rho={rho} a={a} b={b} xi={xi}"),
                theta3(v, g, l, mu, rho, a, b, xi, &n),
                want,
            )
        })
        .collect()
}

fn theta4_cases() -> Vec<Case> {
    let mut r = rng(6);
    let n = Numerics::default();
    (0..SETS)
        .map(|i| {
            let v: u32 = r.random_range(0..=5);
            let g: u32 = r.random_range(0..=5);
            let mu = log_uniform(&mut r, 0.1, 5.0);
            let rho = log_uniform(&mut r, 0.05, 10.0);
            let b = log_uniform(&mut r, 0.1, 5.0);
            // Half the sets sit on the pole boundary u = β.
            let u = if i % 2 == 0 { b } else { b * r.random_range(0.05..0.95) };
            let f = |x: f64| {
                let gap = b - x;
                if gap <= 0.0 {
                    return 0.0;
                }
                let q = x / gap;
                pow_decay(x, v, mu) * q.powi(g as i32) * (-rho * q).exp()
            };
            let want = integrate(f, 0.0, u, &scale_cuts(&[(v as f64 + 1.0) / mu]), 1.0);
            (format!("u={u} v={v} g={g} mu={mu} rho={rho} b={b}"), theta4(u, v, g, mu, rho, b, &n), want)
        })
        .collect()
}

fn theta5_cases() -> Vec<Case> {
    let mut r = rng(7);
    let n = Numerics::default();
    (0..SETS)
        .map(|_| {
            let u = log_uniform(&mut r, 1e-3, 5.0);
            let v: u32 = r.random_range(0..=6);
            let g: u32 = r.random_range(1..=12);
            let mu = log_uniform(&mut r, 0.1, 5.0);
            let a = log_uniform(&mut r, 1e-3, 5.0);
            let b = log_uniform(&mut r, 1e-3, 5.0);
            let f = |x: f64| pow_decay(x, v, mu) * ((x + a) / (x + b)).powi(g as i32);
            let s = (v as f64 + 1.0) / mu;
            let cuts: Vec<f64> = scale_cuts(&[s, u + a, u + b]).into_iter().map(|c| u + c).collect();
            let want = integrate(f, u, f64::INFINITY, &cuts, s);
            (format!("u={u} v={v} g={g} mu={mu} a={a} b={b}"), theta5(u, v, g, mu, a, b, &n), want)
        })
        .collect()
}

fn theta6_cases() -> Vec<Case> {
    let mut r = rng(8);
    let n = Numerics::default();
    (0..SETS)
        .map(|i| {
            let u = log_uniform(&mut r, 1e-2, 5.0);
            let v: u32 = r.random_range(0..=6);
            let g: u32 = r.random_range(1..=12);
            let mu = log_uniform(&mut r, 0.1, 5.0);
            let a = log_uniform(&mut r, 1e-3, 5.0);
            // Every third set puts the pole -β beyond u instead of below 0.
            let b = if i % 3 == 0 { -(u * r.random_range(1.2..4.0)) } else { log_uniform(&mut r, 1e-3, 5.0) };
            let f = |x: f64| pow_decay(x, v, mu) * ((x + a) / (x + b)).powi(g as i32);
            let want = integrate(f, 0.0, u, &scale_cuts(&[a, b.abs()]), 1.0);
            (format!("u={u} v={v} g={g} mu={mu} a={a} b={b}"), theta6(u, v, g, mu, a, b, &n), want)
        })
        .collect()
}

fn theta7_cases() -> Vec<Case> {
    let mut r = rng(9);
    let n = Numerics::default();
    (0..SETS)
        .map(|_| {
            let v: u32 = r.random_range(0..=6);
            let g: u32 = r.random_range(0..=6);
            let mu = log_uniform(&mut r, 0.1, 5.0);
            let rho = r.random_range(0.0..5.0);
            let a = log_uniform(&mut r, 1e-3, 5.0);
            let f = |x: f64| pow_decay(x, v, mu + rho) * (x + a).powi(g as i32) * (-rho * a).exp();
            let s = (v as f64 + g as f64 + 1.0) / (mu + rho);
            let want = integrate(f, 0.0, f64::INFINITY, &scale_cuts(&[s, a]), s);
            (format!("v={v} g={g} mu={mu} rho={rho} a={a}"), theta7(v, g, mu, rho, a, &n), want)
        })
        .collect()
}
