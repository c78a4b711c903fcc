//! Independent reference quadrature for the test suites.
//!
//! Double-exponential rules: tanh-sinh on finite intervals and exp-sinh on
//! half-lines. They share no code with the library's Gauss-Kronrod integrator.

#![allow(dead_code)]

pub mod kernels;
pub mod laws;

use std::f64::consts::FRAC_PI_2;

const MAX_LEVEL: usize = 12;

/// ∫_a^b f by tanh-sinh, refined until successive levels agree to `tol`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    // Node at t: x = c ± r·tanh(π/2·sinh t); the distance to the nearest
    // endpoint is computed directly to avoid cancellation.
    let eval = |t: f64| -> f64 {
        let s = FRAC_PI_2 * t.sinh();
        let ch = FRAC_PI_2 * t.cosh();
        let e = (-2.0 * s.abs()).exp();
        let gap = 2.0 * e / (1.0 + e);
        let w = ch * 4.0 * e / ((1.0 + e) * (1.0 + e));
        let (xl, xr) = (a + r * gap, b - r * gap);
        if w == 0.0 || gap == 0.0 {
            return 0.0;
        }
        if t == 0.0 {
            r * w * f(c)
        } else {
            r * w * (f(xl) + f(xr))
        }
    };
    let t_max = 6.5;
    let mut h = 1.0;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        sum += eval(k as f64 * h);
        k += 1;
    }
    let mut prev = sum * h;
    for _ in 0..MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            sum += eval(k as f64 * h);
            k += 2;
        }
        let cur = sum * h;
        if (cur - prev).abs() <= tol * cur.abs().max(1e-300) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// ∫_a^∞ f by exp-sinh with length scale `s`, x = a + s·exp(π/2·sinh t).
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, s: f64, tol: f64) -> f64 {
    let eval = |t: f64| -> f64 {
        let y = (FRAC_PI_2 * t.sinh()).exp();
        if y == 0.0 || !y.is_finite() {
            return 0.0;
        }
        let w = s * y * FRAC_PI_2 * t.cosh();
        let v = f(a + s * y);
        if v == 0.0 {
            0.0
        } else {
            v * w
        }
    };
    let (t_lo, t_hi) = (-6.0, 4.5);
    let mut h = 0.5;
    let mut sum = 0.0;
    let mut t = t_lo;
    while t <= t_hi {
        sum += eval(t);
        t += h;
    }
    let mut prev = sum * h;
    for _ in 0..MAX_LEVEL {
        h *= 0.5;
        let mut t = t_lo + h;
        while t <= t_hi {
            sum += eval(t);
            t += 2.0 * h;
        }
        let cur = sum * h;
        if (cur - prev).abs() <= tol * cur.abs().max(1e-300) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// ∫_a^b f over pieces split at `cuts` (ignored outside (a, b)); `b` may be +∞,
/// in which case the last piece uses exp-sinh with scale `tail_scale`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cuts: &[f64], tail_scale: f64) -> f64 {
    let tol = 1e-13;
    let mut pts: Vec<f64> = cuts.iter().copied().filter(|&c| c > a && c < b && c.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut edges = vec![a];
    edges.extend(pts);
    let mut total = 0.0;
    for w in edges.windows(2) {
        total += tanh_sinh(&f, w[0], w[1], tol);
    }
    let last = *edges.last().unwrap();
    if b.is_infinite() {
        total += exp_sinh(&f, last, tail_scale, tol);
    } else {
        total += tanh_sinh(&f, last, b, tol);
    }
    total
}

/// |a − b| ≤ max(rel·|b|, abs).
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= (rel * b.abs()).max(abs)
}

/// Kolmogorov–Smirnov statistic of `samples` against a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Asymptotic KS critical value at significance 0.001.
pub fn ks_critical_0p1_percent(n: usize) -> f64 {
    1.9495 / (n as f64).sqrt()
}

/// Geometric cut points between `lo` and `hi` for nonnegative integrands
/// with features at the given scales.
pub fn scale_cuts(scales: &[f64]) -> Vec<f64> {
    let mut c = Vec::new();
    for &s in scales {
        if s > 0.0 && s.is_finite() {
            for k in [0.01, 0.1, 1.0, 10.0] {
                c.push(s * k);
            }
        }
    }
    c
}
