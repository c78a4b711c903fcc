//! Finite mixtures Σ c·x^k·e^{-a x} plus a constant offset.

use std::ops::{Add, Mul, Neg, Sub};

use super::FadingError;
use crate::specfun::factorial;

/// Rates closer than this (relatively) are merged.
const RATE_MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpPolyTerm {
    pub coeff: f64,
    pub power: u32,
    pub rate: f64,
}

impl ExpPolyTerm {
    pub fn new(coeff: f64, power: u32, rate: f64) -> Self {
        Self { coeff, power, rate }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        if self.coeff == 0.0 {
            return 0.0;
        }
        let p = if self.power == 0 { 1.0 } else { x.powi(self.power as i32) };
        if p == 0.0 {
            return 0.0;
        }
        let e = (-self.rate * x).exp();
        if p.is_finite() && e > 0.0 {
            self.coeff * p * e
        } else {
            // Overflow of x^k or underflow of the exponential: combine in logs.
            self.coeff * (self.power as f64 * x.ln() - self.rate * x).exp()
        }
    }
}

/// Exponential-polynomial mixture `offset + Σ c x^k e^{-a x}`.
///
/// Terms are kept sorted by (rate, power) with like terms merged, so equal
/// mixtures compare equal term by term.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ExpPolyMix {
    terms: Vec<ExpPolyTerm>,
    offset: f64,
}

impl ExpPolyMix {
    pub fn new(offset: f64, terms: impl IntoIterator<Item = ExpPolyTerm>) -> Self {
        let mut m = Self { terms: terms.into_iter().collect(), offset };
        m.canonicalize();
        m
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: Vec::new(), offset: c }
    }

    pub fn terms(&self) -> &[ExpPolyTerm] {
        &self.terms
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    fn canonicalize(&mut self) {
        self.terms.retain(|t| t.coeff != 0.0);
        self.terms.sort_by(|a, b| a.rate.total_cmp(&b.rate).then(a.power.cmp(&b.power)));
        let mut out: Vec<ExpPolyTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            // Rates within tolerance snap to the first seen rate of the run.
            let rate = match out.iter().rev().find(|o| same_rate(o.rate, t.rate)) {
                Some(o) => o.rate,
                None => t.rate,
            };
            match out.iter_mut().rev().find(|o| o.rate == rate && o.power == t.power) {
                Some(o) => o.coeff += t.coeff,
                None => out.push(ExpPolyTerm { rate, ..t }),
            }
        }
        out.retain(|t| t.coeff != 0.0);
        out.sort_by(|a, b| a.rate.total_cmp(&b.rate).then(a.power.cmp(&b.power)));
        self.terms = out;
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let mut s = self.offset;
        for t in &self.terms {
            s += t.evaluate(x);
        }
        s
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.offset * s, self.terms.iter().map(|t| ExpPolyTerm { coeff: t.coeff * s, ..*t }))
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity((self.terms.len() + 1) * (other.terms.len() + 1));
        for a in &self.terms {
            for b in &other.terms {
                terms.push(ExpPolyTerm::new(a.coeff * b.coeff, a.power + b.power, a.rate + b.rate));
            }
            if other.offset != 0.0 {
                terms.push(ExpPolyTerm { coeff: a.coeff * other.offset, ..*a });
            }
        }
        if self.offset != 0.0 {
            terms.extend(other.terms.iter().map(|b| ExpPolyTerm { coeff: b.coeff * self.offset, ..*b }));
        }
        Self::new(self.offset * other.offset, terms)
    }

    /// `self^n` by repeated squaring.
    pub fn integer_power(&self, n: u32) -> Self {
        let mut result = Self::constant(1.0);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.multiply(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base);
            }
        }
        result
    }

    /// Closed-form derivative.
    pub fn derivative(&self) -> Self {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.power > 0 {
                terms.push(ExpPolyTerm::new(t.coeff * t.power as f64, t.power - 1, t.rate));
            }
            terms.push(ExpPolyTerm::new(-t.coeff * t.rate, t.power, t.rate));
        }
        Self::new(0.0, terms)
    }

    /// ∫_0^u of the mixture (offset included).
    pub fn integrate_0_to(&self, u: f64) -> f64 {
        if u == f64::INFINITY && self.offset != 0.0 {
            return self.offset.signum() * f64::INFINITY;
        }
        let mut s = if self.offset == 0.0 { 0.0 } else { self.offset * u };
        for t in &self.terms {
            s += t.coeff * lower_gamma_integral(t.power, t.rate, u);
        }
        s
    }

    /// ∫_0^∞ of the mixture; requires zero offset and positive rates.
    pub fn integrate_0_to_inf(&self) -> Result<f64, FadingError> {
        if self.offset != 0.0 {
            return Err(FadingError::Domain("infinite integral of a nonzero constant".into()));
        }
        let mut s = 0.0;
        for t in &self.terms {
            if !(t.rate > 0.0) {
                return Err(FadingError::Domain(format!("infinite integral with rate {} ≤ 0", t.rate)));
            }
            s += t.coeff * factorial(t.power) / t.rate.powi(t.power as i32 + 1);
        }
        Ok(s)
    }

    /// n-th raw moment ∫_0^∞ x^n f(x) dx.
    pub fn moment(&self, n: u32) -> Result<f64, FadingError> {
        let shifted = Self {
            offset: self.offset,
            terms: self.terms.iter().map(|t| ExpPolyTerm { power: t.power + n, ..*t }).collect(),
        };
        shifted.integrate_0_to_inf()
    }

    /// Laplace transform Σ c k!/(a+s)^{k+1}; requires zero offset and a+s > 0.
    pub fn laplace(&self, s: f64) -> Result<f64, FadingError> {
        let shifted = Self {
            offset: self.offset,
            terms: self.terms.iter().map(|t| ExpPolyTerm { rate: t.rate + s, ..*t }).collect(),
        };
        shifted.integrate_0_to_inf()
    }

    /// Convolution of two offset-free mixtures whose terms share one rate.
    pub fn convolve_same_rate(&self, other: &Self) -> Result<Self, FadingError> {
        if self.offset != 0.0 || other.offset != 0.0 {
            return Err(FadingError::Domain("convolution requires offset-free mixtures".into()));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                if !same_rate(a.rate, b.rate) {
                    return Err(FadingError::Domain(format!("rates {} and {} differ", a.rate, b.rate)));
                }
                // (x^{k1} * x^{k2})(t) = k1! k2!/(k1+k2+1)! t^{k1+k2+1}
                let k = a.power + b.power + 1;
                let c = a.coeff * b.coeff * factorial(a.power) * factorial(b.power) / factorial(k);
                terms.push(ExpPolyTerm::new(c, k, a.rate));
            }
        }
        Ok(Self::new(0.0, terms))
    }

    /// Terms grouped by decay rate: (rate, [(power, coeff)]).
    pub fn rate_groups(&self) -> Vec<(f64, Vec<(u32, f64)>)> {
        let mut out: Vec<(f64, Vec<(u32, f64)>)> = Vec::new();
        for t in &self.terms {
            match out.last_mut() {
                Some((r, v)) if *r == t.rate => v.push((t.power, t.coeff)),
                _ => out.push((t.rate, vec![(t.power, t.coeff)])),
            }
        }
        out
    }

    pub fn max_power(&self) -> u32 {
        self.terms.iter().map(|t| t.power).max().unwrap_or(0)
    }

    pub fn min_rate(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.rate).reduce(f64::min)
    }
}

fn same_rate(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= RATE_MERGE_TOL * a.abs().max(b.abs())
}

/// ∫_0^u x^k e^{-a x} dx for integer k, with a ≥ 0.
pub fn lower_gamma_integral(k: u32, a: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if a == 0.0 {
        return u.powi(k as i32 + 1) / (k + 1) as f64;
    }
    let full = factorial(k) / a.powi(k as i32 + 1);
    if u == f64::INFINITY {
        return full;
    }
    let y = a * u;
    if y < k as f64 + 1.0 {
        // e^{-y} Σ_{j>k} y^j/j!, summed directly to avoid cancellation.
        let mut term = (-y).exp() * (1..=k + 1).fold(1.0, |acc, j| acc * y / j as f64);
        let mut s = 0.0;
        let mut j = k + 1;
        while term > s * 1e-17 {
            s += term;
            j += 1;
            term *= y / j as f64;
        }
        full * s
    } else {
        let mut term = 1.0;
        let mut acc = 1.0;
        for j in 1..=k {
            term *= y / j as f64;
            acc += term;
        }
        full * (1.0 - (-y).exp() * acc)
    }
}

impl Add for &ExpPolyMix {
    type Output = ExpPolyMix;
    fn add(self, rhs: &ExpPolyMix) -> ExpPolyMix {
        ExpPolyMix::new(self.offset + rhs.offset, self.terms.iter().chain(rhs.terms.iter()).copied())
    }
}

impl Neg for &ExpPolyMix {
    type Output = ExpPolyMix;
    fn neg(self) -> ExpPolyMix {
        self.scale(-1.0)
    }
}

impl Sub for &ExpPolyMix {
    type Output = ExpPolyMix;
    fn sub(self, rhs: &ExpPolyMix) -> ExpPolyMix {
        self + &(-rhs)
    }
}

impl Mul for &ExpPolyMix {
    type Output = ExpPolyMix;
    fn mul(self, rhs: &ExpPolyMix) -> ExpPolyMix {
        self.multiply(rhs)
    }
}
