//! Incomplete gamma-type integrals Φ1 and Φ2.
//!
//! Φ1(u; v, μ) = ∫_u^∞ x^v e^{-μx} dx and Φ2(γ, μ; β) = ∫_0^∞ e^{-μx} (x+β)^{-γ} dx.
//! The negative-order branch is evaluated through Ei plus a finite sum; when
//! that sum cancels badly the equivalent form u^{1-n} E_n(μu) is used instead.

use super::expint::{exp_integral_ei, expint_en_scaled};
use super::sum::CompensatedSum;
use super::SpecFunError;

/// Cancellation ratio beyond which the Ei-plus-sum branch is abandoned.
const BRANCH_CONDITION_LIMIT: f64 = 1e3;

/// Φ1(u; v, μ).
pub fn phi1(u: f64, v: i32, mu: f64) -> Result<f64, SpecFunError> {
    let s = phi1_scaled(u, v, mu)?;
    Ok(if s == 0.0 { 0.0 } else { s * (-mu * u).exp() })
}

/// e^{μu} Φ1(u; v, μ); avoids underflow when μu is large.
pub fn phi1_scaled(u: f64, v: i32, mu: f64) -> Result<f64, SpecFunError> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(SpecFunError::domain("phi1", format!("mu = {mu} must be positive")));
    }
    if !(u >= 0.0) {
        return Err(SpecFunError::domain("phi1", format!("u = {u} must be nonnegative")));
    }
    if u == f64::INFINITY {
        return Ok(0.0);
    }
    if v >= 0 {
        return Ok(positive_order_scaled(u, v as u32, mu));
    }
    if u == 0.0 {
        return Err(SpecFunError::Divergent { what: "phi1", detail: format!("order {v} is not integrable at u = 0") });
    }
    let n = v.unsigned_abs();
    let x = mu * u;
    let (value, condition) = negative_order_branch(u, n, x);
    if condition <= BRANCH_CONDITION_LIMIT && value.is_finite() {
        Ok(value)
    } else {
        Ok(u.powi(1 - n as i32) * expint_en_scaled(n, x))
    }
}

/// e^{μu} Φ1(u; v, μ) for every order v in `lo..=hi` (lo ≤ 0 ≤ hi), u > 0.
///
/// Negative orders come from a single E_n evaluation near n ≈ μu followed by
/// recurrence away from it, which is stable in both directions.
pub(crate) fn phi1_scaled_orders(u: f64, lo: i32, hi: i32, mu: f64) -> Result<Vec<f64>, SpecFunError> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(SpecFunError::domain("phi1", format!("mu = {mu} must be positive")));
    }
    if !(u > 0.0) || lo > 0 || hi < 0 {
        return Err(SpecFunError::domain(
            "phi1",
            format!("u = {u} must be positive with orders {lo}..={hi} spanning 0"),
        ));
    }
    let mut out = vec![0.0; (hi - lo + 1) as usize];
    if u == f64::INFINITY {
        return Ok(out);
    }
    let zero = (-lo) as usize;
    out[zero] = 1.0 / mu;
    for j in 1..=hi as usize {
        out[zero + j] = (u.powi(j as i32) + j as f64 * out[zero + j - 1]) / mu;
    }
    let top = lo.unsigned_abs();
    if top > 0 {
        let x = mu * u;
        // en[n] = e^x E_n(x)
        let mut en = vec![0.0; top as usize + 1];
        let start = (x.floor() as u32).clamp(1, top);
        en[start as usize] = expint_en_scaled(start, x);
        for n in start..top {
            en[n as usize + 1] = (1.0 - x * en[n as usize]) / n as f64;
        }
        for n in (1..start).rev() {
            en[n as usize] = (1.0 - n as f64 * en[n as usize + 1]) / x;
        }
        let mut scale = 1.0;
        for n in 1..=top as usize {
            out[zero - n] = scale * en[n];
            scale /= u;
        }
    }
    Ok(out)
}

fn positive_order_scaled(u: f64, v: u32, mu: f64) -> f64 {
    // Σ_{k=0}^{v} v!/k! u^k / μ^{v-k+1}
    let mut term = factorial(v) / mu.powi(v as i32 + 1);
    let mut acc = term;
    for k in 1..=v {
        term *= u * mu / k as f64;
        acc += term;
    }
    acc
}

/// Ei branch for order -n, scaled by e^{μu}; returns (value, cancellation ratio).
fn negative_order_branch(u: f64, n: u32, x: f64) -> (f64, f64) {
    let nf = factorial(n - 1);
    // e^{x} E1(x) through Ei, kept scaled.
    let e1_scaled = if x < 700.0 { -exp_integral_ei(-x).unwrap_or(0.0) * x.exp() } else { expint_en_scaled(1, x) };
    let mut s = CompensatedSum::new();
    s.add((-x).powi(n as i32 - 1) / nf * e1_scaled);
    for k in 0..n.saturating_sub(1) {
        s.add(factorial(n - k - 2) * (-x).powi(k as i32) / nf);
    }
    let scale = u.powi(1 - n as i32);
    (scale * s.value(), s.condition())
}

/// Φ2(γ, μ; β).
pub fn phi2(gamma: u32, mu: f64, beta: f64) -> Result<f64, SpecFunError> {
    if gamma < 1 {
        return Err(SpecFunError::domain("phi2", "gamma must be at least 1".to_string()));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(SpecFunError::domain("phi2", format!("mu = {mu} must be positive")));
    }
    if !(beta > 0.0) {
        return Err(SpecFunError::domain("phi2", format!("beta = {beta} must be positive")));
    }
    if beta == f64::INFINITY {
        return Ok(0.0);
    }
    let x = beta * mu;
    let g = gamma as i32;
    let e1_scaled = if x < 700.0 { -exp_integral_ei(-x)? * x.exp() } else { expint_en_scaled(1, x) };
    // (-μ)^{γ-1}/(γ-1)! [Σ_{g=1}^{γ-1} (g-1)!/(-βμ)^g + e^{βμ} E1(βμ)]
    let mut s = CompensatedSum::new();
    for k in 1..gamma {
        s.add(factorial(k - 1) / (-x).powi(k as i32));
    }
    s.add(e1_scaled);
    let prefactor = (-mu).powi(g - 1) / factorial(gamma - 1);
    let value = prefactor * s.value();
    if s.condition() <= BRANCH_CONDITION_LIMIT && value.is_finite() {
        Ok(value)
    } else {
        Ok(beta.powi(1 - g) * expint_en_scaled(gamma, x))
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn complete_gamma_case() {
        assert!(close(phi1(0.0, 2, 3.0).unwrap(), 2.0 / 27.0, 1e-15));
    }

    #[test]
    fn exponential_tail() {
        assert!(close(phi1(1.0, 0, 1.0).unwrap(), (-1.0f64).exp(), 1e-15));
    }

    #[test]
    fn negative_order_is_e1() {
        assert!(close(phi1(1.0, -1, 1.0).unwrap(), 0.219_383_934_395_520_27, 1e-14));
    }

    #[test]
    fn negative_order_diverges_at_zero() {
        assert!(matches!(phi1(0.0, -2, 1.0), Err(SpecFunError::Divergent { .. })));
    }

    #[test]
    fn phi2_unit_case() {
        assert!(close(phi2(1, 1.0, 1.0).unwrap(), 0.596_347_362_323_194_1, 1e-14));
    }

    #[test]
    fn phi2_vanishes_for_large_beta() {
        assert!(phi2(3, 1.0, 1e8).unwrap() < 1e-15);
        assert_eq!(phi2(3, 1.0, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn phi2_rejects_zero_order() {
        assert!(phi2(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn recurrence_in_order() {
        for &(u, mu) in &[(0.3, 0.7), (2.0, 1.5), (11.0, 0.2), (0.01, 4.0)] {
            for v in -6..12 {
                let lhs = phi1(u, v, mu).unwrap();
                let rhs = (u.powi(v) * (-mu * u).exp() + v as f64 * phi1(u, v - 1, mu).unwrap()) / mu;
                assert!(close(lhs, rhs, 1e-12), "u={u} v={v} mu={mu}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn order_range_matches_single_orders() {
        for &(u, mu) in &[(1e-4, 0.5), (0.3, 0.7), (2.0, 1.5), (11.0, 0.2), (40.0, 3.0), (1e3, 2.0)] {
            let all = phi1_scaled_orders(u, -24, 6, mu).unwrap();
            for v in -24..=6 {
                let one = phi1_scaled(u, v, mu).unwrap();
                assert!(
                    close(all[(v + 24) as usize], one, 1e-12),
                    "u={u} v={v} mu={mu}: {} vs {one}",
                    all[(v + 24) as usize]
                );
            }
        }
    }

    #[test]
    fn scaled_form_survives_large_arguments() {
        let s = phi1_scaled(1e4, -3, 2.0).unwrap();
        // e^{x} E_3(x) ≈ 1/(x+3) for large x, x = 2e4; times u^{-2}.
        let approx = 1e-8 / (2e4 + 3.0);
        assert!(close(s, approx, 1e-8));
    }
}
