//! Exponential integrals Ei and E_n.

use super::SpecFunError;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;
const TINY: f64 = 1e-300;

/// Principal-value exponential integral Ei(x) for x < 0, where
/// Ei(x) = -E1(-x).
pub fn exp_integral_ei(x: f64) -> Result<f64, SpecFunError> {
    if !(x < 0.0) {
        return Err(SpecFunError::domain("exp_integral_ei", format!("x = {x} must be negative")));
    }
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok(-expint_e1(-x))
}

/// E1(x) = ∫_x^∞ e^{-t}/t dt for x > 0.
pub fn expint_e1(x: f64) -> f64 {
    expint_en_scaled(1, x) * (-x).exp()
}

/// e^x · E_n(x) for x > 0 (or x ≥ 0 with n ≥ 2).
///
/// Uses the power series for x ≤ 1 and the modified Lentz continued fraction
/// otherwise. The scaling keeps the result representable for large x.
pub fn expint_en_scaled(n: u32, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == f64::INFINITY {
        return 0.0;
    }
    if n == 0 {
        return 1.0 / x;
    }
    let nm1 = n - 1;
    if x == 0.0 {
        return if nm1 > 0 { 1.0 / nm1 as f64 } else { f64::INFINITY };
    }
    if x > 1.0 {
        let mut b = x + n as f64;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=MAX_ITER {
            let a = -(i as f64) * (nm1 as f64 + i as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < EPS {
                break;
            }
        }
        h
    } else {
        let mut ans = if nm1 != 0 { 1.0 / nm1 as f64 } else { -x.ln() - EULER_GAMMA };
        let mut fact = 1.0;
        for i in 1..=MAX_ITER {
            fact *= -x / i as f64;
            let del = if i as u32 != nm1 {
                -fact / (i as f64 - nm1 as f64)
            } else {
                let psi = -EULER_GAMMA + (1..=nm1).map(|k| 1.0 / k as f64).sum::<f64>();
                fact * (-x.ln() + psi)
            };
            ans += del;
            if del.abs() < ans.abs() * EPS {
                break;
            }
        }
        ans * x.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ei_minus_one() {
        let v = exp_integral_ei(-1.0).unwrap();
        assert!((v + 0.219_383_934_395_520_27).abs() < 1e-15);
    }

    #[test]
    fn ei_rejects_nonnegative() {
        assert!(exp_integral_ei(0.0).is_err());
        assert!(exp_integral_ei(1.0).is_err());
        assert!(exp_integral_ei(f64::NAN).is_err());
    }

    #[test]
    fn ei_vanishes_at_minus_infinity() {
        assert_eq!(exp_integral_ei(f64::NEG_INFINITY).unwrap(), 0.0);
        assert!(exp_integral_ei(-700.0).unwrap().abs() < 1e-300);
    }

    #[test]
    fn e1_reference_values() {
        // Abramowitz & Stegun table 5.1.
        let cases = [(0.5, 0.559_773_594_776_160_8), (2.0, 0.048_900_510_708_061_12), (10.0, 4.156_968_929_685_324e-6)];
        for (x, e) in cases {
            let v = expint_e1(x);
            assert!(((v - e) / e).abs() < 1e-13, "x={x}: {v} vs {e}");
        }
    }

    #[test]
    fn en_recurrence_links_orders() {
        // n E_{n+1}(x) = e^{-x} - x E_n(x)
        for &x in &[0.05, 0.7, 1.0, 1.3, 6.0, 40.0] {
            for n in 1..12u32 {
                let lhs = n as f64 * expint_en_scaled(n + 1, x);
                let rhs = 1.0 - x * expint_en_scaled(n, x);
                assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1e-3), "n={n} x={x}");
            }
        }
    }
}
