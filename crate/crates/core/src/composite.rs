//! Laws of the best-of-U relay gain and of the aggregate jammer gain.

use crate::fading::{sr_cdf_mixture, sr_pdf_mixture, ExpPolyMix, FadingError, ShadowedRicianParams};

/// Law of X = max of `uav_count` i.i.d. shadowed-Rician gains.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxGainDist {
    pub uav_count: u32,
    pub cdf: ExpPolyMix,
    pub pdf: ExpPolyMix,
}

impl MaxGainDist {
    /// Laplace transform E[e^{-sX}].
    pub fn laplace(&self, s: f64) -> Result<f64, FadingError> {
        self.pdf.laplace(s)
    }
}

/// Builds F_X = F^U and f_X = dF_X/dx in closed form.
pub fn max_gain_dist(p: &ShadowedRicianParams, uav_count: u32) -> Result<MaxGainDist, FadingError> {
    p.validate()?;
    if uav_count < 1 {
        return Err(FadingError::Domain("UAV count must be at least 1".into()));
    }
    let cdf = sr_cdf_mixture(p).integer_power(uav_count);
    let pdf = cdf.derivative();
    Ok(MaxGainDist { uav_count, cdf, pdf })
}

/// Law of the sum of `count` i.i.d. shadowed-Rician gains.
#[derive(Clone, Debug, PartialEq)]
pub struct SumGainDist {
    pub count: u32,
    pub pdf: ExpPolyMix,
}

impl SumGainDist {
    pub fn cdf(&self, t: f64) -> f64 {
        self.pdf.integrate_0_to(t)
    }
}

/// f of the sum as a `count`-fold same-rate convolution.
pub fn sum_gain_dist(p: &ShadowedRicianParams, count: u32) -> Result<SumGainDist, FadingError> {
    p.validate()?;
    if count < 1 {
        return Err(FadingError::Domain("sum of zero gains is degenerate at 0".into()));
    }
    let single = sr_pdf_mixture(p);
    let mut pdf = single.clone();
    for _ in 1..count {
        pdf = pdf.convolve_same_rate(&single)?;
    }
    Ok(SumGainDist { count, pdf })
}

/// Direct multi-index expansions, practical only for small U and m; kept as an
/// independent check on the polynomial-power and convolution paths.
pub mod reference {
    use super::*;
    use crate::fading::ExpPolyTerm;
    use crate::specfun::factorial;

    const MAX_COUNT: u32 = 3;
    const MAX_SEVERITY: u32 = 3;

    fn check(p: &ShadowedRicianParams, n: u32) -> Result<(), FadingError> {
        p.validate()?;
        if n > MAX_COUNT || p.m > MAX_SEVERITY {
            return Err(FadingError::Domain(format!(
                "reference expansion limited to count ≤ {MAX_COUNT}, m ≤ {MAX_SEVERITY}"
            )));
        }
        Ok(())
    }

    fn tuples(len: usize, width: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..width {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..len).map(move |i| {
                        let mut t2 = t.clone();
                        t2.push(i);
                        t2
                    })
                })
                .collect();
        }
        out
    }

    /// F_X = Σ_u C(U,u)(−1)^u Σ_{tuples of (l,q)} Π κ_{l,q} x^{Σq} e^{−uηx}.
    pub fn max_gain_cdf(p: &ShadowedRicianParams, uav_count: u32) -> Result<ExpPolyMix, FadingError> {
        check(p, uav_count)?;
        let eta = p.eta();
        let kappa = p.kappa();
        let pairs: Vec<(u32, f64)> =
            kappa.iter().flat_map(|row| row.iter().enumerate().map(|(q, &k)| (q as u32, k))).collect();
        let mut terms = Vec::new();
        for u in 1..=uav_count {
            let binom = factorial(uav_count) / (factorial(u) * factorial(uav_count - u));
            let sign = if u % 2 == 0 { 1.0 } else { -1.0 };
            for t in tuples(pairs.len(), u as usize) {
                let coeff: f64 = t.iter().map(|&i| pairs[i].1).product();
                let power: u32 = t.iter().map(|&i| pairs[i].0).sum();
                terms.push(ExpPolyTerm::new(sign * binom * coeff, power, u as f64 * eta));
            }
        }
        Ok(ExpPolyMix::new(1.0, terms))
    }

    /// f of the sum by inverse Laplace transform of the MGF product:
    /// Σ_{tuples} Π ζ_{l_j} l_j! t^{χ−1} e^{−ηt}/(χ−1)!, χ = Σ (l_j + 1).
    pub fn sum_gain_pdf(p: &ShadowedRicianParams, count: u32) -> Result<ExpPolyMix, FadingError> {
        check(p, count)?;
        if count == 0 {
            return Err(FadingError::Domain("count must be at least 1".into()));
        }
        let eta = p.eta();
        let zeta = p.zeta();
        let mut terms = Vec::new();
        for t in tuples(zeta.len(), count as usize) {
            let coeff: f64 = t.iter().map(|&l| zeta[l] * factorial(l as u32)).product();
            let chi: u32 = t.iter().map(|&l| l as u32 + 1).sum();
            terms.push(ExpPolyTerm::new(coeff / factorial(chi - 1), chi - 1, eta));
        }
        Ok(ExpPolyMix::new(0.0, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ShadowedRicianParams {
        ShadowedRicianParams::average_shadowing()
    }

    #[test]
    fn single_uav_max_is_the_gain_itself() {
        let d = max_gain_dist(&base(), 1).unwrap();
        assert_eq!(d.cdf, sr_cdf_mixture(&base()));
    }

    #[test]
    fn max_cdf_is_power_of_single_cdf() {
        let d = max_gain_dist(&base(), 5).unwrap();
        let f = sr_cdf_mixture(&base());
        for i in 0..100 {
            let x = 0.037 * i as f64;
            let a = d.cdf.evaluate(x);
            let b = f.evaluate(x).powi(5);
            assert!((a - b).abs() <= 1e-10, "x={x}: {a} vs {b}");
        }
        assert!((d.pdf.integrate_0_to_inf().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn median_of_two() {
        let d = max_gain_dist(&base(), 2).unwrap();
        let f = sr_cdf_mixture(&base());
        let (mut lo, mut hi) = (0.0, 20.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f.evaluate(mid) < 0.5f64.sqrt() {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert!((d.cdf.evaluate(lo) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pdf_is_derivative_of_order_statistic_form() {
        let p = base();
        let d = max_gain_dist(&p, 4).unwrap();
        let f = sr_pdf_mixture(&p);
        let big_f = sr_cdf_mixture(&p);
        for i in 1..100 {
            let x = 0.05 * i as f64;
            let expected = 4.0 * f.evaluate(x) * big_f.evaluate(x).powi(3);
            assert!((d.pdf.evaluate(x) - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn sum_of_one_is_single_pdf() {
        assert_eq!(sum_gain_dist(&base(), 1).unwrap().pdf, sr_pdf_mixture(&base()));
    }

    #[test]
    fn sum_of_four_normalized_with_additive_mean() {
        let s = sum_gain_dist(&base(), 4).unwrap();
        assert!((s.pdf.integrate_0_to_inf().unwrap() - 1.0).abs() < 1e-9);
        assert!((s.pdf.moment(1).unwrap() - 4.0 * 0.781).abs() < 1e-9);
    }

    #[test]
    fn exponential_pair_sum_is_gamma_two() {
        let p = ShadowedRicianParams::new(1, 0.3, 0.2).unwrap();
        let s = sum_gain_dist(&p, 2).unwrap();
        let z0 = p.zeta()[0];
        assert_eq!(s.pdf.terms().len(), 1);
        let t = s.pdf.terms()[0];
        assert_eq!(t.power, 1);
        assert!((t.coeff - z0 * z0).abs() < 1e-15);
    }

    #[test]
    fn fast_paths_match_literal_expansions() {
        for m in 1..=3 {
            let p = ShadowedRicianParams::new(m, 0.251, 0.279).unwrap();
            for n in 1..=3 {
                let fast = max_gain_dist(&p, n).unwrap().cdf;
                let lit = reference::max_gain_cdf(&p, n).unwrap();
                assert_eq!(fast.terms().len(), lit.terms().len());
                for (a, b) in fast.terms().iter().zip(lit.terms()) {
                    assert_eq!((a.power, a.rate), (b.power, b.rate));
                    assert!((a.coeff - b.coeff).abs() < 1e-12 * a.coeff.abs().max(1.0));
                }
                let fs = sum_gain_dist(&p, n).unwrap().pdf;
                let ls = reference::sum_gain_pdf(&p, n).unwrap();
                assert_eq!(fs.terms().len(), ls.terms().len());
                for (a, b) in fs.terms().iter().zip(ls.terms()) {
                    assert_eq!((a.power, a.rate), (b.power, b.rate));
                    assert!((a.coeff - b.coeff).abs() < 1e-12 * a.coeff.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn more_uavs_dominate_stochastically() {
        let p = base();
        let d3 = max_gain_dist(&p, 3).unwrap();
        let d5 = max_gain_dist(&p, 5).unwrap();
        for i in 1..200 {
            let x = 0.02 * i as f64;
            assert!(d5.cdf.evaluate(x) <= d3.cdf.evaluate(x) + 1e-15);
        }
    }
}
