//! The four closed-form outage expressions.

use std::sync::Mutex;

use super::{AnalyticError, Model};
use crate::protocol::Scheme;
use crate::specfun::{
    factorial, quad_1d_points, quad_1d_points_par, theta1, theta2, theta3, theta4, theta6, theta7, CompensatedSum,
    QuadControl, UpperRatioTable,
};

/// Quadrature of a fallible integrand; the failure at the smallest abscissa wins.
fn integrate<F>(f: F, points: &[f64], ctl: &QuadControl, parallel: bool) -> Result<f64, AnalyticError>
where
    F: Fn(f64) -> Result<f64, AnalyticError> + Sync,
{
    if points.len() < 2 {
        return Ok(0.0);
    }
    let failure: Mutex<Option<(f64, AnalyticError)>> = Mutex::new(None);
    let g = |x: f64| match f(x) {
        Ok(v) => v,
        Err(e) => {
            let mut slot = failure.lock().unwrap_or_else(|p| p.into_inner());
            if slot.as_ref().is_none_or(|(x0, _)| x < *x0) {
                *slot = Some((x, e));
            }
            0.0
        }
    };
    let est = if parallel { quad_1d_points_par(g, points, ctl) } else { quad_1d_points(g, points, ctl) };
    if let Some((_, e)) = failure.into_inner().unwrap_or_else(|p| p.into_inner()) {
        return Err(e);
    }
    Ok(est?.value)
}

/// Breakpoints at s/4, s, 4s, 16s, 64s past `lo` for each length scale s.
fn breakpoints(lo: f64, hi: f64, scales: &[f64]) -> Vec<f64> {
    if !(hi > lo) {
        return Vec::new();
    }
    let mut pts = vec![lo, hi];
    for &s in scales {
        if !(s > 0.0) || !s.is_finite() {
            continue;
        }
        let mut c = s / 4.0;
        for _ in 0..5 {
            if lo + c < hi {
                pts.push(lo + c);
            }
            c *= 4.0;
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1e-300));
    pts
}

/// Constants shared by every expression.
struct Consts {
    /// λ_SR / (γ_S λ_SE)
    c0: f64,
    /// 1 / (ε λ_RD)
    alpha_d: f64,
    /// 1 / (ε λ_RE)
    alpha_e: f64,
    /// 1 / (ε λ_RE (γ_S − 1))
    scale_z: f64,
    /// γ_S / (ε λ_RD (γ_S − 1))
    xi: f64,
}

impl Consts {
    fn new(m: &Model) -> Self {
        let b = &m.b;
        let g = &b.gains;
        let e = b.epsilon;
        let gs = b.gamma_s;
        let scale_y = 1.0 / (e * g.relay_destination * (gs - 1.0));
        Self {
            c0: g.source_relay / (gs * g.source_eve),
            alpha_d: 1.0 / (e * g.relay_destination),
            alpha_e: 1.0 / (e * g.relay_eve),
            scale_z: 1.0 / (e * g.relay_eve * (gs - 1.0)),
            xi: gs * scale_y,
        }
    }
}

fn nonzero(c: &[f64]) -> impl Iterator<Item = (u32, f64)> + '_ {
    c.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i as u32, *v))
}

/// Selection combining without jamming.
pub(super) fn sc_without_jamming(m: &Model) -> Result<f64, AnalyticError> {
    let k = Consts::new(m);
    let num = m.num;
    let (y, z) = (&m.y, &m.z);
    let rho = z.eta * k.scale_z;

    // Pr{relay→eve link alone does not cause outage} pieces, one per Y component.
    let mut relay_tail = vec![0.0; y.zeta.len()];
    for (ly, _) in nonzero(&y.zeta) {
        let mut s = CompensatedSum::new();
        for (q, kq) in nonzero(&z.tail) {
            s.add(kq * k.scale_z.powi(q as i32) * theta2(ly, q, y.eta, rho, k.xi, num)?);
        }
        relay_tail[ly as usize] = s.value();
    }

    let mut success = CompensatedSum::new();
    for (a, terms) in &m.x_groups {
        let g = 1.0 / (a + k.c0);
        let beta = a * g * k.alpha_d;
        for &(kx, ck) in terms {
            let n = kx + 1;
            let an = a.powi(-(n as i32));
            let gn = g.powi(n as i32);
            for (ly, zy) in nonzero(&y.zeta) {
                let full = an * factorial(ly) / y.eta.powi(ly as i32 + 1);
                let direct = gn * theta1(ly, n, y.eta, k.alpha_d, beta, num)?;
                let relay = an * relay_tail[ly as usize];
                let mut joint = CompensatedSum::new();
                for (q, kq) in nonzero(&z.tail) {
                    joint
                        .add(kq * k.scale_z.powi(q as i32) * theta3(ly, n, q, y.eta, rho, k.alpha_d, beta, k.xi, num)?);
                }
                success.add(ck * zy * (full - direct - relay + gn * joint.value()));
            }
        }
    }
    Ok(1.0 - success.value())
}

/// Maximum-ratio combining without jamming.
pub(super) fn mrc_without_jamming(m: &Model) -> Result<f64, AnalyticError> {
    let k = Consts::new(m);
    let num = m.num;
    let (y, z) = (&m.y, &m.z);
    let g = &m.b.gains;
    let ratio = g.source_relay / g.source_eve;
    let rho = z.eta * k.scale_z;

    // Pr{Z exceeds its threshold}: the relay→eve path alone causes outage.
    let mut relay = CompensatedSum::new();
    for (ly, zy) in nonzero(&y.zeta) {
        for (q, kq) in nonzero(&z.tail) {
            relay.add(zy * kq * k.scale_z.powi(q as i32) * theta2(ly, q, y.eta, rho, k.xi, num)?);
        }
    }

    let z_cut = num.quad.tail_cutoff(z.pdf.max_power(), z.eta);
    let inner_ctl = num.quad.tightened(0.1);
    // ∫_0^{Υ_Z(y)} f_Z(z) E_X[e^{−X λ_SR D(y,z)/λ_SE}] dz for a fixed y.
    let inner = |yv: f64| -> Result<f64, AnalyticError> {
        let upper = k.scale_z * yv / (yv + k.xi);
        if upper == 0.0 {
            return Ok(0.0);
        }
        let w = k.c0 * yv / (yv + k.alpha_d);
        let mut total = CompensatedSum::new();
        let mut by_quadrature = Vec::new();
        for (a, terms) in &m.x_groups {
            let lam_y = a + w;
            let lam_s = 1.0 / (lam_y - ratio);
            let beta = lam_y * lam_s * k.alpha_e;
            if lam_s.is_finite() && beta > 0.0 {
                for &(kx, ck) in terms {
                    let n = kx + 1;
                    let ln = lam_s.powi(n as i32);
                    for (lz, zz) in nonzero(&z.zeta) {
                        total.add(ck * zz * ln * theta6(upper, lz, n, z.eta, k.alpha_e, beta, num)?);
                    }
                }
            } else {
                by_quadrature.push((lam_y, terms));
            }
        }
        if !by_quadrature.is_empty() {
            let hi = upper.min(z_cut);
            let f = |zv: f64| -> Result<f64, AnalyticError> {
                let fz = z.pdf.evaluate(zv);
                if fz == 0.0 {
                    return Ok(0.0);
                }
                let mut s = 0.0;
                for (lam_y, terms) in &by_quadrature {
                    let h = lam_y - ratio * zv / (zv + k.alpha_e);
                    let hi = 1.0 / h;
                    for &(kx, ck) in terms.iter() {
                        s += ck * hi.powi(kx as i32 + 1);
                    }
                }
                Ok(fz * s)
            };
            let pts = breakpoints(0.0, hi, &[1.0 / z.eta, k.alpha_e]);
            total.add(integrate(f, &pts, &inner_ctl, false)?);
        }
        Ok(total.value())
    };

    let y_cut = num.quad.tail_cutoff(y.pdf.max_power(), y.eta);
    let pts = breakpoints(0.0, y_cut, &[1.0 / y.eta, k.xi, k.alpha_d]);
    let joint = integrate(
        |yv| {
            let fy = y.pdf.evaluate(yv);
            if fy == 0.0 {
                Ok(0.0)
            } else {
                Ok(fy * inner(yv)?)
            }
        },
        &pts,
        &num.quad,
        true,
    )?;
    Ok(relay.value() + joint)
}

/// Either combining scheme with jamming, averaged over the aggregate jammer gain.
pub(super) fn with_jamming(m: &Model, scheme: Scheme) -> Result<f64, AnalyticError> {
    let k = Consts::new(m);
    let num = m.num;
    let (y, z) = (&m.y, &m.z);
    let b = &m.b;
    let g = &b.gains;
    let pj_re = b.jamming_coefficient() * g.relay_eve;
    let rho_y = y.eta * k.xi;
    let z_cut = num.quad.tail_cutoff(z.pdf.max_power(), z.eta);
    let inner_ctl = num.quad.tightened(0.1);
    let max_ly = y.zeta.len().saturating_sub(1) as u32;
    let max_n = m.x_max_power + 1;

    // Conditional success probability given aggregate jammer gain t.
    let success_at = |t: f64| -> Result<f64, AnalyticError> {
        let denom = 1.0 + pj_re * t;
        let upper = k.scale_z * denom;

        // Pr{Z < Υ_Z, Y > Υ_Y(Z)}.
        let mut both = CompensatedSum::new();
        for (lz, zz) in nonzero(&z.zeta) {
            for (q, kq) in nonzero(&y.tail) {
                both.add(zz * kq * k.xi.powi(q as i32) * theta4(upper, lz, q, z.eta, rho_y, upper, num)?);
            }
        }

        // The same region weighted by Pr{direct eavesdropper link also loses}.
        let f = |zv: f64| -> Result<f64, AnalyticError> {
            let fz = z.pdf.evaluate(zv);
            if fz == 0.0 || zv >= upper {
                return Ok(0.0);
            }
            let u = k.xi * zv / (upper - zv);
            let mut s = CompensatedSum::new();
            for (a, terms) in &m.x_groups {
                let (gamma, beta) = match scheme {
                    Scheme::Sc => {
                        let gg = 1.0 / (a + k.c0);
                        (gg, a * gg * k.alpha_d)
                    }
                    Scheme::Mrc => {
                        let v = g.relay_eve * zv / (b.epsilon * g.relay_eve * zv + denom);
                        let vt = a - b.epsilon * g.source_relay * v / g.source_eve;
                        let gv = 1.0 / (vt + k.c0);
                        (gv, vt * k.alpha_d * gv)
                    }
                };
                let table = UpperRatioTable::new(u, y.eta, beta, max_ly, max_n)?;
                let mut weights = vec![0.0; max_n as usize + 1];
                for &(kx, ck) in terms {
                    weights[kx as usize + 1] = ck * gamma.powi(kx as i32 + 1);
                }
                s.add(table.theta5_mixture(&y.zeta, &weights, k.alpha_d, num)?);
            }
            Ok(fz * s.value())
        };
        let hi = upper.min(z_cut);
        let pts = breakpoints(0.0, hi, &[1.0 / z.eta, upper]);
        let lose = integrate(f, &pts, &inner_ctl, false)?;
        Ok(both.value() - lose)
    };

    let Some(jam) = &m.jam else {
        // A single UAV leaves no jammers: the aggregate gain is zero.
        let s = success_at(0.0)?;
        return Ok(match scheme {
            Scheme::Sc => 1.0 - s,
            Scheme::Mrc => {
                let beyond = z.tail_at(k.scale_z);
                beyond + (1.0 - beyond) - s
            }
        });
    };

    let t_rate = jam.min_rate().ok_or_else(|| AnalyticError::Query("jammer gain law has no terms".into()))?;
    let t_cut = num.quad.tail_cutoff(jam.max_power(), t_rate);
    let pts = breakpoints(0.0, t_cut, &[1.0 / t_rate, 1.0 / pj_re]);
    let success = integrate(
        |t| {
            let ft = jam.evaluate(t);
            if ft == 0.0 {
                Ok(0.0)
            } else {
                Ok(ft * success_at(t)?)
            }
        },
        &pts,
        &num.quad,
        true,
    )?;

    match scheme {
        Scheme::Sc => Ok(1.0 - success),
        Scheme::Mrc => {
            // Pr{Z > Υ_Z(𝒥)} and its complement, in closed form.
            let c = b.jamming_coefficient() / (b.epsilon * (b.gamma_s - 1.0));
            let shift = 1.0 / pj_re;
            let mut beyond = CompensatedSum::new();
            let mut mass = CompensatedSum::new();
            for term in jam.terms() {
                mass.add(term.coeff * factorial(term.power) / term.rate.powi(term.power as i32 + 1));
                for (q, kq) in nonzero(&z.tail) {
                    beyond.add(
                        term.coeff * kq * c.powi(q as i32) * theta7(term.power, q, term.rate, z.eta * c, shift, num)?,
                    );
                }
            }
            let within = mass.value() - beyond.value();
            Ok(beyond.value() + within - success)
        }
    }
}
