//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! Finite pieces are integrated directly; a trailing infinite piece is mapped
//! to (0, 1] through x = a + (1-t)/t. The parallel entry points evaluate the
//! nodes of each refinement step with rayon but combine them in a fixed order,
//! so results do not depend on the worker count.

use rayon::prelude::*;
use std::sync::Mutex;

use super::sum::CompensatedSum;
use super::SpecFunError;

// Published 15-point Gauss-Kronrod tables, digits kept as printed.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_977_183_402,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits for adaptive quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Relative tail mass discarded when an infinite range is truncated by
    /// [`QuadControl::tail_cutoff`].
    pub tail_rel: f64,
}

impl Default for QuadControl {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-12, max_subdivisions: 2000, tail_rel: 1e-14 }
    }
}

impl QuadControl {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || !(self.tail_rel > 0.0) {
            return Err("quadrature tolerances must be positive".into());
        }
        if self.max_subdivisions == 0 {
            return Err("max_subdivisions must be at least 1".into());
        }
        Ok(())
    }

    /// Same control with both tolerances scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self { rel_tol: self.rel_tol * factor, abs_tol: self.abs_tol * factor, ..self.clone() }
    }

    /// Finite bound x such that ∫_x^∞ t^k e^{-at} dt is at most `tail_rel`
    /// of the full integral k!/a^{k+1}.
    pub fn tail_cutoff(&self, power: u32, rate: f64) -> f64 {
        let q = |y: f64| regularized_upper_gamma(power, y);
        let mut hi = (power as f64 + 1.0).max(1.0);
        while q(hi) > self.tail_rel {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if q(mid) > self.tail_rel {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi / rate
    }
}

/// Q(k+1, y) = e^{-y} Σ_{j≤k} y^j/j!.
fn regularized_upper_gamma(k: u32, y: f64) -> f64 {
    let mut term = 1.0;
    let mut acc = 1.0;
    for j in 1..=k {
        term *= y / j as f64;
        acc += term;
    }
    (acc.ln() - y).exp()
}

/// Outcome of a converged integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug)]
enum Map {
    Linear,
    Tail(f64),
}

impl Map {
    fn to_x(self, t: f64) -> (f64, f64) {
        match self {
            Map::Linear => (t, 1.0),
            Map::Tail(a) => (a + (1.0 - t) / t, 1.0 / (t * t)),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    map: Map,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    floor: f64,
}

fn rule_nodes(lo: f64, hi: f64, out: &mut Vec<f64>) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    out.push(c);
    for &x in XGK.iter().take(10) {
        out.push(c - h * x);
        out.push(c + h * x);
    }
}

/// Applies the 21-point rule to values laid out as produced by `rule_nodes`.
fn rule_apply(lo: f64, hi: f64, f: &[f64]) -> (f64, f64, f64) {
    let h = 0.5 * (hi - lo);
    let fc = f[0];
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = resk.abs();
    for j in 0..10 {
        let (f1, f2) = (f[1 + 2 * j], f[2 + 2 * j]);
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((f[1 + 2 * j] - reskh).abs() + (f[2 + 2 * j] - reskh).abs());
    }
    let dh = h.abs();
    let result = resk * h;
    resabs *= dh;
    resasc *= dh;
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (result, err, floor)
}

trait Evaluator {
    fn eval(&self, xs: &[(Map, f64)]) -> Vec<f64>;
}

struct Serial<F>(F);
struct Parallel<F>(F);

impl<F: Fn(f64) -> f64> Evaluator for Serial<F> {
    fn eval(&self, ts: &[(Map, f64)]) -> Vec<f64> {
        ts.iter()
            .map(|&(m, t)| {
                let (x, w) = m.to_x(t);
                let y = (self.0)(x);
                if y == 0.0 {
                    0.0
                } else {
                    y * w
                }
            })
            .collect()
    }
}

impl<F: Fn(f64) -> f64 + Sync> Evaluator for Parallel<F> {
    fn eval(&self, ts: &[(Map, f64)]) -> Vec<f64> {
        ts.par_iter()
            .map(|&(m, t)| {
                let (x, w) = m.to_x(t);
                let y = (self.0)(x);
                if y == 0.0 {
                    0.0
                } else {
                    y * w
                }
            })
            .collect()
    }
}

fn build_pieces(points: &[f64]) -> Result<Vec<(Map, f64, f64)>, SpecFunError> {
    if points.len() < 2 {
        return Ok(Vec::new());
    }
    let mut pieces = Vec::with_capacity(points.len() - 1);
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.is_nan() || b.is_nan() || a == f64::INFINITY || a == f64::NEG_INFINITY {
            return Err(SpecFunError::domain("quad", format!("invalid breakpoint pair [{a}, {b}]")));
        }
        if b < a {
            return Err(SpecFunError::domain("quad", format!("breakpoints not ascending: {a} > {b}")));
        }
        if b == f64::INFINITY {
            pieces.push((Map::Tail(a), 0.0, 1.0));
        } else if b > a {
            pieces.push((Map::Linear, a, b));
        }
    }
    Ok(pieces)
}

fn integrate<E: Evaluator>(ev: &E, points: &[f64], ctl: &QuadControl) -> Result<QuadEstimate, SpecFunError> {
    let pieces = build_pieces(points)?;
    if pieces.is_empty() {
        return Ok(QuadEstimate { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    let mut nodes = Vec::with_capacity(42);
    let mut batch = Vec::with_capacity(21 * pieces.len());
    for &(m, lo, hi) in &pieces {
        nodes.clear();
        rule_nodes(lo, hi, &mut nodes);
        batch.extend(nodes.iter().map(|&t| (m, t)));
    }
    let values = ev.eval(&batch);
    let mut evaluations = values.len();
    check_finite(&batch, &values)?;
    let mut segs: Vec<Segment> = pieces
        .iter()
        .enumerate()
        .map(|(i, &(map, lo, hi))| {
            let (value, error, floor) = rule_apply(lo, hi, &values[21 * i..21 * (i + 1)]);
            Segment { map, lo, hi, value, error, floor }
        })
        .collect();

    loop {
        let total: CompensatedSum = segs.iter().map(|s| s.value).collect();
        let total = total.value();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        let floor: f64 = segs.iter().map(|s| s.floor).sum();
        let tol = ctl.abs_tol.max(ctl.rel_tol * total.abs()).max(2.0 * floor);
        if err <= tol {
            return Ok(QuadEstimate { value: total, abs_error: err, evaluations });
        }
        // Bisect the worst segment that can still be split.
        let worst = segs
            .iter()
            .enumerate()
            .filter(|(_, s)| {
                let mid = 0.5 * (s.lo + s.hi);
                mid > s.lo && mid < s.hi && s.error > s.floor
            })
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            return Err(SpecFunError::NonConvergence { estimate: total, abs_error: err, requested: tol });
        };
        if segs.len() >= ctl.max_subdivisions {
            return Err(SpecFunError::NonConvergence { estimate: total, abs_error: err, requested: tol });
        }
        let s = segs[i];
        let mid = 0.5 * (s.lo + s.hi);
        nodes.clear();
        rule_nodes(s.lo, mid, &mut nodes);
        rule_nodes(mid, s.hi, &mut nodes);
        let batch: Vec<(Map, f64)> = nodes.iter().map(|&t| (s.map, t)).collect();
        let values = ev.eval(&batch);
        evaluations += values.len();
        check_finite(&batch, &values)?;
        let (v1, e1, f1) = rule_apply(s.lo, mid, &values[..21]);
        let (v2, e2, f2) = rule_apply(mid, s.hi, &values[21..]);
        segs[i] = Segment { map: s.map, lo: s.lo, hi: mid, value: v1, error: e1, floor: f1 };
        segs.insert(i + 1, Segment { map: s.map, lo: mid, hi: s.hi, value: v2, error: e2, floor: f2 });
    }
}

fn check_finite(batch: &[(Map, f64)], values: &[f64]) -> Result<(), SpecFunError> {
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        let (x, _) = batch[k].0.to_x(batch[k].1);
        return Err(SpecFunError::domain("quad", format!("integrand is {} at x = {x}", values[k])));
    }
    Ok(())
}

fn ordered_points(a: f64, b: f64) -> Result<[f64; 2], SpecFunError> {
    if !(a <= b) {
        return Err(SpecFunError::domain("quad", format!("lower limit {a} exceeds upper limit {b}")));
    }
    Ok([a, b])
}

/// ∫_a^b f, where b may be +∞.
pub fn quad_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, ctl: &QuadControl) -> Result<QuadEstimate, SpecFunError> {
    integrate(&Serial(f), &ordered_points(a, b)?, ctl)
}

/// Integral over consecutive breakpoints; the last breakpoint may be +∞.
pub fn quad_1d_points<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    ctl: &QuadControl,
) -> Result<QuadEstimate, SpecFunError> {
    integrate(&Serial(f), points, ctl)
}

/// [`quad_1d_points`] with integrand evaluations spread over the rayon pool.
pub fn quad_1d_points_par<F: Fn(f64) -> f64 + Sync>(
    f: F,
    points: &[f64],
    ctl: &QuadControl,
) -> Result<QuadEstimate, SpecFunError> {
    integrate(&Parallel(f), points, ctl)
}

/// Iterated integral ∫ dx ∫ dy f(x, y).
///
/// `outer` lists breakpoints in x; `inner(x)` lists breakpoints in y for that x
/// (fewer than two points means an empty inner range). Outer nodes are
/// evaluated in parallel.
pub fn quad_2d<F, R>(f: F, outer: &[f64], inner: R, ctl: &QuadControl) -> Result<QuadEstimate, SpecFunError>
where
    F: Fn(f64, f64) -> f64 + Sync,
    R: Fn(f64) -> Vec<f64> + Sync,
{
    let inner_ctl = ctl.tightened(0.1);
    let failure: Mutex<Option<(f64, SpecFunError)>> = Mutex::new(None);
    let g = |x: f64| {
        let ys = inner(x);
        match quad_1d_points(|y| f(x, y), &ys, &inner_ctl) {
            Ok(est) => est.value,
            Err(e) => {
                let mut slot = failure.lock().unwrap_or_else(|p| p.into_inner());
                if slot.as_ref().is_none_or(|(x0, _)| x < *x0) {
                    *slot = Some((x, e));
                }
                0.0
            }
        }
    };
    let outer_est = quad_1d_points_par(g, outer, ctl);
    if let Some((_, e)) = failure.into_inner().unwrap_or_else(|p| p.into_inner()) {
        return Err(e);
    }
    outer_est
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_over_half_line() {
        let r = quad_1d(|x| (-x).exp(), 0.0, f64::INFINITY, &QuadControl::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_integral() {
        let r = quad_1d(|t| t.powi(3) * (-2.0 * t).exp(), 0.0, f64::INFINITY, &QuadControl::default()).unwrap();
        assert!((r.value - 0.375).abs() < 1e-11);
    }

    #[test]
    fn unit_square_product() {
        let r = quad_2d(|x, y| x * y, &[0.0, 1.0], |_| vec![0.0, 1.0], &QuadControl::default()).unwrap();
        assert!((r.value - 0.25).abs() < 1e-14);
    }

    #[test]
    fn kronrod_rule_is_exact_for_high_degree_polynomials() {
        let (v, _, _) = {
            let mut n = Vec::new();
            rule_nodes(0.0, 1.0, &mut n);
            let f: Vec<f64> = n.iter().map(|x| x.powi(30)).collect();
            rule_apply(0.0, 1.0, &f)
        };
        assert!((v - 1.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn endpoint_singularity() {
        let r = quad_1d(|x| 1.0 / x.sqrt(), 0.0, 1.0, &QuadControl::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let ctl = QuadControl { max_subdivisions: 3, rel_tol: 1e-14, ..QuadControl::default() };
        let e = quad_1d(|x| (50.0 * x).sin().abs(), 0.0, 10.0, &ctl).unwrap_err();
        assert!(matches!(e, SpecFunError::NonConvergence { .. }));
    }

    #[test]
    fn empty_and_reversed_ranges() {
        let c = QuadControl::default();
        assert_eq!(quad_1d(|x| x, 2.0, 2.0, &c).unwrap().value, 0.0);
        assert!(quad_1d(|x| x, 2.0, 1.0, &c).is_err());
        assert_eq!(quad_1d_points(|x| x, &[1.0], &c).unwrap().value, 0.0);
    }

    #[test]
    fn parallel_and_serial_agree_bitwise() {
        let f = |x: f64| (x * 3.0).cos() * (-x * 0.1).exp();
        let pts = [0.0, 1.0, 5.0, f64::INFINITY];
        let c = QuadControl::default();
        let a = quad_1d_points(f, &pts, &c).unwrap();
        let b = quad_1d_points_par(f, &pts, &c).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn tail_cutoff_bounds_mass() {
        let c = QuadControl::default();
        for (k, a) in [(0u32, 1.0), (4, 1.79), (19, 8.9)] {
            let x = c.tail_cutoff(k, a);
            assert!(regularized_upper_gamma(k, a * x) <= c.tail_rel);
            assert!(regularized_upper_gamma(k, a * x * 0.9) > c.tail_rel);
        }
    }
}
