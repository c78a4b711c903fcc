//! The four experiment commands and their CSV/text output.

use std::io::Write;

use serde::Serialize;

use swarmsec::montecarlo::estimate_all;
use swarmsec::placement::{optimize_corridor, CorridorResult};
use swarmsec::{evaluate, EavesdropperModel, McEstimates, Method, Scenario, Scheme, SopQuery, SopResult, SystemConfig};

use crate::config::{ExperimentConfig, SweepAxis};
use crate::CliError;

/// `x` with ten significant digits in positional notation.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.9e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    if exp.abs() >= 10 {
        return sci;
    }
    let body = if exp >= 0 {
        let (int, frac) = digits.split_at(exp as usize + 1);
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

fn numerical(context: String, e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(format!("{context}: {e}"))
}

fn analytic(
    sc: &Scenario,
    sys: &SystemConfig,
    scheme: Scheme,
    jamming: bool,
    cfg: &ExperimentConfig,
    context: &str,
) -> Result<SopResult, CliError> {
    let q = SopQuery { scheme, jamming, scenario: sc, cfg: sys };
    evaluate(&q, &cfg.numerics())
        .map_err(|e| numerical(format!("{context} scheme={} jamming={jamming}", scheme.label()), e))
}

fn monte_carlo(
    sc: &Scenario,
    sys: &SystemConfig,
    cfg: &ExperimentConfig,
    context: &str,
) -> Result<McEstimates, CliError> {
    estimate_all(&cfg.monte_carlo, sc, sys).map_err(|e| numerical(format!("{context} monte carlo"), e))
}

fn wants(cfg: &ExperimentConfig, m: Method) -> bool {
    cfg.outputs.methods.contains(&m)
}

/// One line of `eval` output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvalRow {
    pub scheme: Scheme,
    pub jamming: bool,
    pub result: SopResult,
}

pub fn run_eval(cfg: &ExperimentConfig) -> Result<Vec<EvalRow>, CliError> {
    let sys = cfg.system();
    let sc = cfg.scenario();
    let mc = if wants(cfg, Method::MonteCarlo) { Some(monte_carlo(&sc, &sys, cfg, "eval")?) } else { None };
    let mut rows = Vec::new();
    for &scheme in &cfg.outputs.schemes {
        for &jamming in &cfg.outputs.jamming {
            for &method in &cfg.outputs.methods {
                let result = match method {
                    Method::Analytic => analytic(&sc, &sys, scheme, jamming, cfg, "eval")?,
                    Method::MonteCarlo => {
                        let e = mc.as_ref().expect("monte carlo requested").get(scheme, jamming);
                        SopResult {
                            value: e.p_hat,
                            raw_value: e.p_hat,
                            method,
                            scheme,
                            jamming,
                            definition: cfg.monte_carlo.definition,
                            std_err: Some(e.std_err),
                            lower_bound: false,
                        }
                    }
                };
                rows.push(EvalRow { scheme, jamming, result });
            }
        }
    }
    Ok(rows)
}

pub fn write_eval<W: Write>(rows: &[EvalRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scheme", "jamming", "method", "definition", "sop", "std_err", "lower_bound"])?;
    for r in rows {
        let res = &r.result;
        w.write_record([
            r.scheme.label().to_string(),
            r.jamming.to_string(),
            match res.method {
                Method::Analytic => "analytic".into(),
                Method::MonteCarlo => "mc".into(),
            },
            format!("{:?}", res.definition).to_lowercase(),
            format_sig(res.value),
            opt(res.std_err),
            res.lower_bound.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One CSV row of a parameter sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: SweepAxis,
    pub value: f64,
    pub scheme: Scheme,
    pub jamming: bool,
    pub sop_analytic: Option<f64>,
    pub sop_mc: Option<f64>,
    pub mc_std_err: Option<f64>,
}

/// Rows ordered by sweep value, then scheme, then jamming flag, as listed in the config.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>, CliError> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("sweep: section required".into()))?;
    let mut rows = Vec::new();
    for &value in &sweep.values {
        let context = format!("{}={}", sweep.parameter, format_sig(value));
        let (sys, sc) = cfg.apply(sweep.parameter, value).map_err(CliError::Config)?;
        let mc = if wants(cfg, Method::MonteCarlo) { Some(monte_carlo(&sc, &sys, cfg, &context)?) } else { None };
        for &scheme in &cfg.outputs.schemes {
            for &jamming in &cfg.outputs.jamming {
                let a = if wants(cfg, Method::Analytic) {
                    Some(analytic(&sc, &sys, scheme, jamming, cfg, &context)?.value)
                } else {
                    None
                };
                let e = mc.as_ref().map(|m| m.get(scheme, jamming));
                rows.push(SweepRow {
                    parameter: sweep.parameter,
                    value,
                    scheme,
                    jamming,
                    sop_analytic: a,
                    sop_mc: e.map(|e| e.p_hat),
                    mc_std_err: e.map(|e| e.std_err),
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_sweep<W: Write>(rows: &[SweepRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["parameter", "value", "scheme", "jamming", "sop_analytic", "sop_mc", "mc_std_err"])?;
    for r in rows {
        w.write_record([
            r.parameter.name().to_string(),
            format_sig(r.value),
            r.scheme.label().to_string(),
            r.jamming.to_string(),
            opt(r.sop_analytic),
            opt(r.sop_mc),
            opt(r.mc_std_err),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Analytic-versus-simulation comparison for one configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationRow {
    /// Sweep coordinate, or None for the base configuration.
    pub point: Option<(SweepAxis, f64)>,
    pub scheme: Scheme,
    pub jamming: bool,
    pub sop_analytic: f64,
    pub sop_mc: f64,
    pub mc_std_err: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    pub max_z: f64,
}

/// Reports breaching this z-score make `validate` fail.
pub const Z_LIMIT: f64 = 4.0;

/// Compares every requested closed-form SOP with simulation at the base
/// configuration, or at every sweep point when a sweep is configured.
pub fn run_validate(cfg: &ExperimentConfig) -> Result<ValidationReport, CliError> {
    let points: Vec<Option<(SweepAxis, f64)>> = match &cfg.sweep {
        Some(s) => s.values.iter().map(|&v| Some((s.parameter, v))).collect(),
        None => vec![None],
    };
    let mut rows = Vec::new();
    for point in points {
        let (sys, sc, context) = match point {
            Some((axis, v)) => {
                let (sys, sc) = cfg.apply(axis, v).map_err(CliError::Config)?;
                (sys, sc, format!("{axis}={}", format_sig(v)))
            }
            None => (cfg.system(), cfg.scenario(), "base".to_string()),
        };
        if matches!(sc.eavesdropper, EavesdropperModel::Disc(_)) {
            return Err(CliError::Config(format!(
                "{context}: validate needs a fixed eavesdropper; the disc model has only a mean-distance bound"
            )));
        }
        let mc = monte_carlo(&sc, &sys, cfg, &context)?;
        for &scheme in &cfg.outputs.schemes {
            for &jamming in &cfg.outputs.jamming {
                let a = analytic(&sc, &sys, scheme, jamming, cfg, &context)?.value;
                let e = mc.get(scheme, jamming);
                rows.push(ValidationRow {
                    point,
                    scheme,
                    jamming,
                    sop_analytic: a,
                    sop_mc: e.p_hat,
                    mc_std_err: e.std_err,
                    z: e.z_score(a),
                });
            }
        }
    }
    let max_z = rows.iter().map(|r| r.z).fold(0.0, f64::max);
    Ok(ValidationReport { rows, max_z })
}

pub fn write_validation<W: Write>(report: &ValidationReport, mut out: W) -> Result<(), CliError> {
    for r in &report.rows {
        let point = match r.point {
            Some((axis, v)) => format!("{axis}={}", format_sig(v)),
            None => "base".into(),
        };
        writeln!(
            out,
            "{point} scheme={} jamming={} analytic={} mc={} std_err={} z={}",
            r.scheme.label(),
            r.jamming,
            format_sig(r.sop_analytic),
            format_sig(r.sop_mc),
            format_sig(r.mc_std_err),
            format_sig(r.z)
        )?;
    }
    writeln!(out, "VALIDATE max_z={}", format_sig(report.max_z))?;
    Ok(())
}

pub fn run_optimize(cfg: &ExperimentConfig) -> Result<CorridorResult, CliError> {
    let spec = cfg.corridor.as_ref().ok_or_else(|| CliError::Config("corridor: section required".into()))?;
    optimize_corridor(spec, &cfg.scenario(), &cfg.system(), &cfg.numerics())
        .map_err(|e| numerical("optimize".into(), e))
}

pub fn write_surface<W: Write>(result: &CorridorResult, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "H", "heading", "sop"])?;
    for c in &result.surface {
        w.write_record([
            format_sig(c.position.x),
            format_sig(c.position.y),
            format_sig(c.altitude),
            format_sig(c.heading),
            format_sig(c.sop),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Single-line summary of the best corridor cell.
pub fn best_line(result: &CorridorResult) -> String {
    let b = &result.best;
    format!(
        "BEST x={} y={} H={} heading={} sop={}",
        format_sig(b.position.x),
        format_sig(b.position.y),
        format_sig(b.altitude),
        format_sig(b.heading),
        format_sig(b.sop)
    )
}
