//! Special functions and numerical integration behind the analytic SOP.

mod expint;
mod phi;
pub mod quad;
mod sum;
pub mod theta;

use thiserror::Error;

pub use expint::{exp_integral_ei, expint_e1, expint_en_scaled};
pub use phi::{phi1, phi1_scaled, phi2};
pub use quad::{quad_1d, quad_1d_points, quad_1d_points_par, quad_2d, QuadControl, QuadEstimate};
pub use sum::CompensatedSum;
pub use theta::{theta1, theta2, theta3, theta4, theta5, theta6, theta7, UpperRatioTable};

pub(crate) use phi::factorial;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("{what}: {detail}")]
    Domain { what: &'static str, detail: String },
    #[error("{what} diverges: {detail}")]
    Divergent { what: &'static str, detail: String },
    #[error("quadrature did not converge: estimate {estimate:e} with error {abs_error:e} (requested {requested:e})")]
    NonConvergence { estimate: f64, abs_error: f64, requested: f64 },
}

impl SpecFunError {
    pub(crate) fn domain(what: &'static str, detail: String) -> Self {
        Self::Domain { what, detail }
    }
}

/// Stopping rule for infinite series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesControl {
    /// A term smaller than `rel_tol` times the partial sum counts as negligible;
    /// three in a row end the series.
    pub rel_tol: f64,
    pub max_terms: usize,
    /// Largest tolerated ratio of summed term magnitudes to the result before
    /// the series is abandoned for quadrature.
    pub max_condition: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_terms: 500, max_condition: 1e4 }
    }
}

/// Series and quadrature controls used throughout the analytic evaluators.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Numerics {
    pub series: SeriesControl,
    pub quad: QuadControl,
}

impl Numerics {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.series.rel_tol > 0.0) || self.series.max_terms == 0 || !(self.series.max_condition >= 1.0) {
            return Err("series control requires rel_tol > 0, max_terms ≥ 1, max_condition ≥ 1".into());
        }
        self.quad.validate()
    }
}
