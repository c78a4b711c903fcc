//! Exhaustive grid search for the swarm hovering position.
//!
//! The swarm is placed above the source→destination ground line (optionally
//! rotated by a heading offset about the source) and the analytic SOP is
//! evaluated at every (along-track distance, altitude) cell.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{evaluate, AnalyticError, SopQuery};
use crate::geometry::NodePosition;
use crate::protocol::{Scenario, Scheme, SystemConfig};
use crate::specfun::Numerics;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlacementError {
    #[error("invalid corridor search: {0}")]
    Invalid(String),
    #[error("every grid cell failed; first failure at along={along} m, altitude={altitude} m: {error}")]
    AllCellsFailed { along: f64, altitude: f64, error: AnalyticError },
}

fn default_points() -> usize {
    16
}

fn default_headings() -> Vec<f64> {
    vec![0.0]
}

fn default_scheme() -> Scheme {
    Scheme::Mrc
}

fn default_jamming() -> bool {
    true
}

/// Search box and objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorridorSearchSpec {
    /// Along-track distance from the source's ground projection toward the
    /// destination, in meters.
    pub along_min: f64,
    pub along_max: f64,
    pub altitude_min: f64,
    pub altitude_max: f64,
    #[serde(default = "default_points")]
    pub along_points: usize,
    #[serde(default = "default_points")]
    pub altitude_points: usize,
    /// Heading offsets in radians from the source→destination bearing.
    #[serde(default = "default_headings")]
    pub headings: Vec<f64>,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_jamming")]
    pub jamming: bool,
}

impl CorridorSearchSpec {
    /// The box x ∈ [300, 600] m, H ∈ [60, 120] m above the baseline S–D line.
    pub fn baseline() -> Self {
        Self {
            along_min: 0.0,
            along_max: 300.0,
            altitude_min: 60.0,
            altitude_max: 120.0,
            along_points: default_points(),
            altitude_points: default_points(),
            headings: default_headings(),
            scheme: default_scheme(),
            jamming: default_jamming(),
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.along_min.is_finite() && self.along_max.is_finite()) || self.along_min < 0.0 {
            v.push(format!("along range [{}, {}] must be finite and nonnegative", self.along_min, self.along_max));
        }
        if !(self.along_min <= self.along_max) {
            v.push(format!("along_min {} exceeds along_max {}", self.along_min, self.along_max));
        }
        if !(self.altitude_min.is_finite() && self.altitude_max.is_finite()) || self.altitude_min < 0.0 {
            v.push(format!(
                "altitude range [{}, {}] must be finite and nonnegative",
                self.altitude_min, self.altitude_max
            ));
        }
        if !(self.altitude_min <= self.altitude_max) {
            v.push(format!("altitude_min {} exceeds altitude_max {}", self.altitude_min, self.altitude_max));
        }
        if self.along_points == 0 || self.altitude_points == 0 {
            v.push("grid needs at least one point per axis".into());
        }
        if self.headings.is_empty() || self.headings.iter().any(|h| !h.is_finite()) {
            v.push("headings must be a nonempty list of finite angles".into());
        }
        v
    }

    pub fn validate(&self) -> Result<(), PlacementError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(PlacementError::Invalid(v.join("; ")))
        }
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    pub fn along_axis(&self) -> Vec<f64> {
        Self::axis(self.along_min, self.along_max, self.along_points)
    }

    pub fn altitude_axis(&self) -> Vec<f64> {
        Self::axis(self.altitude_min, self.altitude_max, self.altitude_points)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorridorCell {
    pub along: f64,
    pub altitude: f64,
    pub heading: f64,
    pub position: NodePosition,
    pub sop: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellFailure {
    pub along: f64,
    pub altitude: f64,
    pub heading: f64,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorridorResult {
    pub best: CorridorCell,
    /// Successful cells ordered by heading, then altitude, then along-track distance.
    pub surface: Vec<CorridorCell>,
    pub failures: Vec<CellFailure>,
}

/// Swarm position for a grid cell.
pub fn cell_position(scenario: &Scenario, along: f64, altitude: f64, heading: f64) -> NodePosition {
    let s = scenario.source;
    let d = scenario.destination;
    let bearing = (d.y - s.y).atan2(d.x - s.x) + heading;
    NodePosition::new(s.x + along * bearing.cos(), s.y + along * bearing.sin(), altitude)
}

/// Evaluates the objective on every cell and returns the minimizer.
///
/// Ties go to the lowest altitude, then the smallest along-track distance,
/// then the first listed heading.
pub fn optimize_corridor(
    spec: &CorridorSearchSpec,
    scenario: &Scenario,
    cfg: &SystemConfig,
    num: &Numerics,
) -> Result<CorridorResult, PlacementError> {
    spec.validate()?;
    let mut cells = Vec::new();
    for &heading in &spec.headings {
        for &altitude in &spec.altitude_axis() {
            for &along in &spec.along_axis() {
                cells.push((along, altitude, heading));
            }
        }
    }
    let outcomes: Vec<_> = cells
        .par_iter()
        .map(|&(along, altitude, heading)| {
            let mut sc = scenario.clone();
            sc.swarm = cell_position(scenario, along, altitude, heading);
            let q = SopQuery { scheme: spec.scheme, jamming: spec.jamming, scenario: &sc, cfg };
            evaluate(&q, num).map(|r| CorridorCell { along, altitude, heading, position: sc.swarm, sop: r.value })
        })
        .collect();

    let mut surface = Vec::new();
    let mut failures = Vec::new();
    let mut first_error = None;
    for (&(along, altitude, heading), out) in cells.iter().zip(outcomes) {
        match out {
            Ok(c) => surface.push(c),
            Err(e) => {
                failures.push(CellFailure { along, altitude, heading, error: e.to_string() });
                first_error.get_or_insert((along, altitude, e));
            }
        }
    }
    let rank = |c: &CorridorCell| (c.sop, c.altitude, c.along);
    let best = surface.iter().copied().reduce(|b, c| {
        let (bs, ba, bx) = rank(&b);
        let (cs, ca, cx) = rank(&c);
        if (cs, ca, cx) < (bs, ba, bx) {
            c
        } else {
            b
        }
    });
    match best {
        Some(best) => Ok(CorridorResult { best, surface, failures }),
        None => {
            let (along, altitude, error) = first_error.expect("grid has at least one cell");
            Err(PlacementError::AllCellsFailed { along, altitude, error })
        }
    }
}
