//! Node positions, distances, free-space path loss and disc-averaged distances.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun::{quad_2d, QuadControl, SpecFunError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("{0}")]
    Domain(String),
    #[error("disc average: {0}")]
    Numerical(#[from] SpecFunError),
}

/// Cartesian position in meters; serialized as `[x, y, z]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct NodePosition {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 3]> for NodePosition {
    fn from([x, y, z]: [f64; 3]) -> Self {
        Self { x, y, z }
    }
}

impl From<NodePosition> for [f64; 3] {
    fn from(p: NodePosition) -> Self {
        [p.x, p.y, p.z]
    }
}

impl NodePosition {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Position at horizontal radius `r` and bearing `theta` from `origin`'s
    /// ground projection, at altitude `z`.
    pub fn from_polar(origin: NodePosition, r: f64, theta: f64, z: f64) -> Result<Self, GeometryError> {
        if !(r >= 0.0) || !(z >= 0.0) || !theta.is_finite() || !r.is_finite() || !z.is_finite() {
            return Err(GeometryError::Domain(format!("polar position (r={r}, θ={theta}, z={z}) out of range")));
        }
        Ok(Self { x: origin.x + r * theta.cos(), y: origin.y + r * theta.sin(), z })
    }

    /// (r, θ ∈ [0, 2π), z) relative to `origin`'s ground projection.
    pub fn polar_about(&self, origin: NodePosition) -> (f64, f64, f64) {
        let (dx, dy) = (self.x - origin.x, self.y - origin.y);
        (dx.hypot(dy), dy.atan2(dx).rem_euclid(2.0 * PI), self.z)
    }

    pub fn ground(&self) -> Self {
        Self { z: 0.0, ..*self }
    }

    pub fn validate(&self, name: &str) -> Result<(), GeometryError> {
        if !(self.x.is_finite() && self.y.is_finite() && self.z.is_finite()) || self.z < 0.0 {
            return Err(GeometryError::Domain(format!("{name}: coordinates must be finite with z ≥ 0")));
        }
        Ok(())
    }
}

pub fn distance(a: NodePosition, b: NodePosition) -> f64 {
    let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Power-law path loss normalized at the reference distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossModel {
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_d0")]
    pub d0: f64,
}

fn default_tau() -> f64 {
    2.0
}

fn default_d0() -> f64 {
    100.0
}

impl Default for PathLossModel {
    fn default() -> Self {
        Self { tau: default_tau(), d0: default_d0() }
    }
}

impl PathLossModel {
    pub fn new(tau: f64, d0: f64) -> Result<Self, GeometryError> {
        let m = Self { tau, d0 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.tau > 0.0) || !self.tau.is_finite() || !(self.d0 > 0.0) || !self.d0.is_finite() {
            return Err(GeometryError::Domain(format!(
                "path loss needs tau > 0 and d0 > 0 (got {}, {})",
                self.tau, self.d0
            )));
        }
        Ok(())
    }
}

/// (d/d0)^{-τ}.
pub fn path_loss(model: &PathLossModel, d: f64) -> Result<f64, GeometryError> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(GeometryError::Domain(format!("distance {d} must be positive")));
    }
    Ok((d / model.d0).powf(-model.tau))
}

/// Ground disc holding a uniformly placed eavesdropper, centred below the source.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EavesdropperDisc {
    pub radius: f64,
}

impl EavesdropperDisc {
    pub fn new(radius: f64) -> Result<Self, GeometryError> {
        let d = Self { radius };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(GeometryError::Domain(format!("disc radius {} must be positive", self.radius)));
        }
        Ok(())
    }

    /// Uniform point on the disc around `center`'s ground projection.
    pub fn sample<R: Rng + ?Sized>(&self, center: NodePosition, rng: &mut R) -> NodePosition {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        let r = self.radius * u.sqrt();
        let th = 2.0 * PI * v;
        NodePosition::new(center.x + r * th.cos(), center.y + r * th.sin(), 0.0)
    }
}

/// Mean distances (source→E, swarm→E) for E uniform on the disc centred at
/// the source's ground projection.
pub fn expected_disc_distances(
    disc: &EavesdropperDisc,
    source: NodePosition,
    swarm: NodePosition,
    ctl: &QuadControl,
) -> Result<(f64, f64), GeometryError> {
    disc.validate()?;
    let center = source.ground();
    let area = PI * disc.radius * disc.radius;
    let (r_u, th_u, _) = swarm.polar_about(center);
    let mut outer = vec![0.0];
    if th_u > 0.0 && th_u < 2.0 * PI {
        outer.push(th_u);
    }
    outer.push(2.0 * PI);
    let inner = |_: f64| {
        let mut pts = vec![0.0];
        if r_u > 0.0 && r_u < disc.radius {
            pts.push(r_u);
        }
        pts.push(disc.radius);
        pts
    };
    let at = |th: f64, r: f64| NodePosition::new(center.x + r * th.cos(), center.y + r * th.sin(), 0.0);
    let ctl = QuadControl { abs_tol: ctl.abs_tol * area, ..ctl.clone() };
    let se = quad_2d(|th, r| distance(at(th, r), source) * r, &outer, inner, &ctl)?;
    let re = quad_2d(|th, r| distance(at(th, r), swarm) * r, &outer, inner, &ctl)?;
    Ok((se.value / area, re.value / area))
}
