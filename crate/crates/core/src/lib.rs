//! Secrecy outage analysis for a wireless-powered UAV swarm relay with
//! friendly jamming.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod composite;
pub mod fading;
pub mod geometry;
pub mod montecarlo;
pub mod placement;
pub mod protocol;
pub mod specfun;

pub use analytic::{evaluate, AnalyticError, Method, SopQuery, SopResult};
pub use fading::ShadowedRicianParams;
pub use geometry::{EavesdropperDisc, NodePosition, PathLossModel};
pub use montecarlo::{McEstimate, McEstimates, McPlan, SopDefinition};
pub use protocol::{EavesdropperModel, JammingModel, LinkFading, PathGains, Scenario, Scheme, SystemConfig};
pub use specfun::{Numerics, QuadControl, SeriesControl};
