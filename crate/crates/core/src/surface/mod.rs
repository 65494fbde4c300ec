//! Semi-geodesic metrics `dr² + G(r,θ)² dθ²` and the geometry of their
//! geodesic balls.

mod geometry;
mod metric;

pub use geometry::{
    closed_form, BallStats, FluxVariation, Geometry, GeometryCheck, IsoperimetricEstimate,
    KernelWeight, SurfaceQuadrature, BOUND_TOL,
};
pub use metric::{MetricKind, MetricProfile, SampledMetric, POLE_TOL};
