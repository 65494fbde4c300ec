use serde::Serialize;

use super::bmo::{dist, Ball};
use super::samples::WeightedSamples;
use crate::error::{Error, Result};

/// Outcome of testing a function against the standard H¹-atom conditions
/// in a given ball.
#[derive(Debug, Clone, Serialize)]
pub struct AtomVerdict {
    pub support_ok: bool,
    /// Signed integral `∫ a`, summed in cell order.
    pub mean: f64,
    /// `sup |a| · |B|`.
    pub size_bound: f64,
    pub ball: Ball,
    pub valid: bool,
}

pub const DEFAULT_ATOM_TOL: f64 = 1e-10;

pub fn atom_check(f: &WeightedSamples, ball: Ball, tol: f64) -> Result<AtomVerdict> {
    if !f.has_positions() {
        return Err(Error::InvalidSamples(
            "atom check needs cell positions".into(),
        ));
    }
    let support_ok = f
        .entries()
        .iter()
        .filter(|s| s.value != 0.0)
        .all(|s| dist(s.position.unwrap(), ball.center) <= ball.radius);
    let mean = f.integral();
    let size_bound = f.sup_abs() * ball.area();
    let valid = support_ok && mean.abs() <= tol && size_bound <= 1.0 + tol;
    Ok(AtomVerdict {
        support_ok,
        mean,
        size_bound,
        ball,
        valid,
    })
}

/// Largest distance from `center` to a cell carrying a nonzero value.
pub fn minimal_containing_radius(f: &WeightedSamples, center: [f64; 2]) -> Result<f64> {
    if !f.has_positions() {
        return Err(Error::InvalidSamples(
            "support scan needs cell positions".into(),
        ));
    }
    Ok(f.entries()
        .iter()
        .filter(|s| s.value != 0.0)
        .map(|s| dist(s.position.unwrap(), center))
        .fold(0.0, f64::max))
}

/// Atomic-norm proxy: `sup|f| · |B|` for the ball centred at the support's
/// bounding-box midpoint and just containing the support. Exact for a
/// single atom whose support is a centred disk.
pub fn atom_proxy_norm(f: &WeightedSamples) -> Result<(f64, Ball)> {
    if !f.has_positions() {
        return Err(Error::InvalidSamples(
            "atom norm needs cell positions".into(),
        ));
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for s in f.entries().iter().filter(|s| s.value != 0.0) {
        let p = s.position.unwrap();
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    if !lo[0].is_finite() {
        return Ok((0.0, Ball::new([0.0, 0.0], 0.0)));
    }
    let center = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let radius = minimal_containing_radius(f, center)?;
    let ball = Ball::new(center, radius);
    Ok((f.sup_abs() * ball.area(), ball))
}
