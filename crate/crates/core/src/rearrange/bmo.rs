use serde::{Deserialize, Serialize};

use super::samples::{Sample, WeightedSamples};
use crate::error::{Error, Result};

/// A planar (chart) disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Ball {
    pub fn new(center: [f64; 2], radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn contains_point(&self, p: [f64; 2]) -> bool {
        dist(self.center, p) < self.radius
    }

    pub fn contains_ball(&self, other: &Ball) -> bool {
        dist(self.center, other.center) + other.radius <= self.radius * (1.0 + 1e-12)
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[derive(Debug, Clone, Serialize)]
pub struct BmoEstimate {
    pub value: f64,
    pub ball_family: Vec<Ball>,
    /// Ball attaining the supremum, if any ball held cells.
    pub argmax: Option<Ball>,
}

/// Dyadic family around `center`: radii `scale·2^{-l}` for `l = 0..levels`,
/// centres on the lattice of spacing equal to the radius, within distance
/// `scale` of `center`.
pub fn dyadic_ball_family(center: [f64; 2], scale: f64, levels: usize) -> Vec<Ball> {
    let mut out = Vec::new();
    for l in 0..levels {
        let s = scale / (1u64 << l) as f64;
        let m = 1i64 << l;
        for a in -m..=m {
            for b in -m..=m {
                let off = [a as f64 * s, b as f64 * s];
                if off[0].hypot(off[1]) <= scale * (1.0 + 1e-12) {
                    out.push(Ball::new([center[0] + off[0], center[1] + off[1]], s));
                }
            }
        }
    }
    out
}

/// Supremum over `family` of the mean oscillation
/// `|B|⁻¹ ∫_B |f − f_B|`. Only a lower bound of the BMO norm, since the
/// family is finite. Balls holding no cell centre are skipped.
pub fn bmo_norm(f: &WeightedSamples, family: &[Ball], domain: Option<Ball>) -> Result<BmoEstimate> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if !f.has_positions() {
        return Err(Error::InvalidSamples(
            "mean oscillation needs cell positions".into(),
        ));
    }
    if let Some(d) = domain {
        for b in family {
            if !d.contains_ball(b) {
                return Err(Error::BallOutsideDomain {
                    cx: b.center[0],
                    cy: b.center[1],
                    r: b.radius,
                });
            }
        }
    }

    let mut cells: Vec<&Sample> = f.entries().iter().collect();
    cells.sort_by(|a, b| a.position.unwrap()[0].total_cmp(&b.position.unwrap()[0]));
    let xs: Vec<f64> = cells.iter().map(|c| c.position.unwrap()[0]).collect();

    let mut best = 0.0;
    let mut argmax = None;
    let mut any = false;
    for ball in family {
        let lo = xs.partition_point(|&x| x < ball.center[0] - ball.radius);
        let hi = xs.partition_point(|&x| x <= ball.center[0] + ball.radius);
        let inside: Vec<&Sample> = cells[lo..hi]
            .iter()
            .copied()
            .filter(|c| ball.contains_point(c.position.unwrap()))
            .collect();
        if inside.is_empty() {
            continue;
        }
        any = true;
        let first = inside[0].value;
        if inside.iter().all(|c| c.value == first) {
            // exact zero, free of averaging round-off
            if argmax.is_none() {
                argmax = Some(*ball);
            }
            continue;
        }
        let mass: f64 = inside.iter().map(|c| c.measure).sum();
        let avg = inside.iter().map(|c| c.value * c.measure).sum::<f64>() / mass;
        let osc = inside
            .iter()
            .map(|c| (c.value - avg).abs() * c.measure)
            .sum::<f64>()
            / mass;
        if osc > best || argmax.is_none() {
            best = osc.max(best);
            argmax = Some(*ball);
        }
    }
    if !any {
        return Err(Error::EmptyFamily);
    }
    Ok(BmoEstimate {
        value: best,
        ball_family: family.to_vec(),
        argmax,
    })
}
