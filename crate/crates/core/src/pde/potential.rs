use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rearrange::WeightedSamples;

/// Values of `(1/2π) ∫ ln|x − y| f(y) dy` at the evaluation points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogPotential {
    pub values: Vec<f64>,
    /// Indices of evaluation points that fell inside a source cell while the
    /// singular-cell correction was disabled.
    pub flagged: Vec<usize>,
}

/// `∫_{|y−c|<a} ln|x − y| dy` for `d = |x − c|`.
pub fn disk_log_integral(a: f64, d: f64) -> f64 {
    if d >= a {
        PI * a * a * d.ln()
    } else {
        PI * a * a * a.ln() - 0.5 * PI * (a * a - d * d)
    }
}

/// Logarithmic potential `(1/2π)∫ ln|x − y| f(y) dy` of a cell-sampled density,
/// the free-space solution of `Δu = f`. Every cell is treated as
/// a point mass, except that a cell whose equal-area disk contains the
/// evaluation point is integrated exactly over that disk (when `correction`
/// is on) or skipped and flagged (when off).
pub fn log_potential(
    f: &WeightedSamples,
    points: &[[f64; 2]],
    correction: bool,
) -> Result<LogPotential> {
    if !f.has_positions() {
        return Err(Error::InvalidSamples(
            "log potential needs cell positions".into(),
        ));
    }
    let cells: Vec<([f64; 2], f64, f64)> = f
        .entries()
        .iter()
        .filter(|s| s.value != 0.0)
        .map(|s| {
            (
                s.position.unwrap(),
                s.value * s.measure,
                (s.measure / PI).sqrt(),
            )
        })
        .collect();
    let results: Vec<(f64, bool)> = points
        .par_iter()
        .map(|x| {
            let mut acc = 0.0;
            let mut hit = false;
            for (c, mass, a) in &cells {
                let d = (x[0] - c[0]).hypot(x[1] - c[1]);
                if d < *a {
                    if correction {
                        acc += mass / (PI * a * a) * disk_log_integral(*a, d);
                    } else {
                        hit = true;
                        if d > 0.0 {
                            acc += mass * d.ln();
                        }
                    }
                } else {
                    acc += mass * d.ln();
                }
            }
            (acc / TAU, hit)
        })
        .collect();
    Ok(LogPotential {
        values: results.iter().map(|r| r.0).collect(),
        flagged: results
            .iter()
            .enumerate()
            .filter(|(_, r)| r.1)
            .map(|(i, _)| i)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{DiscreteField, PolarGrid};
    use crate::surface::MetricProfile;

    fn unit_disk(n: usize) -> WeightedSamples {
        let m = MetricProfile::flat(1.0).unwrap();
        let g = PolarGrid::new(&m, n, 4 * n, 1.0).unwrap();
        g.samples(&DiscreteField::from_fn(&g, |_, _| 1.0), 1.0)
            .unwrap()
    }

    #[test]
    fn disk_formula_is_continuous_at_the_rim() {
        let a = 0.3;
        assert!((disk_log_integral(a, a) - disk_log_integral(a, a * (1.0 - 1e-12))).abs() < 1e-12);
        assert!(
            (disk_log_integral(a, 0.0) - TAU * (a * a * a.ln() / 2.0 - a * a / 4.0)).abs() < 1e-15
        );
    }

    #[test]
    fn unit_disk_centre_and_exterior() {
        let f = unit_disk(64);
        let p = log_potential(&f, &[[0.0, 0.0], [2.0, 0.0], [0.0, -2.0]], true).unwrap();
        assert!(p.flagged.is_empty());
        assert!((p.values[0] + 0.25).abs() < 1e-3);
        assert!((p.values[1] - 0.5 * 2f64.ln()).abs() < 1e-4);
        assert!((p.values[2] - 0.5 * 2f64.ln()).abs() < 1e-4);
    }

    #[test]
    fn uncorrected_singular_cell_is_flagged() {
        let f = unit_disk(16);
        let p = log_potential(&f, &[[0.0, 0.0], [3.0, 0.0]], false).unwrap();
        assert_eq!(p.flagged, vec![0]);
    }

    #[test]
    fn zero_density_gives_zero() {
        let f = unit_disk(16).map_values(|_| 0.0).unwrap();
        let p = log_potential(&f, &[[0.1, 0.2], [0.0, 0.0]], true).unwrap();
        assert_eq!(p.values, vec![0.0, 0.0]);
    }
}
