use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pde::{disk_log_integral, DiscreteField, PolarGrid};
use crate::rearrange::{atom_proxy_norm, bmo_norm, dyadic_ball_family, Ball, WeightedSamples};
use crate::surface::MetricProfile;

/// Relative size of `|∫f|` against `∫|f|` accepted as zero mean.
pub const MEAN_ZERO_TOL: f64 = 1e-12;

/// Grid used to sample the kernel `ln(ρ/|x−x₀|)χ_{B_ρ}` around `x₀`.
pub const KERNEL_GRID: (usize, usize) = (256, 256);
/// Dyadic levels of the ball family used for the kernel estimate.
pub const KERNEL_LEVELS: usize = 7;

#[derive(Debug, Clone, Serialize)]
pub struct BmoDualityReport {
    /// `|∫_{B_ρ(x₀)} f ln(ρ/|x−x₀|)|`.
    pub lhs: f64,
    pub atom_norm: f64,
    pub ratio_to_atom: f64,
    /// `∫|f| · max_{supp f ∩ B_ρ} ln(ρ/|x−x₀|)`, the naive L¹–L^∞ bound.
    pub l1_bound: f64,
    /// `(ρ, estimated BMO norm of the kernel)`.
    pub kernel_bmo: Vec<(f64, f64)>,
    /// `(max − min)/min` of the kernel estimates.
    pub kernel_spread: f64,
}

/// Average of `ln(ρ/|x − x₀|)` over the equal-area disk of a cell at
/// distance `d` from `x₀`.
fn kernel_cell_average(rho: f64, a: f64, d: f64) -> f64 {
    rho.ln() - disk_log_integral(a, d) / (PI * a * a)
}

pub fn bmo_duality_check(
    f: &WeightedSamples,
    x0: [f64; 2],
    rho: f64,
    kernel_rhos: &[f64],
) -> Result<BmoDualityReport> {
    if !f.has_positions() {
        return Err(Error::InvalidSamples(
            "duality check needs cell positions".into(),
        ));
    }
    let mean = f.integral();
    if mean.abs() > MEAN_ZERO_TOL * f.l1_norm().max(f64::MIN_POSITIVE) {
        return Err(Error::NotMeanZero(mean));
    }
    let mut pairing = 0.0;
    let mut kernel_max: f64 = 0.0;
    for s in f.entries() {
        let p = s.position.unwrap();
        let d = (p[0] - x0[0]).hypot(p[1] - x0[1]);
        if d >= rho || s.value == 0.0 {
            continue;
        }
        let a = (s.measure / PI).sqrt();
        let k = kernel_cell_average(rho, a, d);
        pairing += s.value * s.measure * k;
        kernel_max = kernel_max.max(k);
    }
    let lhs = pairing.abs();
    let (atom_norm, _) = atom_proxy_norm(f)?;
    let kernel_bmo = kernel_rhos
        .iter()
        .map(|&r| Ok((r, kernel_bmo_estimate(r)?)))
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = kernel_bmo
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), (_, v)| {
            (lo.min(*v), hi.max(*v))
        });
    Ok(BmoDualityReport {
        lhs,
        atom_norm,
        ratio_to_atom: crate::verdict::ratio(lhs, atom_norm),
        l1_bound: f.l1_norm() * kernel_max,
        kernel_bmo,
        kernel_spread: if kernel_rhos.is_empty() {
            0.0
        } else {
            (hi - lo) / lo
        },
    })
}

/// Dyadic-family estimate of `‖ln(ρ/|x|)χ_{B_ρ}‖_BMO` on a polar grid of
/// the unit disk; the pole cell holds its exact disk average.
pub fn kernel_bmo_estimate(rho: f64) -> Result<f64> {
    let metric = MetricProfile::flat(1.0)?;
    let grid = PolarGrid::new(&metric, KERNEL_GRID.0, KERNEL_GRID.1, 1.0)?;
    let a = 0.5 * grid.h();
    let field = DiscreteField::from_fn(&grid, |r, _| {
        if r == 0.0 {
            kernel_cell_average(rho, a, 0.0)
        } else if r < rho {
            (rho / r).ln()
        } else {
            0.0
        }
    });
    let samples = grid.samples(&field, 1.0)?;
    let family = dyadic_ball_family([0.0, 0.0], 0.5, KERNEL_LEVELS);
    Ok(bmo_norm(&samples, &family, Some(Ball::new([0.0, 0.0], 1.0)))?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rearrange::Sample;

    #[test]
    fn rejects_nonzero_mean() {
        let f = WeightedSamples::new(vec![Sample::at(1.0, 0.1, [0.0, 0.0])]).unwrap();
        assert!(matches!(
            bmo_duality_check(&f, [0.0, 0.0], 0.5, &[]),
            Err(Error::NotMeanZero(_))
        ));
    }

    #[test]
    fn zero_field() {
        let f = WeightedSamples::new(vec![Sample::at(0.0, 0.1, [0.1, 0.0])]).unwrap();
        let r = bmo_duality_check(&f, [0.0, 0.0], 0.5, &[]).unwrap();
        assert_eq!(r.lhs, 0.0);
    }

    #[test]
    fn pole_cell_average() {
        // mean of ln(ρ/|x|) over B_a is ln(ρ/a) + 1/2
        let (rho, a) = (0.3, 0.01);
        assert!((kernel_cell_average(rho, a, 0.0) - ((rho / a).ln() + 0.5)).abs() < 1e-13);
    }
}
