use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use super::bump::bump_eta;
use crate::error::{Error, Result};
use crate::pde::log_potential;
use crate::quad::fit_slope;
use crate::rearrange::{
    atom_check, atom_proxy_norm, zygmund_norm, AtomVerdict, Ball, Sample, WeightedSamples,
    DEFAULT_ATOM_TOL,
};

/// Lattice cells per unit length of the rescaled bump `η` (support `B₂`).
pub const DEFAULT_CELLS_PER_UNIT: usize = 50;

/// One member of the family `f_k = k²η(k(x−y_k)) − k²η(k(x+y_k))`.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleRun {
    pub k: u32,
    pub y_k: [f64; 2],
    /// `(1/2π)∫ ln|y| f_k/A_k dy`, the standard potential at 0.
    pub u0_standard: f64,
    /// `2π · u0_standard`, the normalisation without the `1/2π` factor.
    pub u0_paper: f64,
    /// `∫ f_k`, summed in mirrored-pair order.
    pub integral: f64,
    pub atom: AtomVerdict,
    /// Radius of the smallest origin-centred ball holding the support.
    pub min_radius: f64,
    /// `sup|f_k| · |B_{min_radius}|`, the atom normalisation.
    pub atom_size: f64,
    /// `sup|f_k| · |B_{6/k}|`.
    pub atom_size_stated_radius: f64,
    pub zygmund_norm: f64,
    pub lower_bound_stated: f64,
    pub lower_bound_safe: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleSeries {
    pub runs: Vec<CounterexampleRun>,
    /// Slope of `|u_k(0)|` (paper normalisation) against `ln k`.
    pub slope_paper: f64,
    pub slope_standard: f64,
}

/// `f_k` and the potential density `f_k/A_k`, `A_k = 1 + η(k(x+y_k)/2)`,
/// sampled on a lattice aligned with the two bumps. Cells are listed in
/// mirrored pairs `(+v, −v)` so that `∫ f_k` sums to exactly zero.
pub fn counterexample_samples(
    k: u32,
    cells_per_unit: usize,
) -> Result<(WeightedSamples, WeightedSamples)> {
    if k <= 10 {
        return Err(Error::KTooSmall(k));
    }
    let kf = k as f64;
    let c = [4.0, 4.0];
    let n = 4 * cells_per_unit;
    let hz = 4.0 / n as f64;
    let m = (hz / kf).powi(2);
    let mut f = Vec::new();
    let mut density = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let z = [-2.0 + (i as f64 + 0.5) * hz, -2.0 + (j as f64 + 0.5) * hz];
            let eta = bump_eta(z);
            if eta == 0.0 {
                continue;
            }
            let plus = [(c[0] + z[0]) / kf, (c[1] + z[1]) / kf];
            let minus = [(-c[0] + z[0]) / kf, (-c[1] + z[1]) / kf];
            let v = kf * kf * eta;
            f.push(Sample::at(v, m, plus));
            f.push(Sample::at(-v, m, minus));
            let a_plus = 1.0
                + bump_eta([
                    kf * (plus[0] + 4.0 / kf) / 2.0,
                    kf * (plus[1] + 4.0 / kf) / 2.0,
                ]);
            let a_minus = 1.0
                + bump_eta([
                    kf * (minus[0] + 4.0 / kf) / 2.0,
                    kf * (minus[1] + 4.0 / kf) / 2.0,
                ]);
            density.push(Sample::at(v / a_plus, m, plus));
            density.push(Sample::at(-v / a_minus, m, minus));
        }
    }
    Ok((WeightedSamples::new(f)?, WeightedSamples::new(density)?))
}

pub fn counterexample_family(k: u32) -> Result<CounterexampleRun> {
    counterexample_family_with(k, DEFAULT_CELLS_PER_UNIT)
}

pub fn counterexample_family_with(k: u32, cells_per_unit: usize) -> Result<CounterexampleRun> {
    let (f, density) = counterexample_samples(k, cells_per_unit)?;
    let kf = k as f64;
    let u0_standard = log_potential(&density, &[[0.0, 0.0]], true)?.values[0];
    let (atom_size, ball) = atom_proxy_norm(&f)?;
    let sup = f.sup_abs();
    let normalised = f.map_values(|v| v / atom_size)?;
    let atom = atom_check(&normalised, ball, DEFAULT_ATOM_TOL)?;
    Ok(CounterexampleRun {
        k,
        y_k: [4.0 / kf, 4.0 / kf],
        u0_standard,
        u0_paper: TAU * u0_standard,
        integral: f.integral(),
        atom,
        min_radius: ball.radius,
        atom_size,
        atom_size_stated_radius: sup * Ball::new([0.0, 0.0], 6.0 / kf).area(),
        zygmund_norm: zygmund_norm(&f, PI)?,
        lower_bound_stated: 0.5 * PI * (kf / 5.0).ln(),
        lower_bound_safe: 0.9 * 0.5 * PI * (kf / 7.0).ln(),
    })
}

pub fn counterexample_series(ks: &[u32]) -> Result<CounterexampleSeries> {
    let runs: Vec<CounterexampleRun> = ks
        .par_iter()
        .map(|&k| counterexample_family(k))
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = runs.iter().map(|r| (r.k as f64).ln()).collect();
    let paper: Vec<f64> = runs.iter().map(|r| r.u0_paper.abs()).collect();
    let standard: Vec<f64> = runs.iter().map(|r| r.u0_standard.abs()).collect();
    Ok(CounterexampleSeries {
        slope_paper: fit_slope(&xs, &paper).unwrap_or(f64::NAN),
        slope_standard: fit_slope(&xs, &standard).unwrap_or(f64::NAN),
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_k() {
        assert!(matches!(
            counterexample_family(10),
            Err(Error::KTooSmall(10))
        ));
    }

    #[test]
    fn exact_cancellation_and_support() {
        let run = counterexample_family_with(16, 20).unwrap();
        assert_eq!(run.integral, 0.0);
        assert_eq!(run.atom.mean, 0.0);
        assert!(run.atom.support_ok);
        assert!(run.min_radius * 16.0 < 4.0 * 2f64.sqrt() + 2.0);
        assert!(run.min_radius * 16.0 > 6.0);
    }
}
