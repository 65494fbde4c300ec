use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::gauss4;
use crate::rearrange::{Sample, WeightedSamples};
use crate::surface::MetricProfile;

/// Radii within this relative slack of a ball radius count as inside it.
const RADIUS_SLACK: f64 = 1e-12;

/// Tensor-product polar discretisation of the geodesic ball `B_{r_max}`.
///
/// Nodes sit at `r_i = i·h`, `θ_j = j·Δθ`; ring `i = 0` collapses to a single
/// pole node. Every node owns a dual cell: the disk `r < h/2` for the pole,
/// `[r_i − h/2, r_i + h/2] × [θ_j − Δθ/2, θ_j + Δθ/2]` for interior rings and
/// the inner half of that for the boundary ring `i = n_r`.
#[derive(Debug, Clone)]
pub struct PolarGrid {
    metric: MetricProfile,
    n_r: usize,
    n_theta: usize,
    r_max: f64,
    h: f64,
    dtheta: f64,
    measures: Vec<f64>,
    radial_coef: Vec<f64>,
    angular_coef: Vec<f64>,
}

impl PolarGrid {
    pub fn new(metric: &MetricProfile, n_r: usize, n_theta: usize, r_max: f64) -> Result<Self> {
        if n_r < 8 || n_theta < 8 {
            return Err(Error::InvalidGrid(format!(
                "need n_r, n_θ ≥ 8, got {n_r} × {n_theta}"
            )));
        }
        if !(r_max > 0.0) || r_max > metric.r_max() * (1.0 + RADIUS_SLACK) {
            return Err(Error::InvalidGrid(format!(
                "grid radius {r_max} exceeds the metric chart radius {}",
                metric.r_max()
            )));
        }
        let h = r_max / n_r as f64;
        let dtheta = TAU / n_theta as f64;
        let mut grid = Self {
            metric: metric.clone(),
            n_r,
            n_theta,
            r_max,
            h,
            dtheta,
            measures: Vec::new(),
            radial_coef: Vec::new(),
            angular_coef: Vec::new(),
        };
        for j in 0..n_theta {
            let t = grid.theta(j);
            if grid.metric.g(0.5 * h, t) <= 0.0 {
                return Err(Error::DegenerateMetric(0.5 * h));
            }
        }
        grid.measures = (0..grid.len())
            .map(|k| grid.restricted_measure(k, r_max))
            .collect();
        if grid.measures.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::DegenerateMetric(r_max));
        }

        // radial faces at r_{i+1/2}, i = 0..n_r-1
        let mut radial = Vec::with_capacity(n_r * n_theta);
        for i in 0..n_r {
            let rf = (i as f64 + 0.5) * h;
            for j in 0..n_theta {
                radial.push(grid.metric.g(rf, grid.theta(j)) * dtheta / h);
            }
        }
        // angular faces at θ_{j+1/2} on rings 1..=n_r
        let mut angular = Vec::with_capacity(n_r * n_theta);
        for i in 1..=n_r {
            let (len, rc) = if i == n_r {
                (0.5 * h, r_max - 0.25 * h)
            } else {
                (h, i as f64 * h)
            };
            for j in 0..n_theta {
                let g = grid.metric.g(rc, grid.theta(j) + 0.5 * dtheta);
                if g <= 0.0 {
                    return Err(Error::DegenerateMetric(rc));
                }
                angular.push(len / (g * dtheta));
            }
        }
        grid.radial_coef = radial;
        grid.angular_coef = angular;
        Ok(grid)
    }

    pub fn metric(&self) -> &MetricProfile {
        &self.metric
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dtheta(&self) -> f64 {
        self.dtheta
    }

    /// Number of nodes, pole included.
    pub fn len(&self) -> usize {
        1 + self.n_r * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta
    }

    pub fn radius(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// Flat index of ring `i ≥ 1`, angle `j`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.n_r && j < self.n_theta);
        1 + (i - 1) * self.n_theta + j
    }

    /// `(ring, angle)` of a node; the pole reports `(0, 0)`.
    pub fn ring_angle(&self, k: usize) -> (usize, usize) {
        if k == 0 {
            (0, 0)
        } else {
            (1 + (k - 1) / self.n_theta, (k - 1) % self.n_theta)
        }
    }

    pub fn polar(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.ring_angle(k);
        (self.radius(i), self.theta(j))
    }

    /// Chart (Cartesian) position of a node.
    pub fn position(&self, k: usize) -> [f64; 2] {
        let (r, t) = self.polar(k);
        [r * t.cos(), r * t.sin()]
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        self.ring_angle(k).0 == self.n_r
    }

    /// Radial extent of the dual cell of ring `i`.
    pub fn radial_cell(&self, i: usize) -> (f64, f64) {
        let h = self.h;
        match i {
            0 => (0.0, 0.5 * h),
            i if i == self.n_r => (self.r_max - 0.5 * h, self.r_max),
            i => (self.radius(i) - 0.5 * h, self.radius(i) + 0.5 * h),
        }
    }

    pub fn measure(&self, k: usize) -> f64 {
        self.measures[k]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn total_measure(&self) -> f64 {
        self.measures.iter().sum()
    }

    /// Measure of the part of node `k`'s dual cell inside `B_ρ`.
    pub fn restricted_measure(&self, k: usize, rho: f64) -> f64 {
        let (i, j) = self.ring_angle(k);
        let (a, b) = self.radial_cell(i);
        let b = b.min(rho);
        if b <= a {
            return 0.0;
        }
        if i == 0 {
            (0..self.n_theta)
                .map(|j| gauss4(a, b, |r| self.metric.g(r, self.theta(j))))
                .sum::<f64>()
                * self.dtheta
        } else {
            gauss4(a, b, |r| self.metric.g(r, self.theta(j))) * self.dtheta
        }
    }

    /// Coefficient `G(r_{i+1/2}, θ_j) Δθ / h` of the radial face between ring `i` and `i + 1`.
    pub fn radial_coef(&self, i: usize, j: usize) -> f64 {
        self.radial_coef[i * self.n_theta + j]
    }

    /// Coefficient of the angular face between `θ_j` and `θ_{j+1}` on ring `i ≥ 1`.
    pub fn angular_coef(&self, i: usize, j: usize) -> f64 {
        self.angular_coef[(i - 1) * self.n_theta + j]
    }

    pub fn within(&self, k: usize, rho: f64) -> bool {
        self.polar(k).0 <= rho * (1.0 + RADIUS_SLACK)
    }

    pub fn check(&self, u: &DiscreteField) -> Result<()> {
        if u.n_r != self.n_r || u.n_theta != self.n_theta {
            return Err(Error::GridMismatch(format!(
                "field {}×{} on grid {}×{}",
                u.n_r, u.n_theta, self.n_r, self.n_theta
            )));
        }
        Ok(())
    }

    /// `max |u|` over nodes with `r ≤ ρ`.
    pub fn sup_norm(&self, u: &DiscreteField, rho: f64) -> f64 {
        (0..self.len())
            .filter(|&k| self.within(k, rho))
            .map(|k| u.values[k].abs())
            .fold(0.0, f64::max)
    }

    /// `(min u, max u)` over nodes with `r ≤ ρ`.
    pub fn min_max(&self, u: &DiscreteField, rho: f64) -> (f64, f64) {
        (0..self.len())
            .filter(|&k| self.within(k, rho))
            .map(|k| u.values[k])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn lq_norm(&self, u: &DiscreteField, q: f64, rho: f64) -> f64 {
        (0..self.len())
            .map(|k| u.values[k].abs().powf(q) * self.restricted_measure_cached(k, rho))
            .sum::<f64>()
            .powf(1.0 / q)
    }

    pub fn l1_norm(&self, u: &DiscreteField, rho: f64) -> f64 {
        self.lq_norm(u, 1.0, rho)
    }

    pub fn integral(&self, u: &DiscreteField, rho: f64) -> f64 {
        (0..self.len())
            .map(|k| u.values[k] * self.restricted_measure_cached(k, rho))
            .sum()
    }

    fn restricted_measure_cached(&self, k: usize, rho: f64) -> f64 {
        let (i, _) = self.ring_angle(k);
        let (_, b) = self.radial_cell(i);
        if b <= rho {
            self.measures[k]
        } else {
            self.restricted_measure(k, rho)
        }
    }

    /// `u` restricted to `B_ρ` as positioned cell samples.
    pub fn samples(&self, u: &DiscreteField, rho: f64) -> Result<WeightedSamples> {
        self.check(u)?;
        let entries = (0..self.len())
            .filter_map(|k| {
                let m = self.restricted_measure_cached(k, rho);
                (m > 0.0).then(|| Sample::at(u.values[k], m, self.position(k)))
            })
            .collect();
        WeightedSamples::new(entries)
    }

    /// Boundary average `l(∂B_ρ)⁻¹ ∫ u(ρ,θ) G(ρ,θ) dθ`, linear in `r` between rings.
    pub fn circle_average(&self, u: &DiscreteField, rho: f64) -> Result<f64> {
        if !(rho > 0.0) || rho > self.r_max * (1.0 + RADIUS_SLACK) {
            return Err(Error::RadiusOutOfRange {
                r: rho,
                r_max: self.r_max,
            });
        }
        let x = (rho / self.h).min(self.n_r as f64);
        let i0 = (x.floor() as usize).min(self.n_r - 1);
        let w = x - i0 as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..self.n_theta {
            let lo = if i0 == 0 {
                u.values[0]
            } else {
                u.values[self.index(i0, j)]
            };
            let hi = u.values[self.index(i0 + 1, j)];
            let g = self.metric.g(rho, self.theta(j));
            num += ((1.0 - w) * lo + w * hi) * g;
            den += g;
        }
        Ok(num / den)
    }
}

/// Nodal values on a [`PolarGrid`]: the pole first, then rings `1..=n_r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteField {
    pub n_r: usize,
    pub n_theta: usize,
    pub values: Vec<f64>,
}

impl DiscreteField {
    pub fn zeros(grid: &PolarGrid) -> Self {
        Self {
            n_r: grid.n_r,
            n_theta: grid.n_theta,
            values: vec![0.0; grid.len()],
        }
    }

    /// Evaluates `f(r, θ)` at every node; the pole uses `θ = 0`.
    pub fn from_fn(grid: &PolarGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                let (r, t) = grid.polar(k);
                f(r, t)
            })
            .collect();
        Self {
            n_r: grid.n_r,
            n_theta: grid.n_theta,
            values,
        }
    }

    pub fn pole(&self) -> f64 {
        self.values[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.values.len(), other.values.len());
        Self {
            n_r: self.n_r,
            n_theta: self.n_theta,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            n_r: self.n_r,
            n_theta: self.n_theta,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }
}
