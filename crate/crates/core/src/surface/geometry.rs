use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::metric::MetricProfile;
use crate::error::{Error, Result};
use crate::pde::{DiscreteField, PolarGrid};
use crate::quad::{fit_slope, gauss4, gauss4_points, periodic_trapezoid, simpson};
use crate::rearrange::zygmund_norm;
use crate::verdict::VerdictReport;

/// Node counts for radial (composite Simpson) and angular (periodic
/// trapezoid) quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SurfaceQuadrature {
    pub radial: usize,
    pub angular: usize,
}

impl Default for SurfaceQuadrature {
    fn default() -> Self {
        Self {
            radial: 512,
            angular: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallStats {
    pub r: f64,
    pub length: f64,
    pub volume: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsoperimetricEstimate {
    /// `max V/l²` over the probed geodesic balls (a lower bound for the
    /// isoperimetric constant, which ranges over all domains).
    pub a_iso: f64,
    /// `‖K‖_{L^p(B_{min(1, r_max)})}`.
    pub a_curv: f64,
    pub p: f64,
}

impl IsoperimetricEstimate {
    pub fn admissible_constant(&self) -> f64 {
        self.a_iso.max(self.a_curv)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometryCheck {
    pub verdicts: Vec<VerdictReport>,
    /// Smallest `(rhs − lhs)/rhs` over all verdicts.
    pub worst_slack: f64,
    /// Set when the supplied constant or radii violate the preconditions.
    pub invalid_case: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelWeight {
    pub value: f64,
    /// The lower endpoint was 0 and got replaced by the first grid radius.
    pub singular_endpoint: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FluxVariation {
    pub rho: f64,
    pub value: f64,
    /// `(ρ·2^{-m}, value)` for the dyadic ladder, largest radius first.
    pub ladder: Vec<(f64, f64)>,
    /// Log–log slope of the ladder; `None` when the variation vanishes.
    pub measured_exponent: Option<f64>,
    pub bound_exponent: f64,
    pub pass: bool,
}

/// Geometry of one semi-geodesic chart, evaluated by quadrature.
#[derive(Debug, Clone)]
pub struct Geometry<'a> {
    metric: &'a MetricProfile,
    quad: SurfaceQuadrature,
}

/// Relative tolerance for the lemma bound verdicts.
pub const BOUND_TOL: f64 = 1e-10;

const LADDER_STEPS: usize = 4;

impl<'a> Geometry<'a> {
    pub fn new(metric: &'a MetricProfile) -> Self {
        Self {
            metric,
            quad: SurfaceQuadrature::default(),
        }
    }

    pub fn with_quadrature(metric: &'a MetricProfile, quad: SurfaceQuadrature) -> Self {
        Self { metric, quad }
    }

    pub fn metric(&self) -> &MetricProfile {
        self.metric
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r > 0.0) || r > self.metric.r_max() * (1.0 + 1e-12) {
            return Err(Error::RadiusOutOfRange {
                r,
                r_max: self.metric.r_max(),
            });
        }
        Ok(())
    }

    fn length_unchecked(&self, r: f64) -> f64 {
        periodic_trapezoid(self.quad.angular, |t| self.metric.g(r, t))
    }

    fn length_derivative(&self, r: f64) -> f64 {
        periodic_trapezoid(self.quad.angular, |t| self.metric.g_r(r, t))
    }

    /// `l(∂B_r) = ∫₀^{2π} G(r,θ) dθ`.
    pub fn boundary_length(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.length_unchecked(r))
    }

    /// `V(B_r) = ∫₀^r l(∂B_t) dt`.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(simpson(0.0, r, self.quad.radial, |t| {
            self.length_unchecked(t)
        }))
    }

    pub fn ball_stats(&self, r: f64) -> Result<BallStats> {
        Ok(BallStats {
            r,
            length: self.boundary_length(r)?,
            volume: self.ball_volume(r)?,
        })
    }

    /// `K = −∂²_{rr}G / G`.
    pub fn gauss_curvature(&self, r: f64, theta: f64) -> Result<f64> {
        if r == 0.0 {
            return Err(Error::CurvatureAtPole);
        }
        self.check_radius(r)?;
        let g = self.metric.g(r, theta);
        if g == 0.0 {
            return Err(Error::DegenerateMetric(r));
        }
        Ok(-self.metric.g_rr(r, theta) / g)
    }

    /// `‖K‖_{L^p(B_R)}` by midpoint rule in `r` and trapezoid in `θ`.
    pub fn curvature_lp(&self, p: f64, radius: f64) -> Result<f64> {
        self.check_radius(radius)?;
        let n = self.quad.radial;
        let dr = radius / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let r = (i as f64 + 0.5) * dr;
            acc += periodic_trapezoid(self.quad.angular, |t| {
                let g = self.metric.g(r, t);
                (self.metric.g_rr(r, t) / g).abs().powf(p) * g
            }) * dr;
        }
        Ok(acc.powf(1.0 / p))
    }

    pub fn isoperimetric_constant(&self, radii: &[f64], p: f64) -> Result<IsoperimetricEstimate> {
        if radii.is_empty() {
            return Err(Error::EmptyRadii);
        }
        let mut a_iso: f64 = 0.0;
        for &r in radii {
            let s = self.ball_stats(r)?;
            a_iso = a_iso.max(s.volume / (s.length * s.length));
        }
        let a_curv = self.curvature_lp(p, self.metric.r_max().min(1.0))?;
        Ok(IsoperimetricEstimate { a_iso, a_curv, p })
    }

    /// Volume/length lower bounds `V ≥ r²/(4A)`, `l ≥ r/(2A)` and upper bounds
    /// `V ≤ (2π+A)^{p+1} r²`, `l ≤ (2π+A)^{p+1} r` at every radius.
    pub fn geometry_bounds_check(&self, a: f64, p: f64, radii: &[f64]) -> Result<GeometryCheck> {
        if radii.is_empty() {
            return Err(Error::EmptyRadii);
        }
        let limit = self.metric.r_max().min(1.0);
        let mut problems = Vec::new();
        let admissible: Vec<f64> = radii
            .iter()
            .copied()
            .filter(|&r| {
                let ok = r > 0.0 && r <= limit * (1.0 + 1e-12);
                if !ok {
                    problems.push(format!("radius {r} outside (0, {limit}]"));
                }
                ok
            })
            .collect();
        if !(p > 1.0) {
            problems.push(format!("p = {p} must exceed 1"));
        }
        let mut verdicts = Vec::new();
        if !admissible.is_empty() {
            let est = self.isoperimetric_constant(&admissible, p.max(1.0 + 1e-9))?;
            if a < est.a_iso * (1.0 - 1e-12) {
                problems.push(format!("A = {a} below measured A_iso = {}", est.a_iso));
            }
            if a < est.a_curv {
                problems.push(format!("A = {a} below measured A_curv = {}", est.a_curv));
            }
            let upper = (TAU + a).powf(p + 1.0);
            for &r in &admissible {
                let s = self.ball_stats(r)?;
                let case = format!("{}:r={r}", self.metric.name());
                verdicts.push(VerdictReport::at_least(
                    "volume_lower",
                    &case,
                    s.volume,
                    r * r / (4.0 * a),
                    BOUND_TOL,
                ));
                verdicts.push(VerdictReport::at_least(
                    "length_lower",
                    &case,
                    s.length,
                    r / (2.0 * a),
                    BOUND_TOL,
                ));
                verdicts.push(VerdictReport::check(
                    "volume_upper",
                    &case,
                    s.volume,
                    upper * r * r,
                    BOUND_TOL,
                ));
                verdicts.push(VerdictReport::check(
                    "length_upper",
                    &case,
                    s.length,
                    upper * r,
                    BOUND_TOL,
                ));
            }
        }
        let worst_slack = verdicts
            .iter()
            .map(|v| (v.rhs - v.lhs) / v.rhs)
            .fold(f64::INFINITY, f64::min);
        Ok(GeometryCheck {
            verdicts,
            worst_slack,
            invalid_case: (!problems.is_empty()).then(|| problems.join("; ")),
        })
    }

    /// `h(d) = ∫_d^R dr / l(∂B_r)`, integrated in `ln r`.
    pub fn kernel_weight(&self, big_r: f64, d: f64) -> Result<KernelWeight> {
        self.check_radius(big_r)?;
        if d < 0.0 || d > big_r {
            return Err(Error::RadiusOutOfRange { r: d, r_max: big_r });
        }
        let (d, singular_endpoint) = if d == 0.0 {
            (big_r / self.quad.radial as f64, true)
        } else {
            (d, false)
        };
        if d == big_r {
            return Ok(KernelWeight {
                value: 0.0,
                singular_endpoint,
            });
        }
        let value = simpson(d.ln(), big_r.ln(), self.quad.radial, |s| {
            let r = s.exp();
            r / self.length_unchecked(r)
        });
        Ok(KernelWeight {
            value,
            singular_endpoint,
        })
    }

    /// `h` at many radii, accumulated inward from `R` with a four-point
    /// Gauss rule in `ln r` on each gap.
    pub fn kernel_weights(&self, big_r: f64, radii: &[f64]) -> Result<Vec<f64>> {
        self.check_radius(big_r)?;
        let mut order: Vec<usize> = (0..radii.len()).collect();
        order.sort_by(|&a, &b| radii[b].total_cmp(&radii[a]));
        let mut out = vec![0.0; radii.len()];
        let mut upper = big_r;
        let mut acc = 0.0;
        for k in order {
            let r = radii[k];
            if !(r > 0.0) || r > big_r {
                return Err(Error::RadiusOutOfRange { r, r_max: big_r });
            }
            if r < upper {
                // split long gaps so the rule stays accurate
                let (la, lb) = (r.ln(), upper.ln());
                let pieces = ((lb - la) / 0.05).ceil().max(1.0) as usize;
                let step = (lb - la) / pieces as f64;
                for p in 0..pieces {
                    let a = la + p as f64 * step;
                    acc += gauss4(a, a + step, |s| {
                        let x = s.exp();
                        x / self.length_unchecked(x)
                    });
                }
                upper = r;
            }
            out[k] = acc;
        }
        Ok(out)
    }

    /// Compares `∫_{B_R} |f| h dV` with `A ‖f‖*_{L ln L(B_R)}`, `f` taken as
    /// constant on each dual cell of `grid`.
    pub fn kernel_pairing_check(
        &self,
        grid: &PolarGrid,
        f: &DiscreteField,
        big_r: f64,
        a: f64,
        tol: f64,
    ) -> Result<VerdictReport> {
        grid.check(f)?;
        self.check_radius(big_r)?;
        if big_r > grid.r_max() * (1.0 + 1e-12) {
            return Err(Error::RadiusOutOfRange {
                r: big_r,
                r_max: grid.r_max(),
            });
        }
        let cell_integrals = kernel_cell_integrals(self, grid, big_r)?;
        let lhs: f64 = f
            .values
            .iter()
            .zip(&cell_integrals)
            .map(|(v, w)| v.abs() * w)
            .sum();
        let volume = self.ball_volume(big_r)?;
        let samples = grid.samples(f, big_r)?;
        let rhs = a * zygmund_norm(&samples, volume)?;
        Ok(VerdictReport::check(
            "kernel_pairing",
            self.metric.name(),
            lhs,
            rhs,
            tol,
        ))
    }

    /// `∫₀^ρ ∫₀^{2π} |∂_r(G/l)| dθ dr` plus the log–log exponent over the
    /// ladder `ρ, ρ/2, ρ/4, ρ/8`.
    pub fn flux_variation(&self, rho: f64, p: f64) -> Result<FluxVariation> {
        if !(rho > 0.0) || rho > self.metric.r_max() * (1.0 + 1e-12) {
            return Err(Error::LadderTooLarge {
                rho,
                r_max: self.metric.r_max(),
            });
        }
        let ladder: Vec<(f64, f64)> = (0..LADDER_STEPS)
            .map(|m| {
                let r = rho / (1u64 << m) as f64;
                (r, self.flux_variation_value(r))
            })
            .collect();
        let value = ladder[0].1;
        let bound_exponent = 2.0 - 2.0 / p;
        let positive = ladder.iter().all(|(r, v)| *v > 1e-12 * r);
        let measured_exponent = if positive {
            let xs: Vec<f64> = ladder.iter().map(|(r, _)| r.ln()).collect();
            let ys: Vec<f64> = ladder.iter().map(|(_, v)| v.ln()).collect();
            fit_slope(&xs, &ys)
        } else {
            None
        };
        let pass = measured_exponent.is_none_or(|e| e >= bound_exponent - 1e-2);
        Ok(FluxVariation {
            rho,
            value,
            ladder,
            measured_exponent,
            bound_exponent,
            pass,
        })
    }

    fn flux_variation_value(&self, rho: f64) -> f64 {
        let n = self.quad.radial;
        let dr = rho / n as f64;
        let nt = self.quad.angular;
        let mut acc = 0.0;
        for i in 0..n {
            let r = (i as f64 + 0.5) * dr;
            let l = self.length_unchecked(r);
            let dl = self.length_derivative(r);
            acc += periodic_trapezoid(nt, |t| {
                let g = self.metric.g(r, t);
                let gr = self.metric.g_r(r, t);
                ((gr * l - g * dl) / (l * l)).abs()
            }) * dr;
        }
        acc
    }
}

/// `∫_{cell ∩ B_R} h dV` for every dual cell of `grid`.
fn kernel_cell_integrals(geo: &Geometry<'_>, grid: &PolarGrid, big_r: f64) -> Result<Vec<f64>> {
    let metric = geo.metric();
    let mut rings: Vec<Vec<(f64, f64)>> = Vec::with_capacity(grid.n_r() + 1);
    let mut radii = Vec::new();
    for i in 0..=grid.n_r() {
        let (a, b) = grid.radial_cell(i);
        let b = b.min(big_r);
        if b <= a {
            rings.push(Vec::new());
            continue;
        }
        let pts: Vec<(f64, f64)> = if i == 0 {
            // two panels so the r ln r endpoint behaviour is resolved
            let mid = 0.5 * (a + b);
            gauss4_points(a, mid)
                .into_iter()
                .chain(gauss4_points(mid, b))
                .collect()
        } else {
            gauss4_points(a, b).to_vec()
        };
        radii.extend(pts.iter().map(|(r, _)| *r));
        rings.push(pts);
    }
    let weights = geo.kernel_weights(big_r, &radii)?;
    let mut hs = weights.into_iter();
    let mut ring_h: Vec<Vec<f64>> = Vec::with_capacity(rings.len());
    for pts in &rings {
        ring_h.push(pts.iter().map(|_| hs.next().unwrap()).collect());
    }
    let dt = grid.dtheta();
    let mut out = vec![0.0; grid.len()];
    for (k, slot) in out.iter_mut().enumerate() {
        let (i, j) = grid.ring_angle(k);
        let pts = &rings[i];
        let hv = &ring_h[i];
        let thetas: Vec<f64> = if i == 0 {
            (0..grid.n_theta()).map(|j| grid.theta(j)).collect()
        } else {
            vec![grid.theta(j)]
        };
        *slot = thetas
            .iter()
            .map(|&t| {
                pts.iter()
                    .zip(hv)
                    .map(|((r, w), h)| w * h * metric.g(*r, t))
                    .sum::<f64>()
                    * dt
            })
            .sum();
    }
    Ok(out)
}

/// Closed forms used in tests and reports.
pub mod closed_form {
    use super::*;

    pub fn sphere_volume(r: f64) -> f64 {
        TAU * (1.0 - r.cos())
    }

    pub fn hyperbolic_volume(r: f64) -> f64 {
        TAU * (r.cosh() - 1.0)
    }

    pub fn flat_iso() -> f64 {
        1.0 / (4.0 * PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat() -> MetricProfile {
        MetricProfile::flat(2.0).unwrap()
    }

    #[test]
    fn boundary_lengths() {
        let m = flat();
        let g = Geometry::new(&m);
        assert!((g.boundary_length(0.7).unwrap() - TAU * 0.7).abs() < 1e-13);
        let s = MetricProfile::sphere(2.0).unwrap();
        assert!((Geometry::new(&s).boundary_length(PI / 2.0).unwrap() - TAU).abs() < 1e-13);
        assert!(g.boundary_length(2.5).is_err());
        assert!(g.boundary_length(0.0).is_err());
    }

    #[test]
    fn volumes() {
        let m = flat();
        assert!((Geometry::new(&m).ball_volume(1.0).unwrap() - PI).abs() < 1e-13);
        let s = MetricProfile::sphere(2.0).unwrap();
        assert!((Geometry::new(&s).ball_volume(PI / 2.0).unwrap() - TAU).abs() < 1e-10);
        let h = MetricProfile::hyperbolic(2.0).unwrap();
        assert!(
            (Geometry::new(&h).ball_volume(1.0).unwrap() - closed_form::hyperbolic_volume(1.0))
                .abs()
                < 1e-10
        );
    }

    #[test]
    fn curvatures() {
        let cases = [("flat", 0.0), ("sphere", 1.0), ("hyperbolic", -1.0)];
        for (name, k) in cases {
            let m = MetricProfile::from_name(name, Some(2.0)).unwrap();
            let g = Geometry::new(&m);
            for &(r, t) in &[(0.3, 0.0), (1.1, 2.0), (1.9, 4.0)] {
                assert!((g.gauss_curvature(r, t).unwrap() - k).abs() < 1e-13);
            }
            assert!(matches!(
                g.gauss_curvature(0.0, 1.0),
                Err(Error::CurvatureAtPole)
            ));
        }
    }

    #[test]
    fn flat_isoperimetric_ratio_is_exact() {
        let m = flat();
        let est = Geometry::new(&m)
            .isoperimetric_constant(&[0.1, 0.5, 1.0], 2.0)
            .unwrap();
        assert!((est.a_iso - closed_form::flat_iso()).abs() < 1e-14);
        assert_eq!(est.a_curv, 0.0);
    }

    #[test]
    fn sphere_isoperimetric_ratio_peaks_at_equator() {
        let m = MetricProfile::sphere(2.0).unwrap();
        let radii: Vec<f64> = (1..=16).map(|k| k as f64 * PI / 32.0).collect();
        let est = Geometry::new(&m)
            .isoperimetric_constant(&radii, 2.0)
            .unwrap();
        assert!((est.a_iso - 1.0 / TAU).abs() < 1e-10);
    }

    #[test]
    fn hyperbolic_ratio_decreases_below_flat_value() {
        // (cosh r − 1)/(2π sinh² r) = 1/(2π(cosh r + 1))
        let m = MetricProfile::hyperbolic(2.0).unwrap();
        let g = Geometry::new(&m);
        let mut last = closed_form::flat_iso();
        for k in 1..=8 {
            let r = 0.25 * k as f64;
            let s = g.ball_stats(r).unwrap();
            let ratio = s.volume / (s.length * s.length);
            let closed = (r.cosh() - 1.0) / (TAU * r.sinh().powi(2));
            assert!((ratio - closed).abs() < 1e-10);
            assert!(ratio < last && ratio < 1.0 / TAU);
            last = ratio;
        }
    }

    #[test]
    fn flat_lower_bounds_are_equalities() {
        let m = flat();
        let chk = Geometry::new(&m)
            .geometry_bounds_check(closed_form::flat_iso(), 2.0, &[0.25, 0.5, 1.0])
            .unwrap();
        assert!(chk.invalid_case.is_none());
        assert!(chk.verdicts.iter().all(|v| v.pass));
        for v in chk.verdicts.iter().filter(|v| v.name.ends_with("lower")) {
            assert!((v.ratio - 1.0).abs() < 1e-12);
        }
        let up = chk
            .verdicts
            .iter()
            .find(|v| v.name == "volume_upper")
            .unwrap();
        let slack = up.rhs / up.lhs;
        assert!((slack - (TAU + closed_form::flat_iso()).powi(3) / PI).abs() < 1e-9);
        assert!((slack - 82.0).abs() < 0.01);
    }

    #[test]
    fn undersized_constant_is_an_invalid_case_not_an_error() {
        let m = MetricProfile::sphere(2.0).unwrap();
        let chk = Geometry::new(&m)
            .geometry_bounds_check(0.01, 2.0, &[0.5, 1.0, 1.5])
            .unwrap();
        assert!(chk.invalid_case.is_some());
        assert_eq!(chk.verdicts.len(), 8);
    }

    #[test]
    fn kernel_weight_closed_forms() {
        let m = flat();
        let g = Geometry::new(&m);
        let w = g.kernel_weight(1.5, 0.2).unwrap();
        assert!((w.value - (1.5f64 / 0.2).ln() / TAU).abs() < 1e-12);
        assert_eq!(g.kernel_weight(1.0, 1.0).unwrap().value, 0.0);
        assert!(g.kernel_weight(1.0, 0.0).unwrap().singular_endpoint);

        let s = MetricProfile::sphere(2.0).unwrap();
        let big = PI / 2.0;
        let w = Geometry::new(&s).kernel_weight(big, 0.1).unwrap();
        let exact = ((big / 2.0).tan() / 0.05f64.tan()).ln() / TAU;
        assert!((w.value - exact).abs() < 1e-10);
    }

    #[test]
    fn batched_kernel_weights_match_single_evaluations() {
        let s = MetricProfile::sphere(2.0).unwrap();
        let g = Geometry::new(&s);
        let radii = [0.9, 0.01, 0.3, 1.2];
        let batch = g.kernel_weights(1.2, &radii).unwrap();
        for (r, b) in radii.iter().zip(&batch) {
            assert!((g.kernel_weight(1.2, *r).unwrap().value - b).abs() < 1e-10);
        }
    }

    #[test]
    fn rotationally_symmetric_flux_variation_vanishes() {
        for name in ["flat", "sphere"] {
            let m = MetricProfile::from_name(name, Some(1.0)).unwrap();
            let fv = Geometry::new(&m).flux_variation(0.5, 2.0).unwrap();
            assert!(fv.value.abs() < 1e-12);
            assert!(fv.measured_exponent.is_none());
            assert!(fv.pass);
        }
    }

    #[test]
    fn perturbed_flux_variation_matches_closed_form() {
        // G/l = (1 + ε r² cos θ)/2π, so the variation is 2ε ρ²/π
        let eps = 0.1;
        let m = MetricProfile::perturbed(eps, 1.0).unwrap();
        let fv = Geometry::new(&m).flux_variation(0.5, 2.0).unwrap();
        assert!((fv.value - 2.0 * eps * 0.25 / PI).abs() < 1e-6);
        assert!((fv.measured_exponent.unwrap() - 2.0).abs() < 1e-3);
        assert!(fv.pass);
        assert!(Geometry::new(&m).flux_variation(1.5, 2.0).is_err());
    }
}
