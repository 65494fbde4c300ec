use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the pole constraints `G(0,θ) = 0`, `∂_r G(0,θ) = 1` on sampled input.
pub const POLE_TOL: f64 = 1e-6;

/// Semi-geodesic metric `dr² + G(r,θ)² dθ²` on the geodesic ball of radius `r_max`.
#[derive(Debug, Clone)]
pub struct MetricProfile {
    kind: MetricKind,
    r_max: f64,
}

#[derive(Debug, Clone)]
pub enum MetricKind {
    Flat,
    /// Unit sphere, `G = sin r`.
    Sphere,
    /// Hyperbolic plane, `G = sinh r`.
    Hyperbolic,
    /// `G = r (1 + ε r² cos θ)`.
    Perturbed {
        epsilon: f64,
    },
    Sampled(Arc<SampledMetric>),
}

impl MetricProfile {
    pub fn flat(r_max: f64) -> Result<Self> {
        Self::checked(MetricKind::Flat, r_max)
    }

    pub fn sphere(r_max: f64) -> Result<Self> {
        if r_max >= PI {
            return Err(Error::InvalidMetric(format!(
                "sphere chart needs r_max < π, got {r_max}"
            )));
        }
        Self::checked(MetricKind::Sphere, r_max)
    }

    pub fn hyperbolic(r_max: f64) -> Result<Self> {
        Self::checked(MetricKind::Hyperbolic, r_max)
    }

    pub fn perturbed(epsilon: f64, r_max: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon.abs() * r_max * r_max >= 1.0 {
            return Err(Error::InvalidMetric(format!(
                "perturbed metric with ε = {epsilon} degenerates before r_max = {r_max}"
            )));
        }
        Self::checked(MetricKind::Perturbed { epsilon }, r_max)
    }

    pub fn sampled(s: SampledMetric) -> Result<Self> {
        let r_max = s.r_max;
        Self::checked(MetricKind::Sampled(Arc::new(s)), r_max)
    }

    fn checked(kind: MetricKind, r_max: f64) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidMetric(format!(
                "r_max must be positive, got {r_max}"
            )));
        }
        Ok(Self { kind, r_max })
    }

    /// Parses `flat | sphere | hyperbolic | perturbed:ε`. Without an explicit
    /// radius the chart covers radius 2 (sphere and hyperbolic included).
    pub fn from_name(name: &str, r_max: Option<f64>) -> Result<Self> {
        let r = r_max.unwrap_or(2.0);
        match name.trim() {
            "flat" => Self::flat(r),
            "sphere" => Self::sphere(r),
            "hyperbolic" => Self::hyperbolic(r),
            other => match other.strip_prefix("perturbed:") {
                Some(eps) => {
                    let eps: f64 = eps.parse().map_err(|_| {
                        Error::InvalidMetric(format!("bad perturbation amplitude {eps:?}"))
                    })?;
                    Self::perturbed(eps, r)
                }
                None => Err(Error::InvalidMetric(format!("unknown metric {other:?}"))),
            },
        }
    }

    /// Same metric on a chart of a different radius.
    pub fn with_r_max(&self, r_max: f64) -> Result<Self> {
        match &self.kind {
            MetricKind::Flat => Self::flat(r_max),
            MetricKind::Sphere => Self::sphere(r_max),
            MetricKind::Hyperbolic => Self::hyperbolic(r_max),
            MetricKind::Perturbed { epsilon } => Self::perturbed(*epsilon, r_max),
            MetricKind::Sampled(s) if r_max <= s.r_max => Self::checked(self.kind.clone(), r_max),
            MetricKind::Sampled(s) => Err(Error::InvalidMetric(format!(
                "sampled metric only covers r ≤ {}",
                s.r_max
            ))),
        }
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn name(&self) -> String {
        match &self.kind {
            MetricKind::Flat => "flat".into(),
            MetricKind::Sphere => "sphere".into(),
            MetricKind::Hyperbolic => "hyperbolic".into(),
            MetricKind::Perturbed { epsilon } => format!("perturbed:{epsilon}"),
            MetricKind::Sampled(_) => "sampled".into(),
        }
    }

    pub fn is_rotationally_symmetric(&self) -> bool {
        !matches!(
            self.kind,
            MetricKind::Perturbed { .. } | MetricKind::Sampled(_)
        )
    }

    pub fn g(&self, r: f64, theta: f64) -> f64 {
        match &self.kind {
            MetricKind::Flat => r,
            MetricKind::Sphere => r.sin(),
            MetricKind::Hyperbolic => r.sinh(),
            MetricKind::Perturbed { epsilon } => r * (1.0 + epsilon * r * r * theta.cos()),
            MetricKind::Sampled(s) => s.eval(&s.g, r, theta),
        }
    }

    pub fn g_r(&self, r: f64, theta: f64) -> f64 {
        match &self.kind {
            MetricKind::Flat => 1.0,
            MetricKind::Sphere => r.cos(),
            MetricKind::Hyperbolic => r.cosh(),
            MetricKind::Perturbed { epsilon } => 1.0 + 3.0 * epsilon * r * r * theta.cos(),
            MetricKind::Sampled(s) => s.eval(&s.g_r, r, theta),
        }
    }

    pub fn g_rr(&self, r: f64, theta: f64) -> f64 {
        match &self.kind {
            MetricKind::Flat => 0.0,
            MetricKind::Sphere => -r.sin(),
            MetricKind::Hyperbolic => r.sinh(),
            MetricKind::Perturbed { epsilon } => 6.0 * epsilon * r * theta.cos(),
            MetricKind::Sampled(s) => s.eval(&s.g_rr, r, theta),
        }
    }
}

/// `G` tabulated on the lattice `r_i = i·r_max/n_r`, `θ_j = 2πj/n_θ`.
/// Derivatives come from second-order differences on the lattice; values
/// between lattice points use four-point Lagrange interpolation (periodic in θ).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampledMetric {
    pub r_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
    /// `values[i][j] = G(r_i, θ_j)`, `i = 0..=n_r`.
    pub values: Vec<Vec<f64>>,
    #[serde(skip)]
    g: Vec<f64>,
    #[serde(skip)]
    g_r: Vec<f64>,
    #[serde(skip)]
    g_rr: Vec<f64>,
}

impl SampledMetric {
    pub fn new(r_max: f64, values: Vec<Vec<f64>>) -> Result<Self> {
        let n_r = values.len().saturating_sub(1);
        if n_r < 4 {
            return Err(Error::InvalidMetric(
                "sampled metric needs at least 5 radial rows".into(),
            ));
        }
        let n_theta = values[0].len();
        if n_theta < 4 || values.iter().any(|row| row.len() != n_theta) {
            return Err(Error::InvalidMetric(
                "ragged or too coarse angular lattice".into(),
            ));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidMetric(format!(
                "r_max must be positive, got {r_max}"
            )));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMetric("non-finite G value".into()));
        }
        let dr = r_max / n_r as f64;
        for j in 0..n_theta {
            let g0 = values[0][j];
            if g0.abs() > POLE_TOL {
                return Err(Error::InvalidMetric(format!(
                    "G(0, θ_{j}) = {g0} should vanish"
                )));
            }
            // fourth-order one-sided derivative at the pole
            let d = (-25.0 * values[0][j] + 48.0 * values[1][j] - 36.0 * values[2][j]
                + 16.0 * values[3][j]
                - 3.0 * values[4][j])
                / (12.0 * dr);
            if (d - 1.0).abs() > POLE_TOL {
                return Err(Error::InvalidMetric(format!(
                    "∂_r G(0, θ_{j}) = {d} should equal 1"
                )));
            }
            for (i, row) in values.iter().enumerate().skip(1) {
                if row[j] <= 0.0 {
                    return Err(Error::DegenerateMetric(i as f64 * dr));
                }
            }
        }

        let stride = n_theta;
        let flat: Vec<f64> = values.iter().flatten().copied().collect();
        let mut g_r = vec![0.0; flat.len()];
        let mut g_rr = vec![0.0; flat.len()];
        let at = |i: usize, j: usize| flat[i * stride + j];
        for j in 0..n_theta {
            for i in 0..=n_r {
                let (d1, d2) = if i == 0 {
                    (
                        (-3.0 * at(0, j) + 4.0 * at(1, j) - at(2, j)) / (2.0 * dr),
                        (2.0 * at(0, j) - 5.0 * at(1, j) + 4.0 * at(2, j) - at(3, j)) / (dr * dr),
                    )
                } else if i == n_r {
                    (
                        (3.0 * at(i, j) - 4.0 * at(i - 1, j) + at(i - 2, j)) / (2.0 * dr),
                        (2.0 * at(i, j) - 5.0 * at(i - 1, j) + 4.0 * at(i - 2, j) - at(i - 3, j))
                            / (dr * dr),
                    )
                } else {
                    (
                        (at(i + 1, j) - at(i - 1, j)) / (2.0 * dr),
                        (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (dr * dr),
                    )
                };
                g_r[i * stride + j] = d1;
                g_rr[i * stride + j] = d2;
            }
        }
        Ok(Self {
            r_max,
            n_r,
            n_theta,
            values,
            g: flat,
            g_r,
            g_rr,
        })
    }

    /// Parses `{"r_max": .., "values": [[..], ..]}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            r_max: f64,
            values: Vec<Vec<f64>>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|source| Error::Json {
            context: "sampled metric".into(),
            source,
        })?;
        Self::new(raw.r_max, raw.values)
    }

    /// Tabulates an analytic `G` on the lattice.
    pub fn tabulate(
        r_max: f64,
        n_r: usize,
        n_theta: usize,
        g: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let values = (0..=n_r)
            .map(|i| {
                let r = i as f64 * r_max / n_r as f64;
                (0..n_theta)
                    .map(|j| g(r, TAU * j as f64 / n_theta as f64))
                    .collect()
            })
            .collect();
        Self::new(r_max, values)
    }

    fn eval(&self, table: &[f64], r: f64, theta: f64) -> f64 {
        let dr = self.r_max / self.n_r as f64;
        let x = (r / dr).clamp(0.0, self.n_r as f64);
        let i0 = (x.floor() as isize - 1).clamp(0, self.n_r as isize - 3) as usize;
        let rw = lagrange4(x - i0 as f64);

        let dt = TAU / self.n_theta as f64;
        let y = theta.rem_euclid(TAU) / dt;
        let j_floor = y.floor() as isize;
        let tw = lagrange4(y - (j_floor - 1) as f64);

        let mut acc = 0.0;
        for (a, wr) in rw.iter().enumerate() {
            let row = (i0 + a) * self.n_theta;
            let mut inner = 0.0;
            for (b, wt) in tw.iter().enumerate() {
                let j = (j_floor - 1 + b as isize).rem_euclid(self.n_theta as isize) as usize;
                inner += wt * table[row + j];
            }
            acc += wr * inner;
        }
        acc
    }
}

/// Lagrange weights for nodes 0,1,2,3 evaluated at `x`.
fn lagrange4(x: f64) -> [f64; 4] {
    let (a, b, c, d) = (x, x - 1.0, x - 2.0, x - 3.0);
    [
        -b * c * d / 6.0,
        a * c * d / 2.0,
        -a * b * d / 2.0,
        a * b * c / 6.0,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in ["flat", "sphere", "hyperbolic", "perturbed:0.1"] {
            let m = MetricProfile::from_name(n, Some(1.0)).unwrap();
            assert_eq!(m.name(), n);
        }
        assert!(MetricProfile::from_name("torus", None).is_err());
        assert!(MetricProfile::from_name("perturbed:x", None).is_err());
    }

    #[test]
    fn pole_constraints_hold_for_builtins() {
        for n in ["flat", "sphere", "hyperbolic", "perturbed:0.2"] {
            let m = MetricProfile::from_name(n, Some(1.0)).unwrap();
            for j in 0..8 {
                let t = j as f64;
                assert_eq!(m.g(0.0, t), 0.0);
                assert!((m.g_r(0.0, t) - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sphere_chart_must_stop_before_antipode() {
        assert!(MetricProfile::sphere(PI).is_err());
        assert!(MetricProfile::perturbed(1.0, 1.5).is_err());
    }

    #[test]
    fn sampled_sphere_interpolates_and_differentiates() {
        let s = SampledMetric::tabulate(1.5, 300, 16, |r, _| r.sin()).unwrap();
        let m = MetricProfile::sampled(s).unwrap();
        for &r in &[0.013, 0.5, 1.234, 1.5] {
            assert!((m.g(r, 0.3) - r.sin()).abs() < 1e-9);
            assert!((m.g_r(r, 2.0) - r.cos()).abs() < 1e-4);
            assert!((m.g_rr(r, 5.0) + r.sin()).abs() < 1e-3);
        }
    }

    #[test]
    fn sampled_metric_validation() {
        let bad_pole = SampledMetric::tabulate(1.0, 20, 8, |r, _| r + 0.1);
        assert!(bad_pole.is_err());
        let bad_slope = SampledMetric::tabulate(1.0, 20, 8, |r, _| 2.0 * r);
        assert!(bad_slope.is_err());
        let ok = SampledMetric::tabulate(1.0, 20, 8, |r, t| r * (1.0 + 0.1 * r * r * t.cos()));
        assert!(ok.is_ok());
    }

    #[test]
    fn sampled_metric_json() {
        let s = SampledMetric::tabulate(1.0, 8, 4, |r, _| r).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back = SampledMetric::from_json_str(&text).unwrap();
        assert_eq!(back.values, s.values);
    }
}
