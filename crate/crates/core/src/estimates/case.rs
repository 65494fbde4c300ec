use std::f64::consts::TAU;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bump::{bump_eta, cutoff_eta_n};
use crate::error::{Error, Result};
use crate::pde::{solve_dirichlet_with, DiscreteField, PolarGrid, SolveReport, SolverOptions};
use crate::quad::gauss4_points;
use crate::surface::MetricProfile;

/// Named generator of a function on the chart, in Cartesian chart
/// coordinates `x = r cos θ`, `y = r sin θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    #[default]
    Zero,
    Constant {
        value: f64,
    },
    /// `c0 + cx·x + cy·y`.
    Linear {
        c0: f64,
        cx: f64,
        cy: f64,
    },
    /// `Σ c_i r^i`.
    RadialPolynomial {
        coeffs: Vec<f64>,
    },
    IndicatorDisk {
        value: f64,
        center: [f64; 2],
        radius: f64,
    },
    /// `amplitude·k²·η(k(x − center))`.
    Spike {
        amplitude: f64,
        k: f64,
        center: [f64; 2],
    },
    /// `amplitude·e^{a x} cos(b y)`.
    ExpTrig {
        amplitude: f64,
        a: f64,
        b: f64,
    },
    /// `amplitude·cos r + offset`.
    CosRadius {
        amplitude: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `amplitude·|x − center|^{−α}` on `B_radius(center)`, `α < 2`.
    PowerSingularity {
        amplitude: f64,
        alpha: f64,
        center: [f64; 2],
        radius: f64,
    },
    /// `amplitude·|x−c|^{−2} ln^{−3}(e·radius/|x−c|)` on `B_radius(c)`: in
    /// `L ln L` but in no `L^q`, `q > 1`.
    LlnlSingularity {
        amplitude: f64,
        center: [f64; 2],
        radius: f64,
    },
    /// Sum of `modes` random plane waves with wave numbers up to `max_wavenumber`.
    RandomSmooth {
        modes: usize,
        amplitude: f64,
        #[serde(default = "default_wavenumber")]
        max_wavenumber: f64,
        #[serde(default)]
        salt: u64,
    },
    /// `count` spikes `sign·amplitude·k²η(k(x − c))` with `k` uniform in
    /// `[k_min, k_max]` and centres uniform in `B_radius`.
    RandomSpikes {
        count: usize,
        amplitude: f64,
        k_min: f64,
        k_max: f64,
        radius: f64,
        #[serde(default = "one")]
        sign: f64,
        #[serde(default)]
        salt: u64,
    },
    Scaled {
        factor: f64,
        inner: Box<FieldSpec>,
    },
    /// `inner · 1_{|x| < radius}`.
    Masked {
        radius: f64,
        inner: Box<FieldSpec>,
    },
    /// `η_n · inner` with the smooth cutoff `η_n ∈ C_c^∞(B₁)`.
    Cutoff {
        n: u32,
        inner: Box<FieldSpec>,
    },
    Sum {
        terms: Vec<FieldSpec>,
    },
}

fn one() -> f64 {
    1.0
}

fn default_wavenumber() -> f64 {
    4.0
}

/// A [`FieldSpec`] with its random draws fixed.
#[derive(Clone)]
pub struct Field(Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>);

impl Field {
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        (self.0)(x)
    }

    pub fn eval_polar(&self, r: f64, theta: f64) -> f64 {
        self.eval([r * theta.cos(), r * theta.sin()])
    }
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Field")
    }
}

fn dist(x: [f64; 2], c: [f64; 2]) -> f64 {
    (x[0] - c[0]).hypot(x[1] - c[1])
}

impl FieldSpec {
    pub fn resolve(&self, seed: u64) -> Field {
        use FieldSpec::*;
        match self.clone() {
            Zero => Field(Arc::new(|_| 0.0)),
            Constant { value } => Field(Arc::new(move |_| value)),
            Linear { c0, cx, cy } => Field(Arc::new(move |x| c0 + cx * x[0] + cy * x[1])),
            RadialPolynomial { coeffs } => Field(Arc::new(move |x| {
                let r = x[0].hypot(x[1]);
                coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
            })),
            IndicatorDisk {
                value,
                center,
                radius,
            } => Field(Arc::new(
                move |x| if dist(x, center) < radius { value } else { 0.0 },
            )),
            Spike {
                amplitude,
                k,
                center,
            } => Field(Arc::new(move |x| {
                amplitude * k * k * bump_eta([k * (x[0] - center[0]), k * (x[1] - center[1])])
            })),
            ExpTrig { amplitude, a, b } => Field(Arc::new(move |x| {
                amplitude * (a * x[0]).exp() * (b * x[1]).cos()
            })),
            CosRadius { amplitude, offset } => Field(Arc::new(move |x| {
                amplitude * x[0].hypot(x[1]).cos() + offset
            })),
            PowerSingularity {
                amplitude,
                alpha,
                center,
                radius,
            } => Field(Arc::new(move |x| {
                let d = dist(x, center);
                if d == 0.0 || d >= radius {
                    0.0
                } else {
                    amplitude * d.powf(-alpha)
                }
            })),
            LlnlSingularity {
                amplitude,
                center,
                radius,
            } => Field(Arc::new(move |x| {
                let d = dist(x, center);
                if d == 0.0 || d >= radius {
                    0.0
                } else {
                    amplitude / (d * d * (std::f64::consts::E * radius / d).ln().powi(3))
                }
            })),
            RandomSmooth {
                modes,
                amplitude,
                max_wavenumber,
                salt,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
                let waves: Vec<(f64, f64, f64, f64)> = (0..modes)
                    .map(|_| {
                        let kappa = rng.gen_range(0.0..max_wavenumber);
                        let dir = rng.gen_range(0.0..TAU);
                        let phase = rng.gen_range(0.0..TAU);
                        let amp =
                            rng.gen_range(-1.0..1.0) * amplitude / (modes.max(1) as f64).sqrt();
                        (kappa * dir.cos(), kappa * dir.sin(), phase, amp)
                    })
                    .collect();
                Field(Arc::new(move |x| {
                    waves
                        .iter()
                        .map(|(kx, ky, ph, a)| a * (kx * x[0] + ky * x[1] + ph).cos())
                        .sum()
                }))
            }
            RandomSpikes {
                count,
                amplitude,
                k_min,
                k_max,
                radius,
                sign,
                salt,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt ^ 0x5eed);
                let spikes: Vec<(f64, [f64; 2])> = (0..count)
                    .map(|_| {
                        let k = if k_max > k_min {
                            rng.gen_range(k_min..k_max)
                        } else {
                            k_min
                        };
                        let rr = radius * rng.gen::<f64>().sqrt();
                        let t = rng.gen_range(0.0..TAU);
                        (k, [rr * t.cos(), rr * t.sin()])
                    })
                    .collect();
                Field(Arc::new(move |x| {
                    sign * amplitude
                        * spikes
                            .iter()
                            .map(|(k, c)| k * k * bump_eta([k * (x[0] - c[0]), k * (x[1] - c[1])]))
                            .sum::<f64>()
                }))
            }
            Scaled { factor, inner } => {
                let f = inner.resolve(seed);
                Field(Arc::new(move |x| factor * f.eval(x)))
            }
            Masked { radius, inner } => {
                let f = inner.resolve(seed);
                Field(Arc::new(move |x| {
                    if x[0].hypot(x[1]) < radius {
                        f.eval(x)
                    } else {
                        0.0
                    }
                }))
            }
            Cutoff { n, inner } => {
                let f = inner.resolve(seed);
                Field(Arc::new(move |x| cutoff_eta_n(n, x) * f.eval(x)))
            }
            Sum { terms } => {
                let fs: Vec<Field> = terms.iter().map(|t| t.resolve(seed)).collect();
                Field(Arc::new(move |x| fs.iter().map(|f| f.eval(x)).sum()))
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        FieldSpec::Scaled {
            factor,
            inner: Box::new(self.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, FieldSpec::Zero)
    }
}

/// Cell averages `m_k⁻¹ ∫_{cell k} f dV` with a 2×2-panel four-point Gauss
/// rule in each direction.
pub fn cell_average(grid: &PolarGrid, f: &Field) -> DiscreteField {
    use rayon::prelude::*;
    let metric = grid.metric();
    let dt = grid.dtheta();
    let angular = |theta: f64| {
        let (a, b) = (theta - 0.5 * dt, theta + 0.5 * dt);
        let m = 0.5 * (a + b);
        let mut pts = gauss4_points(a, m).to_vec();
        pts.extend(gauss4_points(m, b));
        pts
    };
    let values = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = grid.ring_angle(k);
            let (a, b) = grid.radial_cell(i);
            let mid = 0.5 * (a + b);
            let mut rs = gauss4_points(a, mid).to_vec();
            rs.extend(gauss4_points(mid, b));
            let thetas: Vec<f64> = if i == 0 {
                (0..grid.n_theta()).map(|j| grid.theta(j)).collect()
            } else {
                vec![grid.theta(j)]
            };
            let (mut num, mut den) = (0.0, 0.0);
            for t0 in thetas {
                for (t, wt) in angular(t0) {
                    for (r, wr) in &rs {
                        let w = wr * wt * metric.g(*r, t);
                        num += w * f.eval_polar(*r, t);
                        den += w;
                    }
                }
            }
            num / den
        })
        .collect();
    DiscreteField {
        n_r: grid.n_r(),
        n_theta: grid.n_theta(),
        values,
    }
}

/// One problem instance `Δu = g u + f` on the grid ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentCase {
    pub id: String,
    #[serde(default = "default_metric")]
    pub metric: String,
    pub n_r: usize,
    #[serde(alias = "n_θ")]
    pub n_theta: usize,
    #[serde(default = "one")]
    pub r_max: f64,
    pub f: FieldSpec,
    #[serde(default)]
    pub g: FieldSpec,
    #[serde(default)]
    pub boundary: FieldSpec,
    #[serde(default)]
    pub exact: Option<FieldSpec>,
    #[serde(default = "one")]
    pub r_outer: f64,
    #[serde(default = "half")]
    pub r_inner: f64,
    #[serde(default)]
    pub seed: u64,
    /// Label of the potential family, used to group measured constants.
    #[serde(default)]
    pub family: Option<String>,
}

fn default_metric() -> String {
    "flat".into()
}

fn half() -> f64 {
    0.5
}

const G_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
const BOUNDARY_SALT: u64 = 0xc2b2_ae3d_27d4_eb4f;

/// Case data sampled on a grid.
#[derive(Debug, Clone)]
pub struct CaseData {
    pub grid: PolarGrid,
    pub f: DiscreteField,
    pub g: DiscreteField,
    pub boundary: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SolvedCase {
    pub case: ExperimentCase,
    pub grid: PolarGrid,
    pub u: DiscreteField,
    pub f: DiscreteField,
    pub g: DiscreteField,
    pub report: SolveReport,
}

impl ExperimentCase {
    pub fn new(id: impl Into<String>, metric: &str, n: usize, f: FieldSpec) -> Self {
        Self {
            id: id.into(),
            metric: metric.into(),
            n_r: n,
            n_theta: n,
            r_max: 1.0,
            f,
            g: FieldSpec::Zero,
            boundary: FieldSpec::Zero,
            exact: None,
            r_outer: 1.0,
            r_inner: 0.5,
            seed: 0,
            family: None,
        }
    }

    pub fn with_g(mut self, g: FieldSpec) -> Self {
        self.g = g;
        self
    }

    pub fn with_boundary(mut self, boundary: FieldSpec) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_exact(mut self, exact: FieldSpec) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_r_max(mut self, r_max: f64) -> Self {
        self.r_max = r_max;
        self
    }

    pub fn with_family(mut self, family: impl Into<String>) -> Self {
        self.family = Some(family.into());
        self
    }

    pub fn with_resolution(&self, n_r: usize, n_theta: usize) -> Self {
        Self {
            n_r,
            n_theta,
            ..self.clone()
        }
    }

    /// Multiplies `f`, the boundary data and the exact solution by `λ`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            f: self.f.scaled(lambda),
            boundary: self.boundary.scaled(lambda),
            exact: self.exact.as_ref().map(|e| e.scaled(lambda)),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_inner > 0.0
            && self.r_inner < self.r_outer
            && self.r_outer <= self.r_max * (1.0 + 1e-12))
        {
            return Err(Error::InvalidCase(format!(
                "{}: need 0 < r_inner < r_outer ≤ r_max, got {} / {} / {}",
                self.id, self.r_inner, self.r_outer, self.r_max
            )));
        }
        Ok(())
    }

    pub fn metric_profile(&self) -> Result<MetricProfile> {
        MetricProfile::from_name(&self.metric, Some(self.r_max))
    }

    pub fn grid(&self) -> Result<PolarGrid> {
        self.validate()?;
        PolarGrid::new(&self.metric_profile()?, self.n_r, self.n_theta, self.r_max)
    }

    pub fn data(&self) -> Result<CaseData> {
        let grid = self.grid()?;
        let f = cell_average(&grid, &self.f.resolve(self.seed));
        let g = cell_average(&grid, &self.g.resolve(self.seed ^ G_SALT));
        let b = self.boundary.resolve(self.seed ^ BOUNDARY_SALT);
        let boundary = (0..grid.n_theta())
            .map(|j| b.eval_polar(grid.r_max(), grid.theta(j)))
            .collect();
        Ok(CaseData {
            grid,
            f,
            g,
            boundary,
        })
    }

    pub fn exact_field(&self, grid: &PolarGrid) -> Result<DiscreteField> {
        let exact = self
            .exact
            .as_ref()
            .ok_or(Error::NoExactSolution)?
            .resolve(self.seed);
        Ok(DiscreteField::from_fn(grid, |r, t| exact.eval_polar(r, t)))
    }

    pub fn solve(&self) -> Result<SolvedCase> {
        self.solve_with(SolverOptions::default())
    }

    pub fn solve_with(&self, opts: SolverOptions) -> Result<SolvedCase> {
        let CaseData {
            grid,
            f,
            g,
            boundary,
        } = self.data()?;
        let (u, report) = solve_dirichlet_with(&grid, &g, &f, &boundary, opts)?;
        report.into_result()?;
        Ok(SolvedCase {
            case: self.clone(),
            grid,
            u,
            f,
            g,
            report,
        })
    }

    /// `u = e^x cos 2y` on the flat unit disk, `Δu = −3u`.
    pub fn manufactured_flat(n: usize) -> Self {
        let u = FieldSpec::ExpTrig {
            amplitude: 1.0,
            a: 1.0,
            b: 2.0,
        };
        Self::new(
            "manufactured-flat",
            "flat",
            n,
            FieldSpec::ExpTrig {
                amplitude: -3.0,
                a: 1.0,
                b: 2.0,
            },
        )
        .with_boundary(u.clone())
        .with_exact(u)
    }

    /// `u = cos r − cos 1` on the unit-sphere cap `B₁`, `Δu = −2 cos r`.
    pub fn manufactured_sphere(n: usize) -> Self {
        let u = FieldSpec::CosRadius {
            amplitude: 1.0,
            offset: -1f64.cos(),
        };
        Self::new(
            "manufactured-sphere",
            "sphere",
            n,
            FieldSpec::CosRadius {
                amplitude: -2.0,
                offset: 0.0,
            },
        )
        .with_exact(u)
    }
}

pub fn parse_cases(text: &str) -> Result<Vec<ExperimentCase>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Json {
        context: "case file".into(),
        source: e,
    })?;
    let parse = |v: serde_json::Value| {
        serde_json::from_value::<ExperimentCase>(v).map_err(|e| Error::Json {
            context: "case".into(),
            source: e,
        })
    };
    match value {
        serde_json::Value::Array(items) => items.into_iter().map(parse).collect(),
        other => Ok(vec![parse(other)?]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn spec_round_trips_through_json() {
        let case = ExperimentCase::new(
            "c1",
            "perturbed:0.1",
            16,
            FieldSpec::Sum {
                terms: vec![
                    FieldSpec::Constant { value: -1.0 },
                    FieldSpec::RandomSpikes {
                        count: 3,
                        amplitude: 0.1,
                        k_min: 4.0,
                        k_max: 8.0,
                        radius: 0.5,
                        sign: -1.0,
                        salt: 0,
                    },
                ],
            },
        );
        let text = serde_json::to_string(&case).unwrap();
        assert_eq!(parse_cases(&text).unwrap(), vec![case]);
    }

    #[test]
    fn unicode_theta_alias_and_defaults() {
        let text = r#"{"id":"a","n_r":16,"n_θ":12,"f":{"kind":"constant","value":-4}}"#;
        let c = &parse_cases(text).unwrap()[0];
        assert_eq!(c.n_theta, 12);
        assert_eq!(c.metric, "flat");
        assert_eq!(c.g, FieldSpec::Zero);
        assert_eq!((c.r_outer, c.r_inner), (1.0, 0.5));
    }

    #[test]
    fn malformed_json_is_an_error() {
        assert!(matches!(
            parse_cases("[{\"id\": 3"),
            Err(Error::Json { .. })
        ));
    }

    #[test]
    fn random_specs_depend_only_on_seed() {
        let spec = FieldSpec::RandomSmooth {
            modes: 5,
            amplitude: 1.0,
            max_wavenumber: 3.0,
            salt: 0,
        };
        let (a, b, c) = (spec.resolve(7), spec.resolve(7), spec.resolve(8));
        let x = [0.3, -0.2];
        assert_eq!(a.eval(x), b.eval(x));
        assert_ne!(a.eval(x), c.eval(x));
    }

    #[test]
    fn cell_average_preserves_integrals() {
        let m = MetricProfile::flat(1.0).unwrap();
        let grid = PolarGrid::new(&m, 32, 32, 1.0).unwrap();
        let spike = FieldSpec::Spike {
            amplitude: 1.0,
            k: 8.0,
            center: [0.3, 0.1],
        }
        .resolve(0);
        let f = cell_average(&grid, &spike);
        // ∫ k²η(k·) = ∫η = 2π ∫ r η(r) dr
        let eta_mass = 2.0
            * PI
            * crate::quad::simpson(0.0, 2.0, 4000, |r| {
                r * super::super::bump::bump_eta_radial(r)
            });
        assert!((grid.integral(&f, 1.0) - eta_mass).abs() < 1e-3 * eta_mass);
    }

    #[test]
    fn solves_the_manufactured_sphere_case() {
        let case = ExperimentCase::manufactured_sphere(32);
        let s = case.solve().unwrap();
        let exact = case.exact_field(&s.grid).unwrap();
        let err = s.u.zip_with(&exact, |a, b| a - b).max_abs();
        assert!(err < 1e-3);
    }

    #[test]
    fn rejects_inverted_radii() {
        let mut c = ExperimentCase::new("bad", "flat", 16, FieldSpec::Zero);
        c.r_inner = 1.0;
        assert!(c.grid().is_err());
    }
}
