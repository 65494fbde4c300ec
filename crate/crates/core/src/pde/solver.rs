use serde::Serialize;

use super::grid::{DiscreteField, PolarGrid};
use super::operator::FluxOperator;
use crate::error::{Error, Result};

/// Default relative residual tolerance.
pub const SOLVER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    JacobiCg,
    BiCgStab,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    pub tol: f64,
    /// Defaults to `20·n + 1000` for `n` unknowns.
    pub max_iter: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: SOLVER_TOL,
            max_iter: None,
        }
    }
}

/// Outcome of a Krylov solve. `residual_norm` is `‖b − Ax‖/‖b‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveReport {
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: SolverMethod,
}

impl SolveReport {
    pub fn into_result(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                residual: self.residual_norm,
                iterations: self.iterations,
            })
        }
    }
}

/// Interior system `(−S_II + diag(m g)) u_I = −m f + S_IB u_B`. Interior
/// nodes are exactly the first `n` flat indices.
struct InteriorSystem<'a> {
    op: &'a FluxOperator,
    n: usize,
    shift: Vec<f64>,
}

impl InteriorSystem<'_> {
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        use rayon::prelude::*;
        out.par_iter_mut().enumerate().for_each(|(k, o)| {
            let mut s = (self.op.diag()[k] + self.shift[k]) * x[k];
            for (b, c) in self.op.row(k) {
                if b < self.n {
                    s -= c * x[b];
                }
            }
            *o = s;
        });
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|k| self.op.diag()[k] + self.shift[k])
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `Δu = g u + f` in the grid ball with `u = boundary` on `r = r_max`.
pub fn solve_dirichlet(
    grid: &PolarGrid,
    g: &DiscreteField,
    f: &DiscreteField,
    boundary: &[f64],
) -> Result<(DiscreteField, SolveReport)> {
    solve_dirichlet_with(grid, g, f, boundary, SolverOptions::default())
}

pub fn solve_dirichlet_with(
    grid: &PolarGrid,
    g: &DiscreteField,
    f: &DiscreteField,
    boundary: &[f64],
    opts: SolverOptions,
) -> Result<(DiscreteField, SolveReport)> {
    grid.check(g)?;
    grid.check(f)?;
    if boundary.len() != grid.n_theta() {
        return Err(Error::GridMismatch(format!(
            "{} boundary values for {} angular nodes",
            boundary.len(),
            grid.n_theta()
        )));
    }
    if boundary
        .iter()
        .chain(&g.values)
        .chain(&f.values)
        .any(|v| !v.is_finite())
    {
        return Err(Error::InvalidCase("non-finite data".into()));
    }
    let op = FluxOperator::assemble(grid);
    let n = grid.len() - grid.n_theta();
    let mut full = vec![0.0; grid.len()];
    for (j, b) in boundary.iter().enumerate() {
        full[grid.index(grid.n_r(), j)] = *b;
    }
    let shift: Vec<f64> = (0..n).map(|k| grid.measure(k) * g.values[k]).collect();
    let rhs: Vec<f64> = (0..n)
        .map(|k| {
            let coupling: f64 = op
                .row(k)
                .filter(|(b, _)| *b >= n)
                .map(|(b, c)| c * full[b])
                .sum();
            -grid.measure(k) * f.values[k] + coupling
        })
        .collect();
    let sys = InteriorSystem { op: &op, n, shift };
    let mean_b = boundary.iter().sum::<f64>() / boundary.len() as f64;
    let mut x = vec![mean_b; n];
    let max_iter = opts.max_iter.unwrap_or(20 * n + 1000);
    let report = if g.values[..n].iter().all(|v| *v >= 0.0) {
        pcg(&sys, &rhs, &mut x, opts.tol, max_iter)
    } else {
        bicgstab(&sys, &rhs, &mut x, opts.tol, max_iter)
    };
    full[..n].copy_from_slice(&x);
    Ok((
        DiscreteField {
            n_r: grid.n_r(),
            n_theta: grid.n_theta(),
            values: full,
        },
        report,
    ))
}

fn relative(r: f64, bnorm: f64) -> f64 {
    if bnorm > 0.0 {
        r / bnorm
    } else {
        r
    }
}

fn pcg(
    sys: &InteriorSystem<'_>,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> SolveReport {
    let n = b.len();
    let inv: Vec<f64> = sys.diagonal().iter().map(|d| 1.0 / d).collect();
    let bnorm = norm(b);
    let mut ax = vec![0.0; n];
    sys.apply(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut res = relative(norm(&r), bnorm);
    let method = SolverMethod::JacobiCg;
    if res <= tol {
        return SolveReport {
            residual_norm: res,
            iterations: 0,
            converged: true,
            method,
        };
    }
    let mut z: Vec<f64> = r.iter().zip(&inv).map(|(r, i)| r * i).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        sys.apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        res = relative(norm(&r), bnorm);
        if res <= tol {
            // confirm against the true residual
            sys.apply(x, &mut ax);
            let true_res = relative(
                norm(&b.iter().zip(&ax).map(|(b, a)| b - a).collect::<Vec<_>>()),
                bnorm,
            );
            if true_res <= tol {
                return SolveReport {
                    residual_norm: true_res,
                    iterations: it,
                    converged: true,
                    method,
                };
            }
            res = true_res;
        }
        for k in 0..n {
            z[k] = r[k] * inv[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    SolveReport {
        residual_norm: res,
        iterations: max_iter,
        converged: false,
        method,
    }
}

fn bicgstab(
    sys: &InteriorSystem<'_>,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> SolveReport {
    let n = b.len();
    let inv: Vec<f64> = sys
        .diagonal()
        .iter()
        .map(|d| if *d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let method = SolverMethod::BiCgStab;
    let bnorm = norm(b);
    let mut tmp = vec![0.0; n];
    sys.apply(x, &mut tmp);
    let mut r: Vec<f64> = b.iter().zip(&tmp).map(|(b, a)| b - a).collect();
    let mut res = relative(norm(&r), bnorm);
    if res <= tol {
        return SolveReport {
            residual_norm: res,
            iterations: 0,
            converged: true,
            method,
        };
    }
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut zz = vec![0.0; n];
    let mut t = vec![0.0; n];
    for it in 1..=max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || omega == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for k in 0..n {
            p[k] = r[k] + beta * (p[k] - omega * v[k]);
            y[k] = p[k] * inv[k];
        }
        sys.apply(&y, &mut v);
        alpha = rho / dot(&r_hat, &v);
        for k in 0..n {
            s[k] = r[k] - alpha * v[k];
        }
        if relative(norm(&s), bnorm) <= tol {
            for k in 0..n {
                x[k] += alpha * y[k];
            }
            res = relative(norm(&s), bnorm);
            return SolveReport {
                residual_norm: res,
                iterations: it,
                converged: true,
                method,
            };
        }
        for k in 0..n {
            zz[k] = s[k] * inv[k];
        }
        sys.apply(&zz, &mut t);
        omega = dot(&t, &s) / dot(&t, &t);
        for k in 0..n {
            x[k] += alpha * y[k] + omega * zz[k];
            r[k] = s[k] - omega * t[k];
        }
        res = relative(norm(&r), bnorm);
        if !res.is_finite() {
            break;
        }
        if res <= tol {
            return SolveReport {
                residual_norm: res,
                iterations: it,
                converged: true,
                method,
            };
        }
    }
    SolveReport {
        residual_norm: res,
        iterations: max_iter,
        converged: false,
        method,
    }
}
