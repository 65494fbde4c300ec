use rayon::prelude::*;

use super::grid::{DiscreteField, PolarGrid};
use crate::error::Result;

/// Finite-volume flux operator `(Su)_k = Σ_faces c·(u_n − u_k)`, so that
/// `(Su)_k ≈ ∫_{cell k} Δu dV`. Stored row-wise; symmetric by construction.
#[derive(Debug, Clone)]
pub struct FluxOperator {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    coefs: Vec<f64>,
    /// `Σ_faces c` per row.
    diag: Vec<f64>,
}

impl FluxOperator {
    pub fn assemble(grid: &PolarGrid) -> Self {
        let n = grid.len();
        let nt = grid.n_theta();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut link = |a: usize, b: usize, c: f64| {
            rows[a].push((b, c));
            rows[b].push((a, c));
        };
        for i in 0..grid.n_r() {
            for j in 0..nt {
                let a = if i == 0 { 0 } else { grid.index(i, j) };
                link(a, grid.index(i + 1, j), grid.radial_coef(i, j));
            }
        }
        for i in 1..=grid.n_r() {
            for j in 0..nt {
                link(
                    grid.index(i, j),
                    grid.index(i, (j + 1) % nt),
                    grid.angular_coef(i, j),
                );
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut coefs = Vec::new();
        let mut diag = Vec::with_capacity(n);
        row_ptr.push(0);
        for row in rows {
            diag.push(row.iter().map(|(_, c)| c).sum());
            for (b, c) in row {
                cols.push(b);
                coefs.push(c);
            }
            row_ptr.push(cols.len());
        }
        Self {
            row_ptr,
            cols,
            coefs,
            diag,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn row(&self, k: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.row_ptr[k], self.row_ptr[k + 1]);
        self.cols[a..b]
            .iter()
            .copied()
            .zip(self.coefs[a..b].iter().copied())
    }

    /// `(Su)_k` for a single row.
    pub fn apply_row(&self, u: &[f64], k: usize) -> f64 {
        self.row(k).map(|(b, c)| c * (u[b] - u[k])).sum()
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        (0..self.len())
            .into_par_iter()
            .map(|k| self.apply_row(u, k))
            .collect()
    }

    /// `Σ_faces c·(u_a − u_b)²`, each face counted once.
    pub fn energy(&self, u: &[f64]) -> f64 {
        (0..self.len())
            .map(|k| {
                self.row(k)
                    .filter(|(b, _)| *b > k)
                    .map(|(b, c)| c * (u[b] - u[k]).powi(2))
                    .sum::<f64>()
            })
            .sum()
    }
}

/// Discrete `Δ_g u` at interior nodes; the boundary ring reports 0.
pub fn laplace_beltrami_apply(grid: &PolarGrid, u: &DiscreteField) -> Result<DiscreteField> {
    grid.check(u)?;
    let op = FluxOperator::assemble(grid);
    let su = op.apply(&u.values);
    let values = su
        .iter()
        .enumerate()
        .map(|(k, s)| {
            if grid.is_boundary(k) {
                0.0
            } else {
                s / grid.measure(k)
            }
        })
        .collect();
    Ok(DiscreteField {
        n_r: grid.n_r(),
        n_theta: grid.n_theta(),
        values,
    })
}

/// `‖∇u‖_{L²}` over the grid ball from face differences.
pub fn gradient_l2(grid: &PolarGrid, u: &DiscreteField) -> Result<f64> {
    grid.check(u)?;
    Ok(FluxOperator::assemble(grid).energy(&u.values).sqrt())
}
