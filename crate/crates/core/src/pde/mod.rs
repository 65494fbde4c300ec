//! Finite-volume Laplace–Beltrami operator on polar grids, Dirichlet solves
//! of `Δu − gu = f`, logarithmic potentials and refinement studies.

mod convergence;
mod grid;
mod operator;
mod potential;
mod solver;

pub use convergence::{convergence_study, ConvergenceStudy};
pub use grid::{DiscreteField, PolarGrid};
pub use operator::{gradient_l2, laplace_beltrami_apply, FluxOperator};
pub use potential::{disk_log_integral, log_potential, LogPotential};
pub use solver::{
    solve_dirichlet, solve_dirichlet_with, SolveReport, SolverMethod, SolverOptions, SOLVER_TOL,
};
