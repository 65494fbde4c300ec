use crate::error::Result;
use crate::pde::{DiscreteField, PolarGrid};
use crate::rearrange::zygmund_norm;

/// `‖f‖*_{L ln L(B_ρ)}` of a grid field, with `|B_ρ|` the grid measure of the ball.
pub fn zygmund_on(grid: &PolarGrid, f: &DiscreteField, rho: f64) -> Result<f64> {
    let s = grid.samples(f, rho)?;
    zygmund_norm(&s, s.total_measure())
}

/// `lhs/rhs` with the convention `0/0 = 0`.
pub fn ratio_or_zero(lhs: f64, rhs: f64) -> f64 {
    crate::verdict::ratio(lhs, rhs)
}
