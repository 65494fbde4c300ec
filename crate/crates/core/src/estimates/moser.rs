use serde::Serialize;

use crate::error::{Error, Result};

/// Contraction factor of the iteration.
pub const CONTRACTION: f64 = 0.125;

/// Radii `t_k = (1 − 2^{−k}) ρ₀` of the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationSchedule {
    pub rho0: f64,
    pub theta: f64,
}

impl IterationSchedule {
    pub fn new(rho0: f64) -> Result<Self> {
        if !(rho0 > 0.0 && rho0 < 0.5) {
            return Err(Error::Rho0OutOfRange(rho0));
        }
        Ok(Self {
            rho0,
            theta: CONTRACTION,
        })
    }

    pub fn radius(&self, k: u32) -> f64 {
        (1.0 - 0.5f64.powi(k as i32)) * self.rho0
    }
}

/// Resolved limit `Σ_{i≥1} 8^{1−i}(4^{i+2} a/ρ₀² + b) = 128 a/ρ₀² + 8b/7`.
pub fn moser_resolve(a: f64, b: f64, rho0: f64) -> Result<f64> {
    IterationSchedule::new(rho0)?;
    Ok(128.0 * a / (rho0 * rho0) + 8.0 * b / 7.0)
}

/// Partial sum of the same series up to `i = depth`, highest terms first.
pub fn moser_brute_force(a: f64, b: f64, rho0: f64, depth: u32) -> Result<f64> {
    IterationSchedule::new(rho0)?;
    let mut acc = 0.0;
    for i in (1..=depth as i32).rev() {
        acc += 8f64.powi(1 - i) * (4f64.powi(i + 2) * a / (rho0 * rho0) + b);
    }
    Ok(acc)
}

/// Runs `ω(t_k) = 4^{k+2}a/ρ₀² + b + ω(t_{k+1})/8` backwards from
/// `ω(t_depth) = tail` and returns `ω(t_1) = ω(ρ₀/2)`.
pub fn iterate_recursion(a: f64, b: f64, rho0: f64, tail: f64, depth: u32) -> Result<f64> {
    IterationSchedule::new(rho0)?;
    let mut omega = tail;
    for k in (1..depth as i32).rev() {
        omega = 4f64.powi(k + 2) * a / (rho0 * rho0) + b + CONTRACTION * omega;
    }
    Ok(omega)
}

/// Largest `ρ₀ ∈ {1/4, 1/8, …}` with `C(‖g‖* + ρ₀^{2−2/p}) < 1/8`.
pub fn select_rho0(c: f64, g_norm: f64, p: f64) -> Option<f64> {
    (2..=40)
        .map(|m| 0.5f64.powi(m))
        .find(|rho| c * (g_norm + rho.powf(2.0 - 2.0 / p)) < CONTRACTION)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert!((moser_resolve(0.0, 1.0, 0.25).unwrap() - 8.0 / 7.0).abs() < 1e-15);
        assert!((moser_resolve(1.0, 0.0, 0.25).unwrap() - 2048.0).abs() < 1e-12);
        assert!(moser_resolve(1.0, 1.0, 0.5).is_err());
        assert!(moser_resolve(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn schedule_increases_to_rho0() {
        let s = IterationSchedule::new(0.3).unwrap();
        assert_eq!(s.radius(1), 0.15);
        assert!((1..30).all(|k| s.radius(k) < s.radius(k + 1) && s.radius(k + 1) < 0.3));
    }

    #[test]
    fn constant_fixed_point() {
        // ω₀ = b + ω₀/8 gives ω₀ = 8b/7
        let b = 0.7;
        let w = iterate_recursion(0.0, b, 0.25, 8.0 * b / 7.0, 50).unwrap();
        assert!((w - 8.0 * b / 7.0).abs() < 1e-15);
    }

    #[test]
    fn rho0_selection() {
        assert_eq!(select_rho0(0.1, 0.0, 2.0), Some(0.25));
        let r = select_rho0(1.0, 0.1, 2.0).unwrap();
        assert!(0.1 + r < 0.125 && 0.1 + 2.0 * r >= 0.125);
        assert_eq!(select_rho0(1.0, 0.2, 2.0), None);
    }
}
