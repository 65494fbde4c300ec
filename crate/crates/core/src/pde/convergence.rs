use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimates::ExperimentCase;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub case_id: String,
    pub resolutions: Vec<usize>,
    /// Max nodal error against the exact solution.
    pub errors: Vec<f64>,
    /// `ln(e_i/e_{i+1}) / ln(n_{i+1}/n_i)` for successive resolutions.
    pub orders: Vec<f64>,
    /// Least-squares slope of `−ln e` against `ln n`.
    pub measured_order: f64,
}

/// Solves `case` at each radial resolution (keeping the case's `n_θ/n_r`
/// aspect) and measures the error decay rate.
pub fn convergence_study(case: &ExperimentCase, resolutions: &[usize]) -> Result<ConvergenceStudy> {
    if resolutions.len() < 3 {
        return Err(Error::TooFewResolutions);
    }
    if resolutions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::ResolutionsNotIncreasing);
    }
    if case.exact.is_none() {
        return Err(Error::NoExactSolution);
    }
    let aspect = case.n_theta as f64 / case.n_r as f64;
    let mut errors = Vec::with_capacity(resolutions.len());
    for &n in resolutions {
        let n_theta = ((n as f64 * aspect).round() as usize).max(8);
        let c = case.with_resolution(n, n_theta);
        let solved = c.solve()?;
        let exact = c.exact_field(&solved.grid)?;
        errors.push(solved.u.zip_with(&exact, |a, b| a - b).max_abs());
    }
    let orders = resolutions
        .windows(2)
        .zip(errors.windows(2))
        .map(|(n, e)| (e[0] / e[1]).ln() / (n[1] as f64 / n[0] as f64).ln())
        .collect();
    let xs: Vec<f64> = resolutions.iter().map(|n| (*n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| -e.ln()).collect();
    let measured_order = crate::quad::fit_slope(&xs, &ys).unwrap_or(f64::NAN);
    Ok(ConvergenceStudy {
        case_id: case.id.clone(),
        resolutions: resolutions.to_vec(),
        errors,
        orders,
        measured_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimates::FieldSpec;

    #[test]
    fn argument_errors() {
        let c = ExperimentCase::manufactured_flat(16);
        assert!(matches!(
            convergence_study(&c, &[16, 32]),
            Err(Error::TooFewResolutions)
        ));
        assert!(matches!(
            convergence_study(&c, &[16, 16, 32]),
            Err(Error::ResolutionsNotIncreasing)
        ));
        let plain = ExperimentCase::new("p", "flat", 16, FieldSpec::Zero);
        assert!(matches!(
            convergence_study(&plain, &[8, 16, 32]),
            Err(Error::NoExactSolution)
        ));
    }
}
