use rayon::prelude::*;
use serde::Serialize;

use super::case::{ExperimentCase, SolvedCase};
use super::norms::{ratio_or_zero, zygmund_on};
use crate::error::Result;

/// Solutions below `−POSITIVITY_TOL·max|u|` count as sign-changing.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// `max_{B_inner} u / (min_{B_inner} u + ‖f‖*_{L ln L(B_outer)})`.
#[derive(Debug, Clone, Serialize)]
pub struct HarnackRatio {
    pub case: String,
    pub max_inner: f64,
    pub min_inner: f64,
    pub f_norm: f64,
    pub ratio: f64,
}

/// `None` when the solution takes negative values on `B_outer`.
pub fn harnack_ratio(solved: &SolvedCase) -> Result<Option<HarnackRatio>> {
    let c = &solved.case;
    let grid = &solved.grid;
    let (lo, _) = grid.min_max(&solved.u, c.r_outer);
    if lo < -POSITIVITY_TOL * solved.u.max_abs().max(1.0) {
        return Ok(None);
    }
    let shift = lo.min(0.0).abs();
    let (min_inner, max_inner) = grid.min_max(&solved.u, c.r_inner);
    let (min_inner, max_inner) = (min_inner + shift, max_inner + shift);
    let f_norm = zygmund_on(grid, &solved.f, c.r_outer)?;
    Ok(Some(HarnackRatio {
        case: c.id.clone(),
        max_inner,
        min_inner,
        f_norm,
        ratio: ratio_or_zero(max_inner, min_inner + f_norm),
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnackSummary {
    pub ratios: Vec<HarnackRatio>,
    pub discarded: Vec<String>,
    pub measured_constant: f64,
}

pub fn harnack_corpus(cases: &[ExperimentCase]) -> Result<HarnackSummary> {
    let outcomes: Vec<(String, Option<HarnackRatio>)> = cases
        .par_iter()
        .map(|c| Ok((c.id.clone(), harnack_ratio(&c.solve()?)?)))
        .collect::<Result<_>>()?;
    let mut ratios = Vec::new();
    let mut discarded = Vec::new();
    for (id, r) in outcomes {
        match r {
            Some(r) => ratios.push(r),
            None => discarded.push(id),
        }
    }
    let measured_constant = ratios.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(HarnackSummary {
        ratios,
        discarded,
        measured_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimates::FieldSpec;

    #[test]
    fn constant_solution() {
        let case = ExperimentCase::new("one", "flat", 16, FieldSpec::Zero)
            .with_boundary(FieldSpec::Constant { value: 1.0 });
        let r = harnack_ratio(&case.solve().unwrap()).unwrap().unwrap();
        assert_eq!(r.ratio, 1.0);
    }

    #[test]
    fn shifted_linear_solution() {
        let case = ExperimentCase::new("lin", "flat", 32, FieldSpec::Zero).with_boundary(
            FieldSpec::Linear {
                c0: 2.0,
                cx: 1.0,
                cy: 0.0,
            },
        );
        let r = harnack_ratio(&case.solve().unwrap()).unwrap().unwrap();
        assert!((r.ratio - 2.5 / 1.5).abs() < 5e-3);
    }

    #[test]
    fn sign_changing_solution_is_discarded() {
        let case = ExperimentCase::new("x", "flat", 16, FieldSpec::Zero).with_boundary(
            FieldSpec::Linear {
                c0: 0.0,
                cx: 1.0,
                cy: 0.0,
            },
        );
        assert!(harnack_ratio(&case.solve().unwrap()).unwrap().is_none());
    }
}
