use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::case::{ExperimentCase, SolvedCase};
use super::norms::{ratio_or_zero, zygmund_on};
use crate::error::{Error, Result};
use crate::surface::Geometry;
use crate::verdict::VerdictReport;

/// `‖u‖_{C(B_inner)} / (‖u‖_{L¹(B_outer)} + ‖f‖*_{L ln L(B_outer)})`.
#[derive(Debug, Clone, Serialize)]
pub struct InteriorRatio {
    pub case: String,
    pub family: String,
    pub sup_inner: f64,
    pub l1_outer: f64,
    pub f_norm: f64,
    pub ratio: f64,
}

impl InteriorRatio {
    pub fn denominator(&self) -> f64 {
        self.l1_outer + self.f_norm
    }

    /// `lhs ≤ C·rhs` for a measured constant `C` with relative headroom.
    pub fn verdict(&self, constant: f64, headroom: f64) -> VerdictReport {
        VerdictReport::check(
            "interior",
            &self.case,
            self.sup_inner,
            constant * self.denominator(),
            headroom,
        )
    }
}

pub fn interior_ratio(solved: &SolvedCase) -> Result<InteriorRatio> {
    let c = &solved.case;
    let sup_inner = solved.grid.sup_norm(&solved.u, c.r_inner);
    let l1_outer = solved.grid.l1_norm(&solved.u, c.r_outer);
    let f_norm = zygmund_on(&solved.grid, &solved.f, c.r_outer)?;
    Ok(InteriorRatio {
        case: c.id.clone(),
        family: c.family.clone().unwrap_or_else(|| "unlabelled".into()),
        sup_inner,
        l1_outer,
        f_norm,
        ratio: ratio_or_zero(sup_inner, l1_outer + f_norm),
    })
}

/// Corpus outcome: the measured constant (sup of the ratios) overall and per
/// potential family, plus cases whose solve failed.
#[derive(Debug, Clone, Serialize)]
pub struct InteriorSummary {
    pub measured_constant: f64,
    pub per_family: BTreeMap<String, f64>,
    pub ratios: Vec<InteriorRatio>,
    pub skipped: Vec<String>,
}

impl InteriorSummary {
    pub fn verdicts(&self, headroom: f64) -> Vec<VerdictReport> {
        self.ratios
            .iter()
            .map(|r| r.verdict(self.measured_constant, headroom))
            .collect()
    }
}

pub fn interior_corpus(cases: &[ExperimentCase]) -> InteriorSummary {
    let outcomes: Vec<std::result::Result<InteriorRatio, String>> = cases
        .par_iter()
        .map(|c| {
            c.solve()
                .and_then(|s| interior_ratio(&s))
                .map_err(|_| c.id.clone())
        })
        .collect();
    let mut ratios = Vec::new();
    let mut skipped = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => ratios.push(r),
            Err(id) => skipped.push(id),
        }
    }
    let mut per_family: BTreeMap<String, f64> = BTreeMap::new();
    for r in &ratios {
        let e = per_family.entry(r.family.clone()).or_insert(0.0);
        *e = e.max(r.ratio);
    }
    let measured_constant = ratios.iter().map(|r| r.ratio).fold(0.0, f64::max);
    InteriorSummary {
        measured_constant,
        per_family,
        ratios,
        skipped,
    }
}

/// Deviation from the mean-value property at the grid centre.
#[derive(Debug, Clone, Serialize)]
pub struct MeanValueDeviation {
    pub verdict: VerdictReport,
    pub rho: f64,
    pub center_value: f64,
    pub circle_average: f64,
    pub f_norm: f64,
    pub g_norm: f64,
    pub sup_u: f64,
    pub flux_variation: f64,
}

/// `|u(x₀) − l(∂B_ρ)⁻¹∫u G dθ| ≤ A(‖f‖* + ‖g‖*‖u‖_C) + F(ρ)‖u‖_C`, norms on
/// `B_ρ`, `A` the kernel pairing constant and `F(ρ)` the measured flux
/// variation `∫∫|∂_r(G/l)|`.
pub fn mean_value_deviation(
    solved: &SolvedCase,
    rho: f64,
    a: f64,
    tol: f64,
) -> Result<MeanValueDeviation> {
    let grid = &solved.grid;
    if !(rho > 0.0) || rho > grid.r_max() {
        return Err(Error::RadiusOutOfRange {
            r: rho,
            r_max: grid.r_max(),
        });
    }
    let center_value = solved.u.pole();
    let circle_average = grid.circle_average(&solved.u, rho)?;
    let f_norm = zygmund_on(grid, &solved.f, rho)?;
    let g_norm = zygmund_on(grid, &solved.g, rho)?;
    let sup_u = grid.sup_norm(&solved.u, rho);
    let flux_variation = Geometry::new(grid.metric()).flux_variation(rho, 2.0)?.value;
    let lhs = (center_value - circle_average).abs();
    let rhs = a * (f_norm + g_norm * sup_u) + flux_variation * sup_u;
    Ok(MeanValueDeviation {
        verdict: VerdictReport::check("mean_value", &solved.case.id, lhs, rhs, tol),
        rho,
        center_value,
        circle_average,
        f_norm,
        g_norm,
        sup_u,
        flux_variation,
    })
}
