use std::f64::consts::E;

use serde::Serialize;

use super::case::{cell_average, ExperimentCase, FieldSpec, SolvedCase};
use super::norms::{ratio_or_zero, zygmund_on};
use crate::error::{Error, Result};
use crate::pde::{gradient_l2, DiscreteField, PolarGrid};
use crate::quad::fit_slope;
use crate::rearrange::rearrange;
use crate::verdict::VerdictReport;

/// Declared headroom on measured constants.
pub const HEADROOM: f64 = 0.2;

/// The John–Nirenberg, rearrangement and energy checks for `v` solved on
/// `B₂` with zero boundary and data supported in `B₁`.
#[derive(Debug, Clone, Serialize)]
pub struct GlobalEnergy {
    /// `∫_{B₂} e^{|v|/c} ≤ V(B₂)`, `c = 2e√A‖∇v‖`.
    pub john_nirenberg: VerdictReport,
    /// `∫_{B₂} (e^{|v|/c} − 1) ≤ V(B₂)`.
    pub john_nirenberg_series: VerdictReport,
    /// Worst breakpoint of `v*(t) ≤ C‖∇v‖ ln(V(B₂)/t)`, `C = 2e√A(1 + headroom)`.
    pub rearrangement: VerdictReport,
    /// `‖∇v‖ ≤ C‖f‖*_{L ln L(B₁)}`, `C = 2e√A(1 + ln(V(B₂)/V(B₁)))`.
    pub energy: VerdictReport,
    pub gradient_norm: f64,
    pub f_norm: f64,
}

impl GlobalEnergy {
    pub fn verdicts(&self) -> [&VerdictReport; 4] {
        [
            &self.john_nirenberg,
            &self.john_nirenberg_series,
            &self.rearrangement,
            &self.energy,
        ]
    }
}

pub fn global_energy_checks(v: &SolvedCase, a: f64, tol: f64) -> Result<GlobalEnergy> {
    let grid = &v.grid;
    let id = &v.case.id;
    let grad = gradient_l2(grid, &v.u)?;
    let vmax = v.u.max_abs();
    if grad == 0.0 && vmax > 0.0 {
        return Err(Error::InvalidCase(format!(
            "{id}: zero gradient with nonzero solution"
        )));
    }
    let volume = grid.total_measure();
    let c = 2.0 * E * a.sqrt() * grad;
    let (mut expo, mut series) = (0.0, 0.0);
    for (k, m) in grid.measures().iter().enumerate() {
        let t = if c > 0.0 {
            v.u.values[k].abs() / c
        } else {
            0.0
        };
        expo += t.exp() * m;
        series += t.exp_m1() * m;
    }
    let john_nirenberg = VerdictReport::check("john_nirenberg", id, expo, volume, tol);
    let john_nirenberg_series =
        VerdictReport::check("john_nirenberg_series", id, series, volume, tol);

    let c_star = c * (1.0 + HEADROOM);
    let profile = rearrange(&grid.samples(&v.u, grid.r_max())?);
    let mut worst: Option<VerdictReport> = None;
    for (i, value) in profile.values().iter().enumerate() {
        let t = profile.breakpoints()[i + 1];
        let bound = c_star * (volume / t).ln().max(0.0);
        let rep = VerdictReport::check("rearrangement", id, *value, bound, tol);
        if worst.as_ref().is_none_or(|w| rep.ratio > w.ratio) {
            worst = Some(rep);
        }
    }
    let rearrangement =
        worst.unwrap_or_else(|| VerdictReport::check("rearrangement", id, 0.0, 0.0, tol));

    let inner = 0.5 * grid.r_max();
    let f_norm = zygmund_on(grid, &v.f, inner)?;
    let inner_volume: f64 = (0..grid.len())
        .map(|k| grid.restricted_measure(k, inner))
        .sum();
    let c_energy = 2.0 * E * a.sqrt() * (1.0 + (volume / inner_volume).ln());
    let energy = VerdictReport::check("energy", id, grad, c_energy * f_norm, tol);
    Ok(GlobalEnergy {
        john_nirenberg,
        john_nirenberg_series,
        rearrangement,
        energy,
        gradient_norm: grad,
        f_norm,
    })
}

/// `‖u‖_{L^q} ≤ (q√A/2) V^{1/q} ‖∇u‖_{L²}` for `u` vanishing on the boundary.
pub fn sobolev_check(
    grid: &PolarGrid,
    u: &DiscreteField,
    q: f64,
    a: f64,
    tol: f64,
) -> Result<VerdictReport> {
    grid.check(u)?;
    let boundary_max = (0..grid.len())
        .filter(|&k| grid.is_boundary(k))
        .map(|k| u.values[k].abs())
        .fold(0.0, f64::max);
    if boundary_max > 1e-12 {
        return Err(Error::NonzeroBoundary(boundary_max));
    }
    let lhs = grid.lq_norm(u, q, grid.r_max());
    let rhs = 0.5 * q * a.sqrt() * grid.total_measure().powf(1.0 / q) * gradient_l2(grid, u)?;
    Ok(VerdictReport::check(
        format!("sobolev_q{q}"),
        "",
        lhs,
        rhs,
        tol,
    ))
}

/// One rung of the cutoff ladder `η_n f`.
#[derive(Debug, Clone, Serialize)]
pub struct CutoffRung {
    pub n: u32,
    /// `‖f − η_n f‖*_{L ln L(B₁)}`.
    pub tail_norm: f64,
    /// `‖η_n f‖*_{L ln L(B₁)}`.
    pub cut_norm: f64,
    /// `‖v_n‖_{C(B_{3/2})}`.
    pub v_sup: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CutoffLadder {
    pub rungs: Vec<CutoffRung>,
    pub f_norm: f64,
    /// `‖v_last − v_prev‖_{C(B_{3/2})} ≤ C‖(η_last − η_prev) f‖*`, with `C`
    /// the largest measured `‖v_n‖/‖η_n f‖*` plus headroom.
    pub cauchy: VerdictReport,
    /// Least-squares slope of `ln ‖f − η_n f‖*` against `ln n`.
    pub tail_exponent: f64,
    /// The tail norms decrease with `tail_exponent ≤ −1/2`, or all vanish.
    pub tails_vanish: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GlobalEstimate {
    /// `‖u‖_{C(B₁)} ≤ 2‖v‖_{C(B₁)} + 1e−2`.
    pub maximum_principle: VerdictReport,
    pub u_sup: f64,
    pub v_sup: f64,
    pub f_norm: f64,
    /// `‖u‖_{C(B₁)} / ‖f‖*_{L ln L(B₁)}`.
    pub ratio: f64,
    pub ladder: Option<CutoffLadder>,
}

/// Slack of the maximum-principle comparison.
pub const MAX_PRINCIPLE_SLACK: f64 = 1e-2;

/// The problem on `B₂` with `f` and `g` extended by zero, at the same
/// radial spacing and angular resolution.
pub fn extended_case(case: &ExperimentCase) -> ExperimentCase {
    let r = case.r_max;
    ExperimentCase {
        id: format!("{}@B2", case.id),
        n_r: 2 * case.n_r,
        r_max: 2.0 * r,
        f: FieldSpec::Masked {
            radius: r,
            inner: Box::new(case.f.clone()),
        },
        g: FieldSpec::Masked {
            radius: r,
            inner: Box::new(case.g.clone()),
        },
        boundary: FieldSpec::Zero,
        exact: None,
        r_outer: 2.0 * r,
        r_inner: r,
        ..case.clone()
    }
}

pub fn global_estimate(case: &ExperimentCase, ladder: Option<&[u32]>) -> Result<GlobalEstimate> {
    let u = case.solve()?;
    let bmax = (0..u.grid.len())
        .filter(|&k| u.grid.is_boundary(k))
        .map(|k| u.u.values[k].abs())
        .fold(0.0, f64::max);
    if bmax > 0.0 {
        return Err(Error::NonzeroBoundary(bmax));
    }
    let v = extended_case(case).solve()?;
    let r = case.r_max;
    let u_sup = u.grid.sup_norm(&u.u, r);
    let v_sup = v.grid.sup_norm(&v.u, r);
    let f_norm = zygmund_on(&u.grid, &u.f, r)?;
    let maximum_principle = VerdictReport::check(
        "maximum_principle",
        &case.id,
        u_sup,
        2.0 * v_sup + MAX_PRINCIPLE_SLACK,
        0.0,
    );
    let ladder = match ladder {
        Some(ns) if ns.len() >= 2 => Some(cutoff_ladder(case, &u, ns)?),
        _ => None,
    };
    Ok(GlobalEstimate {
        maximum_principle,
        u_sup,
        v_sup,
        f_norm,
        ratio: ratio_or_zero(u_sup, f_norm),
        ladder,
    })
}

fn cutoff_ladder(case: &ExperimentCase, u: &SolvedCase, ns: &[u32]) -> Result<CutoffLadder> {
    let r = case.r_max;
    let f_norm = zygmund_on(&u.grid, &u.f, r)?;
    let mut rungs = Vec::new();
    let mut fields = Vec::new();
    for &n in ns {
        let cut = FieldSpec::Cutoff {
            n,
            inner: Box::new(case.f.clone()),
        };
        let cut_b1 = cell_average(&u.grid, &cut.resolve(case.seed));
        let tail = u.f.zip_with(&cut_b1, |a, b| a - b);
        let vn = extended_case(&ExperimentCase {
            f: cut.clone(),
            ..case.clone()
        })
        .solve()?;
        rungs.push(CutoffRung {
            n,
            tail_norm: zygmund_on(&u.grid, &tail, r)?,
            cut_norm: zygmund_on(&u.grid, &cut_b1, r)?,
            v_sup: vn.grid.sup_norm(&vn.u, 1.5 * r),
        });
        fields.push((cut_b1, vn));
    }
    let constant = rungs
        .iter()
        .map(|g| ratio_or_zero(g.v_sup, g.cut_norm))
        .fold(0.0, f64::max);
    let (last_f, last_v) = &fields[fields.len() - 1];
    let (prev_f, prev_v) = &fields[fields.len() - 2];
    let diff_norm = zygmund_on(&u.grid, &last_f.zip_with(prev_f, |a, b| a - b), r)?;
    let v_diff = last_v
        .grid
        .sup_norm(&last_v.u.zip_with(&prev_v.u, |a, b| a - b), 1.5 * r);
    let cauchy = VerdictReport::check(
        "cutoff_cauchy",
        &case.id,
        v_diff,
        constant * diff_norm,
        HEADROOM,
    );
    let decreasing = rungs.windows(2).all(|w| w[1].tail_norm <= w[0].tail_norm);
    let xs: Vec<f64> = rungs.iter().map(|g| (g.n as f64).ln()).collect();
    let ys: Vec<f64> = rungs
        .iter()
        .map(|g| g.tail_norm.max(f64::MIN_POSITIVE).ln())
        .collect();
    let tail_exponent = fit_slope(&xs, &ys).unwrap_or(f64::NAN);
    let tails_vanish =
        rungs.iter().all(|g| g.tail_norm == 0.0) || (decreasing && tail_exponent <= -0.5);
    Ok(CutoffLadder {
        rungs,
        f_norm,
        cauchy,
        tail_exponent,
        tails_vanish,
    })
}
