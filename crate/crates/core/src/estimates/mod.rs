//! Harnesses for the interior, Harnack and global estimates, the
//! counterexample family and the Moser-iteration resolver.

mod bmo_duality;
mod bump;
mod case;
pub mod corpus;
mod counterexample;
mod global;
mod harnack;
mod interior;
mod moser;
mod norms;

pub use bmo_duality::{
    bmo_duality_check, kernel_bmo_estimate, BmoDualityReport, KERNEL_GRID, KERNEL_LEVELS,
    MEAN_ZERO_TOL,
};
pub use bump::{bump_eta, bump_eta_radial, cutoff_eta_n, smooth_step};
pub use case::{cell_average, parse_cases, CaseData, ExperimentCase, Field, FieldSpec, SolvedCase};
pub use counterexample::{
    counterexample_family, counterexample_family_with, counterexample_samples,
    counterexample_series, CounterexampleRun, CounterexampleSeries, DEFAULT_CELLS_PER_UNIT,
};
pub use global::{
    extended_case, global_energy_checks, global_estimate, sobolev_check, CutoffLadder, CutoffRung,
    GlobalEnergy, GlobalEstimate, HEADROOM, MAX_PRINCIPLE_SLACK,
};
pub use harnack::{harnack_corpus, harnack_ratio, HarnackRatio, HarnackSummary, POSITIVITY_TOL};
pub use interior::{
    interior_corpus, interior_ratio, mean_value_deviation, InteriorRatio, InteriorSummary,
    MeanValueDeviation,
};
pub use moser::{
    iterate_recursion, moser_brute_force, moser_resolve, select_rho0, IterationSchedule,
    CONTRACTION,
};
pub use norms::{ratio_or_zero, zygmund_on};
