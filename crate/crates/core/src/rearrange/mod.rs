//! Decreasing rearrangements and the function-space norms built on them:
//! the Zygmund norm `‖·‖*_{L ln L}`, the `L ln L` modular, mean oscillation
//! over ball families and H¹-atom checks.

mod atom;
mod bmo;
mod profile;
mod samples;

pub use atom::{
    atom_check, atom_proxy_norm, minimal_containing_radius, AtomVerdict, DEFAULT_ATOM_TOL,
};
pub use bmo::{bmo_norm, dyadic_ball_family, Ball, BmoEstimate};
pub use profile::{
    direct_pairing, pairing_upper, profile_pairing, rearrange, zygmund_modular,
    zygmund_modular_of_profile, zygmund_norm, zygmund_norm_of_profile, StepProfile,
};
pub use samples::{Sample, WeightedSamples};
