//! Numerical checks of the qualitative picture: Dulac negativity, threshold
//! sweeps, basin probes, and the split of `R0` by infective group.

mod basin;
mod dulac;
mod sweep;

pub use basin::{basin_grid, basin_probe, BasinCell, BasinCounts, BasinLabel, BasinReport};
pub use dulac::{dulac_curl, dulac_field, dulac_parts, numerical_curl};
pub use sweep::{sweep_to_csv, threshold_sweep, SweepRow};

use crate::params::ModelParams;

/// The contributions `(p·λ1/(b+ε+γ1), q·λ2/(b+ε+γ2))` of the two infective
/// groups to `R0`. A rarely entered group can still dominate when its
/// contact rate is large.
pub fn core_group_decomposition(params: &ModelParams) -> (f64, f64) {
    params.r0_terms()
}
