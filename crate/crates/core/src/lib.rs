//! An SIS epidemic model in a population of varying size, with two
//! dissimilar groups of infectives.
//!
//! Susceptibles `S` are infected at rate `(λ1·I1 + λ2·I2)·S/N`; a fraction
//! `p` of new infectives joins group `I1` and the rest joins `I2`. The crate
//! evaluates the model in absolute counts, in proportions `(s, i1, i2)` and
//! in the reduced planar coordinates `(i1, i2)`; computes the threshold
//! `R0`; locates and classifies every rest point; integrates trajectories;
//! and checks the global picture numerically: the disease-free state
//! attracts everything when `R0 <= 1`, and a unique endemic equilibrium
//! attracts every state with infection present when `R0 > 1`.
//!
//! ```
//! use twogroup::{endemic_equilibrium, ModelParams, StabilityClass};
//!
//! let params = ModelParams::new(0.5, 0.3, 0.1, 0.2, 1.0, 5.0, 0.3, 0.1, 0.9)?;
//! assert!((params.r0() - 1.525).abs() < 1e-12);
//!
//! let endemic = endemic_equilibrium(&params)?.expect("R0 > 1");
//! assert_eq!(endemic.class(), StabilityClass::Sink);
//! # Ok::<(), twogroup::Error>(())
//! ```

pub mod analysis;
pub mod equilibria;
mod error;
pub mod integrator;
mod linalg;
mod model;
mod params;
pub mod sampling;
mod state;
pub mod verify;

pub use equilibria::{
    all_rest_points, classify_origin, endemic_equilibrium, equilibrium_quadratic, equilibrium_ray,
    origin_matrix, QuadraticForm, RestPoint, StabilityClass,
};
pub use error::{Error, Result};
pub use integrator::{
    detect_convergence, integrate, invariance_audit, InitialState, IntegratorConfig, SystemKind,
    TerminalReason, Trajectory,
};
pub use linalg::Matrix2;
pub use params::{ModelParams, ParamName};
pub use state::{AbsoluteState, PlanarState, ProportionState, SIMPLEX_TOL};
