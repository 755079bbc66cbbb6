//! Numerical laboratory for diffusion on a half-line bounded by a moving,
//! impermeable wall.
//!
//! The wall at `b(t) = c[(1+t)^beta - 1]` sweeps diffusing individuals without
//! absorbing them; total mass is conserved through a flux-balance boundary
//! condition. The crate provides:
//!
//! - [`boundary_motion`]: the wall law, its derived drift coefficients, and
//!   the time/space rescalings between the physical and self-similar frames;
//! - [`kernels`]: closed-form fundamental solutions (free heat kernel,
//!   half-line Neumann kernel, drifted Robin kernel for a linearly moving
//!   wall) and quadrature-based exact solution evaluation;
//! - [`profiles`]: the regime-dependent stationary / self-similar limit
//!   shapes with exact mass normalization;
//! - [`fv_solver`]: a conservative, steady-state-preserving finite-volume
//!   solver (exponentially fitted fluxes, backward Euler) for the
//!   drift-diffusion problems arising in every frame;
//! - [`particles`]: reflected random walkers against the moving wall;
//! - [`diagnostics`]: entropy, Fisher information, L1 distances, functional
//!   inequality checks and convergence-rate fitting.
//!
//! With the default `parallel` feature, ensemble stepping and kernel
//! tabulation use rayon; results are bit-identical to the sequential
//! fallback because every walker owns its own RNG stream and reductions are
//! performed in a fixed order.

pub mod boundary_motion;
pub mod diagnostics;
pub mod error;
pub mod fv_solver;
pub mod kernels;
pub mod particles;
pub mod profiles;

pub use boundary_motion::{BoundaryMotion, Regime, ScalingMap};
pub use error::{CoreError, Result};
pub use fv_solver::{DensityField, FpProblem, Frame, Grid, Snapshot, Solver, Trajectory};
pub use kernels::CompactInitialData;
pub use profiles::Profile;
