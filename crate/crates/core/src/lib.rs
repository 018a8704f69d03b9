//! Solvers and diagnostics for `u_t + f(t, x, u)_x = ε u_xx` with fluxes that are regulated,
//! possibly discontinuous, in `(t, x)`, and for the vanishing-viscosity limit ε → 0.
//!
//! - [`flux_model`]: catalog fluxes, interfaces, composite `F(v(t, x), ω)` fields.
//! - [`regulated`]: piecewise-constant fields on bands with Lipschitz jump curves.
//! - [`parabolic`]: the mild (heat-kernel Picard) solver and an IMEX finite-volume solver.
//! - [`hyperbolic`]: front tracking, Godunov, characteristics and regulated extraction.
//! - [`vvlimit`]: ε-sweeps, comparison and tail checks, entropy and weak-solution diagnostics.
//! - [`triangular`]: the system `u_t + F(v, u)_x = ε u_xx`, `v_t + g(v)_x = 0`.
//! - [`scenario`]: JSON scenario documents, the runner and its artifacts.
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod flux_model;
pub mod hyperbolic;
pub mod numerics;
pub mod parabolic;
pub mod regulated;
pub mod scenario;
pub mod triangular;
pub mod vvlimit;

use thiserror::Error;

/// Any error raised by the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Flux(#[from] flux_model::FluxError),
    #[error(transparent)]
    Regulated(#[from] regulated::RegulatedError),
    #[error(transparent)]
    Parabolic(#[from] parabolic::ParabolicError),
    #[error(transparent)]
    Hyperbolic(#[from] hyperbolic::HyperbolicError),
    #[error(transparent)]
    Vv(#[from] vvlimit::VvError),
    #[error(transparent)]
    Triangular(#[from] triangular::TriangularError),
    #[error(transparent)]
    Scenario(#[from] scenario::ScenarioError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
