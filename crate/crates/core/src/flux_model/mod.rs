//! Flux functions `f(t, x, ω)` with possibly discontinuous dependence on `(t, x)`.
//!
//! A [`FluxField`] wraps any [`FluxFunction`] together with the constants the solvers
//! need: the Lipschitz bound `L` in the state variable, the integral bound `L₁` of
//! `f(t, ·, 0)`, and the declared assumption flags. Concrete families live in the
//! submodules: smooth one-state fluxes, two-flux interfaces along a Lipschitz curve,
//! and composite fluxes `F(v(t, x), ω)`.

mod composite;
mod interface;
mod ops;
mod smooth;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::numerics::FD_STEP;

pub use composite::{
    ClosedFormCoefficient, CoefficientField, CompositeFlux, ConstantCoefficient, RiemannCoefficient,
};
pub use interface::{galilean_shift, InterfaceFlux};
pub use ops::{mollify, verify_assumptions, SamplingPlan, VerificationReport};
pub use smooth::{SmoothFlux, TwoArgFlux};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FluxError {
    #[error("non-finite flux input (t={t}, x={x}, state={state})")]
    NonFinite { t: f64, x: f64, state: f64 },
    #[error("state {state} outside declared range [{lo}, {hi}]")]
    StateOutOfRange { state: f64, lo: f64, hi: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("flux assumption violated: {0}")]
    Assumption(String),
    #[error("unknown catalog flux `{0}`")]
    UnknownCatalog(String),
    #[error("sampling plan is empty")]
    EmptyPlan,
}

/// Which one-sided limit in `x` to take when the flux jumps at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A flux `f(t, x, ω)`. Implementations must be pure.
pub trait FluxFunction: Send + Sync {
    fn value(&self, t: f64, x: f64, w: f64) -> f64;

    /// Limit of `f(t, y, ω)` as `y → x` from the given side.
    fn value_from(&self, side: Side, t: f64, x: f64, w: f64) -> f64 {
        let _ = side;
        self.value(t, x, w)
    }

    fn d_omega(&self, t: f64, x: f64, w: f64) -> f64 {
        (self.value(t, x, w + FD_STEP) - self.value(t, x, w - FD_STEP)) / (2.0 * FD_STEP)
    }

    fn d_omega_from(&self, side: Side, t: f64, x: f64, w: f64) -> f64 {
        (self.value_from(side, t, x, w + FD_STEP) - self.value_from(side, t, x, w - FD_STEP))
            / (2.0 * FD_STEP)
    }
}

/// Assumption flags declared by construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Assumptions {
    /// Bounded, C² in the state, uniformly Lipschitz.
    pub f1: bool,
    /// `f(t, x, 0) = 0` and `f(t, x, 1) = h(t)`.
    pub f2: bool,
    /// `f(t, x, ω) = F(v(t, x), ω)` with `v` regulated.
    pub f3: bool,
}

/// An evaluable flux together with its structural constants.
#[derive(Clone)]
pub struct FluxField {
    name: String,
    function: Arc<dyn FluxFunction>,
    lip: f64,
    l1: f64,
    assumptions: Assumptions,
    state_range: (f64, f64),
}

impl fmt::Debug for FluxField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FluxField")
            .field("name", &self.name)
            .field("lip", &self.lip)
            .field("l1", &self.l1)
            .field("assumptions", &self.assumptions)
            .field("state_range", &self.state_range)
            .finish()
    }
}

impl FluxField {
    pub fn new(name: impl Into<String>, function: Arc<dyn FluxFunction>, lip: f64) -> Self {
        Self {
            name: name.into(),
            function,
            lip,
            l1: 0.0,
            assumptions: Assumptions {
                f1: true,
                ..Assumptions::default()
            },
            state_range: (0.0, 1.0),
        }
    }

    /// A flux that does not depend on `(t, x)`.
    pub fn homogeneous(flux: SmoothFlux) -> Self {
        let lip = flux.lipschitz_on(0.0, 1.0);
        let f2 = flux.value(0.0) == 0.0;
        let name = flux.name().to_string();
        Self::new(name, Arc::new(flux), lip).with_assumptions(Assumptions {
            f1: true,
            f2,
            f3: false,
        })
    }

    pub fn with_assumptions(mut self, assumptions: Assumptions) -> Self {
        self.assumptions = assumptions;
        self
    }

    pub fn with_l1(mut self, l1: f64) -> Self {
        self.l1 = l1;
        self
    }

    pub fn with_state_range(mut self, lo: f64, hi: f64) -> Self {
        self.state_range = (lo, hi);
        self
    }

    pub fn with_lip(mut self, lip: f64) -> Self {
        self.lip = lip;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lip(&self) -> f64 {
        self.lip
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn assumptions(&self) -> Assumptions {
        self.assumptions
    }

    pub fn state_range(&self) -> (f64, f64) {
        self.state_range
    }

    pub fn function(&self) -> &Arc<dyn FluxFunction> {
        &self.function
    }

    /// Checked evaluation of `f(t, x, ω)`.
    pub fn eval(&self, t: f64, x: f64, w: f64) -> Result<f64, FluxError> {
        if !(t.is_finite() && x.is_finite() && w.is_finite()) {
            return Err(FluxError::NonFinite { t, x, state: w });
        }
        let (lo, hi) = self.state_range;
        let slack = 1e-12 * (1.0 + hi - lo);
        if w < lo - slack || w > hi + slack {
            return Err(FluxError::StateOutOfRange { state: w, lo, hi });
        }
        Ok(self.function.value(t, x, w))
    }

    #[inline]
    pub fn value(&self, t: f64, x: f64, w: f64) -> f64 {
        self.function.value(t, x, w)
    }

    #[inline]
    pub fn value_from(&self, side: Side, t: f64, x: f64, w: f64) -> f64 {
        self.function.value_from(side, t, x, w)
    }

    #[inline]
    pub fn d_omega(&self, t: f64, x: f64, w: f64) -> f64 {
        self.function.d_omega(t, x, w)
    }

    #[inline]
    pub fn d_omega_from(&self, side: Side, t: f64, x: f64, w: f64) -> f64 {
        self.function.d_omega_from(side, t, x, w)
    }
}
