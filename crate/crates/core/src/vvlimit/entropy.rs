use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::VvError;
use crate::flux_model::FluxField;
use crate::numerics::integrate;
use crate::parabolic::ViscousSolution;

type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An entropy `η` with its first two derivatives.
#[derive(Clone)]
pub struct EntropyPair {
    name: String,
    eta: Fn1,
    d_eta: Fn1,
    d2_eta: Fn1,
}

impl fmt::Debug for EntropyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EntropyPair({})", self.name)
    }
}

impl EntropyPair {
    pub fn new(
        name: impl Into<String>,
        eta: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d_eta: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2_eta: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eta: Arc::new(eta),
            d_eta: Arc::new(d_eta),
            d2_eta: Arc::new(d2_eta),
        }
    }

    /// `η(ω) = ω`, whose flux is `f` itself.
    pub fn identity() -> Self {
        Self::new("identity", |w| w, |_| 1.0, |_| 0.0)
    }

    /// `η(ω) = ω²/2`
    pub fn quadratic() -> Self {
        Self::new("quadratic", |w| 0.5 * w * w, |w| w, |_| 1.0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eta(&self, w: f64) -> f64 {
        (self.eta)(w)
    }

    pub fn d_eta(&self, w: f64) -> f64 {
        (self.d_eta)(w)
    }

    pub fn d2_eta(&self, w: f64) -> f64 {
        (self.d2_eta)(w)
    }

    /// The entropy flux; see [`entropy_flux`].
    pub fn q(&self, flux: &FluxField, t: f64, x: f64, w: f64) -> Result<f64, VvError> {
        entropy_flux(self, flux, t, x, w)
    }
}

/// `q(t, x, ω) = ∫₀^ω η′(s) f_ω(t, x, s) ds` by adaptive quadrature. `f_ω` is the flux's own
/// derivative, centered differences unless it supplies a closed form.
pub fn entropy_flux(
    pair: &EntropyPair,
    flux: &FluxField,
    t: f64,
    x: f64,
    w: f64,
) -> Result<f64, VvError> {
    integrate(|s| pair.d_eta(s) * flux.d_omega(t, x, s), 0.0, w, 1e-13)
        .ok_or_else(|| VvError::Quadrature(format!("entropy flux of {} at ω={w}", pair.name)))
}

/// `I(t, x, v, w) = (v − w) ∫_w^v f_ω² − (f(v) − f(w))²`, nonnegative by Cauchy–Schwarz.
pub fn jensen_i(flux: &FluxField, t: f64, x: f64, v: f64, w: f64) -> f64 {
    let sq = |s: f64| {
        let d = flux.d_omega(t, x, s);
        d * d
    };
    let int = integrate(sq, w, v, 1e-14)
        .unwrap_or_else(|| quadrature::integrate(sq, w, v, 1e-14).integral);
    let df = flux.value(t, x, v) - flux.value(t, x, w);
    (v - w) * int - df * df
}

/// A space-time rectangle `[t0, t1] × [x0, x1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
}

/// `ε ∫∫ u_x²` over the window: difference quotients at interior edges inside `[x0, x1]`,
/// trapezoid rule over the stored times inside `[t0, t1]`.
pub fn entropy_dissipation(run: &ViscousSolution, window: Window) -> Result<f64, VvError> {
    let g = &run.grid;
    let tol = 1e-12 * (1.0 + window.t1.abs());
    if !(window.t0 <= window.t1 && window.x0 <= window.x1)
        || window.x0 < g.x_min()
        || window.x1 > g.x_max()
        || window.t0 < -tol
        || window.t1 > run.times.last().copied().unwrap_or(0.0) + tol
    {
        return Err(VvError::InvalidInput(format!(
            "window {window:?} leaves the run's domain"
        )));
    }
    let dx = g.dx();
    let edges: Vec<usize> = (1..g.n_cells())
        .filter(|&i| (window.x0..=window.x1).contains(&g.edge(i)))
        .collect();
    let rate = |p: &[f64]| {
        run.epsilon
            * edges
                .iter()
                .map(|&i| {
                    let q = (p[i] - p[i - 1]) / dx;
                    q * q
                })
                .sum::<f64>()
            * dx
    };
    let ks: Vec<usize> = (0..run.times.len())
        .filter(|&k| run.times[k] >= window.t0 - tol && run.times[k] <= window.t1 + tol)
        .collect();
    Ok(ks
        .windows(2)
        .map(|w| {
            0.5 * (run.times[w[1]] - run.times[w[0]])
                * (rate(&run.profiles[w[0]]) + rate(&run.profiles[w[1]]))
        })
        .sum())
}
