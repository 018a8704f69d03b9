//! Vanishing-viscosity harness: integrated profiles, ε-sweeps with a uniform Cauchy test,
//! comparison and tail checks, entropy and weak-solution diagnostics.

mod checks;
mod entropy;
mod sweep;
mod weak;

use serde::Serialize;
use thiserror::Error;

use crate::parabolic::{Grid1D, ParabolicError, ViscousSolution};

pub use checks::{
    check_finite_speed, check_integrated_comparison, check_order_and_contraction, check_tail_bound,
    ComparisonReport, FiniteSpeedReport, OrderReport, TailReport,
};
pub use entropy::{entropy_dissipation, entropy_flux, jensen_i, EntropyPair, Window};
pub use sweep::{eps_sweep, EpsSequenceReport, SweepPolicy, SweepRun};
pub use weak::{weak_residual, TestFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VvError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("solve failed at ε={eps}: {source}")]
    Solve {
        eps: f64,
        #[source]
        source: ParabolicError,
    },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error(transparent)]
    Parabolic(#[from] ParabolicError),
}

/// `U(x_j) = Σ_{k≤j} u_k dx`, the integral of `u` up to the right edge of cell `j`.
pub fn integrate_profile(u: &[f64], dx: f64) -> Vec<f64> {
    let mut acc = 0.0;
    u.iter()
        .map(|v| {
            acc += v * dx;
            acc
        })
        .collect()
}

/// `∫_{x_min}^{x} u` for a piecewise-constant profile; zero left of the grid, the total mass
/// right of it.
pub(crate) fn prefix_integral(grid: &Grid1D, u: &[f64], x: f64) -> f64 {
    let dx = grid.dx();
    let s = (x - grid.x_min()) / dx;
    if s <= 0.0 {
        return 0.0;
    }
    let n = grid.n_cells();
    let whole = (s.floor() as usize).min(n);
    let mut acc: f64 = u[..whole].iter().sum::<f64>() * dx;
    if whole < n {
        acc += u[whole] * (s - whole as f64) * dx;
    }
    acc
}

/// Integrated profiles of a viscous run at its stored times, on the right cell edges.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegratedProfile {
    /// Positions of the sampled edges.
    pub x: Vec<f64>,
    pub times: Vec<f64>,
    /// `values[k][i]` is `U(times[k], x[i])`.
    pub values: Vec<Vec<f64>>,
}

impl IntegratedProfile {
    pub fn from_solution(sol: &ViscousSolution) -> Self {
        let g = &sol.grid;
        Self {
            x: (1..=g.n_cells()).map(|i| g.edge(i)).collect(),
            times: sol.times.clone(),
            values: sol
                .profiles
                .iter()
                .map(|p| integrate_profile(p, g.dx()))
                .collect(),
        }
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x,U")?;
        for (t, row) in self.times.iter().zip(&self.values) {
            for (x, u) in self.x.iter().zip(row) {
                writeln!(w, "{t},{x},{u}")?;
            }
        }
        Ok(())
    }
}
