//! Viscous problems `u_t + f(t, x, u)_x = ε u_xx` on a bounded grid.
//!
//! Two independent solvers: [`solve_mild`] iterates the heat-kernel integral equation in
//! short time blocks, and [`solve_fv`] is a monotone conservative finite-volume scheme with
//! implicit diffusion.

mod fv;
mod grid;
mod kernels;
mod mild;

use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

pub use fv::{solve_fv, FvParams};
pub use grid::{Grid1D, Profile};
pub use mild::{contraction_bound, contraction_time, solve_mild, MildParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParabolicError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("Picard iteration did not converge in block starting at t={block_start} after {iterations} iterations (last ratio {last_ratio})")]
    Convergence {
        block_start: f64,
        iterations: usize,
        last_ratio: f64,
    },
    #[error("numerical blow-up at step {step}")]
    NumericalBlowup { step: usize },
    #[error("solutions are not comparable: {0}")]
    Mismatch(String),
}

/// Per-block statistics of the mild solver.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockStats {
    pub start: f64,
    pub length: f64,
    pub substeps: usize,
    pub iterations: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `Σ u_j dx` per stored time.
    pub mass: Vec<f64>,
    /// `ε Σ ((u_{j+1} − u_j)/dx)² dx` per stored time.
    pub dissipation: Vec<f64>,
    /// Cumulative net flux out through the two boundaries per stored time.
    pub outflow: Vec<f64>,
    /// Picard iterations of the block ending at or containing each stored time.
    pub picard_iters: Vec<usize>,
    pub blocks: Vec<BlockStats>,
    pub steps: usize,
}

impl Diagnostics {
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.ratio).collect()
    }

    /// `max_k |mass_k + outflow_k − mass_0|`.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.mass.first().copied().unwrap_or(0.0);
        self.mass
            .iter()
            .zip(&self.outflow)
            .map(|(m, o)| (m + o - m0).abs())
            .fold(0.0, f64::max)
    }
}

/// Cell averages of `u^ε` at the stored times.
#[derive(Clone, Debug, PartialEq)]
pub struct ViscousSolution {
    pub grid: Grid1D,
    pub epsilon: f64,
    pub times: Vec<f64>,
    pub profiles: Vec<Vec<f64>>,
    pub diagnostics: Diagnostics,
}

pub(crate) fn mass(u: &[f64], dx: f64) -> f64 {
    u.iter().sum::<f64>() * dx
}

pub(crate) fn dissipation(u: &[f64], dx: f64, eps: f64) -> f64 {
    eps * u
        .windows(2)
        .map(|w| {
            let g = (w[1] - w[0]) / dx;
            g * g
        })
        .sum::<f64>()
        * dx
}

pub(crate) fn uniform_times(t_end: f64, samples: usize) -> Vec<f64> {
    let n = samples.max(1);
    (0..=n).map(|k| t_end * k as f64 / n as f64).collect()
}

impl ViscousSolution {
    pub fn final_profile(&self) -> &[f64] {
        self.profiles.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Index of the stored time closest to `t`.
    pub fn time_index(&self, t: f64) -> usize {
        let mut best = 0;
        for (k, &s) in self.times.iter().enumerate() {
            if (s - t).abs() < (self.times[best] - t).abs() {
                best = k;
            }
        }
        best
    }

    /// Cell value at the stored time closest to `t`.
    pub fn value(&self, t: f64, x: f64) -> f64 {
        self.profiles[self.time_index(t)][self.grid.cell_of(x)]
    }

    /// `Σ |u_j − v_j| dx` at stored index `k` of both runs.
    pub fn l1_distance(&self, other: &ViscousSolution, k: usize) -> Result<f64, ParabolicError> {
        self.check_compatible(other)?;
        let dx = self.grid.dx();
        Ok(self.profiles[k]
            .iter()
            .zip(&other.profiles[k])
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * dx)
    }

    pub fn check_compatible(&self, other: &ViscousSolution) -> Result<(), ParabolicError> {
        if self.grid != other.grid {
            return Err(ParabolicError::Mismatch("different grids".into()));
        }
        if self.times.len() != other.times.len()
            || self
                .times
                .iter()
                .zip(&other.times)
                .any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + a.abs()))
        {
            return Err(ParabolicError::Mismatch("different stored times".into()));
        }
        Ok(())
    }

    /// Keeps cells `offset .. offset + n`.
    pub fn restrict(&self, offset: usize, n: usize) -> Result<ViscousSolution, ParabolicError> {
        let g = &self.grid;
        if offset + n > g.n_cells() {
            return Err(ParabolicError::InvalidParameter(
                "restriction exceeds grid".into(),
            ));
        }
        let grid = Grid1D::new(g.edge(offset), g.edge(offset + n), n)?;
        let profiles: Vec<Vec<f64>> = self
            .profiles
            .iter()
            .map(|p| p[offset..offset + n].to_vec())
            .collect();
        Ok(ViscousSolution {
            grid,
            epsilon: self.epsilon,
            times: self.times.clone(),
            profiles,
            diagnostics: self.diagnostics.clone(),
        })
    }

    pub fn write_profiles_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,x,u")?;
        let xs = self.grid.centers();
        for (t, p) in self.times.iter().zip(&self.profiles) {
            for (x, u) in xs.iter().zip(p) {
                writeln!(w, "{t},{x},{u}")?;
            }
        }
        Ok(())
    }

    pub fn write_diagnostics_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,mass,dissipation,picard_iters")?;
        let d = &self.diagnostics;
        for (k, t) in self.times.iter().enumerate() {
            writeln!(
                w,
                "{t},{},{},{}",
                d.mass[k],
                d.dissipation[k],
                d.picard_iters.get(k).copied().unwrap_or(0)
            )?;
        }
        Ok(())
    }
}
