//! Scenario documents and the runner behind the command-line tool.
//!
//! A scenario is one JSON document naming a task; running it writes CSV/JSON artifacts, a
//! `report.json` with every check, and a `manifest.json` with SHA-256 hashes of the rest.

mod run;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flux_model::{
    CompositeFlux, ConstantCoefficient, FluxError, FluxField, InterfaceFlux, RiemannCoefficient,
    SmoothFlux, TwoArgFlux,
};
use crate::hyperbolic::{HyperbolicError, ScalarFlux};
use crate::parabolic::{Grid1D, ParabolicError, Profile};
use crate::regulated::{Curve, RegulatedError};
use crate::triangular::TriangularError;
use crate::vvlimit::{VvError, Window};

pub use run::{run_config, run_demo, run_scenario, Artifact, CheckOutcome, RunOutcome, RunReport};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error(transparent)]
    Flux(#[from] FluxError),
    #[error(transparent)]
    Parabolic(#[from] ParabolicError),
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
    #[error(transparent)]
    Regulated(#[from] RegulatedError),
    #[error(transparent)]
    Vv(#[from] VvError),
    #[error(transparent)]
    Triangular(#[from] TriangularError),
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

fn samples_default() -> usize {
    64
}

fn dx_per_eps_default() -> f64 {
    0.125
}

fn cauchy_default() -> f64 {
    0.8
}

fn four() -> f64 {
    4.0
}

fn pl_default() -> usize {
    16
}

fn godunov_dx_default() -> f64 {
    0.005
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Seed for randomized checks.
    #[serde(default)]
    pub seed: u64,
    /// Output directory; the command line may override it.
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub task: Task,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Task {
    Solve(SolveTask),
    Sweep(SweepTask),
    Extract(ExtractTask),
    Triangular(TriangularTask),
    Checks(ChecksTask),
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::Solve(_) => "solve",
            Task::Sweep(_) => "sweep",
            Task::Extract(_) => "extract",
            Task::Triangular(_) => "triangular",
            Task::Checks(_) => "checks",
        }
    }
}

/// Catalog fluxes `f(t, x, ω)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FluxSpec {
    /// `scale · g(ω)` with `g` from the smooth catalog.
    Smooth {
        name: String,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `f_l` left of `γ(t) = gamma_x0 + gamma_speed · t`, `f_r` right of it.
    Interface {
        left: String,
        right: String,
        #[serde(default = "one")]
        left_scale: f64,
        #[serde(default = "one")]
        right_scale: f64,
        #[serde(default)]
        gamma_x0: f64,
        #[serde(default)]
        gamma_speed: f64,
    },
    /// `F(v(t, x), ω)` with a closed-form coefficient.
    Composite {
        function: String,
        coefficient: CoefficientSpec,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSpec {
    Constant {
        value: f64,
    },
    Riemann {
        left: f64,
        right: f64,
        x0: f64,
        speed: f64,
    },
}

impl FluxSpec {
    pub fn build(&self, t_end: f64) -> Result<FluxField, ScenarioError> {
        Ok(match self {
            FluxSpec::Smooth { name, scale } => {
                FluxField::homogeneous(SmoothFlux::from_catalog(name)?.scaled(*scale))
            }
            FluxSpec::Interface {
                left,
                right,
                left_scale,
                right_scale,
                gamma_x0,
                gamma_speed,
            } => self::interface(
                left,
                right,
                *left_scale,
                *right_scale,
                *gamma_x0,
                *gamma_speed,
                t_end,
            )?
            .into_field(),
            FluxSpec::Composite {
                function,
                coefficient,
            } => {
                let f = TwoArgFlux::from_catalog(function)?;
                match *coefficient {
                    CoefficientSpec::Constant { value } => {
                        CompositeFlux::new(f, Arc::new(ConstantCoefficient(value))).into_field()
                    }
                    CoefficientSpec::Riemann {
                        left,
                        right,
                        x0,
                        speed,
                    } => CompositeFlux::new(
                        f,
                        Arc::new(RiemannCoefficient {
                            left,
                            right,
                            x0,
                            speed,
                        }),
                    )
                    .into_field(),
                }
            }
        })
    }

    /// The interface flux itself, for the moving-frame consistency check.
    pub fn interface(&self, t_end: f64) -> Result<Option<InterfaceFlux>, ScenarioError> {
        match self {
            FluxSpec::Interface {
                left,
                right,
                left_scale,
                right_scale,
                gamma_x0,
                gamma_speed,
            } => Ok(Some(interface(
                left,
                right,
                *left_scale,
                *right_scale,
                *gamma_x0,
                *gamma_speed,
                t_end,
            )?)),
            _ => Ok(None),
        }
    }
}

fn interface(
    left: &str,
    right: &str,
    left_scale: f64,
    right_scale: f64,
    x0: f64,
    speed: f64,
    t_end: f64,
) -> Result<InterfaceFlux, ScenarioError> {
    let gamma = if speed == 0.0 {
        Curve::constant(x0)
    } else {
        Curve::linear(0.0, t_end, x0, speed)
    };
    Ok(InterfaceFlux::new(
        SmoothFlux::from_catalog(left)?.scaled(left_scale),
        SmoothFlux::from_catalog(right)?.scaled(right_scale),
        gamma,
    )?)
}

/// A smooth flux `g` of the hyperbolic equation on a state range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarFluxSpec {
    pub name: String,
    pub range: [f64; 2],
}

impl ScalarFluxSpec {
    pub fn build(&self) -> Result<ScalarFlux, ScenarioError> {
        Ok(ScalarFlux::classify(
            SmoothFlux::from_catalog(&self.name)?,
            (self.range[0], self.range[1]),
        )?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub cells: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid1D, ScenarioError> {
        Ok(Grid1D::new(self.x_min, self.x_max, self.cells)?)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Fv,
    Mild,
    Both,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveChecks {
    /// Bound on `max |mass + outflow − mass₀| / ‖u0‖₁` for the finite-volume run.
    pub mass_drift: Option<f64>,
    /// Bound on the L¹ error against the exact solution, when one is known.
    #[serde(default)]
    pub reference_l1: Option<f64>,
    /// Bound on the sup error against the exact solution, when one is known.
    #[serde(default)]
    pub reference_sup: Option<f64>,
    /// Bound on the L¹ distance between the two solvers at `T`.
    #[serde(default)]
    pub cross_solver_l1: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveTask {
    pub flux: FluxSpec,
    pub data: Profile,
    pub grid: GridSpec,
    pub epsilon: f64,
    pub t_end: f64,
    #[serde(default)]
    pub solver: SolverKind,
    #[serde(default = "samples_default")]
    pub samples: usize,
    #[serde(default = "half")]
    pub cfl: f64,
    #[serde(default)]
    pub checks: SolveChecks,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepTask {
    pub flux: FluxSpec,
    pub data: Profile,
    pub window: [f64; 2],
    pub schedule: Vec<f64>,
    pub t_end: f64,
    #[serde(default = "dx_per_eps_default")]
    pub dx_per_eps: f64,
    #[serde(default = "samples_default")]
    pub samples: usize,
    #[serde(default = "half")]
    pub cfl: f64,
    #[serde(default = "cauchy_default")]
    pub cauchy_ratio: f64,
    #[serde(default)]
    pub pad: Option<f64>,
    /// Window for the entropy-dissipation diagnostic.
    #[serde(default)]
    pub dissipation_window: Option<Window>,
    /// Bound on dissipation relative to the largest-ε member.
    #[serde(default)]
    pub dissipation_factor: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperbolicMethod {
    /// Front tracking for step data on lattice nodes, Godunov otherwise.
    #[default]
    Auto,
    FrontTracking,
    Godunov,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractTask {
    pub g: ScalarFluxSpec,
    pub data: Profile,
    pub t_end: f64,
    pub eps_reg: f64,
    pub window: [f64; 2],
    #[serde(default)]
    pub method: HyperbolicMethod,
    #[serde(default = "pl_default")]
    pub pl_segments: usize,
    #[serde(default = "godunov_dx_default")]
    pub godunov_dx: f64,
    /// Times at which the Oleinik inequality is checked.
    #[serde(default)]
    pub oleinik_times: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangularTask {
    pub g: ScalarFluxSpec,
    /// Two-argument catalog function `F(α, ω)`.
    pub function: String,
    pub v0: Profile,
    pub u0: Profile,
    pub schedule: Vec<f64>,
    pub t_end: f64,
    pub eps_reg: f64,
    pub window: [f64; 2],
    #[serde(default = "pl_default")]
    pub pl_segments: usize,
    #[serde(default = "godunov_dx_default")]
    pub godunov_dx: f64,
    #[serde(default = "dx_per_eps_default")]
    pub dx_per_eps: f64,
    #[serde(default = "samples_default")]
    pub samples: usize,
    #[serde(default = "half")]
    pub cfl: f64,
    #[serde(default = "cauchy_default")]
    pub cauchy_ratio: f64,
    #[serde(default)]
    pub pad: Option<f64>,
    /// Bound on each weak residual of the smallest-ε member.
    #[serde(default)]
    pub weak_tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksTask {
    pub flux: FluxSpec,
    /// A flux agreeing with `flux` on `x < 0`, for the finite-speed check.
    #[serde(default)]
    pub paired_flux: Option<FluxSpec>,
    pub data: Profile,
    pub grid: GridSpec,
    pub epsilon: f64,
    pub t_end: f64,
    #[serde(default = "samples_default")]
    pub samples: usize,
    #[serde(default = "half")]
    pub cfl: f64,
    /// Tail check at `x0` with `δ0 = delta_factor √(τ ε)`.
    #[serde(default)]
    pub x0: f64,
    #[serde(default = "four")]
    pub delta_factor: f64,
    /// Finite-speed check with `ξ = xi_factor √(t ε)`.
    #[serde(default = "four")]
    pub xi_factor: f64,
    #[serde(default)]
    pub mass_drift: Option<f64>,
    /// Random ordered data pairs for the comparison and contraction check.
    #[serde(default)]
    pub ordered_pairs: usize,
    /// Random draws for the Jensen functional.
    #[serde(default)]
    pub jensen_draws: usize,
    #[serde(default)]
    pub dissipation_window: Option<Window>,
}

/// One viscous problem underlying a scenario.
#[derive(Clone, Debug)]
pub struct ViscousProblem {
    pub label: String,
    pub flux: FluxField,
    pub data: Profile,
    pub grid: Grid1D,
    pub epsilon: f64,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let c: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_path(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Checks that numeric fields are in range and tolerances are positive.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |what: &str| Err(ScenarioError::Validation(what.to_string()));
        let pos = |x: f64| x > 0.0 && x.is_finite();
        let tol = |t: Option<f64>| t.is_none_or(pos);
        let schedule_ok = |s: &[f64]| !s.is_empty() && s.iter().all(|&e| pos(e));
        let window_ok = |w: [f64; 2]| w[0].is_finite() && w[1] > w[0] && w[1].is_finite();
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad("name must be a nonempty plain file name");
        }
        match &self.task {
            Task::Solve(s) => {
                if !(pos(s.epsilon) && pos(s.t_end) && pos(s.cfl)) || s.samples == 0 {
                    return bad("epsilon, t_end, cfl and samples must be positive");
                }
                let c = &s.checks;
                if !(tol(c.mass_drift)
                    && tol(c.reference_l1)
                    && tol(c.reference_sup)
                    && tol(c.cross_solver_l1))
                {
                    return bad("tolerances must be positive");
                }
            }
            Task::Sweep(s) => {
                if !(schedule_ok(&s.schedule) && pos(s.t_end) && pos(s.dx_per_eps) && pos(s.cfl))
                    || !window_ok(s.window)
                    || !(s.cauchy_ratio > 0.0 && s.cauchy_ratio <= 1.0)
                    || !tol(s.dissipation_factor)
                {
                    return bad("sweep needs a positive schedule, horizon, window and tolerances");
                }
            }
            Task::Extract(e) => {
                if !(pos(e.t_end) && pos(e.eps_reg) && pos(e.godunov_dx)) || !window_ok(e.window) {
                    return bad("extract needs positive t_end, eps_reg, godunov_dx and a window");
                }
            }
            Task::Triangular(t) => {
                if !(schedule_ok(&t.schedule)
                    && pos(t.t_end)
                    && pos(t.eps_reg)
                    && pos(t.godunov_dx))
                    || !window_ok(t.window)
                    || !tol(t.weak_tol)
                {
                    return bad("triangular needs a positive schedule, horizon, budget and window");
                }
            }
            Task::Checks(c) => {
                if !(pos(c.epsilon) && pos(c.t_end) && pos(c.cfl))
                    || !tol(c.mass_drift)
                    || !(c.delta_factor >= 0.0 && c.xi_factor >= 0.0)
                {
                    return bad("checks need positive epsilon, t_end, cfl and tolerances");
                }
            }
        }
        Ok(())
    }

    /// The viscous problems a scenario solves, at the finest resolution it uses. Pure
    /// hyperbolic scenarios contribute the viscous problem for `g` with ε = `eps_reg / 4` on
    /// the padded window.
    pub fn viscous_problems(&self) -> Result<Vec<ViscousProblem>, ScenarioError> {
        let named = |label: &str, flux, data: &Profile, grid, epsilon| ViscousProblem {
            label: format!("{}/{label}", self.name),
            flux,
            data: data.clone(),
            grid,
            epsilon,
        };
        Ok(match &self.task {
            Task::Solve(s) => vec![named(
                "u",
                s.flux.build(s.t_end)?,
                &s.data,
                s.grid.build()?,
                s.epsilon,
            )],
            Task::Sweep(s) => {
                let flux = s.flux.build(s.t_end)?;
                let eps = *s.schedule.last().unwrap_or(&1.0);
                let grid = padded_grid(
                    s.window,
                    s.pad,
                    flux.lip(),
                    s.t_end,
                    s.schedule[0],
                    eps * s.dx_per_eps,
                )?;
                vec![named("finest", flux, &s.data, grid, eps)]
            }
            Task::Extract(e) => {
                let g = e.g.build()?;
                let flux = FluxField::homogeneous(g.flux().clone());
                let eps = 0.25 * e.eps_reg;
                let grid = padded_grid(e.window, None, flux.lip(), e.t_end, eps, eps / 8.0)?;
                vec![named("viscous_g", flux, &e.data, grid, eps)]
            }
            Task::Triangular(t) => {
                let sc = run::triangular_scenario(t, None)?;
                let (v, _) = crate::triangular::solve_v_component(&sc)?;
                let flux = CompositeFlux::new(sc.big_f.clone(), Arc::new(v)).into_field();
                let eps = *t.schedule.last().unwrap_or(&1.0);
                let lip = sc.big_f.lip(t.g.range[0], t.g.range[1]);
                let grid = padded_grid(
                    t.window,
                    t.pad,
                    lip,
                    t.t_end,
                    t.schedule[0],
                    eps * t.dx_per_eps,
                )?;
                vec![named("finest", flux, &t.u0, grid, eps)]
            }
            Task::Checks(c) => {
                let grid = c.grid.build()?;
                let mut v = vec![named("u", c.flux.build(c.t_end)?, &c.data, grid, c.epsilon)];
                if let Some(p) = &c.paired_flux {
                    v.push(named("u_hat", p.build(c.t_end)?, &c.data, grid, c.epsilon));
                }
                v
            }
        })
    }
}

/// The window padded by `L·T + 10√(ε_max T)` with cell size at most `dx`.
fn padded_grid(
    window: [f64; 2],
    pad: Option<f64>,
    lip: f64,
    t_end: f64,
    eps_max: f64,
    dx: f64,
) -> Result<Grid1D, ScenarioError> {
    let pad = pad.unwrap_or(lip * t_end + 10.0 * (eps_max * t_end).sqrt());
    let (lo, hi) = (window[0] - pad, window[1] + pad);
    let n = (((hi - lo) / dx) - 1e-9).ceil().max(1.0) as usize;
    Ok(Grid1D::new(lo, hi, n)?)
}

/// The scenario documents shipped with the crate, by file name.
pub fn shipped() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "heat_kernel.json",
            include_str!("../../scenarios/heat_kernel.json"),
        ),
        (
            "burgers_wave.json",
            include_str!("../../scenarios/burgers_wave.json"),
        ),
        (
            "interface_sweep.json",
            include_str!("../../scenarios/interface_sweep.json"),
        ),
        (
            "moving_interface.json",
            include_str!("../../scenarios/moving_interface.json"),
        ),
        (
            "burgers_extract.json",
            include_str!("../../scenarios/burgers_extract.json"),
        ),
        (
            "burgers_oleinik.json",
            include_str!("../../scenarios/burgers_oleinik.json"),
        ),
        (
            "triangular.json",
            include_str!("../../scenarios/triangular.json"),
        ),
        (
            "paired_checks.json",
            include_str!("../../scenarios/paired_checks.json"),
        ),
    ]
}

/// Parsed shipped scenarios.
pub fn shipped_configs() -> Result<Vec<ScenarioConfig>, ScenarioError> {
    shipped()
        .into_iter()
        .map(|(file, text)| {
            ScenarioConfig::from_json(text)
                .map_err(|e| ScenarioError::Validation(format!("{file}: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_named() {
        let text = r#"{"name": "x", "task": {"kind": "solve",
            "flux": {"kind": "smooth", "name": "burgers"},
            "data": {"kind": "riemann", "left": 1.0, "right": 0.0, "x0": 0.0},
            "grid": {"x_min": -1.0, "x_max": 1.0, "cells": 10},
            "epsilonn": 0.1, "epsilon": 0.1, "t_end": 1.0}}"#;
        match ScenarioConfig::from_json(text) {
            Err(ScenarioError::Parse(m)) => assert!(m.contains("epsilonn"), "{m}"),
            other => panic!("{other:?}"),
        }
        let nested = text.replace(r#""name": "burgers""#, r#""name": "burgers", "scal": 2"#);
        match ScenarioConfig::from_json(&nested) {
            Err(ScenarioError::Parse(m)) => assert!(m.contains("scal"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_tolerance_is_rejected() {
        let text = r#"{"name": "x", "task": {"kind": "solve",
            "flux": {"kind": "smooth", "name": "burgers"},
            "data": {"kind": "riemann", "left": 1.0, "right": 0.0, "x0": 0.0},
            "grid": {"x_min": -1.0, "x_max": 1.0, "cells": 10},
            "epsilon": 0.1, "t_end": 1.0, "checks": {"mass_drift": -1.0}}}"#;
        assert!(matches!(
            ScenarioConfig::from_json(text),
            Err(ScenarioError::Validation(_))
        ));
    }

    #[test]
    fn shipped_scenarios_parse_and_round_trip() {
        for c in shipped_configs().unwrap() {
            let again: ScenarioConfig =
                serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
            assert_eq!(again, c);
        }
    }
}
