//! The triangular system `u_t + F(v, u)_x = ε u_xx`, `v_t + g(v)_x = 0`: `v` is solved
//! first, then `u` is swept over ε against the composite flux `F(v(t, x), ω)`.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::flux_model::{CoefficientField, CompositeFlux, FluxError, FluxField, TwoArgFlux};
use crate::hyperbolic::{
    extract_regulated, solve_front_tracking, solve_godunov, ConvexityClass, EntropySolution,
    Extraction, FrontTrackingParams, GodunovParams, HyperbolicError, PiecewiseLinearFlux,
    ScalarFlux,
};
use crate::parabolic::{Grid1D, Profile};
use crate::regulated::{
    sup_distance, validate_field, Rectangle, RegulatedError, SampleGrid, ValidationReport,
};
use crate::vvlimit::{
    eps_sweep, weak_residual, EpsSequenceReport, SweepPolicy, TestFunction, VvError,
};

#[derive(Debug, Error)]
pub enum TriangularError {
    #[error("invalid scenario: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Flux(#[from] FluxError),
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
    #[error(transparent)]
    Regulated(#[from] RegulatedError),
    #[error(transparent)]
    Sweep(#[from] VvError),
}

#[derive(Clone, Debug)]
pub struct TriangularScenario {
    pub g: ScalarFlux,
    pub big_f: TwoArgFlux,
    pub v0: Profile,
    /// Values in `[0, 1]`.
    pub u0: Profile,
    pub schedule: Vec<f64>,
    pub t_end: f64,
    /// Budget of the regulated extraction of `v`.
    pub eps_reg: f64,
    /// Evaluation window and refinement rule of the `u` sweep.
    pub policy: SweepPolicy,
    /// Segments of the piecewise-linear flux used by front tracking.
    pub pl_segments: usize,
    /// Cell size of the Godunov fallback.
    pub godunov_dx: f64,
    /// Test functions for the weak residual; `None` uses the catalog on the window.
    pub tests: Option<Vec<TestFunction>>,
}

/// How `v` was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VMethod {
    FrontTracking,
    Godunov,
}

/// Evidence that `v` is regulated on the window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub validation: ValidationReport,
    pub uncovered_time: f64,
    pub sup_distance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct TriangularResult {
    pub v: EntropySolution,
    pub v_method: VMethod,
    pub extraction: Option<Extraction>,
    pub certificate: Option<Certificate>,
    /// Why no extraction was attempted.
    pub extraction_skipped: Option<String>,
    pub sweep: EpsSequenceReport,
    pub tests: Vec<TestFunction>,
    /// Weak residual of the smallest-ε member for each test function.
    pub weak_residuals: Vec<f64>,
}

impl TriangularResult {
    /// Whether the flux is known to fall under the regulated theory; `None` when unknown.
    pub fn class_f_membership(&self) -> Option<bool> {
        match (&self.certificate, self.sweep.cauchy_pass) {
            (Some(c), Some(cauchy)) => Some(c.passed && cauchy),
            _ => None,
        }
    }
}

/// Entropy solution of `v_t + g(v)_x = 0`: front tracking when `g` is uniformly convex and
/// `v0` is a step function with values on the flux lattice, Godunov on `domain` otherwise.
/// `prefer` forces a method; forcing front tracking on unsuitable data is an error.
pub fn solve_entropy(
    g: &ScalarFlux,
    v0: &Profile,
    t_end: f64,
    domain: (f64, f64),
    pl_segments: usize,
    godunov_dx: f64,
    prefer: Option<VMethod>,
) -> Result<(EntropySolution, VMethod), TriangularError> {
    let steps = match v0 {
        Profile::Riemann { left, right, .. } => Some(vec![*left, *right]),
        Profile::Steps { values, .. } => Some(values.clone()),
        _ => None,
    };
    if prefer != Some(VMethod::Godunov) {
        if let (Some(values), ConvexityClass::UniformlyConvex) = (&steps, g.class()) {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            // a constant datum still needs a nondegenerate lattice
            let hi = if hi > lo { hi } else { lo + 1.0 };
            let pl = PiecewiseLinearFlux::interpolate(g, lo, hi, pl_segments.max(1))?;
            if values.iter().all(|&v| pl.node_index(v).is_some()) {
                let v = solve_front_tracking(g, &pl, v0, t_end, &FrontTrackingParams::default())?;
                return Ok((v, VMethod::FrontTracking));
            }
            log::info!("v0 values are not lattice nodes; using Godunov");
        }
        if prefer == Some(VMethod::FrontTracking) {
            return Err(TriangularError::InvalidInput(
                "front tracking needs a uniformly convex flux and step data on lattice nodes"
                    .into(),
            ));
        }
    }
    if !(godunov_dx > 0.0) {
        return Err(TriangularError::InvalidInput(
            "Godunov cell size must be positive".into(),
        ));
    }
    let (lo, hi) = domain;
    let n = (((hi - lo) / godunov_dx) - 1e-9).ceil().max(1.0) as usize;
    let grid = Grid1D::new(lo, hi, n).map_err(|e| TriangularError::InvalidInput(e.to_string()))?;
    let v = solve_godunov(
        g,
        &v0.cell_averages(&grid),
        t_end,
        &grid,
        &GodunovParams::default(),
    )?;
    Ok((v, VMethod::Godunov))
}

/// Extracts a regulated field with budget `eps` and checks it: valid structure, uncovered
/// time at most `eps`, sup distance to `v` at most `eps` on a 200×200 lattice.
pub fn certify(
    v: &EntropySolution,
    eps: f64,
    rect: Rectangle,
) -> Result<(Extraction, Certificate), TriangularError> {
    let e = extract_regulated(v, eps, rect)?;
    let validation = validate_field(&e.field);
    let d = sup_distance(
        &e.field,
        &|t, x| v.value(t, x),
        SampleGrid { nt: 200, nx: 200 },
    )?;
    let uncovered_time = e.field.uncovered_time();
    let passed = validation.passed && uncovered_time <= eps && d.max() <= eps;
    let c = Certificate {
        validation,
        uncovered_time,
        sup_distance: d.max(),
        passed,
    };
    Ok((e, c))
}

/// Padding of the `u` window: `Lip(F)·T + 10√(ε_max T)` unless the policy fixes it.
fn u_pad(sc: &TriangularScenario) -> f64 {
    let eps_max = sc.schedule.first().copied().unwrap_or(0.0);
    let (glo, ghi) = sc.g.range();
    sc.policy
        .pad
        .unwrap_or(sc.big_f.lip(glo, ghi) * sc.t_end + 10.0 * (eps_max * sc.t_end).sqrt())
}

/// The `v` component alone, on a domain reaching every point the `u` sweep evaluates.
pub fn solve_v_component(
    sc: &TriangularScenario,
) -> Result<(EntropySolution, VMethod), TriangularError> {
    let (x_min, x_max) = sc.policy.window;
    let (glo, ghi) = sc.g.range();
    let reach = u_pad(sc) + sc.g.max_speed(glo, ghi) * sc.t_end + 1.0;
    solve_entropy(
        &sc.g,
        &sc.v0,
        sc.t_end,
        (x_min - reach, x_max + reach),
        sc.pl_segments,
        sc.godunov_dx,
        None,
    )
}

/// Solves `v`, certifies its regulated structure when `g` is uniformly convex, and sweeps `u`
/// against `F(v, ·)` evaluated from the solution itself.
pub fn solve_triangular(sc: &TriangularScenario) -> Result<TriangularResult, TriangularError> {
    if !(sc.t_end > 0.0) || !(sc.eps_reg > 0.0) || !(sc.godunov_dx > 0.0) {
        return Err(TriangularError::InvalidInput(
            "T, ε_reg and the Godunov cell size must be positive".into(),
        ));
    }
    sc.u0
        .validate()
        .map_err(|e| TriangularError::InvalidInput(e.to_string()))?;
    sc.v0
        .validate()
        .map_err(|e| TriangularError::InvalidInput(e.to_string()))?;
    let (x_min, x_max) = sc.policy.window;
    let pad = u_pad(sc);
    let (v, v_method) = solve_v_component(sc)?;

    let u_domain = Grid1D::new(x_min - pad, x_max + pad, 4096)
        .map_err(|e| TriangularError::InvalidInput(e.to_string()))?;
    if sc
        .u0
        .cell_averages(&u_domain)
        .iter()
        .any(|&u| !(-1e-12..=1.0 + 1e-12).contains(&u))
    {
        return Err(TriangularError::InvalidInput(
            "u0 must take values in [0, 1]".into(),
        ));
    }
    sc.big_f.endpoint_value(&v.sample_values())?;

    let rect = Rectangle {
        t_max: sc.t_end,
        x_min,
        x_max,
    };
    let (extraction, certificate, extraction_skipped) = match sc.g.class() {
        ConvexityClass::UniformlyConvex => {
            let (e, c) = certify(&v, sc.eps_reg, rect)?;
            (Some(e), Some(c), None)
        }
        other => {
            let why = format!("no extraction for flux class {other:?}; class-F membership unknown");
            log::warn!("{why}");
            (None, None, Some(why))
        }
    };

    let field: FluxField = CompositeFlux::new(sc.big_f.clone(), Arc::new(v.clone())).into_field();
    let policy = SweepPolicy {
        pad: Some(pad),
        ..sc.policy.clone()
    };
    let sweep = eps_sweep(&field, &sc.u0, &sc.schedule, sc.t_end, &policy)?;
    let tests = sc
        .tests
        .clone()
        .unwrap_or_else(|| TestFunction::catalog(sc.t_end, x_min, x_max));
    let finest = &sweep.runs[sweep.runs.len() - 1].solution;
    let weak_residuals = weak_residual(finest, &field, &tests)?;
    Ok(TriangularResult {
        v,
        v_method,
        extraction,
        certificate,
        extraction_skipped,
        sweep,
        tests,
        weak_residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux_model::{InterfaceFlux, SmoothFlux};
    use crate::regulated::Curve;

    fn scenario(v0: Profile, schedule: Vec<f64>) -> TriangularScenario {
        let mut policy = SweepPolicy::new(-1.0, 1.5);
        policy.samples = 16;
        policy.pad = Some(2.5);
        TriangularScenario {
            g: ScalarFlux::burgers((0.0, 1.0)),
            big_f: TwoArgFlux::shifted_logistic(),
            v0,
            u0: Profile::Bump {
                center: 0.0,
                radius: 0.6,
                height: 0.8,
            },
            schedule,
            t_end: 1.0,
            eps_reg: 0.25,
            policy,
            pl_segments: 8,
            godunov_dx: 0.01,
            tests: None,
        }
    }

    #[test]
    fn constant_v_reduces_to_a_single_flux() {
        let alpha = 0.5;
        let sc = scenario(
            Profile::Riemann {
                left: alpha,
                right: alpha,
                x0: 0.0,
            },
            vec![0.1, 0.05],
        );
        let r = solve_triangular(&sc).unwrap();
        assert_eq!(r.v_method, VMethod::FrontTracking);
        let direct = eps_sweep(
            &sc.big_f.freeze(alpha),
            &sc.u0,
            &sc.schedule,
            sc.t_end,
            &sc.policy,
        )
        .unwrap();
        for (a, b) in r.sweep.runs.iter().zip(&direct.runs) {
            assert_eq!(a.solution.profiles, b.solution.profiles);
        }
        assert_eq!(r.sweep.pairwise_gaps, direct.pairwise_gaps);
    }

    #[test]
    fn shock_coefficient_matches_a_moving_interface() {
        let sc = scenario(
            Profile::Riemann {
                left: 1.0,
                right: 0.0,
                x0: 0.0,
            },
            vec![0.05],
        );
        let r = solve_triangular(&sc).unwrap();
        let c = r.certificate.as_ref().unwrap();
        assert!(c.passed, "{c:?}");
        let flux = InterfaceFlux::new(
            SmoothFlux::concave_quadratic().scaled(2.0),
            SmoothFlux::concave_quadratic(),
            Curve::linear(0.0, 1.0, 0.0, 0.5),
        )
        .unwrap()
        .into_field();
        let direct = eps_sweep(&flux, &sc.u0, &sc.schedule, sc.t_end, &sc.policy).unwrap();
        let (a, b) = (&r.sweep.runs[0].solution, &direct.runs[0].solution);
        let k = a.times.len() - 1;
        let d = a.l1_distance(b, k).unwrap();
        assert!(d <= 5.0 * a.grid.dx(), "d={d}");
    }

    #[test]
    fn concave_g_falls_back_to_godunov_without_extraction() {
        let mut sc = scenario(
            Profile::Riemann {
                left: 0.2,
                right: 0.9,
                x0: 0.0,
            },
            vec![0.1],
        );
        sc.g = ScalarFlux::classify(SmoothFlux::concave_quadratic(), (0.0, 1.0)).unwrap();
        let r = solve_triangular(&sc).unwrap();
        assert_eq!(r.v_method, VMethod::Godunov);
        assert!(r.extraction.is_none() && r.extraction_skipped.is_some());
        assert_eq!(r.class_f_membership(), None);
        assert_eq!(r.weak_residuals.len(), 5);
    }

    #[test]
    fn rejects_u0_outside_the_unit_interval() {
        let mut sc = scenario(
            Profile::Riemann {
                left: 1.0,
                right: 0.0,
                x0: 0.0,
            },
            vec![0.1],
        );
        sc.u0 = Profile::Riemann {
            left: 1.5,
            right: 0.0,
            x0: 0.0,
        };
        assert!(matches!(
            solve_triangular(&sc),
            Err(TriangularError::InvalidInput(_))
        ));
    }
}
