use std::sync::Arc;

use serde::Serialize;

use super::{Assumptions, FluxError, FluxField, FluxFunction};
use crate::numerics::{mollifier_nodes, FD_STEP};

const MOLLIFIER_POINTS: usize = 64;

struct Mollified {
    inner: FluxField,
    delta: f64,
    nodes: Vec<(f64, f64)>,
}

impl Mollified {
    fn convolve(&self, t: f64, x: f64, g: impl Fn(f64, f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for &(xi_t, w_t) in &self.nodes {
            let s = t - self.delta * xi_t;
            let mut row = 0.0;
            for &(xi_x, w_x) in &self.nodes {
                row += w_x * g(s, x - self.delta * xi_x);
            }
            acc += w_t * row;
        }
        acc
    }
}

impl FluxFunction for Mollified {
    fn value(&self, t: f64, x: f64, w: f64) -> f64 {
        self.convolve(t, x, |s, y| self.inner.value(s, y, w))
    }

    fn d_omega(&self, t: f64, x: f64, w: f64) -> f64 {
        self.convolve(t, x, |s, y| self.inner.d_omega(s, y, w))
    }

    fn d_omega_from(&self, _side: super::Side, t: f64, x: f64, w: f64) -> f64 {
        self.d_omega(t, x, w)
    }
}

/// Space-time mollification `f_δ = ρ_δ ⋆ f` in `(t, x)` with the normalized bump kernel.
pub fn mollify(flux: &FluxField, delta: f64) -> Result<FluxField, FluxError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(FluxError::InvalidParameter(format!(
            "mollification radius must be positive, got {delta}"
        )));
    }
    let a = flux.assumptions();
    let (lo, hi) = flux.state_range();
    Ok(FluxField::new(
        format!("mollified({}, {delta})", flux.name()),
        Arc::new(Mollified {
            inner: flux.clone(),
            delta,
            nodes: mollifier_nodes(MOLLIFIER_POINTS),
        }),
        flux.lip(),
    )
    .with_l1(flux.l1())
    .with_state_range(lo, hi)
    .with_assumptions(Assumptions {
        f1: a.f1,
        f2: a.f2,
        f3: false,
    }))
}

/// Tensor sample lattice in `(t, x, ω)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingPlan {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub states: Vec<f64>,
}

fn lattice(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

impl SamplingPlan {
    pub fn uniform(t: (f64, f64, usize), x: (f64, f64, usize), w: (f64, f64, usize)) -> Self {
        Self {
            times: lattice(t.0, t.1, t.2),
            positions: lattice(x.0, x.1, x.2),
            states: lattice(w.0, w.1, w.2),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty() || self.positions.is_empty() || self.states.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub lipschitz_estimate: f64,
    pub declared_lipschitz: f64,
    pub max_abs_at_zero: f64,
    pub max_x_variation_at_one: f64,
    pub lipschitz_ok: bool,
    pub f2_ok: bool,
    pub samples: usize,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.lipschitz_ok && self.f2_ok
    }
}

/// Empirical checks of the Lipschitz bound and of `f(t,x,0)=0`, `f(t,x,1)=h(t)`.
pub fn verify_assumptions(
    flux: &FluxField,
    plan: &SamplingPlan,
) -> Result<VerificationReport, FluxError> {
    if plan.is_empty() {
        return Err(FluxError::EmptyPlan);
    }
    let mut lip: f64 = 0.0;
    let mut at_zero: f64 = 0.0;
    let mut x_var: f64 = 0.0;
    let mut samples = 0;
    for &t in &plan.times {
        let h = flux.value(t, plan.positions[0], 1.0);
        for &x in &plan.positions {
            at_zero = at_zero.max(flux.value(t, x, 0.0).abs());
            x_var = x_var.max((flux.value(t, x, 1.0) - h).abs());
            for &w in &plan.states {
                let q = (flux.value(t, x, w + FD_STEP) - flux.value(t, x, w - FD_STEP))
                    / (2.0 * FD_STEP);
                lip = lip.max(q.abs());
                samples += 1;
            }
        }
    }
    Ok(VerificationReport {
        lipschitz_estimate: lip,
        declared_lipschitz: flux.lip(),
        max_abs_at_zero: at_zero,
        max_x_variation_at_one: x_var,
        lipschitz_ok: lip <= flux.lip() + 1e-6,
        f2_ok: at_zero <= 1e-12 && x_var <= 1e-12,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{CompositeFlux, RiemannCoefficient, SmoothFlux, TwoArgFlux};
    use super::*;
    use crate::flux_model::{ClosedFormCoefficient, Side};

    fn plan() -> SamplingPlan {
        SamplingPlan::uniform((0.0, 1.0, 5), (-1.0, 1.0, 21), (0.0, 1.0, 201))
    }

    #[test]
    fn constant_flux_unchanged() {
        let f = FluxField::homogeneous(SmoothFlux::concave_quadratic());
        let m = mollify(&f, 0.1).unwrap();
        for &w in &[0.0, 0.3, 0.8] {
            assert!((m.value(0.5, 0.2, w) - f.value(0.5, 0.2, w)).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_nonpositive_radius() {
        let f = FluxField::homogeneous(SmoothFlux::burgers());
        assert!(mollify(&f, 0.0).is_err());
        assert!(mollify(&f, -1.0).is_err());
    }

    #[test]
    fn step_coefficient_half_mass() {
        let v = RiemannCoefficient {
            left: 0.0,
            right: 1.0,
            x0: 0.0,
            speed: 0.0,
        };
        let f = CompositeFlux::new(TwoArgFlux::alpha_linear(), Arc::new(v)).into_field();
        let m = mollify(&f, 0.2).unwrap();
        for &w in &[0.25, 0.5, 1.0] {
            let expect = 0.5 * (0.0 * w + 1.0 * w);
            assert!((m.value(0.3, 0.0, w) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn f2_value_at_one_is_x_independent() {
        // f(t, x, 1) = sin t
        let coef = ClosedFormCoefficient::new(|t, x| if x > t { 2.0 } else { 0.5 }, (0.5, 2.0));
        let f = FluxField::new(
            "h(t)",
            Arc::new(TimeH {
                inner: CompositeFlux::new(TwoArgFlux::alpha_logistic(), Arc::new(coef)),
            }),
            3.0,
        );
        let m = mollify(&f, 0.1).unwrap();
        let h0 = m.value(0.4, -0.5, 1.0);
        for k in 0..11 {
            let x = -0.5 + 0.1 * k as f64;
            assert!((m.value(0.4, x, 1.0) - h0).abs() < 1e-12);
        }
        // ∫ρ_δ(t−s) sin(s) ds by the same midpoint nodes
        let hv: f64 = mollifier_nodes(64)
            .iter()
            .map(|&(xi, w)| w * (0.4 - 0.1 * xi).sin())
            .sum();
        assert!((h0 - hv).abs() < 1e-14);
    }

    struct TimeH {
        inner: CompositeFlux,
    }

    impl FluxFunction for TimeH {
        fn value(&self, t: f64, x: f64, w: f64) -> f64 {
            self.inner.value(t, x, w) + t.sin() * w
        }

        fn value_from(&self, side: Side, t: f64, x: f64, w: f64) -> f64 {
            self.inner.value_from(side, t, x, w) + t.sin() * w
        }
    }

    #[test]
    fn logistic_lipschitz_estimate() {
        let v = ClosedFormCoefficient::new(|_, x| (x + 1.0).clamp(0.0, 2.0), (0.0, 2.0));
        let f = CompositeFlux::new(TwoArgFlux::alpha_logistic(), Arc::new(v)).into_field();
        let r = verify_assumptions(&f, &plan()).unwrap();
        assert!((r.lipschitz_estimate - 2.0).abs() < 1e-8, "{r:?}");
        assert!(r.passed());
        assert_eq!(r.max_abs_at_zero, 0.0);
    }

    #[test]
    fn alpha_linear_fails_f2() {
        let v = ClosedFormCoefficient::new(|_, x| (x + 1.0).clamp(0.0, 2.0), (0.0, 2.0));
        let f = CompositeFlux::new(TwoArgFlux::alpha_linear(), Arc::new(v)).into_field();
        let r = verify_assumptions(&f, &plan()).unwrap();
        assert!(!r.f2_ok);
        assert!(r.max_x_variation_at_one > 1.0);
    }

    #[test]
    fn empty_plan_is_error() {
        let f = FluxField::homogeneous(SmoothFlux::burgers());
        let p = SamplingPlan {
            times: vec![],
            positions: vec![0.0],
            states: vec![0.0],
        };
        assert_eq!(verify_assumptions(&f, &p), Err(FluxError::EmptyPlan));
    }

    #[test]
    fn mollify_preserves_lipschitz() {
        let f = crate::flux_model::InterfaceFlux::stationary(
            SmoothFlux::concave_quadratic(),
            SmoothFlux::concave_quadratic().scaled(2.0),
        )
        .unwrap()
        .into_field();
        let p = SamplingPlan::uniform((0.0, 1.0, 3), (-0.3, 0.3, 13), (0.0, 1.0, 21));
        let a = verify_assumptions(&f, &p).unwrap();
        let b = verify_assumptions(&mollify(&f, 0.1).unwrap(), &p).unwrap();
        assert!(b.lipschitz_estimate <= a.lipschitz_estimate + 1e-8);
        assert!(b.f2_ok);
    }
}
