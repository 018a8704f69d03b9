use serde::Serialize;

use super::{integrate_profile, prefix_integral, VvError};
use crate::numerics::{heat_kernel_tail, integrate};
use crate::parabolic::ViscousSolution;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// `min (U♯ + η̄ + ∫η + slack − U)` over stored times and edges.
    pub worst_margin: f64,
    pub violations: usize,
    pub passed: bool,
}

/// Checks `U ≤ U♯ + η̄ + ∫₀ᵗ η + slack` at every stored time and cell edge. The hypothesis
/// linking the two fluxes through `η` is the caller's responsibility.
pub fn check_integrated_comparison(
    run: &ViscousSolution,
    run_sharp: &ViscousSolution,
    eta: &dyn Fn(f64) -> f64,
    eta_bar: f64,
    slack: f64,
) -> Result<ComparisonReport, VvError> {
    run.check_compatible(run_sharp)?;
    if run.epsilon != run_sharp.epsilon {
        return Err(VvError::InvalidInput("runs use different ε".into()));
    }
    let dx = run.grid.dx();
    let mut worst = f64::INFINITY;
    let mut violations = 0;
    for (k, &t) in run.times.iter().enumerate() {
        let budget = integrate(eta, 0.0, t, 1e-12)
            .ok_or_else(|| VvError::Quadrature(format!("∫η on [0, {t}]")))?;
        let u = integrate_profile(&run.profiles[k], dx);
        let v = integrate_profile(&run_sharp.profiles[k], dx);
        for (a, b) in u.iter().zip(&v) {
            let margin = b + eta_bar + budget + slack - a;
            worst = worst.min(margin);
            if margin < 0.0 {
                violations += 1;
            }
        }
    }
    Ok(ComparisonReport {
        worst_margin: worst,
        violations,
        passed: violations == 0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailReport {
    pub t0: f64,
    pub t: f64,
    /// `∫_{−∞}^{x0−δ0−L(t−t0)} u(t)`
    pub lhs: f64,
    /// `∫_{−∞}^{x0} u(t0)`
    pub initial_left_mass: f64,
    /// `‖u0‖₁ · ∫_{δ0/√((t−t0)ε)}^∞ G(1, y) dy`
    pub bound: f64,
    pub margin: f64,
    pub passed: bool,
}

fn l1_norm(run: &ViscousSolution) -> f64 {
    run.profiles[0].iter().map(|v| v.abs()).sum::<f64>() * run.grid.dx()
}

/// Mass that has crossed left of `x0 − δ0 − L(t−t0)` by time `t` versus the mass left of `x0`
/// at `t0` plus the Gaussian tail. `t0` and `t` snap to stored times; the grid is taken to
/// cover the support, so integrals start at its left edge.
pub fn check_tail_bound(
    run: &ViscousSolution,
    lip: f64,
    t0: f64,
    x0: f64,
    delta0: f64,
    t: f64,
) -> Result<TailReport, VvError> {
    if !(t > t0 && t0 >= 0.0) || !(delta0 >= 0.0) {
        return Err(VvError::InvalidInput(format!(
            "need t > t0 ≥ 0 and δ0 ≥ 0, got t={t}, t0={t0}, δ0={delta0}"
        )));
    }
    if run.profiles[0].iter().any(|&v| v < 0.0) {
        return Err(VvError::InvalidInput(
            "initial data must be nonnegative".into(),
        ));
    }
    let (k0, k) = (run.time_index(t0), run.time_index(t));
    let (t0, t) = (run.times[k0], run.times[k]);
    if k <= k0 {
        return Err(VvError::InvalidInput(
            "t and t0 snap to the same stored time".into(),
        ));
    }
    let tau = t - t0;
    let lhs = prefix_integral(&run.grid, &run.profiles[k], x0 - delta0 - lip * tau);
    let initial_left_mass = prefix_integral(&run.grid, &run.profiles[k0], x0);
    let bound = l1_norm(run) * heat_kernel_tail(delta0 / (tau * run.epsilon).sqrt());
    let margin = initial_left_mass + bound - lhs;
    Ok(TailReport {
        t0,
        t,
        lhs,
        initial_left_mass,
        bound,
        margin,
        passed: margin >= 0.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteSpeedReport {
    pub t: f64,
    /// `|∫_{−∞}^{−Lt−ξ} (u − û)|`
    pub lhs: f64,
    /// `4‖u0‖₁ · ∫_{ξ/√(tε)}^∞ G(1, y) dy`
    pub bound: f64,
    pub margin: f64,
    pub passed: bool,
}

/// Two runs whose fluxes agree for `x < 0` differ left of `−Lt − ξ` by at most a Gaussian
/// tail. `t` snaps to a stored time and must be positive.
pub fn check_finite_speed(
    run: &ViscousSolution,
    run_hat: &ViscousSolution,
    lip: f64,
    xi: f64,
    t: f64,
) -> Result<FiniteSpeedReport, VvError> {
    run.check_compatible(run_hat)?;
    if run.epsilon != run_hat.epsilon || run.profiles[0] != run_hat.profiles[0] {
        return Err(VvError::InvalidInput(
            "runs must share ε and initial data".into(),
        ));
    }
    if !(xi >= 0.0) {
        return Err(VvError::InvalidInput(format!(
            "ξ must be nonnegative, got {xi}"
        )));
    }
    let k = run.time_index(t);
    let t = run.times[k];
    if !(t > 0.0) {
        return Err(VvError::InvalidInput("t must be positive".into()));
    }
    let x = -lip * t - xi;
    let lhs = (prefix_integral(&run.grid, &run.profiles[k], x)
        - prefix_integral(&run_hat.grid, &run_hat.profiles[k], x))
    .abs();
    let bound = 4.0 * l1_norm(run) * heat_kernel_tail(xi / (t * run.epsilon).sqrt());
    let margin = bound - lhs;
    Ok(FiniteSpeedReport {
        t,
        lhs,
        bound,
        margin,
        passed: margin >= 0.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderReport {
    /// `max (u − v)` over stored times and cells.
    pub max_order_violation: f64,
    /// `‖u − v‖₁` per stored time.
    pub l1: Vec<f64>,
    /// Largest increase of `‖u − v‖₁` between consecutive stored times.
    pub max_l1_increase: f64,
    pub ordered: bool,
    pub contracting: bool,
}

/// For runs with `u0 ≤ v0`: `u ≤ v` at every stored time and `‖u − v‖₁` non-increasing, both
/// within `slack`.
pub fn check_order_and_contraction(
    run_u: &ViscousSolution,
    run_v: &ViscousSolution,
    slack: f64,
) -> Result<OrderReport, VvError> {
    run_u.check_compatible(run_v)?;
    let dx = run_u.grid.dx();
    let mut worst = f64::NEG_INFINITY;
    let mut l1 = Vec::with_capacity(run_u.times.len());
    for (p, q) in run_u.profiles.iter().zip(&run_v.profiles) {
        let mut d = 0.0;
        for (a, b) in p.iter().zip(q) {
            worst = worst.max(a - b);
            d += (a - b).abs();
        }
        l1.push(d * dx);
    }
    let max_l1_increase = l1
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(OrderReport {
        max_order_violation: worst,
        ordered: worst <= slack,
        contracting: !(max_l1_increase > slack),
        max_l1_increase,
        l1,
    })
}
