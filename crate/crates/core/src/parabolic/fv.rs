use super::{
    dissipation, mass, uniform_times, Diagnostics, Grid1D, ParabolicError, ViscousSolution,
};
use crate::flux_model::{FluxField, Side};
use crate::numerics::solve_tridiagonal;

#[derive(Clone, Debug, PartialEq)]
pub struct FvParams {
    /// `Δt = cfl · dx / L`; at most ½.
    pub cfl: f64,
    /// Number of stored intervals on `[0, T]`.
    pub samples: usize,
}

impl Default for FvParams {
    fn default() -> Self {
        Self {
            cfl: 0.5,
            samples: 64,
        }
    }
}

/// Local Lax–Friedrichs flux at the edge `x` between states `ul` and `ur`, evaluating the
/// flux one-sidedly.
#[inline]
fn llf(flux: &FluxField, t: f64, x: f64, ul: f64, ur: f64) -> f64 {
    let fl = flux.value_from(Side::Left, t, x, ul);
    let fr = flux.value_from(Side::Right, t, x, ur);
    let a = flux
        .d_omega_from(Side::Left, t, x, ul)
        .abs()
        .max(flux.d_omega_from(Side::Right, t, x, ur).abs());
    0.5 * (fl + fr) - 0.5 * a * (ur - ul)
}

/// Conservative splitting scheme: explicit local Lax–Friedrichs transport followed by an
/// implicit θ-scheme for diffusion, with zero-gradient ghost cells.
///
/// `θ = max(½, 1 − dx²/(2εΔt))`, which is Crank–Nicolson whenever `εΔt/dx² ≤ 1` and keeps
/// the diffusion step monotone otherwise. Time steps are shortened uniformly so that every
/// stored time is hit exactly.
pub fn solve_fv(
    flux: &FluxField,
    grid: &Grid1D,
    u0: &[f64],
    eps: f64,
    t_end: f64,
    params: &FvParams,
) -> Result<ViscousSolution, ParabolicError> {
    if !(params.cfl > 0.0 && params.cfl <= 0.5) {
        return Err(ParabolicError::Config(format!(
            "cfl must lie in (0, 1/2], got {}",
            params.cfl
        )));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(ParabolicError::InvalidParameter(format!(
            "viscosity must be nonnegative, got {eps}"
        )));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(ParabolicError::InvalidParameter(format!(
            "horizon must be positive, got {t_end}"
        )));
    }
    let n = grid.n_cells();
    if u0.len() != n || u0.iter().any(|v| !v.is_finite()) {
        return Err(ParabolicError::InvalidParameter(
            "initial data must be finite and match the grid".into(),
        ));
    }
    let dx = grid.dx();
    let lip = flux.lip();
    let dt_max = if lip > 0.0 {
        params.cfl * dx / lip
    } else {
        f64::INFINITY
    };
    let edges: Vec<f64> = (0..=n).map(|i| grid.edge(i)).collect();
    let times = uniform_times(t_end, params.samples);

    let mut u = u0.to_vec();
    let mut profiles = vec![u.clone()];
    let mut diag = Diagnostics {
        mass: vec![mass(&u, dx)],
        dissipation: vec![dissipation(&u, dx, eps)],
        outflow: vec![0.0],
        picard_iters: vec![0],
        ..Diagnostics::default()
    };
    let mut fluxes = vec![0.0; n + 1];
    let mut lower = vec![0.0; n];
    let mut diag_m = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut outflow = 0.0;
    let mut step = 0usize;
    let mut t = 0.0;

    for &t_next in &times[1..] {
        let span = t_next - t;
        let k = if dt_max.is_finite() {
            ((span / dt_max - 1e-9).ceil() as usize).max(1)
        } else {
            1
        };
        let dt = span / k as f64;
        let lam = dt / dx;
        let r = eps * dt / (dx * dx);
        let theta = if r > 0.0 {
            (1.0 - 0.5 / r).max(0.5)
        } else {
            0.5
        };
        if r > 0.0 {
            for j in 0..n {
                let left = if j > 0 { -theta * r } else { 0.0 };
                let right = if j + 1 < n { -theta * r } else { 0.0 };
                lower[j] = left;
                upper[j] = right;
                diag_m[j] = 1.0 - left - right;
            }
        }
        for _ in 0..k {
            let tn = t;
            fluxes[0] = llf(flux, tn, edges[0], u[0], u[0]);
            for i in 1..n {
                fluxes[i] = llf(flux, tn, edges[i], u[i - 1], u[i]);
            }
            fluxes[n] = llf(flux, tn, edges[n], u[n - 1], u[n - 1]);
            outflow += dt * (fluxes[n] - fluxes[0]);
            for j in 0..n {
                u[j] -= lam * (fluxes[j + 1] - fluxes[j]);
            }
            if r > 0.0 {
                // solve for the increment: the right-hand side telescopes exactly, so
                // roundoff in the mass scales with the update, not with u
                for j in 0..n {
                    let l = if j > 0 { u[j - 1] - u[j] } else { 0.0 };
                    let rr = if j + 1 < n { u[j + 1] - u[j] } else { 0.0 };
                    rhs[j] = r * (l + rr);
                }
                solve_tridiagonal(&lower, &diag_m, &upper, &mut rhs);
                for (v, d) in u.iter_mut().zip(&rhs) {
                    *v += d;
                }
            }
            step += 1;
            if u.iter().any(|v| !v.is_finite()) {
                return Err(ParabolicError::NumericalBlowup { step });
            }
            t += dt;
        }
        t = t_next;
        diag.mass.push(mass(&u, dx));
        diag.dissipation.push(dissipation(&u, dx, eps));
        diag.outflow.push(outflow);
        diag.picard_iters.push(0);
        profiles.push(u.clone());
    }
    diag.steps = step;

    Ok(ViscousSolution {
        grid: *grid,
        epsilon: eps,
        times,
        profiles,
        diagnostics: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux_model::{InterfaceFlux, SmoothFlux};
    use crate::parabolic::Profile;
    use proptest::prelude::*;

    fn burgers() -> FluxField {
        FluxField::homogeneous(SmoothFlux::burgers())
    }

    #[test]
    fn rejects_large_cfl() {
        let g = Grid1D::new(0.0, 1.0, 16).unwrap();
        let p = FvParams {
            cfl: 0.6,
            ..FvParams::default()
        };
        assert!(matches!(
            solve_fv(&burgers(), &g, &[0.0; 16], 0.1, 1.0, &p),
            Err(ParabolicError::Config(_))
        ));
    }

    #[test]
    fn constants_are_exact_solutions() {
        let g = Grid1D::new(-1.0, 1.0, 40).unwrap();
        let f = InterfaceFlux::stationary(
            SmoothFlux::concave_quadratic(),
            SmoothFlux::concave_quadratic().scaled(2.0),
        )
        .unwrap()
        .into_field();
        for c in [0.0, 1.0] {
            let s = solve_fv(&f, &g, &[c; 40], 0.05, 0.5, &FvParams::default()).unwrap();
            assert!(s.final_profile().iter().all(|&v| (v - c).abs() < 1e-14));
        }
    }

    #[test]
    fn burgers_shock_location() {
        // Riemann (1, 0): viscous shock centred at x = T/2
        let g = Grid1D::new(-2.0, 3.0, 1000).unwrap();
        let u0 = Profile::Riemann {
            left: 1.0,
            right: 0.0,
            x0: 0.0,
        }
        .cell_averages(&g);
        let eps = 0.02;
        let s = solve_fv(&burgers(), &g, &u0, eps, 1.0, &FvParams::default()).unwrap();
        let u = s.final_profile();
        let j = u.iter().position(|&v| v < 0.5).unwrap();
        let x = g.edge(j);
        assert!(
            (x - 0.5).abs() <= (eps * 1.0f64).sqrt() + 2.0 * g.dx(),
            "x={x}"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn ordered_data_stay_ordered(
            a in proptest::collection::vec(0.0f64..1.0, 8),
            b in proptest::collection::vec(0.0f64..1.0, 8),
        ) {
            let g = Grid1D::new(-1.0, 1.0, 64).unwrap();
            // zero near the left edge: Burgers speeds are nonnegative, so the inflow ghost
            // carries no difference into the window
            let a: Vec<f64> = (0..8).map(|k| if k < 2 { 0.0 } else { a[k] }).collect();
            let b: Vec<f64> = (0..8).map(|k| if k < 2 { 0.0 } else { b[k] }).collect();
            let lo: Vec<f64> = (0..64).map(|j| a[j / 8].min(b[j / 8])).collect();
            let hi: Vec<f64> = (0..64).map(|j| a[j / 8].max(b[j / 8])).collect();
            let p = FvParams { cfl: 0.5, samples: 8 };
            let s = solve_fv(&burgers(), &g, &lo, 0.01, 0.5, &p).unwrap();
            let r = solve_fv(&burgers(), &g, &hi, 0.01, 0.5, &p).unwrap();
            let mut prev = f64::INFINITY;
            for k in 0..s.times.len() {
                for (x, y) in s.profiles[k].iter().zip(&r.profiles[k]) {
                    prop_assert!(x <= y);
                }
                let d = s.l1_distance(&r, k).unwrap();
                prop_assert!(d <= prev + 1e-10);
                prev = d;
            }
        }
    }
}
