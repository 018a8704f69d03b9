use serde::{Deserialize, Serialize};

use super::VvError;
use crate::flux_model::FluxField;
use crate::numerics::{bump, bump_derivative};
use crate::parabolic::ViscousSolution;

/// Tensor bump `φ(t, x) = b((t − tc)/rt) · b((x − xc)/rx)` with `b` scaled to peak 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub tc: f64,
    pub rt: f64,
    pub xc: f64,
    pub rx: f64,
}

const E: f64 = std::f64::consts::E;

impl TestFunction {
    /// Five bumps inside `[0, T] × [x_min, x_max]`: a central one, two shifted in space and
    /// two shifted in time.
    pub fn catalog(t_end: f64, x_min: f64, x_max: f64) -> Vec<TestFunction> {
        let (w, mid) = (x_max - x_min, 0.5 * (x_min + x_max));
        let (rt, rx) = (0.25 * t_end, w / 6.0);
        [
            (0.5, 0.0),
            (0.5, -0.25),
            (0.5, 0.25),
            (0.25, 0.0),
            (0.75, 0.0),
        ]
        .iter()
        .map(|&(a, b)| TestFunction {
            tc: a * t_end,
            rt,
            xc: mid + b * w,
            rx,
        })
        .collect()
    }

    pub fn phi(&self, t: f64, x: f64) -> f64 {
        E * E * bump((t - self.tc) / self.rt) * bump((x - self.xc) / self.rx)
    }

    pub fn phi_t(&self, t: f64, x: f64) -> f64 {
        E * E * bump_derivative((t - self.tc) / self.rt) / self.rt * bump((x - self.xc) / self.rx)
    }

    pub fn phi_x(&self, t: f64, x: f64) -> f64 {
        E * E * bump((t - self.tc) / self.rt) * bump_derivative((x - self.xc) / self.rx) / self.rx
    }
}

/// `R(φ) = ∬ (u φ_t + f(t, x, u) φ_x) + ∫ u0 φ(0, ·)` with the midpoint rule over cells and
/// the trapezoid rule over stored times.
///
/// Each `φ` must vanish before the last stored time and inside the grid; support may start
/// before `t = 0`, in which case the initial term contributes.
pub fn weak_residual(
    sol: &ViscousSolution,
    flux: &FluxField,
    tests: &[TestFunction],
) -> Result<Vec<f64>, VvError> {
    let g = &sol.grid;
    let t_end = sol.times.last().copied().unwrap_or(0.0);
    let xs = g.centers();
    let dx = g.dx();
    tests
        .iter()
        .map(|phi| {
            if !(phi.rt > 0.0 && phi.rx > 0.0)
                || phi.tc + phi.rt > t_end * (1.0 + 1e-12)
                || phi.xc - phi.rx < g.x_min()
                || phi.xc + phi.rx > g.x_max()
            {
                return Err(VvError::InvalidInput(format!(
                    "test function {phi:?} is not supported inside the domain"
                )));
            }
            let rate = |k: usize| -> f64 {
                let t = sol.times[k];
                sol.profiles[k]
                    .iter()
                    .zip(&xs)
                    .map(|(&u, &x)| u * phi.phi_t(t, x) + flux.value(t, x, u) * phi.phi_x(t, x))
                    .sum::<f64>()
                    * dx
            };
            let mut r = 0.0;
            let mut prev = rate(0);
            for k in 1..sol.times.len() {
                let cur = rate(k);
                r += 0.5 * (sol.times[k] - sol.times[k - 1]) * (prev + cur);
                prev = cur;
            }
            let initial: f64 = sol.profiles[0]
                .iter()
                .zip(&xs)
                .map(|(&u, &x)| u * phi.phi(sol.times[0], x))
                .sum::<f64>()
                * dx;
            Ok(r + initial)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux_model::SmoothFlux;
    use crate::parabolic::{Diagnostics, Grid1D};

    /// Sharp shock of `ω²/2` from 1 to 0 moving at `speed`.
    fn shock(n: usize, speed: f64) -> ViscousSolution {
        let grid = Grid1D::new(-1.0, 2.0, n).unwrap();
        let times: Vec<f64> = (0..=200).map(|k| k as f64 / 200.0).collect();
        let profiles = times
            .iter()
            .map(|&t| {
                (0..n)
                    .map(|j| {
                        // exact cell average
                        let (a, b) = (grid.edge(j), grid.edge(j + 1));
                        ((speed * t).clamp(a, b) - a) / (b - a)
                    })
                    .collect()
            })
            .collect();
        ViscousSolution {
            grid,
            epsilon: 0.0,
            times,
            profiles,
            diagnostics: Diagnostics::default(),
        }
    }

    #[test]
    fn catalog_fits_the_domain() {
        let c = TestFunction::catalog(1.0, -1.0, 2.0);
        assert_eq!(c.len(), 5);
        for p in &c {
            assert!(p.tc - p.rt >= 0.0 && p.tc + p.rt <= 1.0);
            assert!(p.xc - p.rx >= -1.0 && p.xc + p.rx <= 2.0);
            assert!((p.phi(p.tc, p.xc) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_state_cancels() {
        let f = FluxField::homogeneous(SmoothFlux::burgers());
        let mut s = shock(300, 0.5);
        for p in &mut s.profiles {
            p.iter_mut().for_each(|v| *v = 0.7);
        }
        for r in weak_residual(&s, &f, &TestFunction::catalog(1.0, -1.0, 2.0)).unwrap() {
            assert!(r.abs() < 1e-12, "{r}");
        }
    }

    #[test]
    fn shock_speed_decides_the_residual() {
        let f = FluxField::homogeneous(SmoothFlux::burgers());
        let phi = [TestFunction {
            tc: 0.5,
            rt: 0.4,
            xc: 0.25,
            rx: 0.5,
        }];
        let rh: Vec<f64> = [150, 300, 600]
            .iter()
            .map(|&n| weak_residual(&shock(n, 0.5), &f, &phi).unwrap()[0].abs())
            .collect();
        assert!(rh[2] < 1e-3 && rh[2] <= rh[0], "{rh:?}");
        let wrong: Vec<f64> = [150, 300, 600]
            .iter()
            .map(|&n| weak_residual(&shock(n, 0.8), &f, &phi).unwrap()[0].abs())
            .collect();
        assert!(wrong.iter().all(|&r| r > 0.02), "{wrong:?}");
        let outside = TestFunction { rx: 2.0, ..phi[0] };
        assert!(weak_residual(&shock(100, 0.5), &f, &[outside]).is_err());
    }
}
