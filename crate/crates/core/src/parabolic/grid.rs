use libm::erf;
use serde::{Deserialize, Serialize};

use super::ParabolicError;
use crate::numerics::bump;

/// Uniform cell-centred grid on `[x_min, x_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
}

impl Grid1D {
    pub const MIN_CELLS: usize = 8;

    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self, ParabolicError> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(ParabolicError::InvalidParameter(format!(
                "grid needs x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_cells < Self::MIN_CELLS {
            return Err(ParabolicError::InvalidParameter(format!(
                "grid needs at least {} cells, got {n_cells}",
                Self::MIN_CELLS
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_cells,
        })
    }

    /// Grid on `[x_min, x_max]` with spacing at most `dx`.
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64) -> Result<Self, ParabolicError> {
        let n = ((x_max - x_min) / dx - 1e-9).ceil().max(1.0) as usize;
        Self::new(x_min, x_max, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    pub fn center(&self, j: usize) -> f64 {
        self.x_min + (j as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|j| self.center(j)).collect()
    }

    /// Left edge of cell `i`; `i = n_cells` gives `x_max`.
    pub fn edge(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    /// Index of the cell containing `x`, clamped to the grid.
    pub fn cell_of(&self, x: f64) -> usize {
        let k = ((x - self.x_min) / self.dx()).floor();
        (k.max(0.0) as usize).min(self.n_cells - 1)
    }

    /// Extends both sides by whole cells covering at least `pad`; returns the grid and the
    /// number of cells added on the left.
    pub fn padded(&self, pad: f64) -> (Grid1D, usize) {
        let dx = self.dx();
        let k = (pad / dx - 1e-9).ceil().max(0.0) as usize;
        let g = Grid1D {
            x_min: self.x_min - k as f64 * dx,
            x_max: self.x_max + k as f64 * dx,
            n_cells: self.n_cells + 2 * k,
        };
        (g, k)
    }
}

/// Catalog of initial profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `left` for `x < x0`, `right` otherwise.
    Riemann { left: f64, right: f64, x0: f64 },
    /// `values[k]` between consecutive breakpoints; `values.len() = breakpoints.len() + 1`.
    Steps {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// `mass · G(time, x − center)` with the unit-viscosity Gauss kernel.
    Gaussian { time: f64, center: f64, mass: f64 },
    /// `height · e · exp(−1/(1−ξ²))`, `ξ = (x − center)/radius`; peak value `height`.
    Bump {
        center: f64,
        radius: f64,
        height: f64,
    },
    /// Viscous shock of `ω²/2` joining `left > right`.
    TravelingWave {
        left: f64,
        right: f64,
        x0: f64,
        eps: f64,
    },
    /// Piecewise-linear interpolation of samples, constant beyond the ends.
    Samples { x: Vec<f64>, u: Vec<f64> },
}

const SUBCELL_POINTS: usize = 16;

fn log_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

impl Profile {
    pub fn validate(&self) -> Result<(), ParabolicError> {
        let bad = |m: String| Err(ParabolicError::InvalidParameter(m));
        match self {
            Profile::Steps {
                breakpoints,
                values,
            } => {
                if values.len() != breakpoints.len() + 1 {
                    return bad(format!(
                        "steps profile: {} breakpoints need {} values",
                        breakpoints.len(),
                        breakpoints.len() + 1
                    ));
                }
                if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("steps profile: breakpoints must increase".into());
                }
            }
            Profile::Gaussian { time, .. } if !(*time > 0.0) => {
                return bad(format!("gaussian profile needs time > 0, got {time}"));
            }
            Profile::Bump { radius, .. } if !(*radius > 0.0) => {
                return bad(format!("bump profile needs radius > 0, got {radius}"));
            }
            Profile::TravelingWave {
                left, right, eps, ..
            } if !(*eps > 0.0) || !(left > right) => {
                return bad("traveling wave needs eps > 0 and left > right".into());
            }
            Profile::Samples { x, u }
                if x.is_empty() || x.len() != u.len() || x.windows(2).any(|w| w[1] <= w[0]) =>
            {
                return bad("sample profile needs matching, increasing samples".into());
            }
            _ => {}
        }
        Ok(())
    }

    /// The traveling wave translated to time `t`.
    pub fn traveling_wave_at(&self, t: f64) -> Option<Profile> {
        match *self {
            Profile::TravelingWave {
                left,
                right,
                x0,
                eps,
            } => Some(Profile::TravelingWave {
                left,
                right,
                x0: x0 + 0.5 * (left + right) * t,
                eps,
            }),
            _ => None,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Profile::Riemann { left, right, x0 } => {
                if x < *x0 {
                    *left
                } else {
                    *right
                }
            }
            Profile::Steps {
                breakpoints,
                values,
            } => values[breakpoints.partition_point(|&b| b <= x)],
            Profile::Gaussian { time, center, mass } => {
                mass * crate::numerics::heat_kernel(*time, x - center, 1.0)
            }
            Profile::Bump {
                center,
                radius,
                height,
            } => height * std::f64::consts::E * bump((x - center) / radius),
            Profile::TravelingWave {
                left,
                right,
                x0,
                eps,
            } => {
                let d = left - right;
                right + 0.5 * d * (1.0 - (d * (x - x0) / (4.0 * eps)).tanh())
            }
            Profile::Samples { x: xs, u } => {
                let k = xs.partition_point(|&s| s <= x);
                if k == 0 {
                    u[0]
                } else if k == xs.len() {
                    u[xs.len() - 1]
                } else {
                    let s = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
                    u[k - 1] + s * (u[k] - u[k - 1])
                }
            }
        }
    }

    /// `∫_a^b u`, exact for steps, Gaussians and traveling waves.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Profile::Riemann { left, right, x0 } => {
                left * (b.min(*x0) - a).max(0.0) + right * (b - a.max(*x0)).max(0.0)
            }
            Profile::Steps {
                breakpoints,
                values,
            } => {
                let mut lo = a;
                let mut acc = 0.0;
                for (k, &v) in values.iter().enumerate() {
                    let hi = breakpoints.get(k).copied().unwrap_or(f64::INFINITY).min(b);
                    if hi > lo {
                        acc += v * (hi - lo);
                        lo = hi;
                    }
                }
                acc
            }
            Profile::Gaussian { time, center, mass } => {
                let s = 2.0 * time.sqrt();
                0.5 * mass * (erf((b - center) / s) - erf((a - center) / s))
            }
            Profile::TravelingWave {
                left,
                right,
                x0,
                eps,
            } => {
                let d = left - right;
                let k = d / (4.0 * eps);
                right * (b - a)
                    + 0.5 * d * ((b - a) - (log_cosh(k * (b - x0)) - log_cosh(k * (a - x0))) / k)
            }
            _ => {
                let h = (b - a) / SUBCELL_POINTS as f64;
                (0..SUBCELL_POINTS)
                    .map(|i| self.value(a + (i as f64 + 0.5) * h))
                    .sum::<f64>()
                    * h
            }
        }
    }

    pub fn cell_averages(&self, grid: &Grid1D) -> Vec<f64> {
        let dx = grid.dx();
        (0..grid.n_cells())
            .map(|j| self.integral(grid.edge(j), grid.edge(j) + dx) / dx)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_basics() {
        assert!(Grid1D::new(0.0, 1.0, 7).is_err());
        assert!(Grid1D::new(1.0, 0.0, 10).is_err());
        let g = Grid1D::new(0.0, 1.0, 10).unwrap();
        assert!((g.dx() - 0.1).abs() < 1e-15);
        assert!((g.center(0) - 0.05).abs() < 1e-15);
        assert_eq!(g.cell_of(0.99), 9);
        assert_eq!(g.cell_of(-3.0), 0);
        let (p, k) = g.padded(0.25);
        assert_eq!(k, 3);
        assert_eq!(p.n_cells(), 16);
        assert!((p.dx() - 0.1).abs() < 1e-14);
    }

    #[test]
    fn exact_cell_averages() {
        let g = Grid1D::new(-1.0, 1.0, 8).unwrap();
        let r = Profile::Riemann {
            left: 1.0,
            right: 0.0,
            x0: 0.1,
        };
        let a = r.cell_averages(&g);
        assert!((a[4] - 0.4).abs() < 1e-14);
        assert_eq!(a[3], 1.0);
        let s = Profile::Steps {
            breakpoints: vec![-0.5, 0.5],
            values: vec![0.0, 1.0, 0.0],
        };
        let total: f64 = s.cell_averages(&g).iter().sum::<f64>() * g.dx();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn traveling_wave_integral_matches_quadrature() {
        let p = Profile::TravelingWave {
            left: 1.0,
            right: 0.0,
            x0: 0.0,
            eps: 0.05,
        };
        let n = 200_000;
        let h = 1.0 / n as f64;
        let q: f64 = (0..n)
            .map(|i| p.value(-0.3 + (i as f64 + 0.5) * h))
            .sum::<f64>()
            * h;
        assert!((p.integral(-0.3, 0.7) - q).abs() < 1e-10);
    }

    #[test]
    fn profile_serde_rejects_unknown_fields() {
        let ok: Profile =
            serde_json::from_str(r#"{"kind":"riemann","left":1,"right":0,"x0":0}"#).unwrap();
        assert_eq!(ok.value(-1.0), 1.0);
        assert!(
            serde_json::from_str::<Profile>(r#"{"kind":"riemann","left":1,"rigth":0,"x0":0}"#)
                .is_err()
        );
    }
}
