//! Entropy solutions of `v_t + g(v)_x = 0`: a Godunov scheme, exact front tracking for
//! convex piecewise-linear fluxes, minimal forward characteristics, the Oleinik check and the
//! regulated-decomposition extractor.

mod characteristics;
mod extract;
mod front_tracking;
mod godunov;

use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::flux_model::{CoefficientField, Side, SmoothFlux};
use crate::parabolic::Grid1D;
use crate::regulated::RegulatedError;

pub use characteristics::{
    check_oleinik, default_lambda, min_forward_characteristic, Characteristic, OleinikReport,
    OleinikSample,
};
pub use extract::{extract_regulated, Extraction, MAX_INTERACTIONS};
pub use front_tracking::{solve_front_tracking, Front, FrontTrackingParams, PiecewiseLinearFlux};
pub use godunov::{godunov_flux, solve_godunov, GodunovParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HyperbolicError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("unsupported flux class: {0}")]
    UnsupportedClass(String),
    #[error("declared convexity class does not match g'': {0}")]
    ClassMismatch(String),
    #[error(transparent)]
    Regulated(#[from] RegulatedError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ConvexityClass {
    /// `g'' > 0` on the range.
    UniformlyConvex,
    /// `g'' < 0` below `s_bar` and `g'' > 0` above.
    SingleInflection {
        s_bar: f64,
    },
    Other,
}

/// A one-state flux together with its declared convexity class on a state range.
#[derive(Clone, Debug)]
pub struct ScalarFlux {
    g: SmoothFlux,
    class: ConvexityClass,
    range: (f64, f64),
}

const CLASS_SAMPLES: usize = 2000;

impl ScalarFlux {
    /// Verifies the declared class by sampling `g''` on `range`.
    pub fn new(
        g: SmoothFlux,
        class: ConvexityClass,
        range: (f64, f64),
    ) -> Result<Self, HyperbolicError> {
        let (lo, hi) = range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(HyperbolicError::InvalidInput(format!(
                "state range must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        for k in 0..=CLASS_SAMPLES {
            let s = lo + (hi - lo) * k as f64 / CLASS_SAMPLES as f64;
            let d2 = g.second_derivative(s);
            let ok = match class {
                ConvexityClass::UniformlyConvex => d2 > 0.0,
                ConvexityClass::SingleInflection { s_bar } => {
                    let gap = 1e-9 * (1.0 + s_bar.abs());
                    if s < s_bar - gap {
                        d2 < 0.0
                    } else if s > s_bar + gap {
                        d2 > 0.0
                    } else {
                        true
                    }
                }
                ConvexityClass::Other => true,
            };
            if !ok {
                return Err(HyperbolicError::ClassMismatch(format!(
                    "{}: g''({s}) = {d2} contradicts {class:?}",
                    g.name()
                )));
            }
        }
        Ok(Self { g, class, range })
    }

    /// Infers the class from sampled `g''`.
    pub fn classify(g: SmoothFlux, range: (f64, f64)) -> Result<Self, HyperbolicError> {
        let (lo, hi) = range;
        let d2: Vec<(f64, f64)> = (0..=CLASS_SAMPLES)
            .map(|k| {
                let s = lo + (hi - lo) * k as f64 / CLASS_SAMPLES as f64;
                (s, g.second_derivative(s))
            })
            .collect();
        let class = if d2.iter().all(|p| p.1 > 0.0) {
            ConvexityClass::UniformlyConvex
        } else {
            let changes: Vec<usize> = (1..d2.len())
                .filter(|&k| (d2[k - 1].1 < 0.0) != (d2[k].1 < 0.0))
                .collect();
            match changes.as_slice() {
                [k] if d2[0].1 < 0.0 => {
                    let s_bar = if d2[*k - 1].1 == 0.0 {
                        d2[*k - 1].0
                    } else {
                        d2[*k].0
                    };
                    ConvexityClass::SingleInflection { s_bar }
                }
                _ => ConvexityClass::Other,
            }
        };
        Self::new(g, class, range)
    }

    pub fn burgers(range: (f64, f64)) -> Self {
        Self {
            g: SmoothFlux::burgers(),
            class: ConvexityClass::UniformlyConvex,
            range,
        }
    }

    pub fn flux(&self) -> &SmoothFlux {
        &self.g
    }

    pub fn class(&self) -> ConvexityClass {
        self.class
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    #[inline]
    pub fn g(&self, v: f64) -> f64 {
        self.g.value(v)
    }

    #[inline]
    pub fn dg(&self, v: f64) -> f64 {
        self.g.derivative(v)
    }

    #[inline]
    pub fn d2g(&self, v: f64) -> f64 {
        self.g.second_derivative(v)
    }

    /// Sampled `max |g'|` on `[lo, hi]`.
    pub fn max_speed(&self, lo: f64, hi: f64) -> f64 {
        self.g.lipschitz_on(lo, hi)
    }

    /// Sampled `inf g''` on `[lo, hi]`.
    pub fn min_curvature(&self, lo: f64, hi: f64) -> f64 {
        (0..=CLASS_SAMPLES)
            .map(|k| self.d2g(lo + (hi - lo) * k as f64 / CLASS_SAMPLES as f64))
            .fold(f64::INFINITY, f64::min)
    }

    /// Rankine–Hugoniot speed, `g'` when the states coincide.
    pub fn shock_speed(&self, vl: f64, vr: f64) -> f64 {
        if vl == vr {
            self.dg(vl)
        } else {
            (self.g(vl) - self.g(vr)) / (vl - vr)
        }
    }
}

/// Time-indexed cell averages.
#[derive(Clone, Debug, PartialEq)]
pub struct GridForm {
    pub grid: Grid1D,
    pub times: Vec<f64>,
    pub profiles: Vec<Vec<f64>>,
    /// `TV(v(t_k, ·))` per stored time.
    pub tv: Vec<f64>,
    pub steps: usize,
}

/// Exact front-tracking wave structure.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveForm {
    pub pl: PiecewiseLinearFlux,
    /// State left of every front.
    pub far_left: f64,
    pub fronts: Vec<Front>,
    /// Distinct interaction times in increasing order.
    pub events: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolutionForm {
    Grid(GridForm),
    Waves(WaveForm),
}

#[derive(Clone, Debug)]
pub struct EntropySolution {
    pub flux: ScalarFlux,
    pub form: SolutionForm,
    pub t_end: f64,
    pub initial_tv: f64,
}

impl GridForm {
    pub fn time_index(&self, t: f64) -> usize {
        let mut best = 0;
        for (k, &s) in self.times.iter().enumerate() {
            if (s - t).abs() < (self.times[best] - t).abs() {
                best = k;
            }
        }
        best
    }

    fn cell(&self, side: Side, x: f64) -> usize {
        let g = &self.grid;
        let k = (x - g.x_min()) / g.dx();
        let j = match side {
            Side::Right => k.floor(),
            Side::Left => k.ceil() - 1.0,
        };
        (j.max(0.0) as usize).min(g.n_cells() - 1)
    }
}

impl WaveForm {
    /// Fronts alive at `t`, sorted by position then speed.
    pub fn active(&self, t: f64) -> Vec<&Front> {
        let mut v: Vec<&Front> = self.fronts.iter().filter(|f| f.active(t)).collect();
        v.sort_by(|a, b| {
            a.position(t)
                .total_cmp(&b.position(t))
                .then(a.speed.total_cmp(&b.speed))
        });
        v
    }

    pub fn value_from(&self, side: Side, t: f64, x: f64) -> f64 {
        let mut best: Option<(&Front, f64)> = None;
        for f in self.fronts.iter().filter(|f| f.active(t)) {
            let p = f.position(t);
            let left_of = match side {
                Side::Right => p <= x,
                Side::Left => p < x,
            };
            if left_of {
                let better = match best {
                    None => true,
                    Some((b, q)) => p > q || (p == q && f.speed > b.speed),
                };
                if better {
                    best = Some((f, p));
                }
            }
        }
        best.map_or(self.far_left, |(f, _)| f.right)
    }

    pub fn total_variation(&self, t: f64) -> f64 {
        self.fronts
            .iter()
            .filter(|f| f.active(t))
            .map(|f| (f.left - f.right).abs())
            .sum()
    }

    /// `∫_a^b v(t, x) dx`.
    pub fn integral(&self, t: f64, a: f64, b: f64) -> f64 {
        let mut acc = 0.0;
        let mut x = a;
        let mut state = self.value_from(Side::Right, t, a);
        for f in self.active(t) {
            let p = f.position(t);
            if p <= a {
                continue;
            }
            if p >= b {
                break;
            }
            acc += state * (p - x);
            x = p;
            state = f.right;
        }
        acc + state * (b - x)
    }
}

impl EntropySolution {
    /// Right limit `v(t, x+)`.
    pub fn value(&self, t: f64, x: f64) -> f64 {
        self.value_from(Side::Right, t, x)
    }

    pub fn value_from(&self, side: Side, t: f64, x: f64) -> f64 {
        match &self.form {
            SolutionForm::Grid(g) => g.profiles[g.time_index(t)][g.cell(side, x)],
            SolutionForm::Waves(w) => w.value_from(side, t, x),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.form, SolutionForm::Waves(_))
    }

    pub fn total_variation(&self, t: f64) -> f64 {
        match &self.form {
            SolutionForm::Grid(g) => g.tv[g.time_index(t)],
            SolutionForm::Waves(w) => w.total_variation(t),
        }
    }

    /// Smallest and largest state taken.
    pub fn state_range(&self) -> (f64, f64) {
        let it: Box<dyn Iterator<Item = f64>> = match &self.form {
            SolutionForm::Grid(g) => Box::new(g.profiles.iter().flatten().copied()),
            SolutionForm::Waves(w) => Box::new(
                std::iter::once(w.far_left).chain(w.fronts.iter().flat_map(|f| [f.left, f.right])),
            ),
        };
        it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
    }

    /// Writes `front_id,t_birth,t_death,x_birth,speed_segments,left_state,right_state`;
    /// fronts alive at the horizon get `t_death = T`.
    pub fn write_fronts_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let SolutionForm::Waves(wf) = &self.form else {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                "front table needs a wave-form solution",
            ));
        };
        writeln!(
            w,
            "front_id,t_birth,t_death,x_birth,speed_segments,left_state,right_state"
        )?;
        for f in &wf.fronts {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                f.id,
                f.t_birth,
                f.t_death.unwrap_or(self.t_end),
                f.x_birth,
                f.speed,
                f.left,
                f.right
            )?;
        }
        Ok(())
    }

    /// Grid-form profile of `v` on `grid` at stored time `t` (cell-centre samples).
    pub fn sample(&self, t: f64, grid: &Grid1D) -> Vec<f64> {
        grid.centers().iter().map(|&x| self.value(t, x)).collect()
    }
}

impl CoefficientField for EntropySolution {
    fn coefficient(&self, t: f64, x: f64) -> f64 {
        self.value(t, x)
    }

    fn coefficient_from(&self, side: Side, t: f64, x: f64) -> f64 {
        self.value_from(side, t, x)
    }

    fn coefficient_range(&self) -> (f64, f64) {
        self.state_range()
    }

    fn sample_values(&self) -> Vec<f64> {
        match &self.form {
            SolutionForm::Waves(w) => {
                let mut v: Vec<f64> = std::iter::once(w.far_left)
                    .chain(w.fronts.iter().flat_map(|f| [f.left, f.right]))
                    .collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            }
            SolutionForm::Grid(_) => {
                let (lo, hi) = self.state_range();
                (0..=16).map(|k| lo + (hi - lo) * k as f64 / 16.0).collect()
            }
        }
    }
}

pub(crate) fn total_variation(v: &[f64]) -> f64 {
    v.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_are_verified() {
        assert!(ScalarFlux::new(
            SmoothFlux::burgers(),
            ConvexityClass::UniformlyConvex,
            (-1.0, 2.0)
        )
        .is_ok());
        assert!(matches!(
            ScalarFlux::new(
                SmoothFlux::cubic(),
                ConvexityClass::UniformlyConvex,
                (-1.0, 1.0)
            ),
            Err(HyperbolicError::ClassMismatch(_))
        ));
        let c = ScalarFlux::classify(SmoothFlux::cubic(), (-1.0, 1.0)).unwrap();
        match c.class() {
            ConvexityClass::SingleInflection { s_bar } => assert!(s_bar.abs() < 1e-3),
            other => panic!("{other:?}"),
        }
        let q = ScalarFlux::classify(SmoothFlux::concave_quadratic(), (0.0, 1.0)).unwrap();
        assert_eq!(q.class(), ConvexityClass::Other);
    }
}
