use serde::Serialize;

use super::{EntropySolution, GridForm, HyperbolicError, SolutionForm, WaveForm};
use crate::flux_model::Side;
use crate::regulated::Curve;

#[derive(Clone, Debug, PartialEq)]
pub struct Characteristic {
    pub curve: Curve,
    /// The curve left the computational window before the horizon.
    pub truncated: bool,
}

const MAX_SEGMENTS: usize = 1_000_000;

fn push_point(points: &mut Vec<(f64, f64)>, t: f64, x: f64) {
    match points.last_mut() {
        Some(last) if t <= last.0 => last.1 = x,
        _ => points.push((t, x)),
    }
}

/// Minimal solution of `ẋ ∈ [g'(v(t, x+)), g'(v(t, x−))]` from `(t0, x0)` up to `t_end`.
///
/// Wave form: exact, following shocks it meets and running at `g'` of the constant state
/// elsewhere. Grid form: an Euler polygon with the stored time step, at the slowest speed over
/// the current cell and its left neighbour.
pub fn min_forward_characteristic(
    sol: &EntropySolution,
    t0: f64,
    x0: f64,
    t_end: f64,
) -> Result<Characteristic, HyperbolicError> {
    if !(t0 >= 0.0 && t0 < t_end && t_end <= sol.t_end * (1.0 + 1e-12)) || !x0.is_finite() {
        return Err(HyperbolicError::InvalidInput(format!(
            "characteristic needs 0 ≤ t0 < T ≤ horizon, got t0={t0}, T={t_end}"
        )));
    }
    match &sol.form {
        SolutionForm::Waves(w) => trace_waves(sol, w, t0, x0, t_end),
        SolutionForm::Grid(g) => trace_grid(sol, g, t0, x0, t_end),
    }
}

enum Mode {
    OnFront(usize),
    Free(f64),
}

fn trace_waves(
    sol: &EntropySolution,
    w: &WaveForm,
    t0: f64,
    x0: f64,
    t_end: f64,
) -> Result<Characteristic, HyperbolicError> {
    let tol = |x: f64| 1e-10 * (1.0 + x.abs());
    let start_mode = |t: f64, x: f64| -> Mode {
        let mut here: Vec<_> = w
            .fronts
            .iter()
            .filter(|f| f.active(t) && (f.position(t) - x).abs() <= tol(x))
            .collect();
        here.sort_by(|a, b| a.speed.total_cmp(&b.speed));
        match here.first() {
            Some(f) if f.is_shock() => Mode::OnFront(f.id),
            Some(f) => Mode::Free(f.left),
            None => Mode::Free(w.value_from(Side::Right, t, x)),
        }
    };
    let mut points = vec![(t0, x0)];
    let (mut t, mut x) = (t0, x0);
    let mut mode = start_mode(t, x);
    for _ in 0..MAX_SEGMENTS {
        if t >= t_end {
            break;
        }
        match mode {
            Mode::OnFront(id) => {
                let f = &w.fronts[id];
                let end = f.t_death.map_or(t_end, |d| d.min(t_end));
                x = f.position(end);
                t = end;
                push_point(&mut points, t, x);
                if t >= t_end {
                    break;
                }
                mode = start_mode(t, x);
                if let Mode::Free(_) = mode {
                    // left limit at the collision point
                    mode = Mode::Free(w.value_from(Side::Left, t, x));
                }
            }
            Mode::Free(v) => {
                let c = sol.flux.dg(v);
                let next = w
                    .events
                    .iter()
                    .copied()
                    .find(|&e| e > t)
                    .unwrap_or(t_end)
                    .min(t_end);
                let mut hit: Option<(f64, usize, bool)> = None;
                for f in w.fronts.iter().filter(|f| f.active(t)) {
                    let gap = f.position(t) - x;
                    if gap.abs() <= tol(x) {
                        continue;
                    }
                    let closing = if gap > 0.0 { c - f.speed } else { f.speed - c };
                    if closing <= 0.0 {
                        continue;
                    }
                    let s = t + gap.abs() / closing;
                    if s <= next && hit.is_none_or(|(h, _, _)| s < h) {
                        hit = Some((s, f.id, gap > 0.0));
                    }
                }
                match hit {
                    Some((s, id, from_left)) => {
                        let f = &w.fronts[id];
                        x = f.position(s);
                        t = s;
                        push_point(&mut points, t, x);
                        mode = if f.is_shock() {
                            Mode::OnFront(id)
                        } else if from_left {
                            Mode::Free(f.right)
                        } else {
                            Mode::Free(f.left)
                        };
                    }
                    None => {
                        x += c * (next - t);
                        t = next;
                        push_point(&mut points, t, x);
                        if t < t_end {
                            mode = start_mode(t, x);
                        }
                    }
                }
            }
        }
    }
    Ok(Characteristic {
        curve: Curve::new(points)?,
        truncated: false,
    })
}

fn trace_grid(
    sol: &EntropySolution,
    g: &GridForm,
    t0: f64,
    x0: f64,
    t_end: f64,
) -> Result<Characteristic, HyperbolicError> {
    let dt = if g.times.len() > 1 {
        g.times[1] - g.times[0]
    } else {
        t_end - t0
    };
    let (lo, hi) = (g.grid.x_min(), g.grid.x_max());
    let mut points = vec![(t0, x0)];
    let (mut t, mut x) = (t0, x0);
    let mut truncated = !(lo..=hi).contains(&x0);
    while t < t_end && !truncated {
        let h = dt.min(t_end - t);
        // slowest speed over the cell and its left neighbour: the right state at a shock, the
        // fan edge in a rarefaction, whose first steps resolve to a single cell
        let c = [
            sol.value_from(Side::Left, t, x),
            sol.value_from(Side::Right, t, x),
            sol.value(t, x - g.grid.dx()),
        ]
        .into_iter()
        .map(|v| sol.flux.dg(v))
        .fold(f64::INFINITY, f64::min);
        x += h * c;
        t += h;
        push_point(&mut points, t, x);
        truncated = !(lo..=hi).contains(&x);
    }
    Ok(Characteristic {
        curve: Curve::new(points)?,
        truncated,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OleinikSample {
    pub t: f64,
    /// `sup_{x<y} [(v(t,y) − v(t,x)) − (y − x)/(λt)]`, at least 0.
    pub excess: f64,
    pub slack: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OleinikReport {
    pub lambda: f64,
    pub samples: Vec<OleinikSample>,
    pub passed: bool,
}

/// `inf g''` over the states the solution takes.
pub fn default_lambda(sol: &EntropySolution) -> f64 {
    let (lo, hi) = sol.state_range();
    if hi > lo {
        sol.flux.min_curvature(lo, hi)
    } else {
        sol.flux.d2g(lo)
    }
}

/// `max(0, sup w(y) − w(x))` over sites in order, `x` at or before `y`; `pairs` yields the
/// `(x, y)` candidate values per site.
fn max_rise(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let mut best: f64 = 0.0;
    let mut min_w = f64::INFINITY;
    for (wx, wy) in pairs {
        min_w = min_w.min(wx);
        best = best.max(wy - min_w);
    }
    best
}

/// Checks `v(t,y) − v(t,x) ≤ (y − x)/(λt)` at each sampled time.
///
/// Grid slack is `2 dx/(λt)`; wave-form slack is the largest flux-node gap, the size of a
/// single contact jump.
pub fn check_oleinik(sol: &EntropySolution, lambda: f64, times: &[f64]) -> OleinikReport {
    let samples: Vec<OleinikSample> = times
        .iter()
        .map(|&t| {
            let lt = lambda * t;
            let (excess, slack) = match &sol.form {
                SolutionForm::Grid(g) => {
                    let p = &g.profiles[g.time_index(t)];
                    let xs = g.grid.centers();
                    // the same cell as x and y contributes 0
                    let e = max_rise(p.iter().zip(&xs).map(|(v, x)| {
                        let w = v - x / lt;
                        (w, w)
                    }));
                    (e, 2.0 * g.grid.dx() / lt)
                }
                SolutionForm::Waves(w) => {
                    // w = v − x/(λt) decreases between fronts: the inf over x sits just left
                    // of a front and the sup over y just right of one
                    let best = max_rise(w.active(t).into_iter().map(|f| {
                        let p = f.position(t) / lt;
                        (f.left - p, f.right - p)
                    }));
                    (best, w.pl.max_gap())
                }
            };
            OleinikSample {
                t,
                excess,
                slack,
                passed: excess <= slack + 1e-12 * (1.0 + slack),
            }
        })
        .collect();
    let passed = samples.iter().all(|s| s.passed);
    OleinikReport {
        lambda,
        samples,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{
        solve_front_tracking, solve_godunov, FrontTrackingParams, GodunovParams,
        PiecewiseLinearFlux, ScalarFlux,
    };
    use crate::parabolic::{Grid1D, Profile};

    fn waves(v0: Profile, n: usize, t: f64) -> EntropySolution {
        let g = ScalarFlux::burgers((0.0, 2.0));
        let pl = PiecewiseLinearFlux::interpolate(&g, 0.0, 2.0, n).unwrap();
        solve_front_tracking(&g, &pl, &v0, t, &FrontTrackingParams::default()).unwrap()
    }

    #[test]
    fn constant_state_gives_straight_line() {
        let s = waves(
            Profile::Riemann {
                left: 1.0,
                right: 1.0,
                x0: 0.0,
            },
            4,
            2.0,
        );
        let c = min_forward_characteristic(&s, 0.0, 0.3, 2.0).unwrap();
        assert!((c.curve.position(2.0) - 2.3).abs() < 1e-14);
        assert!(!c.truncated);
    }

    #[test]
    fn follows_shock_from_its_start() {
        let s = waves(
            Profile::Riemann {
                left: 2.0,
                right: 0.0,
                x0: 0.0,
            },
            2,
            2.0,
        );
        let c = min_forward_characteristic(&s, 0.5, 0.5, 2.0).unwrap();
        assert!((c.curve.position(2.0) - 2.0).abs() < 1e-14);
        // a characteristic from the right state region runs into it
        let d = min_forward_characteristic(&s, 0.0, 0.5, 2.0).unwrap();
        assert!((d.curve.position(0.5) - 0.5).abs() < 1e-14);
        assert!((d.curve.position(2.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn radial_inside_a_fan() {
        let g = ScalarFlux::burgers((0.0, 1.0));
        let grid = Grid1D::new(-1.0, 3.0, 800).unwrap();
        let v0 = Profile::Riemann {
            left: 0.0,
            right: 1.0,
            x0: 0.0,
        }
        .cell_averages(&grid);
        let p = GodunovParams {
            cfl: 0.5,
            samples: 400,
        };
        let s = solve_godunov(&g, &v0, 2.0, &grid, &p).unwrap();
        let c = min_forward_characteristic(&s, 1.0, 0.5, 2.0).unwrap();
        assert!((c.curve.position(2.0) - 1.0).abs() < 0.05);
    }

    // Rays of the fan [0.2t, t] are all characteristics from the origin. The grid form can only
    // place the minimal one to within the smeared fan edge, so it lands in the slow quarter.
    #[test]
    fn grid_characteristic_from_fan_origin_stays_near_the_slowest_ray() {
        let g = ScalarFlux::burgers((0.0, 1.0));
        for (n, samples) in [(400, 200), (800, 400), (1600, 64)] {
            let grid = Grid1D::new(-1.0, 3.0, n).unwrap();
            let v0 = Profile::Riemann {
                left: 0.2,
                right: 1.0,
                x0: 0.0,
            }
            .cell_averages(&grid);
            let s =
                solve_godunov(&g, &v0, 2.0, &grid, &GodunovParams { cfl: 0.5, samples }).unwrap();
            let x = min_forward_characteristic(&s, 0.0, 0.0, 2.0)
                .unwrap()
                .curve
                .position(2.0);
            assert!((0.4..0.8).contains(&x), "{x}");
        }
    }

    #[test]
    fn curves_never_cross() {
        let s = waves(
            Profile::Steps {
                breakpoints: vec![-1.0, 0.0, 1.0],
                values: vec![0.0, 2.0, 0.5, 1.5],
            },
            8,
            3.0,
        );
        let curves: Vec<Curve> = (0..30)
            .map(|k| {
                min_forward_characteristic(&s, 0.1, -1.5 + 0.12 * k as f64, 3.0)
                    .unwrap()
                    .curve
            })
            .collect();
        for w in curves.windows(2) {
            for j in 0..=60 {
                let t = 0.1 + 2.9 * j as f64 / 60.0;
                assert!(w[0].position(t) <= w[1].position(t) + 1e-9, "t={t}");
            }
        }
    }

    #[test]
    fn oleinik_on_fan_shock_and_violation() {
        let s = waves(
            Profile::Steps {
                breakpoints: vec![0.0, 1.0],
                values: vec![0.0, 2.0, 0.0],
            },
            16,
            2.0,
        );
        let lam = default_lambda(&s);
        assert_eq!(lam, 1.0);
        assert!(check_oleinik(&s, lam, &[0.5, 1.0, 2.0]).passed);

        let grid = Grid1D::new(-1.0, 1.0, 40).unwrap();
        let g = ScalarFlux::burgers((0.0, 1.0));
        let v: Vec<f64> = grid
            .centers()
            .iter()
            .map(|&x| if x < 0.0 { 0.0 } else { 1.0 })
            .collect();
        let bad = EntropySolution {
            flux: g,
            form: SolutionForm::Grid(GridForm {
                grid,
                times: vec![1.0],
                profiles: vec![v],
                tv: vec![1.0],
                steps: 0,
            }),
            t_end: 1.0,
            initial_tv: 1.0,
        };
        let r = check_oleinik(&bad, 1.0, &[1.0]);
        assert!(!r.passed);
        assert!(r.samples[0].excess > 0.9);
    }

    fn godunov_excess(low: f64, dx: f64) -> Vec<f64> {
        let g = ScalarFlux::burgers((0.0, 1.0));
        let v0 = Profile::Steps {
            breakpoints: vec![0.0, 1.0],
            values: vec![low, 1.0, low],
        };
        let grid = Grid1D::new(-2.0, 4.0, (6.0 / dx).round() as usize).unwrap();
        let v = solve_godunov(
            &g,
            &v0.cell_averages(&grid),
            2.0,
            &grid,
            &GodunovParams::default(),
        )
        .unwrap();
        check_oleinik(&v, default_lambda(&v), &[0.5, 1.0, 2.0])
            .samples
            .iter()
            .map(|s| s.excess / s.slack)
            .collect()
    }

    #[test]
    fn godunov_fan_away_from_sonic_point_is_one_sided_lipschitz() {
        for dx in [0.01, 0.005] {
            assert!(godunov_excess(0.2, dx).iter().all(|&r| r == 0.0));
        }
    }

    // A fan edge sitting on g' = 0 keeps a one-cell step of about 2dx; relative to the
    // 2dx/(λt) slack it grows under refinement.
    #[test]
    fn godunov_sonic_fan_edge_outgrows_grid_slack() {
        let (coarse, fine) = (godunov_excess(0.0, 0.01), godunov_excess(0.0, 0.005));
        assert!(coarse.iter().all(|&r| r > 0.5 && r < 1.0), "{coarse:?}");
        assert!(fine.iter().zip(&coarse).all(|(f, c)| f > c), "{fine:?}");
        assert!(fine[2] > 1.0);
    }
}
