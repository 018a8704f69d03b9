use super::{
    total_variation, EntropySolution, GridForm, HyperbolicError, ScalarFlux, SolutionForm,
};
use crate::parabolic::Grid1D;

#[derive(Clone, Debug, PartialEq)]
pub struct GodunovParams {
    /// `Δt · max|g'| / dx`; at most ½.
    pub cfl: f64,
    pub samples: usize,
}

impl Default for GodunovParams {
    fn default() -> Self {
        Self {
            cfl: 0.5,
            samples: 64,
        }
    }
}

const ROOT_SCAN: usize = 4096;

/// Zeros of `g'` on `[lo, hi]`: sign changes on a fine scan refined by bisection.
fn critical_points(g: &ScalarFlux, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if !(hi > lo) {
        return out;
    }
    let at = |k: usize| lo + (hi - lo) * k as f64 / ROOT_SCAN as f64;
    for k in 0..ROOT_SCAN {
        let (mut a, mut b) = (at(k), at(k + 1));
        let (fa, fb) = (g.dg(a), g.dg(b));
        if fa == 0.0 {
            out.push(a);
            continue;
        }
        if fa.signum() == fb.signum() || fb == 0.0 {
            continue;
        }
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if g.dg(m).signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    if g.dg(hi) == 0.0 {
        out.push(hi);
    }
    out
}

/// `min g` on `[vl, vr]` when `vl ≤ vr`, `max g` on `[vr, vl]` otherwise; the extremum is
/// taken over the endpoints and the supplied critical points of `g`.
pub fn godunov_flux(g: &ScalarFlux, critical: &[f64], vl: f64, vr: f64) -> f64 {
    let (lo, hi) = if vl <= vr { (vl, vr) } else { (vr, vl) };
    let inner = critical
        .iter()
        .filter(|&&c| c > lo && c < hi)
        .map(|&c| g.g(c));
    let ends = [g.g(vl), g.g(vr)];
    if vl <= vr {
        inner.chain(ends).fold(f64::INFINITY, f64::min)
    } else {
        inner.chain(ends).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// First-order Godunov scheme with zero-gradient ghost cells. Steps are shortened uniformly
/// so every stored time is hit.
pub fn solve_godunov(
    g: &ScalarFlux,
    v0: &[f64],
    t_end: f64,
    grid: &Grid1D,
    params: &GodunovParams,
) -> Result<EntropySolution, HyperbolicError> {
    if !(params.cfl > 0.0 && params.cfl <= 0.5) {
        return Err(HyperbolicError::Config(format!(
            "cfl must lie in (0, 1/2], got {}",
            params.cfl
        )));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(HyperbolicError::InvalidInput(format!(
            "horizon must be positive, got {t_end}"
        )));
    }
    let n = grid.n_cells();
    if v0.len() != n || v0.iter().any(|v| !v.is_finite()) {
        return Err(HyperbolicError::InvalidInput(
            "initial data must be finite and match the grid".into(),
        ));
    }
    let lo = v0.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let crit = critical_points(g, lo, hi);
    let speed = g.max_speed(lo, hi);
    let dx = grid.dx();
    let dt_max = if speed > 0.0 {
        params.cfl * dx / speed
    } else {
        f64::INFINITY
    };
    let samples = params.samples.max(1);
    let times: Vec<f64> = (0..=samples)
        .map(|k| t_end * k as f64 / samples as f64)
        .collect();

    let mut v = v0.to_vec();
    let mut profiles = vec![v.clone()];
    let mut tv = vec![total_variation(&v)];
    let mut fluxes = vec![0.0; n + 1];
    let mut steps = 0;
    for w in times.windows(2) {
        let span = w[1] - w[0];
        let k = if dt_max.is_finite() {
            ((span / dt_max - 1e-9).ceil() as usize).max(1)
        } else {
            1
        };
        let lam = span / k as f64 / dx;
        for _ in 0..k {
            fluxes[0] = g.g(v[0]);
            for i in 1..n {
                fluxes[i] = godunov_flux(g, &crit, v[i - 1], v[i]);
            }
            fluxes[n] = g.g(v[n - 1]);
            for j in 0..n {
                v[j] -= lam * (fluxes[j + 1] - fluxes[j]);
            }
            steps += 1;
        }
        profiles.push(v.clone());
        tv.push(total_variation(&v));
    }

    Ok(EntropySolution {
        flux: g.clone(),
        form: SolutionForm::Grid(GridForm {
            grid: *grid,
            times,
            profiles,
            tv,
            steps,
        }),
        t_end,
        initial_tv: total_variation(v0),
    })
}
