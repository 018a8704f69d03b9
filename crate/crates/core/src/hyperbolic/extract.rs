use super::{
    min_forward_characteristic, ConvexityClass, EntropySolution, HyperbolicError, SolutionForm,
};
use crate::flux_model::Side;
use crate::regulated::{Band, Curve, Rectangle, RegulatedField};

pub const MAX_INTERACTIONS: usize = 100_000;

/// A regulated field approximating an entropy solution, with the construction data.
#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    pub field: RegulatedField,
    /// Start of the first band, `ε/2`.
    pub t1: f64,
    /// Starting points `y_1 < … < y_N` of the traced characteristics.
    pub points: Vec<f64>,
    /// Times at which traced characteristics merge.
    pub interaction_times: Vec<f64>,
    /// Grid-form input: shock locations and characteristics are resolved to a cell.
    pub approximate: bool,
}

struct Jump {
    x: f64,
    size: f64,
    sharp: bool,
}

fn jumps_at(sol: &EntropySolution, t: f64, lo: f64, hi: f64, eps: f64) -> Vec<Jump> {
    match &sol.form {
        SolutionForm::Waves(w) => w
            .active(t)
            .into_iter()
            .map(|f| Jump {
                x: f.position(t),
                size: (f.left - f.right).abs(),
                sharp: false,
            })
            .filter(|j| j.x > lo && j.x < hi)
            .collect(),
        SolutionForm::Grid(g) => {
            let p = &g.profiles[g.time_index(t)];
            (1..p.len())
                .map(|i| Jump {
                    x: g.grid.edge(i),
                    size: (p[i] - p[i - 1]).abs(),
                    sharp: p[i - 1] - p[i] > 0.5 * eps,
                })
                .filter(|j| j.size > 0.0 && j.x > lo && j.x < hi)
                .collect()
        }
    }
}

/// Greedy left-to-right choice: a jump at least the budget gets a point on it, otherwise a
/// point goes midway before the jump that would exhaust the budget.
fn choose_points(jumps: &[Jump], start: f64, budget: f64) -> Vec<f64> {
    let mut ys = Vec::new();
    let mut acc = 0.0;
    let mut prev = start;
    for j in jumps {
        if j.size >= budget || j.sharp {
            ys.push(j.x);
            acc = 0.0;
        } else if acc + j.size >= budget {
            ys.push(0.5 * (prev + j.x));
            acc = j.size;
        } else {
            acc += j.size;
        }
        prev = j.x;
    }
    ys.dedup();
    ys
}

/// Regulated decomposition of a convex-flux entropy solution on `rect`: characteristics from
/// points `y_j` at `t1 = ε/2` separating total variation below `ε`, bands between their merge
/// times shortened by `ε/(2N)`, constants taken as right limits at each band start.
///
/// The last band runs to `T`.
pub fn extract_regulated(
    sol: &EntropySolution,
    eps: f64,
    rect: Rectangle,
) -> Result<Extraction, HyperbolicError> {
    if sol.flux.class() != ConvexityClass::UniformlyConvex {
        return Err(HyperbolicError::UnsupportedClass(format!(
            "extraction needs a uniformly convex flux, got {:?}",
            sol.flux.class()
        )));
    }
    let t_max = rect.t_max;
    if !(eps > 0.0 && eps.is_finite()) || !(t_max <= sol.t_end * (1.0 + 1e-12)) {
        return Err(HyperbolicError::InvalidInput(format!(
            "need ε > 0 and T within the solution horizon, got ε={eps}, T={t_max}"
        )));
    }
    let t1 = 0.5 * eps;
    if t1 >= t_max {
        return Err(HyperbolicError::InvalidInput(format!(
            "ε/2 = {t1} leaves no band before T = {t_max}"
        )));
    }
    let (approximate, merge_tol, offset) = match &sol.form {
        SolutionForm::Waves(_) => (false, 1e-9, 1e-9),
        SolutionForm::Grid(g) => (true, g.grid.dx(), 1.5 * g.grid.dx()),
    };
    let (lo, hi) = sol.state_range();
    let speed = sol.flux.max_speed(lo, hi);
    let y_first = rect.x_min - speed * t_max;
    let y_last = rect.x_max + speed * t_max;

    let jumps = jumps_at(sol, t1, y_first, y_last, eps);
    let ys = choose_points(&jumps, y_first, eps * (1.0 - 1e-6));
    let curves: Vec<Curve> = ys
        .iter()
        .map(|&y| min_forward_characteristic(sol, t1, y, t_max).map(|c| c.curve))
        .collect::<Result<_, _>>()?;

    let mut ts: Vec<f64> = vec![t1, t_max];
    for c in &curves {
        ts.extend(c.points().map(|p| p.0));
    }
    ts.retain(|&t| t >= t1 && t <= t_max);
    ts.sort_by(f64::total_cmp);
    ts.dedup();

    // representatives of merged curves; a merge keeps the left curve
    let close = |a: usize, b: usize, t: f64| {
        let (p, q) = (curves[a].position(t), curves[b].position(t));
        let scale = if approximate { 1.0 } else { 1.0 + p.abs() };
        q - p <= merge_tol * scale
    };
    let mut reps: Vec<usize> = (0..curves.len()).collect();
    let mut snapshots: Vec<(f64, Vec<usize>)> = Vec::new();
    for (k, &t) in ts.iter().enumerate() {
        let before = reps.len();
        let mut i = 0;
        while i + 1 < reps.len() {
            if close(reps[i], reps[i + 1], t) {
                reps.remove(i + 1);
            } else {
                i += 1;
            }
        }
        if k == 0 {
            snapshots.push((t, reps.clone()));
        } else if reps.len() < before && t < t_max {
            snapshots.push((t, reps.clone()));
            if snapshots.len() > MAX_INTERACTIONS {
                return Err(HyperbolicError::Capacity(format!(
                    "more than {MAX_INTERACTIONS} interactions"
                )));
            }
        }
    }

    let gap = eps / (2.0 * ys.len().max(1) as f64);
    let mut bands = Vec::new();
    for (i, (a, group)) in snapshots.iter().enumerate() {
        let a = *a;
        let b = match snapshots.get(i + 1) {
            Some((next, _)) => next - gap,
            None => t_max,
        };
        if b <= a {
            continue;
        }
        let band_curves: Vec<Curve> = group.iter().map(|&r| curves[r].restrict(a, b)).collect();
        let mut alphas = Vec::with_capacity(band_curves.len() + 1);
        match band_curves.first() {
            Some(c) => {
                let x = c.position(a);
                alphas.push(sol.value_from(Side::Left, a, x - offset * (1.0 + x.abs())));
            }
            None => alphas.push(sol.value(a, y_first)),
        }
        for c in &band_curves {
            let x = c.position(a);
            alphas.push(sol.value(a, x + offset * (1.0 + x.abs())));
        }
        bands.push(Band {
            a,
            b,
            curves: band_curves,
            alphas,
        });
    }
    let interaction_times = snapshots.iter().skip(1).map(|s| s.0).collect();
    Ok(Extraction {
        field: RegulatedField::new(rect, bands, eps)?,
        t1,
        points: ys,
        interaction_times,
        approximate,
    })
}
