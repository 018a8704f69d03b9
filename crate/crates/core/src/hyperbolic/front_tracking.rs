use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::{EntropySolution, HyperbolicError, ScalarFlux, SolutionForm, WaveForm};
use crate::parabolic::Profile;

/// Continuous piecewise-linear flux through `(nodes[k], values[k])`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinearFlux {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinearFlux {
    /// Requires increasing nodes and nondecreasing slopes.
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self, HyperbolicError> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(HyperbolicError::InvalidInput(
                "piecewise-linear flux needs at least two matching nodes".into(),
            ));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || values.iter().any(|v| !v.is_finite()) {
            return Err(HyperbolicError::InvalidInput(
                "flux nodes must increase and values be finite".into(),
            ));
        }
        let pl = Self { nodes, values };
        let s = pl.slopes();
        if s.windows(2)
            .any(|w| w[1] < w[0] - 1e-12 * (1.0 + w[0].abs()))
        {
            return Err(HyperbolicError::UnsupportedClass(
                "front tracking needs a convex piecewise-linear flux".into(),
            ));
        }
        Ok(pl)
    }

    /// Interpolates `g` at `n + 1` uniform nodes on `[lo, hi]`.
    pub fn interpolate(
        g: &ScalarFlux,
        lo: f64,
        hi: f64,
        n: usize,
    ) -> Result<Self, HyperbolicError> {
        if n == 0 {
            return Err(HyperbolicError::InvalidInput(
                "need at least one segment".into(),
            ));
        }
        let nodes: Vec<f64> = (0..=n)
            .map(|k| lo + (hi - lo) * k as f64 / n as f64)
            .collect();
        let values = nodes.iter().map(|&v| g.g(v)).collect();
        Self::new(nodes, values)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn slopes(&self) -> Vec<f64> {
        (1..self.nodes.len())
            .map(|k| (self.values[k] - self.values[k - 1]) / (self.nodes[k] - self.nodes[k - 1]))
            .collect()
    }

    /// Largest distance between consecutive nodes.
    pub fn max_gap(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn node_index(&self, v: f64) -> Option<usize> {
        let tol = 1e-12 * (1.0 + v.abs());
        let k = self.nodes.partition_point(|&n| n < v - tol);
        (k < self.nodes.len() && (self.nodes[k] - v).abs() <= tol).then_some(k)
    }

    pub fn value(&self, v: f64) -> f64 {
        let n = self.nodes.len();
        let k = self.nodes.partition_point(|&x| x <= v).clamp(1, n - 1);
        let (a, b) = (self.nodes[k - 1], self.nodes[k]);
        self.values[k - 1] + (v - a) * (self.values[k] - self.values[k - 1]) / (b - a)
    }

    /// Fronts `(left, right, speed)` solving the Riemann problem, ordered by speed.
    pub fn riemann(&self, ul: f64, ur: f64) -> Result<Vec<(f64, f64, f64)>, HyperbolicError> {
        let (i, j) = match (self.node_index(ul), self.node_index(ur)) {
            (Some(i), Some(j)) => (i, j),
            _ => {
                return Err(HyperbolicError::InvalidInput(format!(
                    "states {ul}, {ur} are not flux nodes"
                )))
            }
        };
        if i == j {
            return Ok(Vec::new());
        }
        if i > j {
            let (l, r) = (self.nodes[i], self.nodes[j]);
            let s = (self.values[i] - self.values[j]) / (l - r);
            return Ok(vec![(l, r, s)]);
        }
        // convex: the envelope is g itself, one contact per segment; equal slopes travel together
        let slopes = self.slopes();
        let mut out: Vec<(f64, f64, f64)> = Vec::new();
        for (k, &s) in slopes.iter().enumerate().take(j).skip(i) {
            match out.last_mut() {
                Some(last) if (last.2 - s).abs() <= 1e-14 * (1.0 + s.abs()) => {
                    last.1 = self.nodes[k + 1];
                }
                _ => out.push((self.nodes[k], self.nodes[k + 1], s)),
            }
        }
        Ok(out)
    }
}

/// A discontinuity travelling at constant speed from its birth to its death.
#[derive(Clone, Debug, PartialEq)]
pub struct Front {
    pub id: usize,
    pub t_birth: f64,
    /// `None` when the front survives to the horizon.
    pub t_death: Option<f64>,
    pub x_birth: f64,
    pub speed: f64,
    pub left: f64,
    pub right: f64,
}

impl Front {
    pub fn position(&self, t: f64) -> f64 {
        self.x_birth + self.speed * (t - self.t_birth)
    }

    /// Alive on `[t_birth, t_death)`.
    pub fn active(&self, t: f64) -> bool {
        self.t_birth <= t && self.t_death.is_none_or(|d| t < d)
    }

    pub fn is_shock(&self) -> bool {
        self.left > self.right
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontTrackingParams {
    pub max_fronts: usize,
    pub max_events: usize,
}

impl Default for FrontTrackingParams {
    fn default() -> Self {
        Self {
            max_fronts: 10_000,
            max_events: 1_000_000,
        }
    }
}

#[derive(PartialEq)]
struct Event {
    t: f64,
    seq: usize,
    left: usize,
    right: usize,
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.t.total_cmp(&other.t).then(self.seq.cmp(&other.seq))
    }
}

fn collision(a: &Front, b: &Front, now: f64) -> Option<f64> {
    if a.speed <= b.speed {
        return None;
    }
    let t =
        (b.x_birth - a.x_birth + a.speed * a.t_birth - b.speed * b.t_birth) / (a.speed - b.speed);
    Some(t.max(now))
}

fn step_data(v0: &Profile) -> Result<(Vec<f64>, Vec<f64>), HyperbolicError> {
    match v0 {
        Profile::Riemann { left, right, x0 } => Ok((vec![*x0], vec![*left, *right])),
        Profile::Steps {
            breakpoints,
            values,
        } => {
            v0.validate()
                .map_err(|e| HyperbolicError::InvalidInput(e.to_string()))?;
            Ok((breakpoints.clone(), values.clone()))
        }
        other => Err(HyperbolicError::InvalidInput(format!(
            "front tracking needs piecewise-constant data, got {other:?}"
        ))),
    }
}

/// Exact entropy solution for a convex piecewise-linear flux and step data whose values are
/// flux nodes. Collisions are processed in time order from a priority queue; fronts meeting
/// at one point are resolved together.
pub fn solve_front_tracking(
    g: &ScalarFlux,
    pl: &PiecewiseLinearFlux,
    v0: &Profile,
    t_end: f64,
    params: &FrontTrackingParams,
) -> Result<EntropySolution, HyperbolicError> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(HyperbolicError::InvalidInput(format!(
            "horizon must be positive, got {t_end}"
        )));
    }
    let (xs, vs) = step_data(v0)?;
    let mut fronts: Vec<Front> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let spawn = |fronts: &mut Vec<Front>, t: f64, x: f64, ul: f64, ur: f64| {
        pl.riemann(ul, ur).map(|waves| {
            waves
                .into_iter()
                .map(|(l, r, s)| {
                    let id = fronts.len();
                    fronts.push(Front {
                        id,
                        t_birth: t,
                        t_death: None,
                        x_birth: x,
                        speed: s,
                        left: l,
                        right: r,
                    });
                    id
                })
                .collect::<Vec<usize>>()
        })
    };
    for (k, &x) in xs.iter().enumerate() {
        let ids = spawn(&mut fronts, 0.0, x, vs[k], vs[k + 1])?;
        active.extend(ids);
    }
    if active.len() > params.max_fronts {
        return Err(HyperbolicError::Capacity(format!(
            "{} initial fronts exceed the limit {}",
            active.len(),
            params.max_fronts
        )));
    }
    let initial_tv = crate::hyperbolic::total_variation(&vs);

    let mut queue = BinaryHeap::new();
    let mut seq = 0usize;
    let mut push =
        |queue: &mut BinaryHeap<Reverse<Event>>, fronts: &[Front], a: usize, b: usize, now: f64| {
            if let Some(t) = collision(&fronts[a], &fronts[b], now) {
                if t < t_end {
                    queue.push(Reverse(Event {
                        t,
                        seq,
                        left: a,
                        right: b,
                    }));
                    seq += 1;
                }
            }
        };
    for w in active.windows(2) {
        push(&mut queue, &fronts, w[0], w[1], 0.0);
    }

    let mut events: Vec<f64> = Vec::new();
    let mut n_events = 0usize;
    while let Some(Reverse(ev)) = queue.pop() {
        let (a, b) = (ev.left, ev.right);
        if fronts[a].t_death.is_some() || fronts[b].t_death.is_some() {
            continue;
        }
        let Some(ia) = active.iter().position(|&id| id == a) else {
            continue;
        };
        if active.get(ia + 1) != Some(&b) {
            continue;
        }
        n_events += 1;
        if n_events > params.max_events {
            return Err(HyperbolicError::Capacity(format!(
                "more than {} interactions",
                params.max_events
            )));
        }
        let t = ev.t;
        let xc = 0.5 * (fronts[a].position(t) + fronts[b].position(t));
        let tol = 1e-10 * (1.0 + xc.abs());
        let mut lo = ia;
        while lo > 0 && (fronts[active[lo - 1]].position(t) - xc).abs() <= tol {
            lo -= 1;
        }
        let mut hi = ia + 1;
        while hi + 1 < active.len() && (fronts[active[hi + 1]].position(t) - xc).abs() <= tol {
            hi += 1;
        }
        let ul = fronts[active[lo]].left;
        let ur = fronts[active[hi]].right;
        for &id in &active[lo..=hi] {
            fronts[id].t_death = Some(t);
        }
        let born = spawn(&mut fronts, t, xc, ul, ur)?;
        let n_born = born.len();
        active.splice(lo..=hi, born);
        if active.len() > params.max_fronts {
            return Err(HyperbolicError::Capacity(format!(
                "{} live fronts exceed the limit {}",
                active.len(),
                params.max_fronts
            )));
        }
        if events.last().is_none_or(|&last| t > last) {
            events.push(t);
        }
        // new neighbour pairs around the replaced run
        if lo > 0 && lo < active.len() {
            push(&mut queue, &fronts, active[lo - 1], active[lo], t);
        }
        let end = lo + n_born;
        if n_born > 0 && end < active.len() {
            push(&mut queue, &fronts, active[end - 1], active[end], t);
        }
    }

    Ok(EntropySolution {
        flux: g.clone(),
        form: SolutionForm::Waves(WaveForm {
            pl: pl.clone(),
            far_left: vs[0],
            fronts,
            events,
        }),
        t_end,
        initial_tv,
    })
}
