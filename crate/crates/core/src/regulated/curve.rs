use serde::{Deserialize, Serialize};

use super::RegulatedError;

/// A Lipschitz curve `t ↦ x(t)` stored as piecewise-linear samples.
///
/// Outside the sampled time range the curve is extended by its end values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Curve {
    points: Vec<[f64; 2]>,
}

impl TryFrom<Vec<[f64; 2]>> for Curve {
    type Error = RegulatedError;

    fn try_from(points: Vec<[f64; 2]>) -> Result<Self, Self::Error> {
        Curve::new(points.into_iter().map(|p| (p[0], p[1])).collect())
    }
}

impl From<Curve> for Vec<[f64; 2]> {
    fn from(c: Curve) -> Self {
        c.points
    }
}

impl Curve {
    /// Samples must have finite coordinates and strictly increasing times.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, RegulatedError> {
        if points.is_empty() {
            return Err(RegulatedError::InvalidCurve("no samples".into()));
        }
        for (k, &(t, x)) in points.iter().enumerate() {
            if !(t.is_finite() && x.is_finite()) {
                return Err(RegulatedError::InvalidCurve(format!(
                    "non-finite sample ({t}, {x})"
                )));
            }
            if k > 0 && t <= points[k - 1].0 {
                return Err(RegulatedError::InvalidCurve(format!(
                    "times not strictly increasing at sample {k}"
                )));
            }
        }
        Ok(Self {
            points: points.into_iter().map(|(t, x)| [t, x]).collect(),
        })
    }

    pub fn constant(x: f64) -> Self {
        Self {
            points: vec![[0.0, x]],
        }
    }

    /// `x(t) = x0 + c (t - t0)` on `[t0, t1]`.
    pub fn linear(t0: f64, t1: f64, x0: f64, c: f64) -> Self {
        Self {
            points: vec![[t0, x0], [t1, x0 + c * (t1 - t0)]],
        }
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().map(|p| (p[0], p[1]))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start_time(&self) -> f64 {
        self.points[0][0]
    }

    pub fn end_time(&self) -> f64 {
        self.points[self.points.len() - 1][0]
    }

    // index k with t_k <= t < t_{k+1}, clamped to valid segments
    fn segment(&self, t: f64) -> usize {
        let n = self.points.len();
        let k = self.points.partition_point(|p| p[0] <= t);
        k.saturating_sub(1).min(n.saturating_sub(2))
    }

    pub fn position(&self, t: f64) -> f64 {
        let n = self.points.len();
        if n == 1 || t <= self.points[0][0] {
            return self.points[0][1];
        }
        if t >= self.points[n - 1][0] {
            return self.points[n - 1][1];
        }
        let k = self.segment(t);
        let [t0, x0] = self.points[k];
        let [t1, x1] = self.points[k + 1];
        x0 + (x1 - x0) * (t - t0) / (t1 - t0)
    }

    /// Right-continuous slope; zero outside the sampled range. At the final sample the
    /// slope of the last segment is returned.
    pub fn slope(&self, t: f64) -> f64 {
        let n = self.points.len();
        if n == 1 || t < self.points[0][0] || t > self.points[n - 1][0] {
            return 0.0;
        }
        let k = self.segment(t);
        let [t0, x0] = self.points[k];
        let [t1, x1] = self.points[k + 1];
        (x1 - x0) / (t1 - t0)
    }

    /// Distinct segment slopes in time order.
    pub fn slopes(&self) -> Vec<f64> {
        self.points
            .windows(2)
            .map(|w| (w[1][1] - w[0][1]) / (w[1][0] - w[0][0]))
            .collect()
    }

    pub fn lipschitz(&self) -> f64 {
        self.slopes().into_iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    /// The curve on `[a, b]`, with samples inserted at both ends.
    pub fn restrict(&self, a: f64, b: f64) -> Curve {
        let mut pts = vec![(a, self.position(a))];
        pts.extend(self.points().filter(|&(t, _)| t > a && t < b));
        if b > a {
            pts.push((b, self.position(b)));
        }
        Curve {
            points: pts.into_iter().map(|(t, x)| [t, x]).collect(),
        }
    }

    /// `x(t) + dx`.
    pub fn shifted(&self, dx: f64) -> Curve {
        Curve {
            points: self.points.iter().map(|p| [p[0], p[1] + dx]).collect(),
        }
    }
}
